//! Flat JSON campaign description.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fpp_lab::bench::BenchParams;
use fpp_lab::{Padding, Setup};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One unit of work a campaign can request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "estimate")]
    Estimate,
    #[serde(rename = "fluctuation")]
    Fluctuation,
    #[serde(rename = "bench-lambda")]
    BenchLambda,
    #[serde(rename = "bench-midpoint")]
    BenchMidpoint,
    #[serde(rename = "bench-argmin")]
    BenchArgmin,
    #[serde(rename = "bench-deviation")]
    BenchDeviation,
    #[serde(rename = "bench-membership")]
    BenchMembership,
    #[serde(rename = "bench-ubiquity")]
    BenchUbiquity,
    #[serde(rename = "bench-resampling")]
    BenchResampling,
    #[serde(rename = "bench-rotation")]
    BenchRotation,
    #[serde(rename = "acceptance")]
    Acceptance,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Estimate,
        Experiment::Fluctuation,
        Experiment::BenchLambda,
        Experiment::BenchMidpoint,
        Experiment::BenchArgmin,
        Experiment::BenchDeviation,
        Experiment::BenchMembership,
        Experiment::BenchUbiquity,
        Experiment::BenchResampling,
        Experiment::BenchRotation,
        Experiment::Acceptance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Estimate => "estimate",
            Experiment::Fluctuation => "fluctuation",
            Experiment::BenchLambda => "bench-lambda",
            Experiment::BenchMidpoint => "bench-midpoint",
            Experiment::BenchArgmin => "bench-argmin",
            Experiment::BenchDeviation => "bench-deviation",
            Experiment::BenchMembership => "bench-membership",
            Experiment::BenchUbiquity => "bench-ubiquity",
            Experiment::BenchResampling => "bench-resampling",
            Experiment::BenchRotation => "bench-rotation",
            Experiment::Acceptance => "acceptance",
        }
    }

    /// Fixed per-experiment code mixed into the master seed.
    pub fn code(self) -> u64 {
        Experiment::ALL.iter().position(|&e| e == self).expect("listed") as u64 + 100
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment \"{s}\"")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub alpha: f64,
    pub intensity: f64,
    pub n_values: Vec<u64>,
    pub replicas: usize,
    pub master_seed: u64,
    pub padding: Padding,
    pub theta: f64,
    pub delta: f64,
    pub c_ubiq: f64,
    pub experiments: Vec<Experiment>,
    pub output_dir: PathBuf,
    /// Worker threads; absent means one per available core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let (delta, c_ubiq) = (0.5, 0.2);
        let theta = 0.9 * fpp_lab::bench::params::lemma_gate(2, c_ubiq, delta);
        Self {
            dimension: 2,
            alpha: 2.0,
            intensity: 1.0,
            n_values: vec![8, 16, 32, 64, 128],
            replicas: 400,
            master_seed: 20240601,
            padding: Padding::Auto,
            theta,
            delta,
            c_ubiq,
            experiments: vec![Experiment::Estimate, Experiment::Fluctuation],
            output_dir: PathBuf::from("fpp-out"),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be a finite number > 1, got {}", self.alpha));
        }
        if self.dimension < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.dimension));
        }
        if !(self.intensity > 0.0) || !self.intensity.is_finite() {
            return bad(format!("intensity must be positive, got {}", self.intensity));
        }
        if self.replicas < 2 {
            return bad(format!("replicas must be at least 2, got {}", self.replicas));
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if self.n_values[0] == 0 || self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n_values must be positive and strictly increasing, got {:?}", self.n_values));
        }
        let mut seen = self.experiments.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return bad("an experiment is listed twice".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        self.bench_params()?;
        Ok(())
    }

    pub fn setup(&self) -> Result<Setup> {
        let mut setup = Setup::new(self.alpha, self.dimension).map_err(|e| CliError::Config(e.to_string()))?;
        setup.intensity = self.intensity;
        setup.padding = self.padding;
        Ok(setup)
    }

    pub fn bench_params(&self) -> Result<BenchParams> {
        BenchParams::new(self.theta, self.delta, self.c_ubiq, self.dimension)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn n_values_f64(&self) -> Vec<f64> {
        self.n_values.iter().map(|&n| n as f64).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Everything except where outputs go and how many threads compute them.
    pub fn same_campaign(&self, other: &ExperimentConfig) -> bool {
        let strip = |c: &ExperimentConfig| ExperimentConfig {
            experiments: Vec::new(),
            output_dir: PathBuf::new(),
            threads: None,
            ..c.clone()
        };
        strip(self) == strip(other)
    }
}

/// Parse and validate.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// `FPP_OUTPUT_DIR` and `FPP_THREADS` override the file.
pub fn apply_env(cfg: &mut ExperimentConfig) -> Result<()> {
    apply_overrides(cfg, std::env::var("FPP_OUTPUT_DIR").ok(), std::env::var("FPP_THREADS").ok())
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, out: Option<String>, threads: Option<String>) -> Result<()> {
    if let Some(dir) = out.filter(|d| !d.is_empty()) {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(t) = threads.filter(|t| !t.is_empty()) {
        let t: usize = t
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Config(format!("FPP_THREADS must be a positive integer, got \"{t}\"")))?;
        cfg.threads = Some(t);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_gated() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.bench_params().unwrap().within_gate());
    }

    #[test]
    fn invariants_are_enforced() {
        let base = ExperimentConfig::default();
        let cases: [fn(&mut ExperimentConfig); 7] = [
            |c| c.alpha = 1.0,
            |c| c.dimension = 1,
            |c| c.replicas = 1,
            |c| c.n_values.clear(),
            |c| c.n_values = vec![8, 8],
            |c| c.n_values = vec![16, 8],
            |c| c.experiments = vec![Experiment::Estimate, Experiment::Estimate],
        ];
        for f in cases {
            let mut c = base.clone();
            f(&mut c);
            assert!(matches!(c.validate(), Err(CliError::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn unknown_keys_and_names_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&ExperimentConfig::default().to_json()).unwrap();
        v["colour"] = "red".into();
        assert!(parse_config(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&ExperimentConfig::default().to_json()).unwrap();
        v["experiments"] = serde_json::json!(["bench-nothing"]);
        assert!(parse_config(&v.to_string()).is_err());
        assert!("bench-argmin".parse::<Experiment>().is_ok());
        assert!("bench".parse::<Experiment>().is_err());
    }

    #[test]
    fn env_style_overrides() {
        let mut c = ExperimentConfig::default();
        apply_overrides(&mut c, Some("/tmp/x".into()), Some("3".into())).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("/tmp/x"));
        assert_eq!(c.threads, Some(3));
        assert!(apply_overrides(&mut c, None, Some("zero".into())).is_err());
        assert!(apply_overrides(&mut c, None, Some("0".into())).is_err());
    }

    #[test]
    fn experiment_codes_are_distinct() {
        let mut codes: Vec<u64> = Experiment::ALL.iter().map(|e| e.code()).collect();
        codes.dedup();
        assert_eq!(codes.len(), Experiment::ALL.len());
    }
}
