//! Finite-`n` instances of the events, sets and inequalities behind the
//! fluctuation lower bound, with Monte Carlo frequencies and the closed forms
//! they can be compared against.

pub mod lambda;
pub mod midpoint;
pub mod params;
pub mod resampling;
pub mod rotation;
pub mod ubiquity;
pub mod vwx;

use fpp_core::stats::Z95;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use lambda::{build_lambda, symmetric_pair, LambdaFamily};
pub use params::BenchParams;

/// Hit frequency of one event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub name: String,
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci95: f64,
    pub analytic_bound: Option<f64>,
}

impl EventEstimate {
    pub fn new(name: impl Into<String>, hits: u64, trials: u64) -> Self {
        let p_hat = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let mut e = Self { name: name.into(), hits, trials, p_hat, ci95: 0.0, analytic_bound: None };
        e.ci95 = Z95 * e.sigma();
        e
    }

    pub fn with_analytic(mut self, value: f64) -> Self {
        self.analytic_bound = Some(value);
        self
    }

    /// Binomial standard error at `p_hat`.
    pub fn sigma(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    /// Binomial standard error at probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Each frequency is at least the previous one minus three combined
/// standard errors.
pub fn nondecreasing_within_3_sigma(seq: &[EventEstimate]) -> bool {
    seq.windows(2).all(|w| {
        let s = (w[0].sigma().powi(2) + w[1].sigma().powi(2)).sqrt();
        w[1].p_hat >= w[0].p_hat - 3.0 * s
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// JSON summary written for every bench experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub name: String,
    pub master_seed: u64,
    pub params: serde_json::Value,
    pub estimates: Vec<EventEstimate>,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl BenchReport {
    pub fn new(name: impl Into<String>, master_seed: u64, params: serde_json::Value) -> Self {
        Self {
            name: name.into(),
            master_seed,
            params,
            estimates: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Parse a bench report and check that every estimate is self-consistent.
pub fn parse_bench_report(text: &str) -> Result<BenchReport> {
    let report: BenchReport =
        serde_json::from_str(text).map_err(|e| LabError::Report(e.to_string()))?;
    for e in &report.estimates {
        if e.hits > e.trials {
            return Err(LabError::Report(format!("{}: more hits than trials", e.name)));
        }
        let p = if e.trials == 0 { 0.0 } else { e.hits as f64 / e.trials as f64 };
        if e.p_hat != p {
            return Err(LabError::Report(format!("{}: p_hat is not hits / trials", e.name)));
        }
    }
    Ok(report)
}

/// Rows of per-replica observables as CSV.
pub fn observations_csv<const K: usize>(header: [&str; K], rows: &[[f64; K]]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:?}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}
