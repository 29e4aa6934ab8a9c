//! Human-readable summary of an output directory.

use std::fmt::Write as _;
use std::path::Path;

use fpp_lab::bench::parse_bench_report;
use fpp_lab::parse_fluctuation_csv;

use crate::acceptance::parse_acceptance_summary;
use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::manifest::{outputs_intact, RunManifest};

fn read(dir: &Path, file: &str) -> Result<String> {
    std::fs::read_to_string(dir.join(file)).map_err(|e| CliError::Corrupt(format!("{file}: {e}")))
}

/// Render the outputs recorded in `dir/manifest.json`. Every recorded file
/// must still match its digest. Wall-clock timings are left out so the text
/// depends on the outputs only.
pub fn render_report(dir: &Path) -> Result<String> {
    let manifest = RunManifest::load(dir)?;
    for t in &manifest.tasks {
        if !outputs_intact(dir, t) {
            return Err(CliError::Corrupt(format!("{}: outputs missing or changed since the run", t.experiment)));
        }
    }
    let cfg = &manifest.config;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "campaign: alpha={} d={} intensity={} replicas={} master_seed={}", cfg.alpha, cfg.dimension, cfg.intensity, cfg.replicas, cfg.master_seed).unwrap();
    if manifest.tasks.is_empty() {
        writeln!(w, "no experiments recorded").unwrap();
        return Ok(out);
    }

    if manifest.task(Experiment::Fluctuation).is_some() {
        let rows = parse_fluctuation_csv(&read(dir, "fluctuation.csv")?).map_err(|e| CliError::Corrupt(format!("fluctuation.csv: {e}")))?;
        writeln!(w, "\n{:>8} {:>12} {:>10} {:>10} {:>9} {:>10} {:>8}", "n", "T_mean", "psi_hat", "phi_hat", "g_hat", "fluct_lb", "excluded").unwrap();
        for r in &rows {
            writeln!(
                w,
                "{:>8} {:>12.4} {:>10.4} {:>10.4} {:>9.5} {:>10.4} {:>8}",
                r.n, r.mean_t, r.var_t, r.phi_hat, r.g_hat, r.fluct_lb, r.excluded
            )
            .unwrap();
        }
        writeln!(w, "\n(log phi_hat, fluct_lb)").unwrap();
        for r in &rows {
            writeln!(w, "{:.6} {:.6}", r.phi_hat.ln(), r.fluct_lb).unwrap();
        }
    } else if manifest.task(Experiment::Estimate).is_some() {
        let v: serde_json::Value = serde_json::from_str(&read(dir, "estimate.json")?).map_err(|e| CliError::Corrupt(format!("estimate.json: {e}")))?;
        let rows = v["estimates"].as_array().ok_or_else(|| CliError::Corrupt("estimate.json: no estimates".into()))?;
        writeln!(w, "\n{:>8} {:>12} {:>10}", "n", "T_mean", "psi_hat").unwrap();
        for r in rows {
            let num = |k: &str| r[k].as_f64().ok_or_else(|| CliError::Corrupt(format!("estimate.json: missing {k}")));
            writeln!(w, "{:>8} {:>12.4} {:>10.4}", num("n")?, num("mean_T")?, num("var_T")?).unwrap();
        }
    }

    let benches: Vec<_> = manifest.tasks.iter().filter(|t| t.experiment.name().starts_with("bench-")).collect();
    if !benches.is_empty() {
        writeln!(w, "\nbench").unwrap();
        for t in benches {
            let file = format!("{}.json", t.experiment);
            let report = parse_bench_report(&read(dir, &file)?).map_err(|e| CliError::Corrupt(format!("{file}: {e}")))?;
            let passed = report.checks.iter().filter(|c| c.passed).count();
            writeln!(
                w,
                "  {:<18} {} {passed}/{} checks",
                report.name,
                if report.passed() { "PASS" } else { "FAIL" },
                report.checks.len()
            )
            .unwrap();
            for c in report.checks.iter().filter(|c| !c.passed) {
                writeln!(w, "      failed: {} ({})", c.name, c.detail).unwrap();
            }
            for n in &report.notes {
                writeln!(w, "      note: {n}").unwrap();
            }
        }
    }

    if manifest.task(Experiment::Acceptance).is_some() {
        let criteria = parse_acceptance_summary(&read(dir, "acceptance.json")?).map_err(|e| CliError::Corrupt(format!("acceptance.json: {e}")))?;
        writeln!(w, "\nacceptance (properties; runtime budgets are in the manifest)").unwrap();
        for c in &criteria {
            writeln!(w, "  {:>2} {} {}: {}", c.id, if c.property { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
            for d in &c.diagnostics {
                writeln!(w, "       {d}").unwrap();
            }
        }
    }
    Ok(out)
}
