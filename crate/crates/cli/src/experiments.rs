//! What each experiment name computes and which files it produces.

use std::fmt::Write as _;

use fpp_core::seed;
use fpp_lab::bench::midpoint::{argmin_lambda, event_a24_a25, midpoint_gain, DeviationThresholds};
use fpp_lab::bench::resampling::resampling_variance_experiment;
use fpp_lab::bench::rotation::{rotation_invariance_test, strip_control};
use fpp_lab::bench::ubiquity::c_event;
use fpp_lab::bench::vwx::membership_campaign;
use fpp_lab::bench::{
    build_lambda, nondecreasing_within_3_sigma, observations_csv, BenchParams, BenchReport, EventEstimate,
    LambdaFamily,
};
use fpp_lab::estimator::phi_hat;
use fpp_lab::{estimate_t, FluctuationReport, Setup, TEstimate};
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;

/// A file produced by an experiment, not yet written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub file: String,
    pub content: Vec<u8>,
}

impl Output {
    pub fn new(file: impl Into<String>, content: impl Into<Vec<u8>>) -> Self {
        Self { file: file.into(), content: content.into() }
    }
}

/// Shared state of one run: the T estimates are computed once and reused by
/// the fluctuation report and by every bench experiment that needs `phi_hat`.
pub struct Campaign {
    pub config: ExperimentConfig,
    pub setup: Setup,
    pub params: BenchParams,
    estimates: Option<Vec<TEstimate>>,
}

impl Campaign {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let setup = config.setup()?;
        let params = config.bench_params()?;
        Ok(Self { config, setup, params, estimates: None })
    }

    /// Seed a task runs under. The estimates use the master seed itself.
    pub fn task_seed(&self, e: Experiment) -> u64 {
        match e {
            Experiment::Estimate | Experiment::Fluctuation => self.config.master_seed,
            _ => seed::mix(self.config.master_seed, e.code()),
        }
    }

    pub fn estimates(&mut self) -> Result<&[TEstimate]> {
        if self.estimates.is_none() {
            let est = self
                .config
                .n_values_f64()
                .into_iter()
                .map(|n| estimate_t(&self.setup, n, self.config.replicas, self.config.master_seed))
                .collect::<fpp_lab::Result<Vec<_>>>()?;
            self.estimates = Some(est);
        }
        Ok(self.estimates.as_deref().expect("just filled"))
    }

    /// `(n, phi_hat(n))` over the sweep.
    pub fn phis(&mut self) -> Result<Vec<(f64, f64)>> {
        Ok(self.estimates()?.iter().map(|e| (e.n, phi_hat(e.n, e.stats.variance()))).collect())
    }

    pub fn execute(&mut self, e: Experiment) -> Result<Vec<Output>> {
        let seed = self.task_seed(e);
        match e {
            Experiment::Estimate => self.estimate(),
            Experiment::Fluctuation => self.fluctuation(),
            Experiment::BenchLambda => self.bench_lambda(seed),
            Experiment::BenchMidpoint => self.bench_midpoint(seed),
            Experiment::BenchArgmin => self.bench_argmin(seed),
            Experiment::BenchDeviation => self.bench_deviation(seed),
            Experiment::BenchMembership => self.bench_membership(seed),
            Experiment::BenchUbiquity => self.bench_ubiquity(seed),
            Experiment::BenchResampling => self.bench_resampling(seed),
            Experiment::BenchRotation => self.bench_rotation(seed),
            Experiment::Acceptance => unreachable!("the acceptance suite is run by the runner"),
        }
    }

    fn estimate(&mut self) -> Result<Vec<Output>> {
        let est = self.estimates()?;
        let mut csv = String::from("n,replica,T\n");
        let mut summary = Vec::new();
        for e in est {
            for (r, v) in e.values.iter().enumerate() {
                match v {
                    Some(t) => writeln!(csv, "{:?},{r},{t:?}", e.n),
                    None => writeln!(csv, "{:?},{r},", e.n),
                }
                .expect("string write");
            }
            summary.push(json!({
                "n": e.n,
                "count": e.stats.count(),
                "mean_T": e.stats.mean(),
                "var_T": e.stats.variance(),
                "std_err": e.stats.std_err(),
                "excluded": e.excluded,
                "tally": e.tally,
            }));
        }
        let json = serde_json::to_string_pretty(&json!({ "alpha": self.config.alpha, "d": self.config.dimension, "estimates": summary }))
            .expect("plain data serializes");
        Ok(vec![Output::new("estimate.csv", csv), Output::new("estimate.json", json)])
    }

    fn fluctuation(&mut self) -> Result<Vec<Output>> {
        let master = self.config.master_seed;
        let setup = self.setup.clone();
        let report = FluctuationReport::from_estimates(&setup, master, self.estimates()?)?;
        let diag: Vec<[f64; 2]> = report.diagnostic().into_iter().map(|(x, y)| [x, y]).collect();
        Ok(vec![
            Output::new("fluctuation.csv", report.to_csv()),
            Output::new("fluctuation.json", report.to_json()),
            Output::new("fluctuation_diagnostic.csv", observations_csv(["log_phi_hat", "fluct_lb"], &diag)),
        ])
    }

    fn families(&mut self) -> Result<Vec<(f64, f64, LambdaFamily)>> {
        let d = self.config.dimension;
        self.phis()?
            .into_iter()
            .map(|(n, phi)| Ok((n, phi, build_lambda(n, phi, d)?)))
            .collect()
    }

    fn report(&self, e: Experiment, seed: u64) -> BenchReport {
        BenchReport::new(
            e.name(),
            seed,
            json!({
                "alpha": self.config.alpha,
                "d": self.config.dimension,
                "intensity": self.config.intensity,
                "n_values": self.config.n_values,
                "replicas": self.config.replicas,
                "theta": self.params.theta,
                "delta": self.params.delta,
                "c_ubiq": self.params.c_ubiq,
                "gate": self.params.gate(),
            }),
        )
    }

    fn bench_lambda(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchLambda, seed);
        let mut rows = Vec::new();
        for (n, phi, fam) in self.families()? {
            let ok = fam.verify();
            report.check(
                format!("family conditions at n={n}"),
                ok.is_ok(),
                format!("phi_hat={phi:.4}, {} points, spacing {:.4}{}", fam.points.len(), fam.spacing, err_text(&ok)),
            );
            for (k, p) in fam.points.iter().enumerate() {
                rows.push([n, phi, k as f64, p[1]]);
            }
        }
        Ok(bench_outputs(&report, observations_csv(["n", "phi_hat", "index", "x2"], &rows)))
    }

    fn bench_midpoint(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchMidpoint, seed);
        let mut rows = Vec::new();
        for n in self.config.n_values_f64() {
            let m = midpoint_gain(&self.setup, n, self.config.replicas, seed)?;
            report.check(
                format!("T(a,0,b) >= T(a,b) at n={n}"),
                m.min_gain >= -1e-9,
                format!("min gain {:.3e}, mean {:.4} ± {:.4}", m.min_gain, m.stats.mean(), m.stats.ci95()),
            );
            rows.extend(m.gains.iter().enumerate().map(|(r, g)| [n, r as f64, *g]));
        }
        Ok(bench_outputs(&report, observations_csv(["n", "replica", "gain"], &rows)))
    }

    fn bench_argmin(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchArgmin, seed);
        let mut rows = Vec::new();
        for (n, phi, fam) in self.families()? {
            let k = self.params.k_n(phi);
            let a = argmin_lambda(&self.setup, n, &fam, k, self.config.replicas, seed)?;
            let total: f64 = a.events.iter().map(|e| e.p_hat).sum();
            report.check(format!("at most one argmin event at n={n}"), a.multiple == 0, format!("{} ties", a.ties));
            report.check(format!("event frequencies sum to at most 1 at n={n}"), total <= 1.0 + 1e-12, format!("sum {total:.4}"));
            for (i, (e, j)) in a.events.iter().zip(&a.joint).enumerate() {
                rows.push([n, i as f64, e.p_hat, j.p_hat, e.trials as f64]);
            }
            report.estimates.extend(a.events.into_iter().chain(a.joint).map(|e| tag(e, n)));
        }
        Ok(bench_outputs(&report, observations_csv(["n", "index", "p_argmin", "p_joint", "trials"], &rows)))
    }

    fn bench_deviation(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchDeviation, seed);
        let (mut sep, mut dev, mut both, mut rows) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (n, phi, fam) in self.families()? {
            let r = event_a24_a25(&self.setup, n, &fam, phi, DeviationThresholds::for_scale(n, phi), self.config.replicas, seed)?;
            rows.push([n, phi, r.separation.p_hat, r.deviation.p_hat, r.both.p_hat, r.chebyshev_shape]);
            sep.push(tag(r.separation, n));
            dev.push(tag(r.deviation, n));
            both.push(tag(r.both, n));
        }
        for (name, seq) in [("separation", &sep), ("deviation", &dev), ("both", &both)] {
            let p: Vec<String> = seq.iter().map(|e| format!("{:.3}", e.p_hat)).collect();
            report.check(format!("{name} frequency nondecreasing in n within 3 sigma"), nondecreasing_within_3_sigma(seq), p.join(", "));
        }
        report.estimates.extend(sep.into_iter().chain(dev).chain(both));
        Ok(bench_outputs(
            &report,
            observations_csv(["n", "phi_hat", "p_separation", "p_deviation", "p_both", "chebyshev_shape"], &rows),
        ))
    }

    fn bench_membership(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchMembership, seed);
        let mut rows = Vec::new();
        for (n, phi, fam) in self.families()? {
            let y = &fam.points[0];
            let m = membership_campaign(&self.setup, n, y, &self.params, phi, self.config.replicas, seed)?;
            report.check(format!("local optimality at n={n}"), m.audit_violations == 0, format!("{} violations", m.audit_violations));
            report.check(
                format!("jump bound on V at n={n}"),
                m.jump_violations == 0,
                format!("{} checked, {} vacuous, longest {:.3}", m.jumps_checked, m.jumps_vacuous, m.longest_jump_on_v),
            );
            report.check(
                format!("crossing witnesses satisfy B at n={n}"),
                m.b_event_at_witnesses == m.witnesses_checked,
                format!("{} of {}", m.b_event_at_witnesses, m.witnesses_checked),
            );
            if m.jumps_checked == 0 {
                report.notes.push(format!("n={n}: K_n={:.3e}, no entry or exit edge to check, the jump bound is vacuous", m.k_n));
            }
            rows.push([n, phi, m.k_n, m.reach, m.in_v.p_hat, m.in_w.p_hat, m.in_x.p_hat, m.jumps_checked as f64, m.jump_violations as f64]);
            report.estimates.extend([m.in_v, m.in_w, m.in_x, m.in_vw].into_iter().map(|e| tag(e, n)));
        }
        Ok(bench_outputs(
            &report,
            observations_csv(["n", "phi_hat", "k_n", "reach", "p_v", "p_w", "p_x", "jumps_checked", "jump_violations"], &rows),
        ))
    }

    fn bench_ubiquity(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchUbiquity, seed);
        let dir = self.setup.unit(0, 1.0);
        let mut rows = Vec::new();
        for (n, phi) in self.phis()? {
            let g = c_event(&self.params, phi, &dir, self.config.intensity, self.config.replicas, seed, false)?;
            let r = &g.report;
            report.check(
                format!("Monte Carlo matches closed form at n={n}"),
                r.within_3_sigma(),
                format!("{:.5} vs {:.5}, k={}", r.estimate.p_hat, r.analytic, r.k_count),
            );
            if g.within_gate {
                report.check(
                    format!("closed form above phi^(-1/16) at n={n}"),
                    g.bound_holds(),
                    format!("{:.5} vs {:.5}", r.analytic, g.lemma_bound),
                );
            } else {
                report.notes.push(format!("n={n}: theta is outside the gate, the lower bound is not claimed"));
            }
            if r.k_count == 0 {
                report.notes.push(format!("n={n}: reach {:.3e} holds no ball, the event is certain", r.reach));
            }
            rows.push([n, phi, r.reach, r.k_count as f64, r.estimate.p_hat, r.analytic, g.lemma_bound]);
            report.estimates.push(tag(r.estimate.clone().with_analytic(r.analytic), n));
        }
        Ok(bench_outputs(
            &report,
            observations_csv(["n", "phi_hat", "reach", "k_count", "p_hat", "analytic", "lemma_bound"], &rows),
        ))
    }

    fn bench_resampling(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchResampling, seed);
        let mut rows = Vec::new();
        for n in self.config.n_values_f64() {
            let r = resampling_variance_experiment(&self.setup, n, self.config.replicas, seed)?;
            let kept = (r.replicas - r.excluded) as u64;
            report.check(
                format!("planted replicas have T~ - T >= 1 at n={n}"),
                r.violations == 0,
                format!("{} of {kept} violate, diff in [{:.4}, {:.4}]", r.violations, r.min_diff, r.max_diff),
            );
            report.estimates.push(tag(EventEstimate::new("|T~ - T| >= 1", r.abs_gap_at_least_one as u64, kept), n));
            report.notes.push(format!("n={n}: P(E) = {:.4e}", r.p_event));
            rows.extend(r.rows.iter().map(|c| [n, c.replica as f64, c.t, c.t_tilde, c.t_tilde - c.t, f64::from(u8::from(c.clean))]));
        }
        Ok(bench_outputs(&report, observations_csv(["n", "replica", "T", "T_tilde", "diff", "clean"], &rows)))
    }

    fn bench_rotation(&mut self, seed: u64) -> Result<Vec<Output>> {
        let mut report = self.report(Experiment::BenchRotation, seed);
        let d = self.config.dimension;
        let dirs = vec![self.setup.unit(0, 1.0), vec![1.0; d]];
        let mut rows = Vec::new();
        for n in self.config.n_values_f64() {
            let r = rotation_invariance_test(&self.setup, n, &dirs, self.config.replicas, seed)?;
            let c = strip_control(&self.setup, n, &dirs, self.config.replicas, seed)?;
            let (p, pc) = (r.pairs[0].result.p_value, c.pairs[0].result.p_value);
            report.check(format!("axis and diagonal agree in law at n={n}"), r.passed(), format!("KS p = {p:.4}"));
            report.check(format!("strip control rejects at n={n}"), c.all_rejected(), format!("KS p = {pc:.3e}"));
            rows.push([n, r.pairs[0].result.statistic, p, c.pairs[0].result.statistic, pc]);
        }
        Ok(bench_outputs(&report, observations_csv(["n", "ks", "p_value", "control_ks", "control_p_value"], &rows)))
    }
}

fn tag(mut e: EventEstimate, n: f64) -> EventEstimate {
    e.name = format!("{} (n={n})", e.name);
    e
}

fn err_text<E: std::fmt::Display>(r: &std::result::Result<(), E>) -> String {
    match r {
        Ok(()) => String::new(),
        Err(e) => format!(": {e}"),
    }
}

fn bench_outputs(report: &BenchReport, csv: String) -> Vec<Output> {
    vec![Output::new(format!("{}.json", report.name), report.to_json()), Output::new(format!("{}.csv", report.name), csv)]
}
