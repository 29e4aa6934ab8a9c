//! The acceptance suite: eleven criteria, each reduced to a property verdict
//! plus, where one is stated, a runtime budget.

use std::fmt::Write as _;
use std::time::Instant;

use fpp_core::seed::{self, mix_all};
use fpp_core::{
    brute_force_passage_time, build_index, passage_time, passage_times_from, sample_poisson, AlphaParam, BoxRegion,
    GeodesicOptions, PoissonSample,
};
use fpp_lab::bench::resampling::resampling_variance_experiment;
use fpp_lab::bench::rotation::{rotation_invariance_test, strip_control};
use fpp_lab::bench::ubiquity::c_event;
use fpp_lab::bench::vwx::membership_campaign;
use fpp_lab::bench::{build_lambda, observations_csv, BenchParams, BenchReport};
use fpp_lab::campaign::replicate;
use fpp_lab::estimator::{doubling_sigma, fluct_lb_sigma, phi_hat};
use fpp_lab::{estimate_t, FluctuationReport, Setup, Tally, TEstimate};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::experiments::Output;

/// Problem sizes of the suite. [`Sizes::stated`] is the gate; the smaller
/// presets only exercise the plumbing.
#[derive(Clone, Debug)]
pub struct Sizes {
    pub oracle_instances: u64,
    pub oracle_max_points: usize,
    pub triangle_windows: u64,
    pub triangle_triples: u64,
    pub poisson_samples: usize,
    pub sweep: Vec<f64>,
    pub replicas: usize,
    pub resampling_n: f64,
    pub resampling_replicas: usize,
    pub ubiquity_replicas: usize,
    pub membership_replicas: usize,
    pub rotation_n: f64,
    pub rotation_replicas: usize,
    pub rotation_repetitions: u64,
    /// Run everything a second time and compare bytes.
    pub repeat: bool,
}

impl Sizes {
    pub fn stated() -> Self {
        Self {
            oracle_instances: 1000,
            oracle_max_points: 12,
            triangle_windows: 100,
            triangle_triples: 100,
            poisson_samples: 100_000,
            sweep: vec![8.0, 16.0, 32.0, 64.0, 128.0],
            replicas: 400,
            resampling_n: 10.0,
            resampling_replicas: 1000,
            ubiquity_replicas: 10_000,
            membership_replicas: 50,
            rotation_n: 32.0,
            rotation_replicas: 300,
            rotation_repetitions: 10,
            repeat: true,
        }
    }

    pub fn smoke() -> Self {
        Self {
            oracle_instances: 40,
            oracle_max_points: 12,
            triangle_windows: 3,
            triangle_triples: 20,
            poisson_samples: 2000,
            sweep: vec![4.0, 8.0],
            replicas: 60,
            resampling_n: 6.0,
            resampling_replicas: 30,
            ubiquity_replicas: 500,
            membership_replicas: 4,
            rotation_n: 6.0,
            rotation_replicas: 40,
            rotation_repetitions: 2,
            repeat: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    /// The stated property, independent of timing.
    pub property: bool,
    pub detail: String,
    pub diagnostics: Vec<String>,
    pub budget_seconds: Option<f64>,
    #[serde(skip, default)]
    pub seconds: f64,
}

impl CriterionResult {
    fn new(id: u8, name: &str, budget: Option<f64>) -> Self {
        Self {
            id,
            name: name.to_string(),
            property: false,
            detail: String::new(),
            diagnostics: Vec::new(),
            budget_seconds: budget,
            seconds: 0.0,
        }
    }

    pub fn within_budget(&self) -> bool {
        self.budget_seconds.is_none_or(|b| self.seconds <= b)
    }

    pub fn passed(&self) -> bool {
        self.property && self.within_budget()
    }

    /// One line for logs and the test harness.
    pub fn line(&self) -> String {
        let budget = match self.budget_seconds {
            Some(b) => format!(", budget {b:.0} s"),
            None => String::new(),
        };
        format!(
            "criterion {:>2} {} {}: {} ({:.1} s{budget})",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Clone, Debug)]
pub struct Suite {
    pub criteria: Vec<CriterionResult>,
    pub outputs: Vec<Output>,
}

impl Suite {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(CriterionResult::passed)
    }

    pub fn failures(&self) -> usize {
        self.criteria.iter().filter(|c| !c.passed()).count()
    }

    pub fn criterion(&self, id: u8) -> &CriterionResult {
        self.criteria.iter().find(|c| c.id == id).expect("every criterion is reported")
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.criteria).expect("plain data serializes")
    }
}

const SUBADDITIVITY_SLACK: f64 = 1e-9;
const SYMMETRY_REL: f64 = 1e-12;
const ORACLE_REL: f64 = 1e-12;

fn criterion_seed(master: u64, id: u8) -> u64 {
    seed::mix(master, 1000 + id as u64)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn setup() -> Setup {
    Setup::new(2.0, 2).expect("alpha 2 in the plane is valid")
}

/// Run `f`, time it, and turn an error into a failed criterion.
fn timed(
    id: u8,
    name: &str,
    budget: Option<f64>,
    f: impl FnOnce(&mut CriterionResult) -> fpp_lab::Result<()>,
) -> CriterionResult {
    let mut c = CriterionResult::new(id, name, budget);
    let start = Instant::now();
    if let Err(e) = f(&mut c) {
        c.property = false;
        c.detail = format!("error: {e}");
    }
    c.seconds = start.elapsed().as_secs_f64();
    c
}

/// State passed between criteria of one pass.
#[derive(Default)]
struct Pass {
    criteria: Vec<CriterionResult>,
    outputs: Vec<Output>,
    tally: Tally,
    estimates: Option<Vec<TEstimate>>,
}

pub fn run_suite(master: u64, sizes: &Sizes) -> Suite {
    let start = Instant::now();
    let first = run_pass(master, sizes);
    let mut criteria = first.criteria;
    let mut outputs = first.outputs;
    let mut c11 = CriterionResult::new(11, "reproducibility", Some(900.0));
    if sizes.repeat {
        let second = run_pass(master, sizes);
        let differing: Vec<&str> = outputs
            .iter()
            .zip(&second.outputs)
            .filter(|(a, b)| a != b)
            .map(|(a, _)| a.file.as_str())
            .collect();
        let same_set = outputs.len() == second.outputs.len();
        c11.property = same_set && differing.is_empty();
        c11.detail = if c11.property {
            format!("{} files byte-identical across two runs", outputs.len())
        } else {
            format!("differing: {differing:?}")
        };
    } else {
        c11.detail = "not repeated".into();
    }
    c11.seconds = start.elapsed().as_secs_f64();
    criteria.push(c11);
    let summary = serde_json::to_string_pretty(&criteria).expect("plain data serializes");
    outputs.push(Output::new("acceptance.json", summary));
    Suite { criteria, outputs }
}

fn run_pass(master: u64, sizes: &Sizes) -> Pass {
    let mut pass = Pass::default();
    oracle(&mut pass, master, sizes);
    triangle(&mut pass, master, sizes);
    poisson(&mut pass, master, sizes);
    fluctuation(&mut pass, master, sizes);
    resampling(&mut pass, master, sizes);
    ubiquity(&mut pass, master, sizes);
    audits(&mut pass, master, sizes);
    rotation(&mut pass, master, sizes);
    pass.criteria.sort_by_key(|c| c.id);
    pass
}

fn oracle(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 1);
    let mut rows = Vec::new();
    let mut tally = Tally::default();
    let c = timed(1, "oracle equivalence", Some(30.0), |c| {
        let side = 4.0;
        let region = BoxRegion::new(vec![0.0; 2], vec![side; 2])?;
        let opts = GeodesicOptions::default();
        let (mut mismatched, mut worst) = (0, 0.0f64);
        for i in 0..sizes.oracle_instances {
            let mut rng = seed::rng(seed::mix(seed, i));
            let count = rng.random_range(2..=sizes.oracle_max_points);
            let alpha = AlphaParam::new(if rng.random_bool(0.5) { 1.5 } else { 2.0 })?;
            let mut point = || vec![rng.random_range(0.0..side), rng.random_range(0.0..side)];
            let pts: Vec<Vec<f64>> = (0..count).map(|_| point()).collect();
            let (x, y) = (point(), point());
            let sample = PoissonSample::from_vecs(&pts, region.clone(), count as f64 / (side * side))?;
            let index = build_index(&sample, 1.0)?;
            let g = passage_time(&index, &x, &y, alpha, &opts)?;
            let (bf, _) = brute_force_passage_time(&pts, &x, &y, alpha)?;
            tally.record(&g);
            let rel = rel_diff(g.cost, bf);
            worst = worst.max(rel);
            mismatched += usize::from(rel > ORACLE_REL);
            rows.push([i as f64, count as f64, alpha.value(), g.cost, bf, f64::from(u8::from(g.certified))]);
        }
        c.property = mismatched == 0 && tally.uncertified == 0;
        c.detail = format!(
            "{} instances, {mismatched} mismatched, {} uncertified, worst relative difference {worst:.2e}",
            sizes.oracle_instances, tally.uncertified
        );
        Ok(())
    });
    pass.tally.absorb(&tally);
    pass.outputs.push(Output::new(
        "acceptance_oracle.csv",
        observations_csv(["instance", "points", "alpha", "engine", "brute_force", "certified"], &rows),
    ));
    pass.criteria.push(c);
}

fn triangle(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 2);
    let setup = setup();
    let mut rows: Vec<[f64; 6]> = Vec::new();
    let mut tally = Tally::default();
    let c = timed(2, "subadditivity and symmetry", None, |c| {
        let region = BoxRegion::new(vec![0.0; 2], vec![20.0; 2])?;
        let per_window: Vec<fpp_lab::Result<(Vec<[f64; 6]>, Tally)>> = replicate(sizes.triangle_windows as usize, |w| {
            let sample = sample_poisson(&region, setup.intensity, seed::mix(seed, w), 2)?;
            let index = build_index(&sample, setup.spacing())?;
            let mut rng = seed::rng(mix_all(seed, &[w, 1]));
            let mut point = || vec![rng.random_range(4.0..16.0), rng.random_range(4.0..16.0)];
            let mut out = Vec::new();
            let mut tally = Tally::default();
            for t in 0..sizes.triangle_triples {
                let (x, y, z) = (point(), point(), point());
                let from_x = passage_times_from(&index, &x, &[&y, &z], setup.alpha, &setup.geodesic)?;
                let from_y = passage_times_from(&index, &y, &[&z, &x], setup.alpha, &setup.geodesic)?;
                from_x.iter().chain(&from_y).for_each(|g| tally.record(g));
                out.push([w as f64, t as f64, from_x[1].cost, from_x[0].cost, from_y[0].cost, from_y[1].cost]);
            }
            Ok((out, tally))
        });
        for r in per_window {
            let (out, t) = r?;
            rows.extend(out);
            tally.absorb(&t);
        }
        let sub = rows.iter().filter(|r| r[2] > r[3] + r[4] + SUBADDITIVITY_SLACK).count();
        let sym = rows.iter().filter(|r| rel_diff(r[3], r[5]) > SYMMETRY_REL).count();
        c.property = sub == 0 && sym == 0 && tally.uncertified == 0;
        c.detail = format!(
            "{} triples, {sub} subadditivity and {sym} symmetry violations, {} uncertified",
            rows.len(),
            tally.uncertified
        );
        Ok(())
    });
    pass.tally.absorb(&tally);
    pass.outputs.push(Output::new(
        "acceptance_triangle.csv",
        observations_csv(["window", "triple", "T_xz", "T_xy", "T_yz", "T_yx"], &rows),
    ));
    pass.criteria.push(c);
}

fn poisson(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 3);
    let mut summary = serde_json::Value::Null;
    let c = timed(3, "Poisson sanity", Some(60.0), |c| {
        let region = BoxRegion::new(vec![-1.0; 2], vec![1.0; 2])?;
        let counts: Vec<fpp_lab::Result<(bool, f64)>> = replicate(sizes.poisson_samples, |r| {
            let s = sample_poisson(&region, 1.0, seed::mix(seed, r), 2)?;
            let void = s.points().all(|p| p[0] * p[0] + p[1] * p[1] > 1.0);
            let in_box = s.points().filter(|p| p[0] >= 0.0 && p[1] >= 0.0).count();
            Ok((void, in_box as f64))
        });
        let counts: Vec<(bool, f64)> = counts.into_iter().collect::<fpp_lab::Result<_>>()?;
        let n = counts.len() as f64;
        let p0 = (-std::f64::consts::PI).exp();
        let p_hat = counts.iter().filter(|c| c.0).count() as f64 / n;
        let sigma_void = (p0 * (1.0 - p0) / n).sqrt();
        let stats = fpp_core::StreamStats::from_values("points", counts.iter().map(|c| c.1));
        // Poisson(1): variance 1, fourth central moment 1 + 3
        let sigma_mean = (1.0 / n).sqrt();
        let sigma_var = ((4.0 - (n - 3.0) / (n - 1.0)) / n).sqrt();
        let z = [
            (p_hat - p0) / sigma_void,
            (stats.mean() - 1.0) / sigma_mean,
            (stats.variance() - 1.0) / sigma_var,
        ];
        c.property = z.iter().all(|z| z.abs() <= 3.0);
        c.detail = format!(
            "void {p_hat:.6} vs {p0:.6} (z {:.2}), count mean {:.5} (z {:.2}), variance {:.5} (z {:.2})",
            z[0],
            stats.mean(),
            z[1],
            stats.variance(),
            z[2]
        );
        summary = serde_json::json!({
            "samples": counts.len(),
            "void_frequency": p_hat,
            "void_probability": p0,
            "count_mean": stats.mean(),
            "count_variance": stats.variance(),
            "z_scores": z,
        });
        Ok(())
    });
    pass.outputs.push(Output::new(
        "acceptance_poisson.json",
        serde_json::to_string_pretty(&summary).expect("plain data serializes"),
    ));
    pass.criteria.push(c);
}

fn fluctuation(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 4);
    let setup = setup();
    let mut report = None;
    let mut c4 = timed(4, "time-constant subadditive trend", Some(300.0), |c| {
        let est: Vec<TEstimate> = sizes
            .sweep
            .iter()
            .map(|&n| estimate_t(&setup, n, sizes.replicas, seed))
            .collect::<fpp_lab::Result<_>>()?;
        let r = FluctuationReport::from_estimates(&setup, seed, &est)?;
        let mut bad = Vec::new();
        let mut margins = Vec::new();
        for w in r.rows.windows(2) {
            let slack = 2.0 * w[0].mean_t + 3.0 * doubling_sigma(&w[0], &w[1]) - w[1].mean_t;
            margins.push(format!("{}->{}: {slack:.3}", w[0].n, w[1].n));
            if slack < 0.0 {
                bad.push(w[1].n);
            }
        }
        c.property = bad.is_empty() && sizes.sweep.windows(2).all(|w| w[1] == 2.0 * w[0]);
        c.detail = format!("margins {}", margins.join(", "));
        for e in &est {
            pass.tally.absorb(&e.tally);
        }
        pass.estimates = Some(est);
        report = Some(r);
        Ok(())
    });
    let Some(r) = report else {
        let detail = c4.detail.clone();
        pass.criteria.push(c4);
        for (id, name) in [(5, "fluctuation nonnegativity"), (6, "variance positivity")] {
            let mut c = CriterionResult::new(id, name, None);
            c.detail = format!("no estimates: {detail}");
            pass.criteria.push(c);
        }
        return;
    };
    let excluded: usize = r.rows.iter().map(|row| row.excluded).sum();
    c4.diagnostics.push(format!("g_hat {:.5}, {excluded} replicas excluded", r.g_hat));

    let big = r.rows.last().expect("sweep is nonempty");
    let mut c5 = CriterionResult::new(5, "fluctuation nonnegativity", None);
    let small: Vec<_> = r.rows.iter().filter(|row| row.n < big.n && big.n % row.n == 0.0).collect();
    let worst = small
        .iter()
        .map(|row| row.fluct_lb / fluct_lb_sigma(row, big))
        .fold(f64::INFINITY, f64::min);
    c5.property = small.iter().all(|row| row.fluct_lb >= -3.0 * fluct_lb_sigma(row, big));
    c5.detail = format!("g_hat from N={}, smallest fluct_lb/sigma {worst:.2}", big.n);
    for (x, y) in r.diagnostic() {
        c5.diagnostics.push(format!("log phi_hat {x:.4}  fluct_lb {y:.4}"));
    }
    if let Some(fit) = &r.affine_fit {
        c5.diagnostics.push(format!("fluct_lb ~ {:.4} + {:.4} log phi_hat (top half)", fit.intercept, fit.slope));
    }

    let mut c6 = CriterionResult::new(6, "variance positivity", None);
    let margins: Vec<String> = r.rows.iter().map(|row| format!("{}: {:.3}", row.n, row.var_t - 3.0 * row.var_std_err())).collect();
    c6.property = r.rows.iter().all(|row| row.var_t - 3.0 * row.var_std_err() > 0.0);
    c6.detail = format!("psi_hat - 3 sigma: {}", margins.join(", "));

    let diag: Vec<[f64; 2]> = r.diagnostic().into_iter().map(|(x, y)| [x, y]).collect();
    pass.outputs.push(Output::new("acceptance_fluctuation.csv", r.to_csv()));
    pass.outputs.push(Output::new("acceptance_fluctuation.json", r.to_json()));
    pass.outputs.push(Output::new(
        "acceptance_fluctuation_diagnostic.csv",
        observations_csv(["log_phi_hat", "fluct_lb"], &diag),
    ));
    pass.criteria.extend([c4, c5, c6]);
}

fn resampling(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 7);
    let setup = setup();
    let mut rows = Vec::new();
    let c = timed(7, "resampling gap", Some(60.0), |c| {
        let r = resampling_variance_experiment(&setup, sizes.resampling_n, sizes.resampling_replicas, seed)?;
        c.property = r.violations == 0 && r.excluded == 0;
        c.detail = format!(
            "{} of {} replicas have T~ - T < 1, {} excluded, diff in [{:.4}, {:.4}]",
            r.violations, r.replicas, r.excluded, r.min_diff, r.max_diff
        );
        let kept = (r.replicas - r.excluded).max(1) as f64;
        c.diagnostics.push(format!("fraction with |T~ - T| >= 1: {:.4}", r.abs_gap_at_least_one as f64 / kept));
        c.diagnostics.push(format!("P(E) = {:.6e}", r.p_event));
        rows.extend(r.rows.iter().map(|x| [x.replica as f64, x.t, x.t_tilde, x.t_tilde - x.t, f64::from(u8::from(x.clean))]));
        Ok(())
    });
    pass.outputs.push(Output::new(
        "acceptance_resampling.csv",
        observations_csv(["replica", "T", "T_tilde", "diff", "clean"], &rows),
    ));
    pass.criteria.push(c);
}

fn phis(pass: &Pass) -> fpp_lab::Result<Vec<(f64, f64)>> {
    let est = pass
        .estimates
        .as_ref()
        .ok_or_else(|| fpp_lab::LabError::Invalid("the time-constant sweep did not complete".into()))?;
    Ok(est.iter().map(|e| (e.n, phi_hat(e.n, e.stats.variance()))).collect())
}

fn gated_params() -> BenchParams {
    BenchParams::gated(0.9, 0.5, 0.2, 2).expect("stated parameters are valid")
}

fn ubiquity(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 8);
    let mut report = BenchReport::new("acceptance-ubiquity", seed, serde_json::Value::Null);
    let c = timed(8, "ubiquity event", None, |c| {
        let params = gated_params();
        report.params = serde_json::json!({"theta": params.theta, "delta": params.delta, "c": params.c_ubiq, "gate": params.gate()});
        let dir = [1.0, 0.0];
        let mut ok = true;
        let mut parts = Vec::new();
        for (n, phi) in phis(pass)? {
            let g = c_event(&params, phi, &dir, 1.0, sizes.ubiquity_replicas, seed::mix(seed, n.to_bits()), true)?;
            let r = &g.report;
            let this = r.within_3_sigma() && g.bound_holds();
            ok &= this;
            parts.push(format!("n={n}: k={} p_hat {:.4} closed {:.4} bound {:.4}", r.k_count, r.estimate.p_hat, r.analytic, g.lemma_bound));
            report.check(format!("n={n}"), this, format!("z {:.2}", r.z_score));
            report.estimates.push(r.estimate.clone().with_analytic(r.analytic));
        }
        c.property = ok;
        c.detail = parts.join("; ");
        if report.estimates.iter().all(|e| e.analytic_bound == Some(1.0)) {
            c.diagnostics.push(format!(
                "theta = {:.3e} gives a crossing reach below one ball spacing at every n, so the event is certain",
                params.theta
            ));
        }
        // above the gate the chain holds a couple of balls and the closed form is testable
        let wide = BenchParams::new(0.1, 0.5, 0.2, 2)?;
        let phi = phis(pass)?.last().map(|p| p.1).unwrap_or(1.0);
        let g = c_event(&wide, phi, &dir, 1.0, sizes.ubiquity_replicas, seed::mix(seed, 1), false)?;
        c.diagnostics.push(format!(
            "theta 0.1: k={} p_hat {:.4} closed {:.4} (z {:.2}), phi^(-1/16) {:.4}",
            g.report.k_count, g.report.estimate.p_hat, g.report.analytic, g.report.z_score, g.lemma_bound
        ));
        report.notes.extend(c.diagnostics.iter().cloned());
        Ok(())
    });
    pass.outputs.push(Output::new("acceptance_ubiquity.json", report.to_json()));
    pass.criteria.push(c);
}

fn audits(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 9);
    let setup = setup();
    let mut report = BenchReport::new("acceptance-audits", seed, serde_json::Value::Null);
    let c = timed(9, "geodesic audits", None, |c| {
        let params = gated_params();
        let mut tally = pass.tally.clone();
        let (mut jumps, mut vacuous, mut violations) = (0, 0, 0);
        for (n, phi) in phis(pass)? {
            let y = build_lambda(n, phi, 2)?.points[0].clone();
            let m = membership_campaign(&setup, n, &y, &params, phi, sizes.membership_replicas, seed)?;
            tally.absorb(&m.tally);
            jumps += m.jumps_checked;
            vacuous += m.jumps_vacuous;
            violations += m.jump_violations;
            report.check(format!("n={n}"), m.audit_violations == 0 && m.jump_violations == 0, format!(
                "V {:.3} W {:.3} X {:.3}, {} jumps checked",
                m.in_v.p_hat, m.in_w.p_hat, m.in_x.p_hat, m.jumps_checked
            ));
            report.estimates.extend([m.in_v, m.in_w, m.in_x]);
        }
        c.property = tally.audit_violations == 0 && violations == 0;
        c.detail = format!(
            "{} geodesics, {} local-optimality violations, {jumps} jump checks on V, {violations} violations",
            tally.geodesics, tally.audit_violations
        );
        if jumps == 0 {
            c.diagnostics.push(format!(
                "jump bound vacuous at the gated theta: {vacuous} replicas on V had no edge entering the crossing ball"
            ));
        }
        // a theta large enough for edges to cross the ball, reported only
        let wide = BenchParams::new(0.25, 0.5, 0.2, 2)?;
        if let Some(&(n, phi)) = phis(pass)?.get(1) {
            let y = build_lambda(n, phi, 2)?.points[0].clone();
            let m = membership_campaign(&setup, n, &y, &wide, phi, 20.min(sizes.membership_replicas.max(2)), seed::mix(seed, 1))?;
            c.diagnostics.push(format!(
                "theta 0.25 at n={n}: V {:.3}, {} jumps checked, {} over the bound, longest {:.3}",
                m.in_v.p_hat, m.jumps_checked, m.jump_violations, m.longest_jump_on_v
            ));
        }
        report.notes.extend(c.diagnostics.iter().cloned());
        Ok(())
    });
    pass.outputs.push(Output::new("acceptance_audits.json", report.to_json()));
    pass.criteria.push(c);
}

fn rotation(pass: &mut Pass, master: u64, sizes: &Sizes) {
    let seed = criterion_seed(master, 10);
    let setup = setup();
    let mut rows = Vec::new();
    let c = timed(10, "rotation invariance", None, |c| {
        let dirs = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        let mut ok = 0;
        for rep in 0..sizes.rotation_repetitions {
            let r = rotation_invariance_test(&setup, sizes.rotation_n, &dirs, sizes.rotation_replicas, seed::mix(seed, rep))?;
            ok += u64::from(r.passed());
            let k = &r.pairs[0].result;
            rows.push([rep as f64, k.statistic, k.p_value, r.excluded as f64]);
        }
        let control = strip_control(&setup, sizes.rotation_n, &dirs, sizes.rotation_replicas, seed)?;
        let needed = (sizes.rotation_repetitions * 8).div_ceil(10);
        c.property = ok >= needed && control.all_rejected();
        c.detail = format!(
            "{ok} of {} repetitions not rejected (need {needed}), strip control p = {:.2e}",
            sizes.rotation_repetitions, control.pairs[0].result.p_value
        );
        rows.push([-1.0, control.pairs[0].result.statistic, control.pairs[0].result.p_value, 0.0]);
        Ok(())
    });
    pass.outputs.push(Output::new(
        "acceptance_rotation.csv",
        observations_csv(["repetition", "ks", "p_value", "excluded"], &rows),
    ));
    pass.criteria.push(c);
}

/// Criteria from a stored `acceptance.json`, timings not included.
pub fn parse_acceptance_summary(text: &str) -> serde_json::Result<Vec<CriterionResult>> {
    serde_json::from_str(text)
}

/// Text block for the console and for `report`.
pub fn render(criteria: &[CriterionResult]) -> String {
    let mut out = String::new();
    for c in criteria {
        writeln!(out, "{}", c.line()).expect("string write");
        for d in &c.diagnostics {
            writeln!(out, "    {d}").expect("string write");
        }
    }
    out
}
