//! Coupled samples that differ only inside `B(0, 2)`: `Ξ` is empty there,
//! `Ξ̃` has points in `B(0, 1)` and none in the annulus. The passage-time
//! change `T̃_n - T_n` drives the variance lower bound.

use fpp_core::point_process::event_e_probability;
use fpp_core::{build_index, passage_time, plant_event_e, seed, PoissonSample};
use serde::{Deserialize, Serialize};

use crate::campaign::{bounding_box, grow, padded, replica_seed, replicate, Setup, Stream, Tally};
use crate::error::{invalid, Result};

/// Tolerance on `T̃_n - T_n >= 1`.
pub const GAP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledReplica {
    pub replica: u64,
    pub seed: u64,
    pub seed2: u64,
    pub t: f64,
    pub t_tilde: f64,
    /// Nearest point to the origin in each sample.
    pub d0: Vec<f64>,
    pub d0_tilde: Vec<f64>,
    pub clean: bool,
}

impl CoupledReplica {
    pub fn diff(&self) -> f64 {
        self.t_tilde - self.t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResamplingReport {
    pub n: f64,
    pub replicas: usize,
    /// Replicas with `T̃_n - T_n < 1 - GAP_TOLERANCE`.
    pub violations: usize,
    /// Replicas with `|T̃_n - T_n| >= 1 - GAP_TOLERANCE`.
    pub abs_gap_at_least_one: usize,
    pub min_diff: f64,
    pub max_diff: f64,
    /// Closed-form probability of the planted event.
    pub p_event: f64,
    /// `Var T_n >= p_event` when every replica has `|T̃_n - T_n| >= 1`.
    pub implied_variance_bound: f64,
    pub excluded: usize,
    pub rows: Vec<CoupledReplica>,
}

impl ResamplingReport {
    pub fn violating(&self) -> impl Iterator<Item = &CoupledReplica> {
        self.rows.iter().filter(|r| r.clean && r.diff() < 1.0 - GAP_TOLERANCE)
    }
}

/// `(T, T~, D(0), D~(0), tally)`.
type PairSolution = (f64, f64, Vec<f64>, Vec<f64>, Tally);

fn solve_pair(setup: &Setup, xi: &PoissonSample, tilde: &PoissonSample, n: f64) -> Result<PairSolution> {
    let origin = vec![0.0; setup.d];
    let target = setup.unit(0, n);
    let mut tally = Tally::default();
    let ix = build_index(xi, setup.spacing())?;
    let it = build_index(tilde, setup.spacing())?;
    let g = passage_time(&ix, &origin, &target, setup.alpha, &setup.geodesic)?;
    let gt = passage_time(&it, &origin, &target, setup.alpha, &setup.geodesic)?;
    tally.record(&g);
    tally.record(&gt);
    Ok((g.cost, gt.cost, ix.nearest(&origin)?, it.nearest(&origin)?, tally))
}

/// Plant the event on `replicas` coupled pairs and compare `T_n` with `T̃_n`.
/// Windows grow with a shared shell so the pair stays coupled.
pub fn resampling_variance_experiment(setup: &Setup, n: f64, replicas: usize, master: u64) -> Result<ResamplingReport> {
    if !(n > 0.0) {
        return Err(invalid("n must be positive"));
    }
    let origin = vec![0.0; setup.d];
    let target = setup.unit(0, n);
    let (lo, hi) = bounding_box(&[origin.clone(), target.clone()]);
    let width0 = setup.padding.width(n).max(3.0);
    let rows: Vec<Result<CoupledReplica>> = replicate(replicas, |r| {
        let s1 = replica_seed(master, Stream::Resampling, n, r);
        let s2 = seed::mix(s1, 1);
        let mut width = width0;
        let region = padded(&lo, &hi, width)?;
        let (mut xi, mut tilde) = plant_event_e(&region, setup.intensity, s1, s2)?;
        let mut step = 0;
        loop {
            let (t, t_tilde, d0, d0_tilde, tally) = solve_pair(setup, &xi, &tilde, n)?;
            if tally.clean() || step == setup.max_extensions {
                return Ok(CoupledReplica { replica: r, seed: s1, seed2: s2, t, t_tilde, d0, d0_tilde, clean: tally.clean() });
            }
            step += 1;
            width *= 2.0;
            let region = padded(&lo, &hi, width)?;
            xi = grow(&xi, &region, s1, step)?;
            tilde = grow(&tilde, &region, s1, step)?;
        }
    });
    let rows: Vec<CoupledReplica> = rows.into_iter().collect::<Result<_>>()?;
    let clean: Vec<&CoupledReplica> = rows.iter().filter(|r| r.clean).collect();
    let diffs: Vec<f64> = clean.iter().map(|r| r.diff()).collect();
    let p_event = event_e_probability(setup.d, setup.intensity);
    Ok(ResamplingReport {
        n,
        replicas,
        violations: diffs.iter().filter(|&&x| x < 1.0 - GAP_TOLERANCE).count(),
        abs_gap_at_least_one: diffs.iter().filter(|x| x.abs() >= 1.0 - GAP_TOLERANCE).count(),
        min_diff: diffs.iter().copied().fold(f64::INFINITY, f64::min),
        max_diff: diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        p_event,
        implied_variance_bound: p_event,
        excluded: rows.len() - clean.len(),
        rows,
    })
}
