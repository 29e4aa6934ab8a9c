//! Equality in law of `T(0, n u)` across directions `u`, via pairwise
//! two-sample Kolmogorov–Smirnov tests.

use fpp_core::ks::{ks_two_sample, KsResult};
use fpp_core::{build_index, passage_time, sample_poisson, seed, BoxRegion};
use serde::{Deserialize, Serialize};

use crate::campaign::{bounding_box, replica_seed, replicate, solve_in_window, Setup, Stream};
use crate::error::{invalid, Result};

/// A pair passes when its p-value exceeds this.
pub const KS_LEVEL: f64 = 0.01;
/// Fraction of passing pairs the campaign needs.
pub const PASS_FRACTION: f64 = 0.8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsPair {
    pub i: usize,
    pub j: usize,
    pub result: KsResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationReport {
    pub n: f64,
    pub directions: Vec<Vec<f64>>,
    pub samples: Vec<Vec<f64>>,
    pub pairs: Vec<KsPair>,
    pub pass_fraction: f64,
    pub excluded: usize,
}

impl RotationReport {
    pub fn passed(&self) -> bool {
        self.pass_fraction >= PASS_FRACTION
    }

    /// Every pair rejected at [`KS_LEVEL`].
    pub fn all_rejected(&self) -> bool {
        self.pairs.iter().all(|p| p.result.p_value <= KS_LEVEL)
    }
}

fn unit(u: &[f64]) -> Result<Vec<f64>> {
    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(len > 0.0) {
        return Err(invalid("direction must be nonzero"));
    }
    Ok(u.iter().map(|v| v / len).collect())
}

fn pairwise(n: f64, directions: Vec<Vec<f64>>, samples: Vec<Vec<f64>>, excluded: usize) -> RotationReport {
    let mut pairs = Vec::new();
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            pairs.push(KsPair { i, j, result: ks_two_sample(&samples[i], &samples[j]) });
        }
    }
    let ok = pairs.iter().filter(|p| p.result.p_value > KS_LEVEL).count();
    let pass_fraction = if pairs.is_empty() { 1.0 } else { ok as f64 / pairs.len() as f64 };
    RotationReport { n, directions, samples, pairs, pass_fraction, excluded }
}

fn direction_seed(master: u64, n: f64, dir: usize, r: u64) -> u64 {
    seed::mix(replica_seed(master, Stream::Rotation, n, r), dir as u64)
}

/// Independent padded samples of `T(0, n u)` for every direction.
pub fn rotation_invariance_test(
    setup: &Setup,
    n: f64,
    directions: &[Vec<f64>],
    replicas: usize,
    master: u64,
) -> Result<RotationReport> {
    if directions.len() < 2 {
        return Err(invalid("need at least two directions"));
    }
    let dirs: Vec<Vec<f64>> = directions.iter().map(|u| unit(u)).collect::<Result<_>>()?;
    let origin = vec![0.0; setup.d];
    let width = setup.padding.width(n);
    let mut samples = Vec::new();
    let mut excluded = 0;
    for (k, u) in dirs.iter().enumerate() {
        if u.len() != setup.d {
            return Err(invalid("direction has the wrong dimension"));
        }
        let target: Vec<f64> = u.iter().map(|v| v * n).collect();
        let (lo, hi) = bounding_box(&[origin.clone(), target.clone()]);
        let values: Vec<Result<Option<f64>>> = replicate(replicas, |r| {
            let s = direction_seed(master, n, k, r);
            let run = solve_in_window(setup, &lo, &hi, width, s, |index, tally| {
                let g = passage_time(index, &origin, &target, setup.alpha, &setup.geodesic)?;
                tally.record(&g);
                Ok(g.cost)
            })?;
            Ok(run.tally.clean().then_some(run.value))
        });
        let mut kept = Vec::with_capacity(replicas);
        for v in values {
            match v? {
                Some(t) => kept.push(t),
                None => excluded += 1,
            }
        }
        samples.push(kept);
    }
    Ok(pairwise(n, dirs, samples, excluded))
}

/// Negative control: every direction is sampled in the same thin strip
/// `[-1, n + 1] x [-1, 1]^{d-1}` along `e1`, with no padding and no growth.
/// The law of `T` then depends on the direction and the test should reject.
pub fn strip_control(
    setup: &Setup,
    n: f64,
    directions: &[Vec<f64>],
    replicas: usize,
    master: u64,
) -> Result<RotationReport> {
    let dirs: Vec<Vec<f64>> = directions.iter().map(|u| unit(u)).collect::<Result<_>>()?;
    let mut lo = vec![-1.0; setup.d];
    let mut hi = vec![1.0; setup.d];
    hi[0] = n + 1.0;
    lo[0] = -1.0;
    let region = BoxRegion::new(lo, hi)?;
    let origin = vec![0.0; setup.d];
    let mut samples = Vec::new();
    for (k, u) in dirs.iter().enumerate() {
        let target: Vec<f64> = u.iter().map(|v| v * n).collect();
        let values: Vec<Result<f64>> = replicate(replicas, |r| {
            let s = seed::mix(direction_seed(master, n, k, r), Stream::NegativeControl as u64);
            let sample = sample_poisson(&region, setup.intensity, s, setup.d)?;
            let index = build_index(&sample, setup.spacing())?;
            Ok(passage_time(&index, &origin, &target, setup.alpha, &setup.geodesic)?.cost)
        });
        samples.push(values.into_iter().collect::<Result<Vec<f64>>>()?);
    }
    Ok(pairwise(n, dirs, samples, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_direction_twice_is_not_rejected() {
        let setup = Setup::new(2.0, 2).unwrap();
        let dirs = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let r = rotation_invariance_test(&setup, 6.0, &dirs, 60, 4).unwrap();
        assert_eq!(r.pairs.len(), 1);
        // different seeds per direction index, so the two samples differ
        assert_ne!(r.samples[0], r.samples[1]);
        assert!(r.pairs[0].result.p_value > 0.0);
    }

    #[test]
    fn strip_control_rejects() {
        let setup = Setup::new(2.0, 2).unwrap();
        let d = std::f64::consts::FRAC_1_SQRT_2;
        let dirs = vec![vec![1.0, 0.0], vec![d, d]];
        let r = strip_control(&setup, 10.0, &dirs, 60, 4).unwrap();
        assert!(r.all_rejected(), "{:?}", r.pairs);
    }

    #[test]
    fn needs_two_directions() {
        let setup = Setup::new(2.0, 2).unwrap();
        assert!(rotation_invariance_test(&setup, 6.0, &[vec![1.0, 0.0]], 10, 1).is_err());
    }
}
