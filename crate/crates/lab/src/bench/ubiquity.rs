//! The ubiquity event: every ball `B(y + 2ck u, c)` with `2ck <= reach - 1`
//! holds a sample point.

use fpp_core::region::ball_volume;
use fpp_core::{build_index, sample_poisson, BoxRegion};
use serde::{Deserialize, Serialize};

use super::params::ubiquity_count;
use super::{BenchParams, EventEstimate};
use crate::campaign::{replica_seed, replicate, Stream};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UbiquityReport {
    pub reach: f64,
    pub c: f64,
    pub k_count: usize,
    pub estimate: EventEstimate,
    /// `(1 - exp(-intensity Vol B(c)))^k_count`.
    pub analytic: f64,
    /// `|p_hat - analytic|` in units of the binomial standard error at `analytic`.
    pub z_score: f64,
}

impl UbiquityReport {
    pub fn within_3_sigma(&self) -> bool {
        let sigma = self.estimate.sigma_at(self.analytic);
        (self.estimate.p_hat - self.analytic).abs() <= 3.0 * sigma
    }
}

/// The balls are centred on a ray at spacing `2c` and have radius `c`, so
/// their interiors are disjoint and the void events independent.
pub fn ubiquity_probability(reach: f64, c: f64, d: usize, intensity: f64) -> f64 {
    let k = ubiquity_count(reach, c);
    (1.0 - (-intensity * ball_volume(d, c)).exp()).powi(k as i32)
}

/// Monte Carlo frequency of the event for an explicit `reach`, drawing only
/// the box around the balls. `direction` need not be normalised.
pub fn ubiquity_at(
    reach: f64,
    c: f64,
    direction: &[f64],
    intensity: f64,
    replicas: usize,
    master: u64,
) -> Result<UbiquityReport> {
    let d = direction.len();
    let len = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(len > 0.0) {
        return Err(invalid("direction must be nonzero"));
    }
    if !(c > 0.0 && c <= 0.25) {
        return Err(invalid(format!("c must lie in (0, 1/4], got {c}")));
    }
    let k_count = ubiquity_count(reach, c);
    let centres: Vec<Vec<f64>> = (0..k_count)
        .map(|k| direction.iter().map(|v| 2.0 * c * k as f64 * v / len).collect())
        .collect();
    let hits: u64 = if centres.is_empty() {
        // no ball to fill: the event holds on every configuration
        replicas as u64
    } else {
        let lo: Vec<f64> = (0..d).map(|i| centres.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min) - c).collect();
        let hi: Vec<f64> = (0..d).map(|i| centres.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max) + c).collect();
        let region = BoxRegion::new(lo, hi)?;
        let outcomes: Vec<Result<bool>> = replicate(replicas, |r| {
            let seed = replica_seed(master, Stream::Ubiquity, reach, r);
            let sample = sample_poisson(&region, intensity, seed, d)?;
            if sample.is_empty() {
                return Ok(false);
            }
            let index = build_index(&sample, c)?;
            Ok(centres.iter().all(|p| index.any_in_ball(p, c)))
        });
        let mut hits = 0;
        for o in outcomes {
            hits += u64::from(o?);
        }
        hits
    };
    let analytic = ubiquity_probability(reach, c, d, intensity);
    let estimate = EventEstimate::new(format!("ubiquity k={k_count}"), hits, replicas as u64).with_analytic(analytic);
    let sigma = estimate.sigma_at(analytic);
    let z_score = if sigma > 0.0 {
        (estimate.p_hat - analytic).abs() / sigma
    } else if estimate.p_hat == analytic {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(UbiquityReport { reach, c, k_count, estimate, analytic, z_score })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GatedUbiquity {
    pub report: UbiquityReport,
    pub k_n: f64,
    /// `exp(-(1/16) log phi)`.
    pub lemma_bound: f64,
    pub within_gate: bool,
}

impl GatedUbiquity {
    pub fn bound_holds(&self) -> bool {
        self.report.analytic >= self.lemma_bound
    }
}

/// The event at scale `n` with reach `C_delta K_n`. With `require_gate` a
/// `theta` outside the gate is an error.
pub fn c_event(
    params: &BenchParams,
    phi: f64,
    direction: &[f64],
    intensity: f64,
    replicas: usize,
    master: u64,
    require_gate: bool,
) -> Result<GatedUbiquity> {
    if require_gate {
        params.require_gate()?;
    }
    if direction.len() != params.d {
        return Err(invalid("direction has the wrong dimension"));
    }
    let report = ubiquity_at(params.crossing_radius(phi), params.c_ubiq, direction, intensity, replicas, master)?;
    Ok(GatedUbiquity {
        report,
        k_n: params.k_n(phi),
        lemma_bound: (-phi.ln() / 16.0).exp(),
        within_gate: params.within_gate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_ball_closed_form() {
        let p = ubiquity_probability(1.0, 0.25, 2, 1.0);
        assert!((p - (1.0 - (-PI / 16.0).exp())).abs() < 1e-15);
        assert!((p - 0.1782).abs() < 1e-4);
    }

    #[test]
    fn empty_index_set_is_vacuous() {
        let r = ubiquity_at(0.99, 0.25, &[1.0, 0.0], 1.0, 50, 1).unwrap();
        assert_eq!(r.k_count, 0);
        assert_eq!(r.estimate.p_hat, 1.0);
        assert_eq!(r.analytic, 1.0);
        assert!(r.within_3_sigma());
    }

    #[test]
    fn gate_is_enforced_on_request() {
        let p = BenchParams::new(1.0, 0.5, 0.2, 2).unwrap();
        assert!(c_event(&p, 4.0, &[1.0, 0.0], 1.0, 10, 1, true).is_err());
        assert!(c_event(&p, 4.0, &[1.0, 0.0], 1.0, 10, 1, false).is_ok());
    }

    #[test]
    fn reruns_reproduce_hits() {
        let a = ubiquity_at(2.0, 0.2, &[1.0, 1.0], 1.0, 200, 9).unwrap();
        let b = ubiquity_at(2.0, 0.2, &[1.0, 1.0], 1.0, 200, 9).unwrap();
        assert_eq!(a, b);
    }
}
