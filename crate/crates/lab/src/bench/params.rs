//! Scale parameters of the ubiquity and jump arguments.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};

/// `C_delta = 4 (1 + 1/delta)`.
pub fn c_delta(delta: f64) -> f64 {
    4.0 * (1.0 + 1.0 / delta)
}

/// Upper limit `2^{-8d} c^d / C_delta` on `theta` for the ubiquity lower bound.
pub fn lemma_gate(d: usize, c: f64, delta: f64) -> f64 {
    (-8.0 * d as f64).exp2() * c.powi(d as i32) / c_delta(delta)
}

/// Number of `k >= 0` with `2 c k <= reach - 1`.
pub fn ubiquity_count(reach: f64, c: f64) -> usize {
    if reach < 1.0 {
        0
    } else {
        ((reach - 1.0) / (2.0 * c)).floor() as usize + 1
    }
}

/// Entry and exit jump limit `K^{1/(2 alpha)} + 1`.
pub fn jump_bound(k: f64, alpha: f64) -> f64 {
    k.powf(1.0 / (2.0 * alpha)) + 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    pub theta: f64,
    pub delta: f64,
    /// Radius of the ubiquity balls.
    pub c_ubiq: f64,
    pub d: usize,
}

impl BenchParams {
    pub fn new(theta: f64, delta: f64, c_ubiq: f64, d: usize) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(invalid(format!("theta must be positive, got {theta}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta must be positive, got {delta}")));
        }
        // balls of radius c at spacing 2c stay inside the ball of the event only for c <= 1/4
        if !(c_ubiq > 0.0 && c_ubiq <= 0.25) {
            return Err(invalid(format!("c must lie in (0, 1/4], got {c_ubiq}")));
        }
        if d < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {d}")));
        }
        Ok(Self { theta, delta, c_ubiq, d })
    }

    /// `theta` at `fraction` of the gate.
    pub fn gated(fraction: f64, delta: f64, c_ubiq: f64, d: usize) -> Result<Self> {
        Self::new(fraction * lemma_gate(d, c_ubiq, delta), delta, c_ubiq, d)
    }

    pub fn c_delta(&self) -> f64 {
        c_delta(self.delta)
    }

    pub fn gate(&self) -> f64 {
        lemma_gate(self.d, self.c_ubiq, self.delta)
    }

    pub fn within_gate(&self) -> bool {
        self.theta < self.gate()
    }

    pub fn require_gate(&self) -> Result<()> {
        if self.within_gate() {
            Ok(())
        } else {
            Err(LabError::Gate { theta: self.theta, gate: self.gate() })
        }
    }

    /// `K_n = theta log phi(n)`.
    pub fn k_n(&self, phi: f64) -> f64 {
        self.theta * phi.ln()
    }

    /// Radius `C_delta K_n` of the crossing ball.
    pub fn crossing_radius(&self, phi: f64) -> f64 {
        self.c_delta() * self.k_n(phi)
    }

    /// Number of ubiquity balls along one direction.
    pub fn k_count(&self, phi: f64) -> usize {
        ubiquity_count(self.crossing_radius(phi), self.c_ubiq)
    }
}
