//! Well-separated families of points on the hyperplane `x1 = 0`.

use fpp_core::region::{dist, norm};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative slack for the spacing and norm conditions, which are equalities
/// for the axis construction.
const SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaFamily {
    pub n: f64,
    pub phi_n: f64,
    pub points: Vec<Vec<f64>>,
    /// `sqrt(n) / sqrt(phi_n)`.
    pub spacing: f64,
}

/// Points `k s e2`, `k = 1..=floor(sqrt(phi_n))`, `s = sqrt(n / phi_n)`.
pub fn build_lambda(n: f64, phi_n: f64, d: usize) -> Result<LambdaFamily> {
    if d < 2 {
        return Err(invalid("the family needs a second axis"));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid(format!("n must be positive, got {n}")));
    }
    if !(phi_n >= 1.0 && phi_n.is_finite()) {
        return Err(invalid(format!("phi_n must be at least 1, got {phi_n}")));
    }
    let count = phi_n.sqrt().floor() as usize;
    let spacing = n.sqrt() / phi_n.sqrt();
    let points = (1..=count)
        .map(|k| {
            let mut p = vec![0.0; d];
            p[1] = k as f64 * spacing;
            p
        })
        .collect();
    Ok(LambdaFamily { n, phi_n, points, spacing })
}

/// Mirror pair `+-k s e2`. Satisfies the family conditions only when
/// `floor(sqrt(phi_n)) = 2`.
pub fn symmetric_pair(n: f64, phi_n: f64, d: usize, k: usize) -> Result<LambdaFamily> {
    let base = build_lambda(n, phi_n, d)?;
    if k == 0 || k > base.points.len() {
        return Err(invalid(format!("k must lie in 1..={}", base.points.len())));
    }
    let mut up = vec![0.0; d];
    up[1] = k as f64 * base.spacing;
    let mut down = up.clone();
    down[1] = -up[1];
    Ok(LambdaFamily { points: vec![up, down], ..base })
}

impl LambdaFamily {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Re-evaluate the three defining conditions: the count, the pairwise
    /// separation, the norm window and membership of the hyperplane.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let count = self.phi_n.sqrt().floor() as usize;
        if self.points.len() != count {
            return Err(format!("{} points, expected {count}", self.points.len()));
        }
        let sep = self.n.sqrt() * self.phi_n.powf(-0.5);
        let lo = sep * (1.0 - SLACK);
        let hi = self.n.sqrt() * (1.0 + SLACK);
        for (i, a) in self.points.iter().enumerate() {
            if a[0] != 0.0 {
                return Err(format!("point {i} is off the hyperplane"));
            }
            let r = norm(a);
            if r < lo || r > hi {
                return Err(format!("point {i} has norm {r} outside [{sep}, {}]", self.n.sqrt()));
            }
            for (j, b) in self.points.iter().enumerate().skip(i + 1) {
                if dist(a, b) < lo {
                    return Err(format!("points {i} and {j} closer than {sep}"));
                }
            }
        }
        Ok(())
    }
}
