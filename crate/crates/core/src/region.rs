//! Axis-aligned boxes and a few Euclidean helpers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite simulation window `[lo, hi)` in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::invalid("box must have at least one coordinate"));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) {
                return Err(Error::invalid(format!("non-finite bound on axis {i}")));
            }
            if l >= h {
                return Err(Error::invalid(format!(
                    "degenerate box on axis {i}: {l} >= {h}"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Cube `center ± half` on every axis.
    pub fn cube(center: &[f64], half: f64) -> Result<Self> {
        Self::new(
            center.iter().map(|c| c - half).collect(),
            center.iter().map(|c| c + half).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.extent(i)).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.extent(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    /// Half-open membership `lo <= p < hi`, the convention samples are drawn with.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| *l <= *x && *x < *h)
    }

    /// Closed membership `lo <= p <= hi`.
    pub fn contains_closed(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| *l <= *x && *x <= *h)
    }

    pub fn contains_region(&self, other: &BoxRegion) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// True when the closed ball `B(center, radius)` lies inside the closed box.
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        center.len() == self.dim()
            && (0..self.dim())
                .all(|i| self.lo[i] <= center[i] - radius && center[i] + radius <= self.hi[i])
    }

    /// True when the closed ball meets the closed box.
    pub fn intersects_ball(&self, center: &[f64], radius: f64) -> bool {
        self.distance_to(center) <= radius
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let gap = (self.lo[i] - p[i]).max(p[i] - self.hi[i]).max(0.0);
                gap * gap
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior point to the nearest face.
    pub fn distance_to_boundary(&self, p: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| (p[i] - self.lo[i]).min(self.hi[i] - p[i]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn intersection(&self, other: &BoxRegion) -> Option<BoxRegion> {
        if other.dim() != self.dim() {
            return None;
        }
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(*b))
            .collect();
        BoxRegion::new(lo, hi).ok()
    }

    /// Bounding box of the ball `B(center, radius)`.
    pub fn ball_bounds(center: &[f64], radius: f64) -> Result<BoxRegion> {
        BoxRegion::cube(center, radius)
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2π / d
    let even = d.is_multiple_of(2);
    let mut v = if even { 1.0 } else { 2.0 };
    let mut k = if even { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

pub fn ball_volume(d: usize, radius: f64) -> f64 {
    unit_ball_volume(d) * radius.powi(d as i32)
}

/// Probability that a Poisson process of the given intensity leaves `B(r)` empty.
pub fn void_probability(d: usize, intensity: f64, radius: f64) -> f64 {
    (-intensity * ball_volume(d, radius)).exp()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lexicographic order on coordinates; the tie rule used throughout the crate.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.len().cmp(&b.len())
}
