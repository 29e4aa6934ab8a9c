//! Mergeable running moments.
//!
//! Central moments up to the fourth are tracked so that the sampling error of
//! the variance itself is available. Updates and merges use the pairwise
//! formulas of Pébay (2008); a single observation is a merge with a one-point
//! accumulator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normal quantile used for the reported 95% intervals.
pub const Z95: f64 = 1.96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamStats {
    count: u64,
    mean: f64,
    /// sum of squared deviations
    m2: f64,
    m3: f64,
    m4: f64,
    units: String,
}

impl StreamStats {
    pub fn new(units: impl Into<String>) -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            m3: 0.0,
            m4: 0.0,
            units: units.into(),
        }
    }

    pub fn from_values(units: impl Into<String>, values: impl IntoIterator<Item = f64>) -> Self {
        let mut s = Self::new(units);
        for v in values {
            s.push(v);
        }
        s
    }

    pub fn push(&mut self, x: f64) {
        let one = StreamStats {
            count: 1,
            mean: x,
            m2: 0.0,
            m3: 0.0,
            m4: 0.0,
            units: String::new(),
        };
        self.absorb(&one);
    }

    /// Pool two accumulators. Fails when the unit annotations differ.
    pub fn merge(&self, other: &StreamStats) -> Result<StreamStats> {
        if self.units != other.units {
            return Err(Error::UnitMismatch(self.units.clone(), other.units.clone()));
        }
        let mut out = self.clone();
        out.absorb(other);
        Ok(out)
    }

    fn absorb(&mut self, b: &StreamStats) {
        if b.count == 0 {
            return;
        }
        if self.count == 0 {
            let units = std::mem::take(&mut self.units);
            *self = b.clone();
            self.units = units;
            return;
        }
        let na = self.count as f64;
        let nb = b.count as f64;
        let n = na + nb;
        let delta = b.mean - self.mean;
        let d2 = delta * delta;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + b.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + b.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * b.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + b.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * b.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * b.m3 - nb * self.m3) / n;
        self.count += b.count;
        self.mean = mean;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance `m2 / (count - 1)`.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    /// Half width of the normal-approximation 95% interval for the mean.
    pub fn ci95(&self) -> f64 {
        Z95 * self.std_err()
    }

    /// Plug-in standard error of the sample variance,
    /// `sqrt((mu4 - (n - 3) / (n - 1) * s^4) / n)`.
    pub fn variance_std_err(&self) -> f64 {
        if self.count < 4 {
            return f64::NAN;
        }
        let n = self.count as f64;
        let s2 = self.variance();
        let mu4 = self.m4 / n;
        ((mu4 - (n - 3.0) / (n - 1.0) * s2 * s2).max(0.0) / n).sqrt()
    }

    pub fn ci95_var(&self) -> f64 {
        Z95 * self.variance_std_err()
    }
}
