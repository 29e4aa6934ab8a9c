//! Homogeneous Poisson point processes restricted to boxes.
//!
//! A sample is drawn by first drawing its size from `Poisson(intensity * vol)`
//! and then placing that many i.i.d. uniform points. Coordinates that collide
//! bit-for-bit with an earlier point are re-drawn, so every stored point is
//! distinct.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::region::{ball_volume, dist2, BoxRegion};
use crate::seed;

/// How a sample departed from a plain draw of [`sample_poisson`].
#[derive(Clone, Debug, PartialEq)]
pub enum Modification {
    /// Configuration inside `B(center, radius)` replaced by an independent copy.
    Resampled {
        center: Vec<f64>,
        radius: f64,
        seed: u64,
    },
    /// Window enlarged from `from`; the new shell drawn with `seed`.
    Extended { from: BoxRegion, seed: u64 },
    /// All points of the closed ball `B(center, radius)` removed.
    Cleared { center: Vec<f64>, radius: f64 },
    /// Conditioned replacement inside the unit ball (see [`plant_event_e`]).
    Planted { seed: u64 },
    /// Built from explicit coordinates.
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonSample {
    points: Vec<f64>,
    dim: usize,
    region: BoxRegion,
    intensity: f64,
    seed: u64,
    history: Vec<Modification>,
}

impl PoissonSample {
    /// Wrap explicit coordinates (row-major, `dim` per point).
    ///
    /// Every point must lie in the half-open window and no two may coincide.
    /// Used for hand-built configurations and decoded samples.
    pub fn from_points(coords: Vec<f64>, region: BoxRegion, intensity: f64) -> Result<Self> {
        let dim = region.dim();
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into {dim}-vectors",
                coords.len()
            )));
        }
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::invalid("intensity must be positive"));
        }
        let mut seen = Dedup::default();
        for p in coords.chunks_exact(dim) {
            if !region.contains(p) {
                return Err(Error::invalid(format!("point {p:?} outside the window")));
            }
            if !seen.insert(p) {
                return Err(Error::invalid(format!("duplicate point {p:?}")));
            }
        }
        Ok(Self {
            points: coords,
            dim,
            region,
            intensity,
            seed: 0,
            history: vec![Modification::Explicit],
        })
    }

    /// Convenience for tests and toys: one `Vec` per point.
    pub fn from_vecs(points: &[Vec<f64>], region: BoxRegion, intensity: f64) -> Result<Self> {
        let dim = region.dim();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        Self::from_points(points.concat(), region, intensity)
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.points
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn history(&self) -> &[Modification] {
        &self.history
    }

    /// Linear count of points in the closed ball.
    pub fn count_in_ball(&self, center: &[f64], radius: f64) -> usize {
        let r2 = radius * radius;
        self.points().filter(|p| dist2(p, center) <= r2).count()
    }

    /// Copy of the sample without the points of the closed ball `B(center, radius)`.
    pub fn without_ball(&self, center: &[f64], radius: f64) -> PoissonSample {
        let r2 = radius * radius;
        let mut out = self.clone();
        out.points = self
            .points()
            .filter(|p| dist2(p, center) > r2)
            .flatten()
            .copied()
            .collect();
        out.history.push(Modification::Cleared {
            center: center.to_vec(),
            radius,
        });
        out
    }

    /// Enlarge the window to `region`, keeping every existing point and filling
    /// the new shell with an independent Poisson configuration.
    pub fn extend_to(&self, region: &BoxRegion, shell_seed: u64) -> Result<PoissonSample> {
        if !region.contains_region(&self.region) {
            return Err(Error::invalid("extension must contain the current window"));
        }
        let mut out = self.clone();
        let mut rng = seed::rng(shell_seed);
        let old = &self.region;
        draw_into(
            &mut rng,
            region,
            self.intensity,
            |p| !old.contains(p),
            &mut out.points,
        );
        out.history.push(Modification::Extended {
            from: self.region.clone(),
            seed: shell_seed,
        });
        out.region = region.clone();
        Ok(out)
    }
}

#[derive(Default)]
struct Dedup(HashSet<Vec<u64>>);

impl Dedup {
    fn insert(&mut self, p: &[f64]) -> bool {
        // +0.0 folds -0.0 onto 0.0 so equal coordinates share a key
        self.0
            .insert(p.iter().map(|x| (x + 0.0).to_bits()).collect())
    }
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    dist.sample(rng) as usize
}

fn uniform_point(rng: &mut ChaCha8Rng, region: &BoxRegion, out: &mut Vec<f64>) {
    for (lo, hi) in region.lo().iter().zip(region.hi()) {
        let x = loop {
            let x = rng.random_range(*lo..*hi);
            if x < *hi {
                break x;
            }
        };
        out.push(x);
    }
}

/// Draw a Poisson configuration on `region`, keep the points accepted by
/// `keep` and append them to `out`. Bit-identical repeats within the batch
/// are re-drawn.
fn draw_into(
    rng: &mut ChaCha8Rng,
    region: &BoxRegion,
    intensity: f64,
    keep: impl Fn(&[f64]) -> bool,
    out: &mut Vec<f64>,
) {
    let d = region.dim();
    let count = poisson_count(rng, intensity * region.volume());
    let mut seen = Dedup::default();
    let mut p = Vec::with_capacity(d);
    for _ in 0..count {
        loop {
            p.clear();
            uniform_point(rng, region, &mut p);
            if seen.insert(&p) {
                break;
            }
        }
        if keep(&p) {
            out.extend_from_slice(&p);
        }
    }
}

/// Draw a homogeneous Poisson sample of the given intensity on `region`.
pub fn sample_poisson(
    region: &BoxRegion,
    intensity: f64,
    seed: u64,
    d: usize,
) -> Result<PoissonSample> {
    if d < 2 {
        return Err(Error::invalid(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    if region.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: region.dim(),
        });
    }
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::invalid("intensity must be positive"));
    }
    if !(region.volume() > 0.0) {
        return Err(Error::invalid("region has zero volume"));
    }
    let mut rng = seed::rng(seed);
    let mut points = Vec::new();
    draw_into(&mut rng, region, intensity, |_| true, &mut points);
    Ok(PoissonSample {
        points,
        dim: d,
        region: region.clone(),
        intensity,
        seed,
        history: Vec::new(),
    })
}

/// Replace the configuration inside the closed ball `B(center, radius)` by an
/// independent Poisson configuration drawn from `seed2`. Points outside the
/// ball are kept bit-for-bit and in their original order.
pub fn resample_region(
    sample: &PoissonSample,
    center: &[f64],
    radius: f64,
    seed2: u64,
) -> Result<PoissonSample> {
    if center.len() != sample.dim {
        return Err(Error::DimensionMismatch {
            expected: sample.dim,
            got: center.len(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::invalid("resampling radius must be positive"));
    }
    if !sample.region.intersects_ball(center, radius) {
        return Err(Error::invalid("resampling ball misses the window"));
    }
    let mut out = sample.without_ball(center, radius);
    out.history.pop();
    let r2 = radius * radius;
    if let Some(window) = BoxRegion::ball_bounds(center, radius)?.intersection(&sample.region) {
        let mut rng = seed::rng(seed2);
        draw_into(
            &mut rng,
            &window,
            sample.intensity,
            |p| dist2(p, center) <= r2,
            &mut out.points,
        );
    }
    out.history.push(Modification::Resampled {
        center: center.to_vec(),
        radius,
        seed: seed2,
    });
    Ok(out)
}

/// Draw `(Ξ, Ξ̃)` on the event
/// `E = {Ξ ∩ B(2) = ∅, Ξ* ∩ B(1) ≠ ∅, Ξ* ∩ (B(2) \ B(1)) = ∅}`.
///
/// `Ξ` is a sample on `region` cleared on `B(0, 2)`. `Ξ̃` agrees with `Ξ`
/// outside `B(0, 2)` and carries `m ~ Poisson(intensity * Vol B(1)) | m >= 1`
/// uniform points in `B(0, 1)`.
pub fn plant_event_e(
    region: &BoxRegion,
    intensity: f64,
    seed: u64,
    seed2: u64,
) -> Result<(PoissonSample, PoissonSample)> {
    let d = region.dim();
    let origin = vec![0.0; d];
    if !region.contains_ball(&origin, 2.0) {
        return Err(Error::invalid("window must contain the ball B(0, 2)"));
    }
    let xi = sample_poisson(region, intensity, seed, d)?.without_ball(&origin, 2.0);

    let mut rng = seed::rng(seed2);
    let mean = intensity * ball_volume(d, 1.0);
    let m = loop {
        let m = poisson_count(&mut rng, mean);
        if m >= 1 {
            break m;
        }
    };
    let cube = BoxRegion::cube(&origin, 1.0)?;
    let mut tilde = xi.clone();
    let mut seen = Dedup::default();
    let mut p = Vec::with_capacity(d);
    for _ in 0..m {
        loop {
            p.clear();
            uniform_point(&mut rng, &cube, &mut p);
            if dist2(&p, &origin) <= 1.0 && seen.insert(&p) {
                break;
            }
        }
        tilde.points.extend_from_slice(&p);
    }
    tilde.history.push(Modification::Planted { seed: seed2 });
    Ok((xi, tilde))
}

/// Closed-form `P(E)` for the event planted by [`plant_event_e`].
pub fn event_e_probability(d: usize, intensity: f64) -> f64 {
    let v1 = intensity * ball_volume(d, 1.0);
    let v2 = intensity * ball_volume(d, 2.0);
    (-v2).exp() * (1.0 - (-v1).exp()) * (-(v2 - v1)).exp()
}
