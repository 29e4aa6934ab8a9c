//! Replica plumbing shared by the estimators and the bench: seed streams,
//! padded windows with automatic growth, and per-geodesic bookkeeping.

use fpp_core::seed;
use fpp_core::{
    build_index, sample_poisson, AlphaParam, BoxRegion, GeodesicOptions, GeodesicResult,
    PoissonSample, SpatialGrid,
};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Padding added on every side of the window around the anchor points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Padding {
    /// Half the scale `n` of the experiment.
    Auto,
    Fixed(f64),
}

impl Padding {
    pub fn width(self, n: f64) -> f64 {
        match self {
            Padding::Auto => 0.5 * n,
            Padding::Fixed(w) => w,
        }
    }
}

impl Serialize for Padding {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Padding::Auto => s.serialize_str("auto"),
            Padding::Fixed(w) => s.serialize_f64(*w),
        }
    }
}

impl<'de> Deserialize<'de> for Padding {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "auto" => Ok(Padding::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "padding must be \"auto\" or a number, got \"{w}\""
            ))),
            Raw::Number(w) if w >= 0.0 && w.is_finite() => Ok(Padding::Fixed(w)),
            Raw::Number(w) => Err(serde::de::Error::custom(format!(
                "padding must be non-negative, got {w}"
            ))),
        }
    }
}

/// Model and numerical settings shared by every experiment.
#[derive(Clone, Debug)]
pub struct Setup {
    pub alpha: AlphaParam,
    pub d: usize,
    pub intensity: f64,
    pub padding: Padding,
    /// How many times a window may double its padding.
    pub max_extensions: u32,
    pub geodesic: GeodesicOptions,
}

impl Setup {
    pub fn new(alpha: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {d}")));
        }
        Ok(Self {
            alpha: AlphaParam::new(alpha)?,
            d,
            intensity: 1.0,
            padding: Padding::Auto,
            max_extensions: 3,
            geodesic: GeodesicOptions::default(),
        })
    }

    /// Mean inter-point spacing, used as the grid cell side.
    pub fn spacing(&self) -> f64 {
        self.intensity.powf(-1.0 / self.d as f64)
    }

    pub fn unit(&self, axis: usize, length: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        v[axis] = length;
        v
    }
}

/// Streams keep the seeds of different experiments disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Estimate = 1,
    Midpoint = 2,
    Argmin = 3,
    Deviation = 4,
    Membership = 5,
    Ubiquity = 6,
    Resampling = 7,
    Rotation = 8,
    NegativeControl = 9,
    Extension = 10,
}

/// Seed of replica `r` of experiment `stream` at scale `n`.
pub fn replica_seed(master: u64, stream: Stream, n: f64, r: u64) -> u64 {
    seed::mix_all(master, &[stream as u64, n.to_bits(), r])
}

/// Run `f` on replicas `0..replicas` on the current rayon pool and collect
/// results in replica order.
pub fn replicate<T: Send>(replicas: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..replicas as u64).into_par_iter().map(f).collect()
}

/// Certification bookkeeping over a group of geodesics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub geodesics: usize,
    pub uncertified: usize,
    pub boundary_unclear: usize,
    pub audit_violations: usize,
    pub max_jump: f64,
}

impl Tally {
    pub fn record(&mut self, g: &GeodesicResult) {
        self.geodesics += 1;
        self.uncertified += usize::from(!g.certified);
        self.boundary_unclear += usize::from(!g.boundary_clear);
        self.audit_violations += g.audit_violations;
        self.max_jump = self.max_jump.max(fpp_core::max_jump(g));
    }

    pub fn certified(&self) -> bool {
        self.uncertified == 0
    }

    pub fn clean(&self) -> bool {
        self.uncertified == 0 && self.boundary_unclear == 0
    }

    pub fn absorb(&mut self, other: &Tally) {
        self.geodesics += other.geodesics;
        self.uncertified += other.uncertified;
        self.boundary_unclear += other.boundary_unclear;
        self.audit_violations += other.audit_violations;
        self.max_jump = self.max_jump.max(other.max_jump);
    }
}

/// Outcome of [`solve_in_window`].
#[derive(Clone, Debug)]
pub struct WindowRun<T> {
    pub value: T,
    pub tally: Tally,
    pub region: BoxRegion,
    pub extensions: u32,
}

/// Axis-aligned bounding box of `anchors`, as `(lo, hi)`.
pub fn bounding_box(anchors: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = anchors[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for a in anchors {
        for i in 0..d {
            lo[i] = lo[i].min(a[i]);
            hi[i] = hi[i].max(a[i]);
        }
    }
    (lo, hi)
}

pub fn padded(lo: &[f64], hi: &[f64], w: f64) -> Result<BoxRegion> {
    Ok(BoxRegion::new(
        lo.iter().map(|x| x - w).collect(),
        hi.iter().map(|x| x + w).collect(),
    )?)
}

/// Sample the box `[lo - w, hi + w]`, run `solve`, and while any recorded
/// geodesic is uncertified or too close to the boundary, double `w` (keeping
/// the points already drawn) and solve again, at most
/// `setup.max_extensions` times. The last attempt is returned either way;
/// its tally says whether it came out clean.
pub fn solve_in_window<T>(
    setup: &Setup,
    lo: &[f64],
    hi: &[f64],
    padding: f64,
    seed: u64,
    mut solve: impl FnMut(&SpatialGrid<'_>, &mut Tally) -> Result<T>,
) -> Result<WindowRun<T>> {
    if !(padding > 0.0) {
        return Err(invalid("window padding must be positive"));
    }
    let mut w = padding;
    let mut region = padded(lo, hi, w)?;
    let mut sample = sample_poisson(&region, setup.intensity, seed, setup.d)?;
    let mut extensions = 0;
    loop {
        let index = build_index(&sample, setup.spacing())?;
        let mut tally = Tally::default();
        let value = solve(&index, &mut tally)?;
        if tally.clean() || extensions == setup.max_extensions {
            return Ok(WindowRun { value, tally, region, extensions });
        }
        extensions += 1;
        w *= 2.0;
        region = padded(lo, hi, w)?;
        sample = grow(&sample, &region, seed, extensions)?;
    }
}

/// Extend `sample` to `region` with the shell stream of growth step `step`.
pub fn grow(sample: &PoissonSample, region: &BoxRegion, seed: u64, step: u32) -> Result<PoissonSample> {
    let shell = seed::mix_all(seed, &[Stream::Extension as u64, step as u64]);
    Ok(sample.extend_to(region, shell)?)
}
