//! Uniform-cell index over a [`PoissonSample`].
//!
//! Cells are stored in a compressed layout: `entries` lists point indices
//! grouped by cell in row-major cell order (last axis fastest) and
//! `cell_start[c]..cell_start[c + 1]` is the slice of cell `c`. Consecutive
//! cells along the last axis are therefore contiguous, which lets ball queries
//! scan whole rows at once.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::point_process::PoissonSample;
use crate::region::{dist2, lex_cmp};

/// Cells per point above which the grid coarsens its cells.
const MAX_CELLS_PER_POINT: usize = 4;
const MIN_CELL_BUDGET: usize = 4096;

#[derive(Debug, Clone)]
pub struct SpatialGrid<'a> {
    sample: &'a PoissonSample,
    cell_size: f64,
    origin: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    cell_start: Vec<u32>,
    entries: Vec<u32>,
    coverage: OnceLock<f64>,
}

/// Index `sample` with cubic cells of side `cell_size`.
///
/// The side is enlarged when the window would otherwise need more than
/// `max(4 N, 4096)` cells; [`SpatialGrid::cell_size`] reports the side in use.
pub fn build_index(sample: &PoissonSample, cell_size: f64) -> Result<SpatialGrid<'_>> {
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(Error::invalid("cell size must be positive"));
    }
    let region = sample.region();
    let d = sample.dim();
    let budget = (MAX_CELLS_PER_POINT * sample.len()).max(MIN_CELL_BUDGET) as f64;
    let mut cs = cell_size;
    let cells_for = |cs: f64| {
        (0..d)
            .map(|i| (region.extent(i) / cs).ceil().max(1.0))
            .product::<f64>()
    };
    while cells_for(cs) > budget {
        cs *= 2.0;
    }
    let shape: Vec<usize> = (0..d)
        .map(|i| ((region.extent(i) / cs).ceil() as usize).max(1))
        .collect();
    let mut strides = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    let ncells = strides[0] * shape[0];
    let origin = region.lo().to_vec();

    let mut grid = SpatialGrid {
        sample,
        cell_size: cs,
        origin,
        shape,
        strides,
        cell_start: vec![0; ncells + 1],
        entries: vec![0; sample.len()],
        coverage: OnceLock::new(),
    };
    let cells: Vec<usize> = sample.points().map(|p| grid.cell_of(p)).collect();
    for &c in &cells {
        grid.cell_start[c + 1] += 1;
    }
    for c in 0..ncells {
        grid.cell_start[c + 1] += grid.cell_start[c];
    }
    let mut fill = grid.cell_start.clone();
    for (i, &c) in cells.iter().enumerate() {
        grid.entries[fill[c] as usize] = i as u32;
        fill[c] += 1;
    }
    Ok(grid)
}

impl<'a> SpatialGrid<'a> {
    pub fn sample(&self) -> &'a PoissonSample {
        self.sample
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sample.dim()
    }

    pub fn point(&self, i: usize) -> &'a [f64] {
        self.sample.point(i)
    }

    fn axis_cell(&self, axis: usize, x: f64) -> usize {
        let k = ((x - self.origin[axis]) / self.cell_size).floor();
        k.clamp(0.0, (self.shape[axis] - 1) as f64) as usize
    }

    /// Integer cell coordinates of the cell containing `p` (clamped to the grid).
    pub fn cell_coords(&self, p: &[f64]) -> Vec<usize> {
        (0..self.dim()).map(|i| self.axis_cell(i, p[i])).collect()
    }

    fn cell_of(&self, p: &[f64]) -> usize {
        (0..self.dim())
            .map(|i| self.axis_cell(i, p[i]) * self.strides[i])
            .sum()
    }

    /// Point indices stored in the cell with the given coordinates.
    pub fn bucket(&self, cell: &[usize]) -> &[u32] {
        let c: usize = cell.iter().zip(&self.strides).map(|(k, s)| k * s).sum();
        &self.entries[self.cell_start[c] as usize..self.cell_start[c + 1] as usize]
    }

    /// Coordinates of every non-empty cell, in storage order.
    pub fn nonempty_buckets(&self) -> Vec<Vec<usize>> {
        let d = self.dim();
        (0..self.cell_start.len() - 1)
            .filter(|&c| self.cell_start[c + 1] > self.cell_start[c])
            .map(|c| {
                (0..d)
                    .map(|i| (c / self.strides[i]) % self.shape[i])
                    .collect()
            })
            .collect()
    }

    /// Visit every point within closed distance `radius` of `center`,
    /// passing its index and squared distance.
    pub fn for_each_in_ball(&self, center: &[f64], radius: f64, mut visit: impl FnMut(usize, f64)) {
        if self.is_empty() || !(radius >= 0.0) {
            return;
        }
        let d = self.dim();
        let r2 = radius * radius;
        let mut lo = vec![0usize; d];
        let mut hi = vec![0usize; d];
        for i in 0..d {
            let a = center[i] - radius - self.origin[i];
            let b = center[i] + radius - self.origin[i];
            let max = self.shape[i] as f64 * self.cell_size;
            if b < 0.0 || a > max {
                return;
            }
            lo[i] = self.axis_cell(i, center[i] - radius);
            hi[i] = self.axis_cell(i, center[i] + radius);
        }
        // odometer over the leading axes; the last axis is scanned as one row
        let last = d - 1;
        let mut idx = lo.clone();
        loop {
            let mut partial = 0.0;
            let mut base = 0usize;
            for i in 0..last {
                let c0 = self.origin[i] + idx[i] as f64 * self.cell_size;
                let gap = (c0 - center[i])
                    .max(center[i] - c0 - self.cell_size)
                    .max(0.0);
                partial += gap * gap;
                base += idx[i] * self.strides[i];
            }
            if partial <= r2 {
                let reach = (r2 - partial).sqrt();
                let a = self.axis_cell(last, center[last] - reach).max(lo[last]);
                let b = self.axis_cell(last, center[last] + reach).min(hi[last]);
                if a <= b {
                    let s = self.cell_start[base + a] as usize;
                    let e = self.cell_start[base + b + 1] as usize;
                    for &j in &self.entries[s..e] {
                        let j = j as usize;
                        let q = dist2(self.sample.point(j), center);
                        if q <= r2 {
                            visit(j, q);
                        }
                    }
                }
            }
            // advance
            let mut axis = last;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if idx[axis] < hi[axis] {
                    idx[axis] += 1;
                    break;
                }
                idx[axis] = lo[axis];
            }
        }
    }

    /// Indices of the points in the closed ball, ascending.
    pub fn ball_indices(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_in_ball(center, radius, |j, _| out.push(j));
        out.sort_unstable();
        out
    }

    /// Points of the closed ball `B(center, radius)`, in sample order.
    pub fn ball_points(&self, center: &[f64], radius: f64) -> Vec<Vec<f64>> {
        self.ball_indices(center, radius)
            .into_iter()
            .map(|j| self.point(j).to_vec())
            .collect()
    }

    pub fn any_in_ball(&self, center: &[f64], radius: f64) -> bool {
        // cheap enough: balls queried this way are small
        let mut found = false;
        self.for_each_in_ball(center, radius, |_, _| found = true);
        found
    }

    /// Index of `D(x)`: the closest sample point, ties broken by the
    /// lexicographically smallest coordinates.
    pub fn nearest_index(&self, x: &[f64]) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::NoPoints);
        }
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let region = self.sample.region();
        let mut radius = self.cell_size.max(region.distance_to(x));
        let limit = region.distance_to(x) + region.diameter();
        loop {
            let mut best: Option<(usize, f64)> = None;
            self.for_each_in_ball(x, radius, |j, q| {
                let better = match best {
                    None => true,
                    Some((b, bq)) => {
                        q < bq || (q == bq && lex_cmp(self.point(j), self.point(b)).is_lt())
                    }
                };
                if better {
                    best = Some((j, q));
                }
            });
            if let Some((j, _)) = best {
                return Ok(j);
            }
            if radius > limit {
                // unreachable for a non-empty sample; guards against NaN queries
                return Err(Error::invalid("query point is not finite"));
            }
            radius *= 2.0;
        }
    }

    /// Upper bound on the coverage radius of the window: every point of the
    /// window lies within this distance of some sample point. Infinite for an
    /// empty sample. Computed once per index.
    pub fn coverage_radius(&self) -> f64 {
        *self.coverage.get_or_init(|| self.compute_coverage())
    }

    fn compute_coverage(&self) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        let region = self.sample.region();
        let d = self.dim();
        // probe spacing: half the mean inter-point spacing
        let h = 0.5 * (region.volume() / self.len() as f64).powf(1.0 / d as f64);
        let shape: Vec<usize> = (0..d)
            .map(|i| ((region.extent(i) / h).ceil() as usize).max(1))
            .collect();
        let mut k = vec![0usize; d];
        let mut probe = vec![0.0; d];
        let mut worst: f64 = 0.0;
        loop {
            for i in 0..d {
                probe[i] = region.lo()[i] + (k[i] as f64 + 0.5) * h;
            }
            worst = worst.max(self.nearest_dist2(&probe, h).sqrt());
            let mut axis = d;
            loop {
                if axis == 0 {
                    return worst + 0.5 * h * (d as f64).sqrt();
                }
                axis -= 1;
                k[axis] += 1;
                if k[axis] < shape[axis] {
                    break;
                }
                k[axis] = 0;
            }
        }
    }

    fn nearest_dist2(&self, x: &[f64], start: f64) -> f64 {
        let mut radius = start.max(self.cell_size);
        loop {
            let mut best = f64::INFINITY;
            self.for_each_in_ball(x, radius, |_, q| best = best.min(q));
            if best.is_finite() {
                return best;
            }
            radius *= 2.0;
        }
    }

    /// `D(x)` as coordinates.
    pub fn nearest(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.nearest_index(x).map(|j| self.point(j).to_vec())
    }
}
