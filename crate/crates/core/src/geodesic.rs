//! Passage times for the edge weight `|a - b|^alpha` on a Poisson sample.
//!
//! `T(x, y)` is the cheapest path from `D(x)` to `D(y)` through sample points,
//! where `D` is the nearest-point map of [`SpatialGrid::nearest`]. The search
//! runs Dijkstra over candidate edges no longer than a cutoff radius `r`,
//! doubling `r` until
//!
//! 1. the cost is unchanged between `r / 2` and `r` (stabilization),
//! 2. every target cost is at most `r^alpha`, which rules out any edge longer
//!    than `r` on a cheaper path (stabilization alone does not), and
//! 3. no edge of the returned path admits an improving witness point
//!    ([`audit_local_optimality`]).
//!
//! A result is `certified` when all three hold.
//!
//! Conditions 1 and 2 also hold outright once `r` exceeds a geometric bound
//! `L`: if every point of the window is within `rho * L` of a sample point
//! ([`SpatialGrid::coverage_radius`], [`improvement_ratio`]), an edge longer
//! than `L` has a sample point near its midpoint that strictly improves it,
//! so no geodesic uses it. Searching with `min(r, L)` is then exact and the
//! doubling stops. The same holds once `r` reaches the window diameter. Small
//! samples (at most [`GeodesicOptions::exact_threshold`] points) go straight
//! to the complete graph.
//!
//! Every run after the first is pruned with the cost found by the previous
//! run: a node settled at cost `c` only scans neighbours within
//! `(ub - c)^(1/alpha)`. The pruning never removes an edge of a path of cost
//! at most `ub`, so it does not change any result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::region::{dist2, lex_cmp};

/// Absolute slack used by the local-optimality audit.
pub const AUDIT_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for "cost unchanged" between cutoff levels.
pub const STABILITY_TOLERANCE: f64 = 1e-12;
/// Largest point count accepted by [`brute_force_passage_time`].
pub const ORACLE_BOUND: usize = 64;

/// Exponent of the edge weight; strictly greater than one.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 1.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::invalid(format!(
                "alpha must be finite and > 1, got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `|v|^alpha` from the squared length `|v|^2`.
    #[inline]
    pub fn cost_from_sq(self, d2: f64) -> f64 {
        if self.0 == 2.0 {
            d2
        } else if self.0 == 1.5 {
            let r = d2.sqrt();
            r * r.sqrt()
        } else if self.0 == 3.0 {
            d2 * d2.sqrt()
        } else {
            d2.powf(0.5 * self.0)
        }
    }

    /// Edge length whose cost is `cost`.
    pub fn length_for_cost(self, cost: f64) -> f64 {
        cost.max(0.0).powf(1.0 / self.0)
    }
}

impl TryFrom<f64> for AlphaParam {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        AlphaParam::new(v)
    }
}

impl From<AlphaParam> for f64 {
    fn from(a: AlphaParam) -> f64 {
        a.0
    }
}

/// Single-edge passage time `|a - b|^alpha`.
pub fn edge_cost(a: &[f64], b: &[f64], alpha: AlphaParam) -> f64 {
    alpha.cost_from_sq(dist2(a, b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicOptions {
    /// First cutoff radius; `None` selects [`default_initial_cutoff`].
    pub initial_cutoff: Option<f64>,
    /// Samples with at most this many points are solved on the complete graph.
    pub exact_threshold: usize,
    /// Number of cutoff doublings before giving up uncertified.
    pub max_doublings: u32,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            initial_cutoff: None,
            exact_threshold: 64,
            max_doublings: 40,
        }
    }
}

/// `4 * intensity^(-1/d) * sqrt(ln(1 + n_points))`.
pub fn default_initial_cutoff(intensity: f64, d: usize, n_points: usize) -> f64 {
    4.0 * intensity.powf(-1.0 / d as f64) * ((1.0 + n_points as f64).ln()).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicResult {
    /// Passage time, re-summed along `path`.
    pub cost: f64,
    path: Vec<f64>,
    dim: usize,
    /// Sample indices of the path vertices, when the path came from a search.
    pub path_indices: Vec<usize>,
    /// Cutoff radius of the final search level.
    pub cutoff_radius: f64,
    pub certified: bool,
    /// Every vertex lies at least `cutoff_radius` inside the window.
    pub boundary_clear: bool,
    pub alpha: AlphaParam,
    /// Solved on the complete graph.
    pub exact: bool,
    pub doublings: u32,
    /// Improving witnesses found by [`audit_local_optimality`] on this path.
    pub audit_violations: usize,
}

impl GeodesicResult {
    /// An uncertified result for an explicit vertex sequence.
    pub fn from_vertices(vertices: &[Vec<f64>], alpha: AlphaParam) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        let mut g = GeodesicResult {
            cost: 0.0,
            path: vertices.concat(),
            dim,
            path_indices: Vec::new(),
            cutoff_radius: 0.0,
            certified: false,
            boundary_clear: false,
            alpha,
            exact: false,
            doublings: 0,
            audit_violations: 0,
        };
        g.cost = g.recomputed_cost();
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.path.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.path[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = &[f64]> + ExactSizeIterator + '_ {
        self.path.chunks_exact(self.dim.max(1))
    }

    pub fn path(&self) -> Vec<Vec<f64>> {
        self.vertices().map(<[f64]>::to_vec).collect()
    }

    /// Sum of edge costs along the stored path, in path order.
    pub fn recomputed_cost(&self) -> f64 {
        (1..self.len())
            .map(|i| edge_cost(self.vertex(i - 1), self.vertex(i), self.alpha))
            .sum()
    }

    /// The same geodesic traversed backwards.
    pub fn reversed(&self) -> GeodesicResult {
        let mut out = self.clone();
        out.path = self.vertices().rev().flatten().copied().collect();
        out.path_indices.reverse();
        out.cost = out.recomputed_cost();
        out
    }

    /// Concatenate `self` (ending at `D(y)`) with `next` (starting at `D(y)`).
    pub fn concat(&self, next: &GeodesicResult) -> GeodesicResult {
        let mut out = self.clone();
        out.path.extend(next.vertices().skip(1).flatten());
        if !next.path_indices.is_empty() {
            out.path_indices.extend(next.path_indices.iter().skip(1));
        }
        out.cost = out.recomputed_cost();
        out.cutoff_radius = self.cutoff_radius.min(next.cutoff_radius);
        out.certified = self.certified && next.certified;
        out.boundary_clear = self.boundary_clear && next.boundary_clear;
        out.exact = self.exact && next.exact;
        out.doublings = self.doublings.max(next.doublings);
        out.audit_violations = self.audit_violations + next.audit_violations;
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (cost, node)
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PRED: u32 = u32::MAX;

struct Dijkstra<'g, 'a> {
    grid: &'g SpatialGrid<'a>,
    alpha: AlphaParam,
    dist: Vec<f64>,
    pred: Vec<u32>,
    done: Vec<bool>,
    is_target: Vec<bool>,
    heap: BinaryHeap<Entry>,
}

impl<'g, 'a> Dijkstra<'g, 'a> {
    fn new(grid: &'g SpatialGrid<'a>, alpha: AlphaParam) -> Self {
        let n = grid.len();
        Self {
            grid,
            alpha,
            dist: vec![f64::INFINITY; n],
            pred: vec![NO_PRED; n],
            done: vec![false; n],
            is_target: vec![false; n],
            heap: BinaryHeap::new(),
        }
    }

    /// Shortest paths from `source` over edges of length `<= radius` whose
    /// tentative cost stays `<= ub`. Returns true when every target settled.
    fn run(&mut self, source: usize, targets: &[usize], radius: f64, ub: f64) -> bool {
        self.dist.fill(f64::INFINITY);
        self.pred.fill(NO_PRED);
        self.done.fill(false);
        self.is_target.fill(false);
        self.heap.clear();
        let mut remaining = 0;
        for &t in targets {
            if !self.is_target[t] {
                self.is_target[t] = true;
                remaining += 1;
            }
        }
        let grid = self.grid;
        let alpha = self.alpha;
        self.dist[source] = 0.0;
        self.heap.push(Entry {
            cost: 0.0,
            node: source as u32,
        });
        let r2 = radius * radius;
        while let Some(Entry { cost, node }) = self.heap.pop() {
            let u = node as usize;
            if self.done[u] || cost > self.dist[u] {
                continue;
            }
            if cost > ub {
                break;
            }
            self.done[u] = true;
            if self.is_target[u] {
                remaining -= 1;
                if remaining == 0 {
                    return true;
                }
            }
            let reach2 = if ub.is_finite() {
                let l = alpha.length_for_cost(ub - cost);
                (l * l * (1.0 + 1e-9)).min(r2)
            } else {
                r2
            };
            let (dist, pred, done, heap) =
                (&mut self.dist, &mut self.pred, &self.done, &mut self.heap);
            grid.for_each_in_ball(grid.point(u), reach2.sqrt(), |v, d2| {
                if done[v] {
                    return;
                }
                let nd = cost + alpha.cost_from_sq(d2);
                if nd <= ub && nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = node;
                    heap.push(Entry {
                        cost: nd,
                        node: v as u32,
                    });
                }
            });
        }
        remaining == 0
    }

    fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut cur = target;
        while self.pred[cur] != NO_PRED {
            cur = self.pred[cur] as usize;
            path.push(cur);
        }
        path.reverse();
        path
    }
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn build_result(
    grid: &SpatialGrid<'_>,
    indices: Vec<usize>,
    alpha: AlphaParam,
    cutoff_radius: f64,
    exact: bool,
    doublings: u32,
) -> GeodesicResult {
    let dim = grid.dim();
    let path: Vec<f64> = indices
        .iter()
        .flat_map(|&i| grid.point(i).iter().copied())
        .collect();
    let region = grid.sample().region();
    let boundary_clear = path
        .chunks_exact(dim)
        .all(|p| region.distance_to_boundary(p) >= cutoff_radius);
    let mut g = GeodesicResult {
        cost: 0.0,
        path,
        dim,
        path_indices: indices,
        cutoff_radius,
        certified: false,
        boundary_clear,
        alpha,
        exact,
        doublings,
        audit_violations: 0,
    };
    g.cost = g.recomputed_cost();
    g.audit_violations = audit_local_optimality(&g, grid).len();
    g
}

/// Geodesics from `D(x)` to `D(y)` for every `y` in `targets`, sharing one
/// search per cutoff level.
pub fn passage_times_from<P: AsRef<[f64]>>(
    index: &SpatialGrid<'_>,
    x: &[f64],
    targets: &[P],
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<Vec<GeodesicResult>> {
    if index.is_empty() {
        return Err(Error::NoPoints);
    }
    let source = index.nearest_index(x)?;
    let target_idx: Vec<usize> = targets
        .iter()
        .map(|t| index.nearest_index(t.as_ref()))
        .collect::<Result<_>>()?;
    if target_idx.is_empty() {
        return Ok(Vec::new());
    }
    let sample = index.sample();
    let diameter = sample.region().diameter();
    let mut search = Dijkstra::new(index, alpha);

    let finish =
        |search: &Dijkstra<'_, '_>, radius: f64, exact: bool, doublings: u32, certify: bool| {
            target_idx
                .iter()
                .map(|&t| {
                    let mut g =
                        build_result(index, search.path_to(t), alpha, radius, exact, doublings);
                    g.certified = certify && g.audit_violations == 0;
                    g
                })
                .collect::<Vec<_>>()
        };

    if sample.len() <= opts.exact_threshold {
        if !search.run(source, &target_idx, f64::INFINITY, f64::INFINITY) {
            return Err(Error::NoPath);
        }
        return Ok(finish(&search, diameter, true, 0, true));
    }

    let mut radius = opts
        .initial_cutoff
        .unwrap_or_else(|| default_initial_cutoff(sample.intensity(), sample.dim(), sample.len()));
    if !(radius > 0.0) {
        return Err(Error::invalid("initial cutoff must be positive"));
    }
    // edges longer than this are strictly improvable, hence on no geodesic
    let useful_length = index.coverage_radius() / improvement_ratio(alpha);

    let mut ub = f64::INFINITY;
    let mut previous: Option<Vec<f64>> = None;
    let mut last_reached: Option<(f64, u32, Vec<Vec<usize>>)> = None;
    for level in 0..=opts.max_doublings {
        let exact = radius > useful_length || radius >= diameter;
        let searched = radius.min(useful_length);
        let complete = searched >= diameter;
        let search_radius = if complete { f64::INFINITY } else { searched };
        let reported = searched.min(diameter);
        if search.run(source, &target_idx, search_radius, ub) {
            let costs: Vec<f64> = target_idx.iter().map(|&t| search.dist[t]).collect();
            let stable = exact
                || previous.as_ref().is_some_and(|p| {
                    p.iter()
                        .zip(&costs)
                        .all(|(a, b)| rel_eq(*a, *b, STABILITY_TOLERANCE))
                });
            let long_edges_excluded = exact
                || costs
                    .iter()
                    .all(|&c| c <= alpha.cost_from_sq(radius * radius));
            if stable && long_edges_excluded {
                return Ok(finish(&search, reported, complete, level, true));
            }
            ub = costs.iter().copied().fold(0.0, f64::max);
            last_reached = Some((
                reported,
                level,
                target_idx.iter().map(|&t| search.path_to(t)).collect(),
            ));
            previous = Some(costs);
        } else {
            previous = None;
        }
        if exact {
            break;
        }
        radius *= 2.0;
    }
    match last_reached {
        Some((r, level, paths)) => Ok(paths
            .into_iter()
            .map(|p| build_result(index, p, alpha, r, false, level))
            .collect()),
        None => Err(Error::NoPath),
    }
}

thread_local! {
    static RATIO_CACHE: std::cell::Cell<(u64, f64)> = const { std::cell::Cell::new((0, 0.0)) };
}

/// A ratio `rho` such that any point `z` within `rho |a - b|` of the midpoint
/// of `a` and `b` satisfies `|a - z|^alpha + |z - b|^alpha < |a - b|^alpha`.
///
/// For `alpha = 2` the improving set is exactly the open ball on the diameter
/// `ab`, so `rho = 1/2`. Otherwise the improving set is convex and contains
/// the midpoint; its inradius about the midpoint is found by bisecting the
/// boundary along 512 directions of a quarter plane (the set is symmetric
/// under both reflections), then shrunk by 2% to cover the angular grid.
pub fn improvement_ratio(alpha: AlphaParam) -> f64 {
    let a = alpha.0;
    if a == 2.0 {
        return 0.5;
    }
    let (key, cached) = RATIO_CACHE.with(std::cell::Cell::get);
    if key == a.to_bits() {
        return cached;
    }
    let f = |x: f64, y: f64| {
        ((x - 0.5).powi(2) + y * y).powf(0.5 * a) + ((x + 0.5).powi(2) + y * y).powf(0.5 * a)
    };
    let mut inradius: f64 = 1.0;
    for k in 0..=512 {
        let phi = std::f64::consts::FRAC_PI_2 * k as f64 / 512.0;
        let (dx, dy) = (phi.cos(), phi.sin());
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid * dx, mid * dy) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        inradius = inradius.min(lo);
    }
    let ratio = 0.98 * inradius;
    RATIO_CACHE.with(|c| c.set((a.to_bits(), ratio)));
    ratio
}

/// `T(x, y)` with its optimal path and certificate.
pub fn passage_time(
    index: &SpatialGrid<'_>,
    x: &[f64],
    y: &[f64],
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<GeodesicResult> {
    let mut out = passage_times_from(index, x, &[y], alpha, opts)?;
    Ok(out.pop().expect("one target"))
}

/// The two legs `Γ(a, y)` and `Γ(y, b)`, both found in one search from `D(y)`.
pub fn via_legs(
    index: &SpatialGrid<'_>,
    a: &[f64],
    y: &[f64],
    b: &[f64],
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<(GeodesicResult, GeodesicResult)> {
    let mut legs = passage_times_from(index, y, &[a, b], alpha, opts)?;
    let second = legs.pop().expect("two targets");
    let first = legs.pop().expect("two targets").reversed();
    Ok((first, second))
}

/// Geodesic `Γ(a, y, b)`: the two legs joined at `D(y)`. Its `cost` is
/// re-summed along the joined path.
pub fn geodesic_via(
    index: &SpatialGrid<'_>,
    a: &[f64],
    y: &[f64],
    b: &[f64],
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<GeodesicResult> {
    let (first, second) = via_legs(index, a, y, b, alpha, opts)?;
    Ok(first.concat(&second))
}

/// `T(a, y, b) = T(a, y) + T(y, b)`.
pub fn passage_time_via(
    index: &SpatialGrid<'_>,
    a: &[f64],
    y: &[f64],
    b: &[f64],
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<f64> {
    let (first, second) = via_legs(index, a, y, b, alpha, opts)?;
    Ok(first.cost + second.cost)
}

/// Exact `T(x, y)` on the complete graph by all-pairs relaxation
/// (Floyd–Warshall), without the spatial index. Refuses more than
/// [`ORACLE_BOUND`] points.
pub fn brute_force_passage_time(
    points: &[Vec<f64>],
    x: &[f64],
    y: &[f64],
    alpha: AlphaParam,
) -> Result<(f64, Vec<Vec<f64>>)> {
    brute_force_passage_time_bounded(points, x, y, alpha, ORACLE_BOUND)
}

pub fn brute_force_passage_time_bounded(
    points: &[Vec<f64>],
    x: &[f64],
    y: &[f64],
    alpha: AlphaParam,
    bound: usize,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let n = points.len();
    if n > bound {
        return Err(Error::OracleTooLarge { count: n, bound });
    }
    if n == 0 {
        return Err(Error::NoPoints);
    }
    let closest = |q: &[f64]| {
        (0..n)
            .min_by(|&i, &j| {
                dist2(&points[i], q)
                    .total_cmp(&dist2(&points[j], q))
                    .then_with(|| lex_cmp(&points[i], &points[j]))
            })
            .expect("non-empty")
    };
    let (s, t) = (closest(x), closest(y));
    let mut d = vec![vec![0.0; n]; n];
    let mut next = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = if i == j {
                0.0
            } else {
                edge_cost(&points[i], &points[j], alpha)
            };
            next[i][j] = j;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    let mut path = vec![points[s].clone()];
    let mut cur = s;
    while cur != t {
        cur = next[cur][t];
        path.push(points[cur].clone());
    }
    Ok((d[s][t], path))
}

/// Longest Euclidean jump along the path (0 for fewer than two vertices).
pub fn max_jump(g: &GeodesicResult) -> f64 {
    (1..g.len())
        .map(|i| dist2(g.vertex(i - 1), g.vertex(i)).sqrt())
        .fold(0.0, f64::max)
}

/// First and last path indices inside the closed ball `B(center, radius)`.
pub fn ball_crossing(g: &GeodesicResult, center: &[f64], radius: f64) -> Option<(usize, usize)> {
    let r2 = radius * radius;
    let inside = |i: &usize| dist2(g.vertex(*i), center) <= r2;
    let s = (0..g.len()).find(inside)?;
    let t = (0..g.len()).rev().find(inside)?;
    Some((s, t))
}

/// A sample point `witness` that makes the path edge starting at vertex
/// `edge` improvable: `|a - z|^α + |z - b|^α < |a - b|^α - tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub edge: usize,
    pub witness: Vec<f64>,
    pub improvement: f64,
}

/// Search every path edge for an improving witness among the sample points.
pub fn audit_local_optimality(g: &GeodesicResult, index: &SpatialGrid<'_>) -> Vec<Violation> {
    let alpha = g.alpha;
    let mut out = Vec::new();
    for i in 1..g.len() {
        let (a, b) = (g.vertex(i - 1), g.vertex(i));
        let direct2 = dist2(a, b);
        let direct = alpha.cost_from_sq(direct2);
        // a witness is strictly closer than |a - b| to both endpoints
        index.for_each_in_ball(a, direct2.sqrt(), |z, za2| {
            let zp = index.point(z);
            if zp == a || zp == b {
                return;
            }
            let via = alpha.cost_from_sq(za2) + alpha.cost_from_sq(dist2(zp, b));
            if via < direct - AUDIT_TOLERANCE {
                out.push(Violation {
                    edge: i - 1,
                    witness: zp.to_vec(),
                    improvement: direct - via,
                });
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_index;
    use crate::point_process::PoissonSample;
    use crate::region::BoxRegion;

    fn a(v: f64) -> AlphaParam {
        AlphaParam::new(v).unwrap()
    }

    fn sample(points: &[[f64; 2]]) -> PoissonSample {
        let region = BoxRegion::new(vec![-5.0, -5.0], vec![10.0, 5.0]).unwrap();
        let v: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        PoissonSample::from_vecs(&v, region, 1.0).unwrap()
    }

    fn forced_cutoff() -> GeodesicOptions {
        GeodesicOptions {
            initial_cutoff: Some(0.5),
            exact_threshold: 0,
            max_doublings: 40,
        }
    }

    #[test]
    fn alpha_must_exceed_one() {
        assert!(AlphaParam::new(1.0).is_err());
        assert!(AlphaParam::new(0.5).is_err());
        assert!(AlphaParam::new(f64::INFINITY).is_err());
        assert!(AlphaParam::new(1.000_001).is_ok());
    }

    #[test]
    fn edge_cost_examples() {
        assert_eq!(edge_cost(&[1.0, 2.0], &[1.0, 2.0], a(2.0)), 0.0);
        assert_eq!(edge_cost(&[0.0, 0.0], &[3.0, 4.0], a(2.0)), 25.0);
        assert_eq!(edge_cost(&[0.0, 0.0], &[1.0, 0.0], a(1.5)), 1.0);
        assert!((edge_cost(&[0.0, 0.0], &[2.0, 0.0], a(1.5)) - 2f64.powf(1.5)).abs() < 1e-15);
        assert!((edge_cost(&[0.0, 0.0], &[2.0, 0.0], a(2.5)) - 2f64.powf(2.5)).abs() < 1e-14);
    }

    #[test]
    fn single_point_has_zero_cost() {
        let s = sample(&[[1.0, 1.0]]);
        let g = build_index(&s, 1.0).unwrap();
        for opts in [GeodesicOptions::default(), forced_cutoff()] {
            let r = passage_time(&g, &[3.0, 3.0], &[3.0, 3.0], a(2.0), &opts).unwrap();
            assert_eq!(r.cost, 0.0);
            assert_eq!(r.path(), vec![vec![1.0, 1.0]]);
            assert!(r.certified);
        }
    }

    #[test]
    fn collinear_detour_is_cheaper() {
        let s = sample(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]);
        let g = build_index(&s, 1.0).unwrap();
        for opts in [GeodesicOptions::default(), forced_cutoff()] {
            let r = passage_time(&g, &[0.0, 0.0], &[3.0, 0.0], a(2.0), &opts).unwrap();
            assert_eq!(r.cost, 5.0);
            assert_eq!(
                r.path(),
                vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]]
            );
            assert!(r.certified);
            assert_eq!(max_jump(&r), 2.0);
        }
        let (c, p) = brute_force_passage_time(
            &s.points().map(<[f64]>::to_vec).collect::<Vec<_>>(),
            &[0.0, 0.0],
            &[3.0, 0.0],
            a(2.0),
        )
        .unwrap();
        assert_eq!(c, 5.0);
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn brute_force_small_cases() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 1.0]];
        let (c, _) = brute_force_passage_time(&pts, &[0.0, 0.0], &[2.0, 1.0], a(1.5)).unwrap();
        assert_eq!(c, edge_cost(&pts[0], &pts[1], a(1.5)));
        let many = vec![vec![0.0, 0.0]; 65];
        assert!(matches!(
            brute_force_passage_time(&many, &[0.0, 0.0], &[0.0, 0.0], a(2.0)),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn via_passage_time() {
        let s = sample(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [1.0, 2.0]]);
        let g = build_index(&s, 1.0).unwrap();
        let o = GeodesicOptions::default();
        let direct = passage_time(&g, &[0.0, 0.0], &[3.0, 0.0], a(2.0), &o)
            .unwrap()
            .cost;
        let same = passage_time_via(&g, &[0.0, 0.0], &[0.0, 0.0], &[3.0, 0.0], a(2.0), &o).unwrap();
        assert_eq!(same, direct);
        let detour =
            passage_time_via(&g, &[0.0, 0.0], &[1.0, 2.0], &[3.0, 0.0], a(2.0), &o).unwrap();
        assert!(detour >= direct);
        // 0 -> (1,2): 5 ; (1,2) -> (3,0): 8
        assert_eq!(detour, 13.0);
    }

    #[test]
    fn max_jump_and_crossing() {
        let p = GeodesicResult::from_vertices(
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]],
            a(2.0),
        )
        .unwrap();
        assert_eq!(max_jump(&p), 2.0);
        assert_eq!(ball_crossing(&p, &[1.5, 0.0], 10.0), Some((0, 2)));
        assert_eq!(ball_crossing(&p, &[1.5, 5.0], 1.0), None);
        assert_eq!(ball_crossing(&p, &[1.0, 0.0], 0.5), Some((1, 1)));
        let one = GeodesicResult::from_vertices(&[vec![0.0, 0.0]], a(2.0)).unwrap();
        assert_eq!(max_jump(&one), 0.0);
    }

    #[test]
    fn audit_finds_constructed_witness() {
        let s = sample(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]);
        let g = build_index(&s, 1.0).unwrap();
        let bad = GeodesicResult::from_vertices(&[vec![0.0, 0.0], vec![3.0, 0.0]], a(2.0)).unwrap();
        let v = audit_local_optimality(&bad, &g);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, vec![1.0, 0.0]);
        assert_eq!(v[0].improvement, 4.0);
    }

    #[test]
    fn reversal_and_concat_recompute_cost() {
        let p = GeodesicResult::from_vertices(&[vec![0.0, 0.0], vec![1.0, 0.0]], a(2.0)).unwrap();
        let q = GeodesicResult::from_vertices(&[vec![1.0, 0.0], vec![1.0, 2.0]], a(2.0)).unwrap();
        let joined = p.concat(&q);
        assert_eq!(joined.len(), 3);
        assert_eq!(joined.cost, 5.0);
        assert_eq!(joined.reversed().vertex(0), &[1.0, 2.0]);
    }

    #[test]
    fn empty_sample_is_an_error() {
        let s = sample(&[]);
        let g = build_index(&s, 1.0).unwrap();
        assert_eq!(
            passage_time(
                &g,
                &[0.0, 0.0],
                &[1.0, 0.0],
                a(2.0),
                &GeodesicOptions::default()
            ),
            Err(Error::NoPoints)
        );
    }
}
