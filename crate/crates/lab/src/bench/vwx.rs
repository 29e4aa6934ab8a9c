//! Membership of a family point in the sets `V`, `W`, `X`, the entry/exit
//! jump bound on `V`, and the crossing-location event `B`.

use fpp_core::region::{dist, dist2, void_probability};
use fpp_core::{
    ball_crossing, geodesic_via, passage_time, passage_times_from, AlphaParam, GeodesicOptions,
    GeodesicResult, SpatialGrid,
};
use serde::{Deserialize, Serialize};

use super::params::jump_bound;
use super::{BenchParams, EventEstimate};
use crate::campaign::{bounding_box, replica_seed, replicate, solve_in_window, Setup, Stream, Tally};
use crate::error::{invalid, Result};

/// The ball scan in `V` stops at the first `l` whose void probability drops
/// below this.
pub const VOID_TRUNCATION: f64 = 1e-12;

/// Integer points of the closed ball `B(center, r)`.
pub fn lattice_in_ball(center: &[f64], r: f64) -> Vec<Vec<f64>> {
    let d = center.len();
    let lo: Vec<i64> = center.iter().map(|c| (c - r).ceil() as i64).collect();
    let hi: Vec<i64> = center.iter().map(|c| (c + r).floor() as i64).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.clone();
    let r2 = r * r;
    loop {
        let p: Vec<f64> = cur.iter().map(|&v| v as f64).collect();
        if dist2(&p, center) <= r2 {
            out.push(p);
        }
        let mut axis = 0;
        loop {
            if axis == d {
                return out;
            }
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                break;
            }
            cur[axis] = lo[axis];
            axis += 1;
        }
    }
}

/// Integer `l` range scanned for `V`: from the first integer `>= K^{1/(2 alpha)}`
/// (and at least 1) to the first whose void probability is below
/// [`VOID_TRUNCATION`].
pub fn l_range(k_n: f64, alpha: f64, d: usize, intensity: f64) -> (u64, u64) {
    let l_min = (k_n.max(0.0).powf(1.0 / (2.0 * alpha)).ceil() as u64).max(1);
    let mut l_max = l_min;
    while void_probability(d, intensity, (l_max as f64).sqrt()) >= VOID_TRUNCATION {
        l_max += 1;
    }
    (l_min, l_max)
}

/// Radius around `y` that the window must contain for the membership checks.
pub fn required_reach(params: &BenchParams, phi: f64, alpha: f64, intensity: f64) -> f64 {
    let k = params.k_n(phi);
    let reach = params.crossing_radius(phi);
    let (_, l_max) = l_range(k, alpha, params.d, intensity);
    (2.0 * reach).max(reach + l_max as f64 + (l_max as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VCheck {
    pub in_v: bool,
    pub l_min: u64,
    pub l_max: u64,
    pub balls_checked: usize,
    /// First empty ball found, as `(l, centre)`.
    pub first_void: Option<(u64, Vec<f64>)>,
}

/// `V`: for every integer `l` in [`l_range`] and every lattice `x` in
/// `B(y, reach + l)`, the ball `B(x, sqrt(l))` holds a sample point.
pub fn v_membership(index: &SpatialGrid<'_>, y: &[f64], k_n: f64, reach: f64, alpha: AlphaParam) -> Result<VCheck> {
    let sample = index.sample();
    let (l_min, l_max) = l_range(k_n, alpha.value(), sample.dim(), sample.intensity());
    let mut balls = 0;
    for l in l_min..=l_max {
        let lf = l as f64;
        for x in lattice_in_ball(y, reach + lf) {
            balls += 1;
            if !index.any_in_ball(&x, lf.sqrt()) {
                return Ok(VCheck { in_v: false, l_min, l_max, balls_checked: balls, first_void: Some((l, x)) });
            }
        }
    }
    Ok(VCheck { in_v: true, l_min, l_max, balls_checked: balls, first_void: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WCheck {
    pub in_w: bool,
    pub pairs_checked: usize,
    /// Smallest `T(a, b) / |a - b|` seen, infinite when no pair qualified.
    pub worst_ratio: f64,
    pub uncertified: usize,
}

/// `W` on lattice pairs: every `a, b` in `B(y, 2 reach) ∩ Z^d` with
/// `|a - b| >= K` has `T(a, b) >= delta |a - b|`.
pub fn w_membership(
    index: &SpatialGrid<'_>,
    y: &[f64],
    k_n: f64,
    reach: f64,
    delta: f64,
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<WCheck> {
    let pts = lattice_in_ball(y, 2.0 * reach);
    let mut check = WCheck { in_w: true, pairs_checked: 0, worst_ratio: f64::INFINITY, uncertified: 0 };
    for (i, a) in pts.iter().enumerate() {
        let partners: Vec<&Vec<f64>> = pts[i + 1..].iter().filter(|b| dist(a, b) >= k_n).collect();
        if partners.is_empty() {
            continue;
        }
        let gs = passage_times_from(index, a, &partners, alpha, opts)?;
        for (b, g) in partners.iter().zip(&gs) {
            check.pairs_checked += 1;
            check.uncertified += usize::from(!g.certified);
            let ratio = g.cost / dist(a, b);
            check.worst_ratio = check.worst_ratio.min(ratio);
            if ratio < delta {
                check.in_w = false;
            }
        }
    }
    Ok(check)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub in_v: bool,
    pub in_w: bool,
    pub in_x: bool,
    pub v: VCheck,
    pub w: WCheck,
    /// `T(-n e1, y, n e1) - T(-n e1, n e1)`.
    pub x_gap: f64,
}

/// Membership of `y` in `V`, `W` and `X` on the sample behind `index`.
/// Fails when the window does not contain the ball the checks look at.
#[allow(clippy::too_many_arguments)]
pub fn vwx_membership(
    index: &SpatialGrid<'_>,
    y: &[f64],
    params: &BenchParams,
    phi: f64,
    n: f64,
    alpha: AlphaParam,
    opts: &GeodesicOptions,
) -> Result<(Membership, GeodesicResult, GeodesicResult)> {
    let sample = index.sample();
    let need = required_reach(params, phi, alpha.value(), sample.intensity());
    if !sample.region().contains_ball(y, need) {
        return Err(invalid(format!("window does not contain B(y, {need})")));
    }
    let k = params.k_n(phi);
    let reach = params.crossing_radius(phi);
    let v = v_membership(index, y, k, reach, alpha)?;
    let w = w_membership(index, y, k, reach, params.delta, alpha, opts)?;
    let d = y.len();
    let mut a = vec![0.0; d];
    a[0] = -n;
    let mut b = vec![0.0; d];
    b[0] = n;
    let via = geodesic_via(index, &a, y, &b, alpha, opts)?;
    let direct = passage_time(index, &a, &b, alpha, opts)?;
    let x_gap = via.cost - direct.cost;
    let m = Membership { in_v: v.in_v, in_w: w.in_w, in_x: x_gap < k, v, w, x_gap };
    Ok((m, via, direct))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpCheck {
    /// First and last vertex inside the crossing ball.
    pub crossing: Option<(usize, usize)>,
    pub entry_jump: Option<f64>,
    pub exit_jump: Option<f64>,
    pub bound: f64,
    /// The bound is only claimed on `V`.
    pub asserted: bool,
    pub violated: bool,
}

impl JumpCheck {
    /// Nothing to check: no crossing or no edge entering or leaving the ball.
    pub fn vacuous(&self) -> bool {
        self.entry_jump.is_none() && self.exit_jump.is_none()
    }
}

/// On `V`, the edges entering and leaving `B(y, reach)` are at most
/// `K^{1/(2 alpha)} + 1` long.
pub fn jump_bound_check(g: &GeodesicResult, y: &[f64], reach: f64, k_n: f64, in_v: bool) -> JumpCheck {
    let bound = jump_bound(k_n, g.alpha.value());
    let crossing = ball_crossing(g, y, reach);
    let (entry_jump, exit_jump) = match crossing {
        Some((s, t)) => (
            (s > 0).then(|| dist(g.vertex(s), g.vertex(s - 1))),
            (t + 1 < g.len()).then(|| dist(g.vertex(t), g.vertex(t + 1))),
        ),
        None => (None, None),
    };
    let longest = entry_jump.unwrap_or(0.0).max(exit_jump.unwrap_or(0.0));
    JumpCheck { crossing, entry_jump, exit_jump, bound, asserted: in_v, violated: in_v && longest > bound }
}

fn floor_offset(p: &[f64], y: &[f64]) -> Vec<i64> {
    p.iter().zip(y).map(|(a, b)| (a - b).floor() as i64).collect()
}

/// Witnesses `floor(γ(s) - y)` and `floor(γ(t) - y)` at the first and last
/// vertex inside `B(y, reach)`.
pub fn canonical_witnesses(g: &GeodesicResult, y: &[f64], reach: f64) -> Result<(Vec<i64>, Vec<i64>)> {
    let (s, t) = ball_crossing(g, y, reach).ok_or_else(|| invalid("geodesic does not meet the ball"))?;
    Ok((floor_offset(g.vertex(s), y), floor_offset(g.vertex(t), y)))
}

/// `B(z1, z2)`: `|γ(s) - (y + z1)| <= d` and `|γ(t) - (y + z2)| <= d`.
pub fn b_event_check(g: &GeodesicResult, y: &[f64], z1: &[i64], z2: &[i64], reach: f64) -> Result<bool> {
    let (s, t) = ball_crossing(g, y, reach).ok_or_else(|| invalid("geodesic does not meet the ball"))?;
    let d = y.len() as f64;
    let near = |v: &[f64], z: &[i64]| {
        let target: Vec<f64> = y.iter().zip(z).map(|(a, &b)| a + b as f64).collect();
        dist(v, &target) <= d
    };
    Ok(near(g.vertex(s), z1) && near(g.vertex(t), z2))
}

/// Aggregate of the membership campaign at one family point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub n: f64,
    pub phi: f64,
    pub y: Vec<f64>,
    pub k_n: f64,
    pub reach: f64,
    pub in_v: EventEstimate,
    pub in_w: EventEstimate,
    pub in_x: EventEstimate,
    pub in_vw: EventEstimate,
    /// Replicas on `V` whose geodesic has an entry or exit edge to check.
    pub jumps_checked: u64,
    pub jumps_vacuous: u64,
    pub jump_violations: u64,
    pub longest_jump_on_v: f64,
    pub audit_violations: usize,
    pub witnesses_checked: u64,
    /// Witness pairs inside `B(2 reach)` and different from 0.
    pub witnesses_in_ball: u64,
    pub b_event_at_witnesses: u64,
    pub excluded: usize,
    pub tally: Tally,
}

#[derive(Clone, Debug)]
struct ReplicaOutcome {
    m: Membership,
    jump: JumpCheck,
    audit: usize,
    witness: Option<(bool, bool)>,
    tally: Tally,
}

/// Membership, jump and witness checks for `y` over independent replicas.
#[allow(clippy::too_many_arguments)]
pub fn membership_campaign(
    setup: &Setup,
    n: f64,
    y: &[f64],
    params: &BenchParams,
    phi: f64,
    replicas: usize,
    master: u64,
) -> Result<MembershipReport> {
    if replicas < 1 {
        return Err(invalid("need at least one replica"));
    }
    let k = params.k_n(phi);
    let reach = params.crossing_radius(phi);
    let need = required_reach(params, phi, setup.alpha.value(), setup.intensity);
    let a = setup.unit(0, -n);
    let b = setup.unit(0, n);
    let (lo, hi) = bounding_box(&[a, b, y.to_vec()]);
    let width = setup.padding.width(n).max(need + 1.0);
    let rows: Vec<Result<ReplicaOutcome>> = replicate(replicas, |r| {
        let seed = replica_seed(master, Stream::Membership, n, r);
        let run = solve_in_window(setup, &lo, &hi, width, seed, |index, tally| {
            let (m, via, direct) = vwx_membership(index, y, params, phi, n, setup.alpha, &setup.geodesic)?;
            tally.record(&via);
            tally.record(&direct);
            let jump = jump_bound_check(&via, y, reach, k, m.in_v);
            let witness = canonical_witnesses(&via, y, reach).ok().map(|(z1, z2)| {
                let ok = |z: &[i64]| {
                    let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
                    z.iter().any(|&v| v != 0) && zf.iter().map(|v| v * v).sum::<f64>() <= (2.0 * reach).powi(2)
                };
                let inside = ok(&z1) && ok(&z2);
                let b_ok = b_event_check(&via, y, &z1, &z2, reach).unwrap_or(false);
                (inside, b_ok)
            });
            Ok(ReplicaOutcome { m, jump, audit: via.audit_violations + direct.audit_violations, witness, tally: Tally::default() })
        })?;
        let mut out = run.value;
        out.tally = run.tally;
        Ok(out)
    });
    let rows: Vec<ReplicaOutcome> = rows.into_iter().collect::<Result<_>>()?;
    let kept: Vec<&ReplicaOutcome> = rows.iter().filter(|o| o.tally.clean()).collect();
    let trials = kept.len() as u64;
    let count = |f: &dyn Fn(&ReplicaOutcome) -> bool| kept.iter().filter(|o| f(o)).count() as u64;
    let mut tally = Tally::default();
    rows.iter().for_each(|o| tally.absorb(&o.tally));
    Ok(MembershipReport {
        n,
        phi,
        y: y.to_vec(),
        k_n: k,
        reach,
        in_v: EventEstimate::new("y in V", count(&|o| o.m.in_v), trials),
        in_w: EventEstimate::new("y in W", count(&|o| o.m.in_w), trials),
        in_x: EventEstimate::new("y in X", count(&|o| o.m.in_x), trials),
        in_vw: EventEstimate::new("y in V and W", count(&|o| o.m.in_v && o.m.in_w), trials),
        jumps_checked: count(&|o| o.jump.asserted && !o.jump.vacuous()),
        jumps_vacuous: count(&|o| o.jump.asserted && o.jump.vacuous()),
        jump_violations: count(&|o| o.jump.violated),
        longest_jump_on_v: kept
            .iter()
            .filter(|o| o.jump.asserted)
            .map(|o| o.jump.entry_jump.unwrap_or(0.0).max(o.jump.exit_jump.unwrap_or(0.0)))
            .fold(0.0, f64::max),
        audit_violations: kept.iter().map(|o| o.audit).sum(),
        witnesses_checked: count(&|o| o.witness.is_some()),
        witnesses_in_ball: count(&|o| o.witness.is_some_and(|w| w.0)),
        b_event_at_witnesses: count(&|o| o.witness.is_some_and(|w| w.1)),
        excluded: rows.len() - kept.len(),
        tally,
    })
}
