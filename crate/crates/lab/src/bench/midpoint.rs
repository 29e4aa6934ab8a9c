//! Passage times between `-n e1`, `n e1` and the family `{0} ∪ Λ_n`, shared
//! by the midpoint gain, the argmin events and the separation and deviation
//! events.

use fpp_core::{passage_times_from, SpatialGrid, StreamStats};
use serde::{Deserialize, Serialize};

use super::{EventEstimate, LambdaFamily};
use crate::campaign::{bounding_box, replica_seed, replicate, solve_in_window, Setup, Stream, Tally};
use crate::error::{invalid, LabError, Result};

/// One replica. Anchor 0 is the origin, anchors `1..` are the family points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViaObservation {
    pub seed: u64,
    /// `T(-n e1, n e1)`.
    pub t_ab: f64,
    /// `T(-n e1, anchor)`.
    pub from_a: Vec<f64>,
    /// `T(anchor, n e1)`.
    pub to_b: Vec<f64>,
    /// `T(anchor_i, anchor_j)` for `i < j`, row-major.
    pub pairwise: Vec<f64>,
    pub tally: Tally,
}

impl ViaObservation {
    /// `T(-n e1, anchor, n e1)`.
    pub fn t_via(&self, i: usize) -> f64 {
        self.from_a[i] + self.to_b[i]
    }

    pub fn anchors(&self) -> usize {
        self.from_a.len()
    }

    /// `T(-n e1, 0, n e1) - T(-n e1, n e1)`.
    pub fn gain(&self) -> f64 {
        self.t_via(0) - self.t_ab
    }

    pub fn clean(&self) -> bool {
        self.tally.clean()
    }
}

/// `{0} ∪ family`.
pub fn anchors(d: usize, family: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; d]];
    out.extend(family.iter().cloned());
    out
}

/// Per-replica observations in replica order. With `pairwise` the distances
/// between all anchors are computed as well.
pub fn observe(
    setup: &Setup,
    n: f64,
    family: &[Vec<f64>],
    replicas: usize,
    master: u64,
    stream: Stream,
    pairwise: bool,
) -> Result<Vec<ViaObservation>> {
    if replicas < 2 {
        return Err(invalid("need at least 2 replicas"));
    }
    let anchors = anchors(setup.d, family);
    let mut all = anchors.clone();
    all.push(setup.unit(0, -n));
    all.push(setup.unit(0, n));
    let (lo, hi) = bounding_box(&all);
    let width = setup.padding.width(n);
    replicate(replicas, |r| {
        let seed = replica_seed(master, stream, n, r);
        let run = solve_in_window(setup, &lo, &hi, width, seed, |index, tally| {
            let mut obs = observe_on(index, setup, n, &anchors, pairwise, tally)?;
            obs.seed = seed;
            Ok(obs)
        })?;
        let mut obs = run.value;
        obs.tally = run.tally;
        Ok(obs)
    })
    .into_iter()
    .collect()
}

/// One observation on the sample behind `index`; `anchors[0]` is the origin.
pub fn observe_on(
    index: &SpatialGrid<'_>,
    setup: &Setup,
    n: f64,
    anchors: &[Vec<f64>],
    pairwise: bool,
    tally: &mut Tally,
) -> Result<ViaObservation> {
    let a = setup.unit(0, -n);
    let b = setup.unit(0, n);
    let mut targets = vec![b.clone()];
    targets.extend(anchors.iter().cloned());
    let from_a = passage_times_from(index, &a, &targets, setup.alpha, &setup.geodesic)?;
    let to_b = passage_times_from(index, &b, anchors, setup.alpha, &setup.geodesic)?;
    from_a.iter().chain(&to_b).for_each(|g| tally.record(g));
    let mut pairs = Vec::new();
    if pairwise {
        for i in 0..anchors.len() {
            let rest = &anchors[i + 1..];
            if rest.is_empty() {
                break;
            }
            let gs = passage_times_from(index, &anchors[i], rest, setup.alpha, &setup.geodesic)?;
            gs.iter().for_each(|g| tally.record(g));
            pairs.extend(gs.iter().map(|g| g.cost));
        }
    }
    Ok(ViaObservation {
        seed: 0,
        t_ab: from_a[0].cost,
        from_a: from_a[1..].iter().map(|g| g.cost).collect(),
        to_b: to_b.iter().map(|g| g.cost).collect(),
        pairwise: pairs,
        tally: Tally::default(),
    })
}

fn kept(obs: &[ViaObservation]) -> Result<(Vec<&ViaObservation>, usize)> {
    let kept: Vec<&ViaObservation> = obs.iter().filter(|o| o.clean()).collect();
    let excluded = obs.len() - kept.len();
    if excluded * 100 > obs.len() {
        return Err(LabError::TooManyExclusions { excluded, replicas: obs.len() });
    }
    Ok((kept, excluded))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MidpointReport {
    pub n: f64,
    pub stats: StreamStats,
    pub min_gain: f64,
    pub excluded: usize,
    pub gains: Vec<f64>,
}

/// Statistics of `T(-n e1, 0, n e1) - T(-n e1, n e1)`, which is nonnegative
/// replica by replica and half of whose mean bounds `E T_n - g n` from below.
pub fn midpoint_gain(setup: &Setup, n: f64, replicas: usize, master: u64) -> Result<MidpointReport> {
    let obs = observe(setup, n, &[], replicas, master, Stream::Midpoint, false)?;
    let (kept, excluded) = kept(&obs)?;
    let gains: Vec<f64> = kept.iter().map(|o| o.gain()).collect();
    Ok(MidpointReport {
        n,
        stats: StreamStats::from_values("passage time", gains.iter().copied()),
        min_gain: gains.iter().copied().fold(f64::INFINITY, f64::min),
        excluded,
        gains,
    })
}

/// Outcome of the argmin events over a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArgminReport {
    pub n: f64,
    /// `P(A^y)` per family point.
    pub events: Vec<EventEstimate>,
    /// `P({T(a,0,b) - T(a,y,b) > K} ∩ A^y)` per family point.
    pub joint: Vec<EventEstimate>,
    pub threshold: f64,
    /// Replicas whose minimum over the family was attained twice.
    pub ties: u64,
    /// Replicas where more than one event fired; zero by definition.
    pub multiple: u64,
    pub excluded: usize,
}

impl ArgminReport {
    pub fn total(&self) -> f64 {
        self.events.iter().map(|e| e.p_hat).sum()
    }
}

/// Index `i` such that `values[i] < values[j]` for all `j != i`.
fn strict_argmin(values: &[f64]) -> Option<usize> {
    let (best, &v) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    values
        .iter()
        .enumerate()
        .all(|(j, &w)| j == best || v < w)
        .then_some(best)
}

pub fn argmin_events(obs: &[ViaObservation], n: f64, threshold: f64) -> Result<ArgminReport> {
    let (kept, excluded) = kept(obs)?;
    let m = kept.first().map_or(0, |o| o.anchors() - 1);
    if m == 0 {
        return Err(invalid("the family is empty"));
    }
    let mut hits = vec![0u64; m];
    let mut joint = vec![0u64; m];
    let (mut ties, mut multiple) = (0u64, 0u64);
    for o in &kept {
        let via: Vec<f64> = (1..=m).map(|i| o.t_via(i)).collect();
        // event-by-event evaluation of the definition, independent of strict_argmin
        let fired: Vec<usize> = (0..m)
            .filter(|&y| (0..m).all(|z| z == y || via[y] < via[z]))
            .collect();
        if fired.len() > 1 {
            multiple += 1;
        }
        match strict_argmin(&via) {
            Some(y) => {
                debug_assert_eq!(fired, vec![y]);
                hits[y] += 1;
                if o.t_via(0) - via[y] > threshold {
                    joint[y] += 1;
                }
            }
            None => ties += 1,
        }
    }
    let trials = kept.len() as u64;
    Ok(ArgminReport {
        n,
        events: hits.iter().enumerate().map(|(y, &h)| EventEstimate::new(format!("A^y[{y}]"), h, trials)).collect(),
        joint: joint
            .iter()
            .enumerate()
            .map(|(y, &h)| EventEstimate::new(format!("gain>K and A^y[{y}]"), h, trials))
            .collect(),
        threshold,
        ties,
        multiple,
        excluded,
    })
}

/// Frequencies of the argmin events `A^y` over the family, together with
/// their intersections with `{T(a,0,b) - T(a,y,b) > threshold}`.
pub fn argmin_lambda(
    setup: &Setup,
    n: f64,
    family: &LambdaFamily,
    threshold: f64,
    replicas: usize,
    master: u64,
) -> Result<ArgminReport> {
    if family.is_empty() {
        return Err(invalid("the family is empty"));
    }
    let obs = observe(setup, n, &family.points, replicas, master, Stream::Argmin, false)?;
    argmin_events(&obs, n, threshold)
}

/// Thresholds of the separation and deviation events.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationThresholds {
    /// Lower limit on `T(a, b)` between distinct anchors.
    pub separation: f64,
    /// Upper limit on `|T(z, y) - E T(z, y)|`.
    pub deviation: f64,
}

impl DeviationThresholds {
    /// `sqrt(n) phi^{-3/5}` and `sqrt(n) phi^{-2/3}`.
    pub fn for_scale(n: f64, phi: f64) -> Self {
        Self {
            separation: n.sqrt() * phi.powf(-0.6),
            deviation: n.sqrt() * phi.powf(-2.0 / 3.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub n: f64,
    pub phi: f64,
    pub thresholds: DeviationThresholds,
    pub separation: EventEstimate,
    pub deviation: EventEstimate,
    pub both: EventEstimate,
    /// `phi^{-1/6}`, the decay shape of the deviation failure probability.
    pub chebyshev_shape: f64,
    pub excluded: usize,
}

/// Separation event (all anchor pairs at passage time at least the first
/// threshold) and deviation event (every `T(±n e1, anchor)` within the
/// second threshold of its mean). Means are the replica means of the same
/// campaign, computed in a first pass.
pub fn deviation_events(obs: &[ViaObservation], n: f64, phi: f64, thresholds: DeviationThresholds) -> Result<DeviationReport> {
    let (kept, excluded) = kept(obs)?;
    if kept.is_empty() {
        return Err(invalid("no clean replicas"));
    }
    let m = kept[0].anchors();
    let count = kept.len() as f64;
    let mean_a: Vec<f64> = (0..m).map(|i| kept.iter().map(|o| o.from_a[i]).sum::<f64>() / count).collect();
    let mean_b: Vec<f64> = (0..m).map(|i| kept.iter().map(|o| o.to_b[i]).sum::<f64>() / count).collect();
    let (mut sep, mut dev, mut both) = (0u64, 0u64, 0u64);
    for o in &kept {
        let s = o.pairwise.iter().all(|&t| t >= thresholds.separation);
        let v = (0..m).all(|i| {
            (o.from_a[i] - mean_a[i]).abs().max((o.to_b[i] - mean_b[i]).abs()) <= thresholds.deviation
        });
        sep += u64::from(s);
        dev += u64::from(v);
        both += u64::from(s && v);
    }
    let trials = kept.len() as u64;
    Ok(DeviationReport {
        n,
        phi,
        thresholds,
        separation: EventEstimate::new("separation", sep, trials),
        deviation: EventEstimate::new("deviation", dev, trials),
        both: EventEstimate::new("separation and deviation", both, trials),
        chebyshev_shape: phi.powf(-1.0 / 6.0),
        excluded,
    })
}

pub fn event_a24_a25(
    setup: &Setup,
    n: f64,
    family: &LambdaFamily,
    phi: f64,
    thresholds: DeviationThresholds,
    replicas: usize,
    master: u64,
) -> Result<DeviationReport> {
    let obs = observe(setup, n, &family.points, replicas, master, Stream::Deviation, true)?;
    deviation_events(&obs, n, phi, thresholds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::build_lambda;

    fn setup() -> Setup {
        Setup::new(2.0, 2).unwrap()
    }

    #[test]
    fn strict_argmin_handles_ties() {
        assert_eq!(strict_argmin(&[3.0, 1.0, 2.0]), Some(1));
        assert_eq!(strict_argmin(&[1.0, 1.0, 2.0]), None);
        assert_eq!(strict_argmin(&[5.0]), Some(0));
    }

    #[test]
    fn gains_are_nonnegative() {
        let r = midpoint_gain(&setup(), 6.0, 20, 3).unwrap();
        assert!(r.min_gain >= -1e-9);
        assert_eq!(r.stats.count(), 20);
    }

    #[test]
    fn singleton_family_always_wins() {
        let f = build_lambda(6.0, 1.0, 2).unwrap();
        let r = argmin_lambda(&setup(), 6.0, &f, 0.0, 10, 4).unwrap();
        assert_eq!(r.events[0].p_hat, 1.0);
        assert_eq!(r.ties, 0);
    }

    #[test]
    fn argmin_events_are_disjoint() {
        let f = build_lambda(8.0, 9.0, 2).unwrap();
        let r = argmin_lambda(&setup(), 8.0, &f, 0.0, 30, 5).unwrap();
        assert_eq!(r.multiple, 0);
        assert!(r.total() <= 1.0 + 1e-12);
        let hits: u64 = r.events.iter().map(|e| e.hits).sum();
        assert_eq!(hits + r.ties, 30);
    }

    #[test]
    fn zero_thresholds_always_hold() {
        let f = build_lambda(6.0, 4.0, 2).unwrap();
        let t = DeviationThresholds { separation: 0.0, deviation: f64::INFINITY };
        let r = event_a24_a25(&setup(), 6.0, &f, 4.0, t, 10, 6).unwrap();
        assert_eq!(r.separation.p_hat, 1.0);
        assert_eq!(r.deviation.p_hat, 1.0);
    }

    #[test]
    fn thresholds_formula() {
        let t = DeviationThresholds::for_scale(64.0, 1.0);
        assert_eq!(t.separation, 8.0);
        assert_eq!(t.deviation, 8.0);
    }
}
