//! Passage-time campaigns along `e1` and the statistics derived from them:
//! `E T_n`, `psi(n) = Var T_n`, `phi(n) = sqrt(n / psi(n))`, the time-constant
//! proxy and the one-sided fluctuation statistic.

use fpp_core::stats::Z95;
use fpp_core::{passage_time, StreamStats};
use serde::{Deserialize, Serialize};

use crate::campaign::{replica_seed, replicate, solve_in_window, Setup, Stream, Tally};
use crate::error::{invalid, LabError, Result};

pub const TIME_UNITS: &str = "passage time";

/// Replicated estimate of `T_n = T(0, n e1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TEstimate {
    pub n: f64,
    pub stats: StreamStats,
    /// Per-replica value, `None` where the replica was excluded.
    pub values: Vec<Option<f64>>,
    pub excluded: usize,
    pub tally: Tally,
}

impl TEstimate {
    pub fn replicas(&self) -> usize {
        self.values.len()
    }

    pub fn kept(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }
}

/// Replica values in order, or `None` where the window never came out clean.
pub fn sample_t(setup: &Setup, n: f64, replicas: usize, master: u64) -> Result<Vec<(Option<f64>, Tally)>> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid(format!("scale n must be positive, got {n}")));
    }
    let origin = vec![0.0; setup.d];
    let target = setup.unit(0, n);
    let width = setup.padding.width(n);
    replicate(replicas, |r| {
        let seed = replica_seed(master, Stream::Estimate, n, r);
        let run = solve_in_window(setup, &origin, &target, width, seed, |index, tally| {
            let g = passage_time(index, &origin, &target, setup.alpha, &setup.geodesic)?;
            tally.record(&g);
            Ok(g.cost)
        })?;
        let value = run.tally.clean().then_some(run.value);
        Ok((value, run.tally))
    })
    .into_iter()
    .collect()
}

/// Each replica draws its own padded window and computes `T(0, n e1)`.
/// Replicas whose geodesic is uncertified or still touches the window
/// boundary after all growth steps are excluded; more than 1% excluded is an
/// error.
pub fn estimate_t(setup: &Setup, n: f64, replicas: usize, master: u64) -> Result<TEstimate> {
    if replicas < 2 {
        return Err(invalid("need at least 2 replicas"));
    }
    let rows = sample_t(setup, n, replicas, master)?;
    let mut tally = Tally::default();
    let mut values = Vec::with_capacity(replicas);
    for (v, t) in rows {
        tally.absorb(&t);
        values.push(v);
    }
    let excluded = values.iter().filter(|v| v.is_none()).count();
    if excluded * 100 > replicas {
        return Err(LabError::TooManyExclusions { excluded, replicas });
    }
    let stats = StreamStats::from_values(TIME_UNITS, values.iter().flatten().copied());
    Ok(TEstimate { n, stats, values, excluded, tally })
}

/// `E T_N / N` at the largest `N`. Since `T` is subadditive, `E T_N / N`
/// is at least the time constant, so this proxy is biased upward.
pub fn g_hat(estimates: &[TEstimate]) -> Result<f64> {
    let last = estimates
        .iter()
        .max_by(|a, b| a.n.total_cmp(&b.n))
        .ok_or_else(|| invalid("no estimates"))?;
    Ok(last.stats.mean() / last.n)
}

/// `T_mean[n] - n * g`. With `g` from [`g_hat`] this underestimates the
/// fluctuation `E T_n - g n`.
pub fn fluctuation_lower_bound(means: &[(f64, f64)], g: f64) -> Vec<f64> {
    means.iter().map(|&(n, m)| m - n * g).collect()
}

/// `sqrt(n / psi)`, or NaN when the variance is not positive.
pub fn phi_hat(n: f64, var: f64) -> f64 {
    if var > 0.0 {
        (n / var).sqrt()
    } else {
        f64::NAN
    }
}

/// One CSV row of the fluctuation report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationRow {
    pub alpha: f64,
    pub d: usize,
    pub n: f64,
    pub replicas: usize,
    #[serde(rename = "mean_T")]
    pub mean_t: f64,
    #[serde(rename = "var_T")]
    pub var_t: f64,
    pub phi_hat: f64,
    pub g_hat: f64,
    pub fluct_lb: f64,
    pub ci95_mean: f64,
    pub ci95_var: f64,
    pub excluded: usize,
}

impl FluctuationRow {
    pub fn std_err(&self) -> f64 {
        self.ci95_mean / Z95
    }

    pub fn var_std_err(&self) -> f64 {
        self.ci95_var / Z95
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationReport {
    pub alpha: f64,
    pub d: usize,
    pub replicas: usize,
    pub master_seed: u64,
    pub g_hat: f64,
    pub rows: Vec<FluctuationRow>,
    /// Least-squares line through the upper half of the `n` values; reported
    /// for comparison only.
    pub affine_fit: Option<AffineFit>,
}

impl FluctuationReport {
    pub fn from_estimates(setup: &Setup, master_seed: u64, estimates: &[TEstimate]) -> Result<Self> {
        let mut sorted: Vec<&TEstimate> = estimates.iter().collect();
        sorted.sort_by(|a, b| a.n.total_cmp(&b.n));
        let g = g_hat(estimates)?;
        let rows: Vec<FluctuationRow> = sorted
            .iter()
            .map(|e| {
                let var = e.stats.variance();
                FluctuationRow {
                    alpha: setup.alpha.value(),
                    d: setup.d,
                    n: e.n,
                    replicas: e.replicas(),
                    mean_t: e.stats.mean(),
                    var_t: var,
                    phi_hat: phi_hat(e.n, var),
                    g_hat: g,
                    fluct_lb: e.stats.mean() - e.n * g,
                    ci95_mean: e.stats.ci95(),
                    ci95_var: e.stats.ci95_var(),
                    excluded: e.excluded,
                }
            })
            .collect();
        let replicas = rows.iter().map(|r| r.replicas).max().unwrap_or(0);
        let affine_fit = affine_fit(&rows);
        Ok(Self {
            alpha: setup.alpha.value(),
            d: setup.d,
            replicas,
            master_seed,
            g_hat: g,
            rows,
            affine_fit,
        })
    }

    pub fn row(&self, n: f64) -> Option<&FluctuationRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// `(log phi_hat(n), fluct_lb(n))` pairs for the growth diagnostic.
    pub fn diagnostic(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| (r.phi_hat.ln(), r.fluct_lb))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("rows serialize");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

fn affine_fit(rows: &[FluctuationRow]) -> Option<AffineFit> {
    let top = &rows[rows.len() / 2..];
    if top.len() < 2 {
        return None;
    }
    let k = top.len() as f64;
    let mx = top.iter().map(|r| r.n).sum::<f64>() / k;
    let my = top.iter().map(|r| r.mean_t).sum::<f64>() / k;
    let sxx: f64 = top.iter().map(|r| (r.n - mx).powi(2)).sum();
    let sxy: f64 = top.iter().map(|r| (r.n - mx) * (r.mean_t - my)).sum();
    let slope = sxy / sxx;
    Some(AffineFit { slope, intercept: my - slope * mx })
}

/// Read back the CSV written by [`FluctuationReport::to_csv`].
pub fn parse_fluctuation_csv(text: &str) -> Result<Vec<FluctuationRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let expected = [
        "alpha", "d", "n", "replicas", "mean_T", "var_T", "phi_hat", "g_hat", "fluct_lb",
        "ci95_mean", "ci95_var", "excluded",
    ];
    let headers = reader
        .headers()
        .map_err(|e| LabError::Report(e.to_string()))?;
    if !headers.iter().eq(expected.iter().copied()) {
        return Err(LabError::Report(format!("unexpected header {headers:?}")));
    }
    let mut rows = Vec::new();
    for rec in reader.deserialize() {
        let row: FluctuationRow = rec.map_err(|e| LabError::Report(e.to_string()))?;
        if !(row.n > 0.0) || row.d < 2 {
            return Err(LabError::Report(format!("bad row for n = {}", row.n)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Standard error of `fluct_lb[n]` when `g_hat` comes from the independent
/// campaign at `big`.
pub fn fluct_lb_sigma(row: &FluctuationRow, big: &FluctuationRow) -> f64 {
    if row.n == big.n {
        return 0.0;
    }
    let ratio = row.n / big.n;
    (row.std_err().powi(2) + ratio * ratio * big.std_err().powi(2)).sqrt()
}

/// Standard error of `T_mean[2n] - 2 T_mean[n]` for independent campaigns.
pub fn doubling_sigma(small: &FluctuationRow, double: &FluctuationRow) -> f64 {
    (double.std_err().powi(2) + 4.0 * small.std_err().powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpp_core::{build_index, AlphaParam, BoxRegion, GeodesicOptions, PoissonSample};

    fn row(n: f64, mean: f64) -> FluctuationRow {
        FluctuationRow {
            alpha: 2.0,
            d: 2,
            n,
            replicas: 10,
            mean_t: mean,
            var_t: 4.0,
            phi_hat: phi_hat(n, 4.0),
            g_hat: 0.5,
            fluct_lb: mean - 0.5 * n,
            ci95_mean: 0.1,
            ci95_var: 0.2,
            excluded: 0,
        }
    }

    #[test]
    fn unit_grid_line_has_unit_time_constant() {
        let pts: Vec<Vec<f64>> = (-2..=22).map(|i| vec![i as f64, 0.0]).collect();
        let region = BoxRegion::new(vec![-3.0, -1.0], vec![23.0, 1.0]).unwrap();
        let sample = PoissonSample::from_vecs(&pts, region, 1.0).unwrap();
        let index = build_index(&sample, 1.0).unwrap();
        let alpha = AlphaParam::new(2.0).unwrap();
        let t = passage_time(&index, &[0.0, 0.0], &[20.0, 0.0], alpha, &GeodesicOptions::default())
            .unwrap()
            .cost;
        let est = TEstimate {
            n: 20.0,
            stats: StreamStats::from_values(TIME_UNITS, [t, t]),
            values: vec![Some(t), Some(t)],
            excluded: 0,
            tally: Tally::default(),
        };
        assert_eq!(g_hat(&[est]).unwrap(), 1.0);
    }

    #[test]
    fn identical_seeds_give_identical_values() {
        let setup = Setup::new(2.0, 2).unwrap();
        let a = estimate_t(&setup, 6.0, 8, 5).unwrap();
        let b = estimate_t(&setup, 6.0, 8, 5).unwrap();
        assert_eq!(a.values, b.values);
        let c = estimate_t(&setup, 6.0, 8, 6).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn fluctuation_is_zero_at_calibration_point() {
        let lb = fluctuation_lower_bound(&[(8.0, 6.0), (16.0, 10.0)], 10.0 / 16.0);
        assert_eq!(lb[1], 0.0);
        assert_eq!(lb[0], 1.0);
    }

    #[test]
    fn shifting_one_scale_shifts_its_fluctuation() {
        let c = 0.75;
        let base = fluctuation_lower_bound(&[(8.0, 6.0), (16.0, 10.0)], 10.0 / 16.0);
        let shifted = fluctuation_lower_bound(&[(8.0, 6.0 + c), (16.0, 10.0)], 10.0 / 16.0);
        assert_eq!(shifted[0] - base[0], c);
    }

    #[test]
    fn phi_and_psi_are_reciprocal() {
        for (n, v) in [(8.0, 0.3), (128.0, 2.7), (16.0, 1.0)] {
            let p = phi_hat(n, v);
            assert!((v * p * p - n).abs() <= 1e-12 * n);
        }
        assert!(phi_hat(4.0, 0.0).is_nan());
    }

    #[test]
    fn csv_round_trip_and_header() {
        let report = FluctuationReport {
            alpha: 2.0,
            d: 2,
            replicas: 10,
            master_seed: 1,
            g_hat: 0.5,
            rows: vec![row(8.0, 5.0), row(16.0, 9.0)],
            affine_fit: None,
        };
        let text = report.to_csv();
        assert!(text.starts_with(
            "alpha,d,n,replicas,mean_T,var_T,phi_hat,g_hat,fluct_lb,ci95_mean,ci95_var,excluded\n"
        ));
        assert_eq!(parse_fluctuation_csv(&text).unwrap(), report.rows);
        assert!(parse_fluctuation_csv("a,b\n1,2\n").is_err());
        let json: FluctuationReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json, report);
    }

    #[test]
    fn affine_fit_recovers_a_line() {
        let rows: Vec<FluctuationRow> = [8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&n| row(n, 0.7 * n + 3.0))
            .collect();
        let fit = affine_fit(&rows).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-9);
    }
}
