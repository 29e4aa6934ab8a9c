use fpp_core::StreamStats;
use fpp_lab::estimator::{doubling_sigma, fluct_lb_sigma};
use fpp_lab::{estimate_t, FluctuationReport, Setup};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn merge_small_cases() {
    let empty = StreamStats::new("t");
    let a = StreamStats::from_values("t", [1.0, 2.0]);
    assert_eq!(a.merge(&empty).unwrap(), a);
    assert_eq!(empty.merge(&a).unwrap(), a);
    let b = StreamStats::from_values("t", [3.0, 4.0]);
    let ab = a.merge(&b).unwrap();
    assert_eq!(ab.count(), 4);
    assert_eq!(ab.mean(), 2.5);
    // (1.5^2 + 0.5^2) * 2 / 3
    assert!((ab.variance() - 5.0 / 3.0).abs() < 1e-15);
    assert!(a.merge(&StreamStats::new("other")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_splits_match_single_pass(
        data in prop::collection::vec(-50.0f64..50.0, 2..200),
        cuts in prop::collection::vec(0.0f64..1.0, 0..6),
    ) {
        // two-pass oracle
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let m2: f64 = data.iter().map(|x| (x - mean).powi(2)).sum();
        let mut idx: Vec<usize> = cuts.iter().map(|c| (c * data.len() as f64) as usize).collect();
        idx.push(0);
        idx.push(data.len());
        idx.sort_unstable();
        let parts: Vec<StreamStats> = idx
            .windows(2)
            .map(|w| StreamStats::from_values("t", data[w[0]..w[1]].iter().copied()))
            .collect();
        let left = parts.iter().fold(StreamStats::new("t"), |acc, p| acc.merge(p).unwrap());
        let right = parts.iter().rev().fold(StreamStats::new("t"), |acc, p| p.merge(&acc).unwrap());
        for s in [&left, &right] {
            prop_assert_eq!(s.count(), data.len() as u64);
            prop_assert!(rel_close(s.mean(), mean, 1e-9) || (s.mean() - mean).abs() < 1e-9);
            prop_assert!(rel_close(s.m2(), m2, 1e-9) || (s.m2() - m2).abs() < 1e-9);
        }
    }
}

#[test]
fn independent_reruns_agree_within_three_sigma() {
    let setup = Setup::new(2.0, 2).unwrap();
    let a = estimate_t(&setup, 20.0, 1000, 101).unwrap();
    let b = estimate_t(&setup, 20.0, 1000, 202).unwrap();
    let sigma = (a.stats.std_err().powi(2) + b.stats.std_err().powi(2)).sqrt();
    assert!(
        (a.stats.mean() - b.stats.mean()).abs() <= 3.0 * sigma,
        "{} vs {} (sigma {sigma})",
        a.stats.mean(),
        b.stats.mean()
    );
    assert!(a.stats.variance() > 0.0);
}

#[test]
fn small_campaign_report_properties() {
    let setup = Setup::new(2.0, 2).unwrap();
    let ns = [4.0, 8.0, 16.0];
    let est: Vec<_> = ns
        .iter()
        .map(|&n| estimate_t(&setup, n, 300, 77).unwrap())
        .collect();
    let report = FluctuationReport::from_estimates(&setup, 77, &est).unwrap();
    let big = report.rows.last().unwrap();
    assert_eq!(big.fluct_lb, 0.0);
    assert_eq!(report.g_hat, big.mean_t / big.n);
    for r in &report.rows {
        // psi * phi^2 = n
        assert!((r.var_t * r.phi_hat * r.phi_hat - r.n).abs() <= 1e-12 * r.n);
        assert!(r.fluct_lb >= -3.0 * fluct_lb_sigma(r, big));
        assert!(r.var_t - 3.0 * r.var_std_err() > 0.0);
    }
    for w in report.rows.windows(2) {
        assert!(w[1].mean_t <= 2.0 * w[0].mean_t + 3.0 * doubling_sigma(&w[0], &w[1]));
        // E T_n / n is nonincreasing along doublings
        let (g0, g1) = (w[0].mean_t / w[0].n, w[1].mean_t / w[1].n);
        let s = (w[0].std_err() / w[0].n).hypot(w[1].std_err() / w[1].n);
        assert!(g1 <= g0 + 3.0 * s, "{g1} > {g0}");
    }
    let again: Vec<_> = ns
        .iter()
        .map(|&n| estimate_t(&setup, n, 300, 77).unwrap())
        .collect();
    let rerun = FluctuationReport::from_estimates(&setup, 77, &again).unwrap();
    assert_eq!(report.to_csv(), rerun.to_csv());
    assert_eq!(report.to_json(), rerun.to_json());
}
