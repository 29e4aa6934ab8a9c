use fpp_core::io::{
    decode_sample_binary, decode_sample_csv, encode_sample_binary, encode_sample_csv,
};
use fpp_core::region::{ball_volume, dist2, lex_cmp};
use fpp_core::*;
use rand::Rng;

/// Upper 1% points of the chi-square distribution (scipy.stats.chi2.ppf(0.99, df)).
fn chi2_99(df: usize) -> f64 {
    match df {
        8 => 20.090_235_029_663_23,
        9 => 21.665_994_333_461_924,
        _ => panic!("no table entry for df={df}"),
    }
}

fn poisson_pmf(k: usize, mean: f64) -> f64 {
    let mut p = (-mean).exp();
    for i in 1..=k {
        p *= mean / i as f64;
    }
    p
}

/// Pearson statistic of `counts` against Poisson(mean) with bins 0..=last-1
/// and a pooled tail bin.
fn poisson_chi2(counts: &[usize], mean: f64, last: usize) -> f64 {
    let n = counts.len() as f64;
    let mut observed = vec![0usize; last + 1];
    for &c in counts {
        observed[c.min(last)] += 1;
    }
    let mut head = 0.0;
    let mut stat = 0.0;
    for (k, &o) in observed.iter().enumerate() {
        let p = if k < last {
            let p = poisson_pmf(k, mean);
            head += p;
            p
        } else {
            1.0 - head
        };
        let e = n * p;
        stat += (o as f64 - e).powi(2) / e;
    }
    stat
}

#[test]
fn resampled_ball_counts_are_poisson() {
    let region = BoxRegion::new(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap();
    let center = [0.5, -0.25];
    let counts: Vec<usize> = (0..10_000u64)
        .map(|r| {
            let s = sample_poisson(&region, 1.0, seed::mix(41, r), 2).unwrap();
            let t = resample_region(&s, &center, 1.0, seed::mix(42, r)).unwrap();
            t.count_in_ball(&center, 1.0)
        })
        .collect();
    let stat = poisson_chi2(&counts, ball_volume(2, 1.0), 9);
    assert!(stat < chi2_99(9), "chi-square {stat}");
}

#[test]
fn disjoint_sub_box_counts_are_independent_poisson() {
    let region = BoxRegion::new(vec![0.0, 0.0], vec![4.0, 2.0]).unwrap();
    let a = BoxRegion::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
    let b = BoxRegion::new(vec![2.0, 0.0], vec![4.0, 2.0]).unwrap();
    let reps = 10_000u64;
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    for r in 0..reps {
        let s = sample_poisson(&region, 1.0, seed::mix(77, r), 2).unwrap();
        ca.push(s.points().filter(|p| a.contains(p)).count());
        cb.push(s.points().filter(|p| b.contains(p)).count());
    }
    assert!(poisson_chi2(&ca, 4.0, 9) < chi2_99(9));
    assert!(poisson_chi2(&cb, 4.0, 9) < chi2_99(9));
    let n = reps as f64;
    let ma = ca.iter().sum::<usize>() as f64 / n;
    let mb = cb.iter().sum::<usize>() as f64 / n;
    let cov: f64 = ca
        .iter()
        .zip(&cb)
        .map(|(&x, &y)| (x as f64 - ma) * (y as f64 - mb))
        .sum::<f64>()
        / (n - 1.0);
    // Var(X Y) = 16 for independent Poisson(4) counts
    let sigma = (16.0f64 / n).sqrt();
    assert!(cov.abs() < 3.0 * sigma, "covariance {cov}");
}

#[test]
fn grid_queries_match_linear_scan() {
    let region = BoxRegion::new(vec![0.0, 0.0], vec![40.0, 25.0]).unwrap();
    let sample = sample_poisson(&region, 1.0, 1234, 2).unwrap();
    assert!(sample.len() > 900);
    let pts: Vec<&[f64]> = sample.points().collect();
    let mut rng = seed::rng(5);
    for cell_size in [0.3, 1.0, 3.7] {
        let index = build_index(&sample, cell_size).unwrap();
        for _ in 0..100 {
            let c = [rng.random_range(-5.0..45.0), rng.random_range(-5.0..30.0)];
            let r: f64 = rng.random_range(0.0..6.0);
            let mut expected: Vec<usize> = (0..pts.len())
                .filter(|&i| dist2(pts[i], &c) <= r * r)
                .collect();
            expected.sort_unstable();
            assert_eq!(index.ball_indices(&c, r), expected);

            let best = (0..pts.len())
                .min_by(|&i, &j| {
                    dist2(pts[i], &c)
                        .total_cmp(&dist2(pts[j], &c))
                        .then(lex_cmp(pts[i], pts[j]))
                })
                .unwrap();
            assert_eq!(index.nearest_index(&c).unwrap(), best);
        }
    }
}

#[test]
fn ball_around_center_with_diameter_radius_holds_everything() {
    let region = BoxRegion::new(vec![0.0, 0.0, 0.0], vec![5.0, 4.0, 3.0]).unwrap();
    let sample = sample_poisson(&region, 2.0, 9, 3).unwrap();
    let index = build_index(&sample, 1.0).unwrap();
    assert_eq!(
        index.ball_points(&region.center(), region.diameter()).len(),
        sample.len()
    );
}

#[test]
fn serialized_samples_round_trip() {
    let region = BoxRegion::new(vec![0.0, 0.0], vec![6.0, 3.0]).unwrap();
    let sample = sample_poisson(&region, 1.0, 2024, 2).unwrap();
    let bin = decode_sample_binary(&encode_sample_binary(&sample)).unwrap();
    let csv = decode_sample_csv(&encode_sample_csv(&sample)).unwrap();
    assert_eq!(bin.coords, sample.coords());
    assert_eq!(csv.coords, sample.coords());
    let rebuilt = PoissonSample::from_points(bin.coords, region, 1.0).unwrap();
    assert_eq!(rebuilt.coords(), sample.coords());
}

#[test]
fn regeneration_is_bitwise_stable() {
    let region = BoxRegion::new(vec![-2.0, -2.0], vec![9.0, 2.0]).unwrap();
    let a = sample_poisson(&region, 1.5, 31, 2).unwrap();
    let b = sample_poisson(&region, 1.5, 31, 2).unwrap();
    let bits = |s: &PoissonSample| s.coords().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    let alpha = AlphaParam::new(2.0).unwrap();
    let ia = build_index(&a, 1.0).unwrap();
    let ib = build_index(&b, 1.0).unwrap();
    let ga = passage_time(
        &ia,
        &[0.0, 0.0],
        &[7.0, 0.0],
        alpha,
        &GeodesicOptions::default(),
    )
    .unwrap();
    let gb = passage_time(
        &ib,
        &[0.0, 0.0],
        &[7.0, 0.0],
        alpha,
        &GeodesicOptions::default(),
    )
    .unwrap();
    assert_eq!(ga, gb);
}
