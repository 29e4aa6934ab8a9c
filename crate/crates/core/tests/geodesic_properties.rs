use fpp_core::geodesic::{improvement_ratio, ORACLE_BOUND};
use fpp_core::region::dist2;
use fpp_core::*;
use proptest::prelude::*;

fn window() -> BoxRegion {
    BoxRegion::new(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap()
}

fn doubling_opts() -> GeodesicOptions {
    GeodesicOptions {
        initial_cutoff: Some(0.3),
        exact_threshold: 0,
        max_doublings: 40,
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || a == b
}

fn point_set() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..4.0, 2), 1..=12)
}

fn query() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..5.0, 2)
}

fn dedup(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| region::lex_cmp(a, b));
    pts.dedup();
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn doubling_search_matches_oracle(
        pts in point_set(),
        x in query(),
        y in query(),
        alpha in prop::sample::select(vec![1.2, 1.5, 2.0, 3.0]),
    ) {
        let pts = dedup(pts);
        let alpha = AlphaParam::new(alpha).unwrap();
        let sample = PoissonSample::from_vecs(&pts, window(), 1.0).unwrap();
        let index = build_index(&sample, 0.5).unwrap();
        let (oracle, oracle_path) = brute_force_passage_time(&pts, &x, &y, alpha).unwrap();
        for opts in [doubling_opts(), GeodesicOptions::default()] {
            let g = passage_time(&index, &x, &y, alpha, &opts).unwrap();
            prop_assert!(g.certified);
            prop_assert!(rel_close(g.cost, oracle, 1e-12), "{} vs {}", g.cost, oracle);
            prop_assert_eq!(g.vertex(0), oracle_path[0].as_slice());
            prop_assert_eq!(g.vertex(g.len() - 1), oracle_path.last().unwrap().as_slice());
        }
        let as_result = GeodesicResult::from_vertices(&oracle_path, alpha).unwrap();
        prop_assert!(audit_local_optimality(&as_result, &index).is_empty());
    }

    #[test]
    fn via_matches_oracle_sum(pts in point_set(), a in query(), y in query(), b in query()) {
        let pts = dedup(pts);
        let alpha = AlphaParam::new(2.0).unwrap();
        let sample = PoissonSample::from_vecs(&pts, window(), 1.0).unwrap();
        let index = build_index(&sample, 0.5).unwrap();
        let via = passage_time_via(&index, &a, &y, &b, alpha, &doubling_opts()).unwrap();
        let (ay, _) = brute_force_passage_time(&pts, &a, &y, alpha).unwrap();
        let (yb, _) = brute_force_passage_time(&pts, &y, &b, alpha).unwrap();
        let (ab, _) = brute_force_passage_time(&pts, &a, &b, alpha).unwrap();
        prop_assert!(rel_close(via, ay + yb, 1e-12));
        prop_assert!(via >= ab - 1e-9);
    }

    #[test]
    fn inserting_a_point_never_increases_passage_time(
        pts in point_set(),
        extra in prop::collection::vec(0.0f64..4.0, 2),
        x in query(),
        y in query(),
    ) {
        let pts = dedup(pts);
        prop_assume!(!pts.contains(&extra));
        let alpha = AlphaParam::new(1.5).unwrap();
        let before = PoissonSample::from_vecs(&pts, window(), 1.0).unwrap();
        let mut more = pts.clone();
        more.push(extra);
        let after = PoissonSample::from_vecs(&more, window(), 1.0).unwrap();
        let ib = build_index(&before, 0.5).unwrap();
        let ia = build_index(&after, 0.5).unwrap();
        // D(x) and D(y) may move to the new point, so compare from the same anchors
        let dx = ib.nearest(&x).unwrap();
        let dy = ib.nearest(&y).unwrap();
        let tb = passage_time(&ib, &dx, &dy, alpha, &doubling_opts()).unwrap().cost;
        let ta = passage_time(&ia, &dx, &dy, alpha, &doubling_opts()).unwrap().cost;
        prop_assert!(ta <= tb + 1e-12);
    }
}

#[test]
fn poisson_geodesics_satisfy_metric_properties() {
    let alpha = AlphaParam::new(2.0).unwrap();
    let region = BoxRegion::new(vec![0.0, 0.0], vec![20.0, 20.0]).unwrap();
    let opts = GeodesicOptions::default();
    let mut rng_seed = 11u64;
    let mut next = move || {
        rng_seed = seed::finalize(rng_seed.wrapping_add(seed::MIX_GAMMA));
        (rng_seed >> 11) as f64 / (1u64 << 53) as f64 * 20.0
    };
    for s in 0..5 {
        let sample = sample_poisson(&region, 1.0, seed::mix(5, s), 2).unwrap();
        let index = build_index(&sample, 1.0).unwrap();
        for _ in 0..20 {
            let (x, y, z) = ([next(), next()], [next(), next()], [next(), next()]);
            let xz = passage_time(&index, &x, &z, alpha, &opts).unwrap();
            let xy = passage_time(&index, &x, &y, alpha, &opts).unwrap();
            let yz = passage_time(&index, &y, &z, alpha, &opts).unwrap();
            let zx = passage_time(&index, &z, &x, alpha, &opts).unwrap();
            assert!(xz.certified && xy.certified && yz.certified);
            assert!(xz.cost <= xy.cost + yz.cost + 1e-9);
            assert!(rel_close(xz.cost, zx.cost, 1e-12));
            assert_eq!(
                passage_time(&index, &x, &x, alpha, &opts).unwrap().cost,
                0.0
            );
            assert_eq!(xz.cost, xz.recomputed_cost());
            assert!(audit_local_optimality(&xz, &index).is_empty());
        }
    }
}

#[test]
fn multi_target_search_matches_single_targets() {
    let alpha = AlphaParam::new(2.0).unwrap();
    let region = BoxRegion::new(vec![-10.0, -10.0], vec![30.0, 10.0]).unwrap();
    let sample = sample_poisson(&region, 1.0, 99, 2).unwrap();
    let index = build_index(&sample, 1.0).unwrap();
    let opts = GeodesicOptions::default();
    let targets = [[20.0, 0.0], [5.0, 5.0], [0.0, 0.0], [20.0, 0.0]];
    let multi = passage_times_from(&index, &[0.0, 0.0], &targets, alpha, &opts).unwrap();
    for (t, m) in targets.iter().zip(&multi) {
        let single = passage_time(&index, &[0.0, 0.0], t, alpha, &opts).unwrap();
        assert_eq!(single.cost, m.cost);
        assert_eq!(single.path(), m.path());
    }
}

#[test]
fn ball_crossing_matches_vertex_scan() {
    let alpha = AlphaParam::new(2.0).unwrap();
    let region = BoxRegion::new(vec![-10.0, -10.0], vec![30.0, 10.0]).unwrap();
    let sample = sample_poisson(&region, 1.0, 3, 2).unwrap();
    let index = build_index(&sample, 1.0).unwrap();
    let g = passage_time(
        &index,
        &[0.0, 0.0],
        &[20.0, 0.0],
        alpha,
        &GeodesicOptions::default(),
    )
    .unwrap();
    for (center, r) in [([10.0, 0.0], 3.0), ([10.0, 8.0], 1.0), ([0.0, 0.0], 50.0)] {
        let inside: Vec<usize> = (0..g.len())
            .filter(|&i| dist2(g.vertex(i), &center) <= r * r)
            .collect();
        let expected = inside.first().map(|&s| (s, *inside.last().unwrap()));
        assert_eq!(ball_crossing(&g, &center, r), expected);
    }
    assert!(max_jump(&g) < 20.0);
}

#[test]
fn improvement_ratio_points_strictly_improve() {
    for alpha in [1.1, 1.5, 2.0, 2.5, 4.0] {
        let a = AlphaParam::new(alpha).unwrap();
        let rho = improvement_ratio(a);
        assert!(rho > 0.0 && rho <= 0.5);
        let (p, q) = ([-0.5, 0.0], [0.5, 0.0]);
        for k in 0..2000 {
            let phi = k as f64 * 0.0031;
            let s = rho * (1.0 - 1e-9);
            let z = [s * phi.cos(), s * phi.sin()];
            assert!(
                edge_cost(&p, &z, a) + edge_cost(&z, &q, a) < 1.0,
                "alpha {alpha} angle {phi}"
            );
        }
    }
    // numeric branch agrees with the exact Gabriel radius near alpha = 2
    let near = improvement_ratio(AlphaParam::new(2.0 + 1e-9).unwrap());
    assert!((near - 0.98 * 0.5).abs() < 1e-6);
}

#[test]
fn coverage_bound_dominates_probe_distances() {
    let region = BoxRegion::new(vec![0.0, 0.0], vec![15.0, 10.0]).unwrap();
    let sample = sample_poisson(&region, 2.0, 8, 2).unwrap();
    let index = build_index(&sample, 0.5).unwrap();
    let cov = index.coverage_radius();
    let pts: Vec<&[f64]> = sample.points().collect();
    let mut worst: f64 = 0.0;
    for i in 0..=150 {
        for j in 0..=100 {
            let m = [i as f64 * 0.1, j as f64 * 0.1];
            let d = pts
                .iter()
                .map(|p| dist2(p, &m))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            worst = worst.max(d);
        }
    }
    assert!(cov >= worst, "{cov} < {worst}");
    assert!(cov < worst + 1.0);
}

#[test]
fn boundary_flag_tracks_window_distance() {
    let alpha = AlphaParam::new(2.0).unwrap();
    let region = BoxRegion::new(vec![-40.0, -40.0], vec![60.0, 40.0]).unwrap();
    let sample = sample_poisson(&region, 1.0, 21, 2).unwrap();
    let index = build_index(&sample, 1.0).unwrap();
    let g = passage_time(
        &index,
        &[0.0, 0.0],
        &[20.0, 0.0],
        alpha,
        &GeodesicOptions::default(),
    )
    .unwrap();
    let expected = g
        .vertices()
        .all(|v| region.distance_to_boundary(v) >= g.cutoff_radius);
    assert_eq!(g.boundary_clear, expected);
    assert!(g.boundary_clear);
    let near = passage_time(
        &index,
        &[-39.5, 0.0],
        &[20.0, 0.0],
        alpha,
        &GeodesicOptions::default(),
    )
    .unwrap();
    assert!(!near.boundary_clear);
}

#[test]
fn oracle_refuses_large_inputs() {
    let pts: Vec<Vec<f64>> = (0..=ORACLE_BOUND).map(|i| vec![i as f64, 0.0]).collect();
    let alpha = AlphaParam::new(2.0).unwrap();
    assert!(brute_force_passage_time(&pts, &[0.0, 0.0], &[1.0, 0.0], alpha).is_err());
    assert!(
        brute_force_passage_time(&pts[..ORACLE_BOUND], &[0.0, 0.0], &[1.0, 0.0], alpha).is_ok()
    );
}
