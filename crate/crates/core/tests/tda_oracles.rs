mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use topofl::rng::stream;
use topofl::tda::*;

fn cloud(points: &[Vec<f64>]) -> PointCloud {
    PointCloud::new(points.to_vec()).unwrap()
}

fn h1_pairs(points: &[Vec<f64>], max_scale: f64) -> Vec<(f64, f64)> {
    let d = pairwise_distances(&cloud(points));
    h1_persistence(&d, max_scale, 200)
        .unwrap()
        .in_dim(1)
        .map(|p| (p.birth, p.death))
        .collect()
}

#[test]
fn pairwise_distances_match_double_loop() {
    let mut r = rng(1);
    let pts = random_points(&mut r, 5, 4);
    let d = pairwise_distances(&cloud(&pts));
    let oracle = dist_matrix(&pts);
    for i in 0..5 {
        for j in 0..5 {
            assert!((d.get(i, j) - oracle[i][j]).abs() < 1e-12);
        }
    }
}

#[test]
fn h0_deaths_match_prim_mst() {
    let mut r = rng(2);
    for trial in 0..60 {
        let n = r.random_range(1..=50);
        let pts = random_points(&mut r, n, 1 + trial % 4);
        let diag = h0_persistence(&pairwise_distances(&cloud(&pts)));
        assert_eq!(diag.in_dim(0).count(), n);
        assert_eq!(diag.essential_count(0), 1);
        assert!(diag.in_dim(0).all(|p| p.birth == 0.0));
        let mut deaths = diag.finite_deaths(0);
        deaths.sort_by(f64::total_cmp);
        assert_eq!(deaths, prim_mst_weights(&dist_matrix(&pts)));
    }
}

#[test]
fn h1_matches_exhaustive_reduction_small_clouds() {
    let mut r = rng(3);
    for n in 3..=6 {
        for _ in 0..25 {
            let pts = random_points(&mut r, n, 2);
            let d = dist_matrix(&pts);
            let all: Vec<f64> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| d[i][j]).collect();
            for &scale in &[percentile(&all, 95.0).unwrap(), percentile(&all, 50.0).unwrap(), 10.0] {
                assert_eq!(h1_pairs(&pts, scale), exhaustive_h1(&d, scale), "n={n} scale={scale}");
            }
        }
    }
}

#[test]
fn h1_octagon_against_oracle() {
    let pts: Vec<Vec<f64>> = (0..8)
        .map(|i| {
            let t = i as f64 * std::f64::consts::PI / 4.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let d = dist_matrix(&pts);
    let got = h1_pairs(&pts, 2.0);
    assert_eq!(got, exhaustive_h1(&d, 2.0));
    let positive: Vec<_> = got.iter().filter(|p| p.1 > p.0).collect();
    assert_eq!(positive.len(), 1);
    assert!((positive[0].0 - 2.0 * (std::f64::consts::PI / 8.0).sin()).abs() < 1e-12);
}

#[test]
fn wasserstein_matches_brute_force_matching() {
    let mut r = rng(4);
    for _ in 0..200 {
        let mk = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<(f64, f64)> {
            let m = r.random_range(0..=4);
            (0..m)
                .map(|_| {
                    let b: f64 = r.random_range(0.0..1.0);
                    (b, b + r.random_range(0.0..1.0))
                })
                .collect()
        };
        let (a, b) = (mk(&mut r), mk(&mut r));
        let da = PersistenceDiagram::new(a.iter().map(|&(x, y)| PersistencePair::new(x, y, 1).unwrap()).collect());
        let db = PersistenceDiagram::new(b.iter().map(|&(x, y)| PersistencePair::new(x, y, 1).unwrap()).collect());
        for p in [1.0, 2.0, 3.0] {
            let got = wasserstein_distance(&da, &db, 1, p).unwrap();
            let want = brute_force_matching_cost(&a, &b, p).powf(1.0 / p);
            assert!((got - want).abs() < 1e-9, "p={p}: {got} vs {want}");
        }
    }
}

#[test]
fn wasserstein_metric_axioms_on_h0_diagrams() {
    let mut r = rng(5);
    for _ in 0..40 {
        let ds: Vec<PersistenceDiagram> = (0..3)
            .map(|_| {
                let n = r.random_range(2..9);
                h0_persistence(&pairwise_distances(&cloud(&random_points(&mut r, n, 2))))
            })
            .collect();
        for p in [1.0, 2.0] {
            let w = |i: usize, j: usize| wasserstein_distance(&ds[i], &ds[j], 0, p).unwrap();
            assert_eq!(w(0, 0), 0.0);
            assert_eq!(w(0, 1), w(1, 0));
            assert!(w(0, 2) <= w(0, 1) + w(1, 2) + 1e-9);
        }
    }
}

#[test]
fn bottleneck_matches_threshold_oracle() {
    let mut r = rng(6);
    for _ in 0..50 {
        let a: Vec<f64> = (0..r.random_range(0..5)).map(|_| r.random_range(0.0..2.0)).collect();
        let b: Vec<f64> = (0..r.random_range(0..5)).map(|_| r.random_range(0.0..2.0)).collect();
        let da = PersistenceDiagram::new(a.iter().map(|&d| PersistencePair::new(0.0, d, 0).unwrap()).collect());
        let db = PersistenceDiagram::new(b.iter().map(|&d| PersistencePair::new(0.0, d, 0).unwrap()).collect());
        assert_eq!(bottleneck_distance(&da, &db, 0), bottleneck_h0(&a, &b));
    }
}

/// Moving every point by at most eta changes every pairwise distance, and so
/// every MST edge weight, by at most 2 eta. This is the sharp constant for the
/// edge-length filtration.
#[test]
fn h0_bottleneck_bounded_by_twice_hausdorff() {
    let mut r = rng(7);
    for _ in 0..100 {
        let n = r.random_range(3..30);
        let pts = random_points(&mut r, n, 2);
        let eta = r.random_range(0.001..0.05);
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let t: f64 = r.random_range(0.0..std::f64::consts::TAU);
                vec![p[0] + eta * t.cos(), p[1] + eta * t.sin()]
            })
            .collect();
        let dh = hausdorff(&pts, &moved);
        let a = h0_persistence(&pairwise_distances(&cloud(&pts)));
        let b = h0_persistence(&pairwise_distances(&cloud(&moved)));
        assert!(bottleneck_distance(&a, &b, 0) <= 2.0 * dh + 1e-9);
    }
}

/// Two points pushed apart: the Hausdorff distance is eta but the single
/// finite H0 death moves by 2 eta.
#[test]
fn h0_stability_constant_two_is_attained() {
    let eta = 0.1;
    let a = h0_persistence(&pairwise_distances(&cloud(&[vec![0.0], vec![1.0]])));
    let b = h0_persistence(&pairwise_distances(&cloud(&[vec![-eta], vec![1.0 + eta]])));
    let dh = hausdorff(&[vec![0.0], vec![1.0]], &[vec![-eta], vec![1.0 + eta]]);
    assert!((dh - eta).abs() < 1e-12);
    assert!((bottleneck_distance(&a, &b, 0) - 2.0 * eta).abs() < 1e-12);
}

#[test]
fn descriptor_invariant_under_rotation() {
    let mut r = rng(8);
    for _ in 0..5 {
        let pts = random_points(&mut r, 120, 2);
        let theta: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let (c, s) = (theta.cos(), theta.sin());
        let rotated: Vec<Vec<f64>> = pts.iter().map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]]).collect();
        let a = descriptor(&cloud(&pts), 80, 20, &mut stream(&[11])).unwrap();
        let b = descriptor(&cloud(&rotated), 80, 20, &mut stream(&[11])).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-6, "{x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h0_curve_non_increasing_and_entropy_bounded(seed in 0u64..10_000, n in 2usize..40) {
        let mut r = rng(seed);
        let pts = random_points(&mut r, n, 3);
        let diag = h0_persistence(&pairwise_distances(&cloud(&pts)));
        let curve = betti_curve(&diag, 0, 20);
        prop_assert!(curve.windows(2).all(|w| w[1] <= w[0]));
        let m = diag.finite(0).count() as f64;
        let h = persistence_entropy(&diag, 0);
        prop_assert!(h >= 0.0 && h <= m.ln() + 1e-6);
    }

    #[test]
    fn descriptor_layout_invariants(seed in 0u64..10_000, n in 1usize..60) {
        let mut r = rng(seed);
        let pts = random_points(&mut r, n, 2);
        let d = descriptor(&cloud(&pts), 40, 20, &mut stream(&[seed])).unwrap();
        let v = d.values();
        prop_assert_eq!(v.len(), 48);
        prop_assert!(v[2] >= 0.0 && v[3] >= 0.0 && v[4] >= 0.0 && v[5] >= 0.0);
        prop_assert!(v[8..].iter().all(|x| *x >= 0.0 && x.fract() == 0.0));
        prop_assert!(d.curve(0).windows(2).all(|w| w[1] <= w[0]));
    }
}
