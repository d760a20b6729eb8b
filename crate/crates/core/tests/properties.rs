use fieldgen_core::analysis::log_edges;
use fieldgen_core::export::format_float;
use fieldgen_core::manifold::sample_points;
use fieldgen_core::{gram, heat_kernel, riesz_covariance, FieldSpec, Isometry, ManifoldSpec, Point};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn manifolds() -> Vec<ManifoldSpec> {
    vec![
        ManifoldSpec::euclidean(1).unwrap(),
        ManifoldSpec::euclidean(3).unwrap(),
        ManifoldSpec::circle(1.3).unwrap(),
        ManifoldSpec::sphere2(0.7).unwrap(),
        ManifoldSpec::flat_torus(1.0, 2.0).unwrap(),
        ManifoldSpec::cylinder(0.5).unwrap(),
        ManifoldSpec::unit_disk(),
        ManifoldSpec::hyperbolic_plane(),
    ]
}

fn manifold() -> impl Strategy<Value = ManifoldSpec> {
    (0..manifolds().len()).prop_map(|i| manifolds()[i].clone())
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn distance_is_a_metric(m in manifold(), seed in any::<u64>()) {
        let p = sample_points(&m, 3, seed);
        let d = |i: usize, j: usize| m.geodesic_distance(&p[i], &p[j]).unwrap();
        for i in 0..3 {
            prop_assert_eq!(d(i, i), 0.0);
            for j in 0..3 {
                prop_assert!(d(i, j) >= 0.0);
                prop_assert!((d(i, j) - d(j, i)).abs() <= 1e-12 * (1.0 + d(i, j)));
            }
        }
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-10 * (1.0 + d(0, 2)));
    }

    #[test]
    fn isometries_preserve_distance(m in manifold(), seed in any::<u64>(), iso_seed in any::<u64>()) {
        let p = sample_points(&m, 2, seed);
        let g = Isometry::random(&m, iso_seed);
        let q: Vec<Point> = p.iter().map(|x| g.apply(&m, x).unwrap()).collect();
        let before = m.geodesic_distance(&p[0], &p[1]).unwrap();
        let after = m.geodesic_distance(&q[0], &q[1]).unwrap();
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before), "{} vs {}", before, after);
    }

    #[test]
    fn euclidean_riesz_is_homogeneous(
        alpha in 0.05f64..0.95,
        c in 0.2f64..5.0,
        x in prop::array::uniform3(-2.0f64..2.0),
        y in prop::array::uniform3(-2.0f64..2.0),
    ) {
        let m = ManifoldSpec::euclidean(3).unwrap();
        let fs = FieldSpec::riesz(alpha, Point::Euclidean(vec![0.0; 3]));
        let scaled = |v: [f64; 3]| Point::Euclidean(v.iter().map(|a| c * a).collect());
        let base = riesz_covariance(&m, &fs, &Point::Euclidean(x.to_vec()), &Point::Euclidean(y.to_vec())).unwrap();
        let big = riesz_covariance(&m, &fs, &scaled(x), &scaled(y)).unwrap();
        let want = c.powf(2.0 * alpha) * base;
        prop_assert!((big - want).abs() <= 1e-12 * (1.0 + want.abs()), "{} vs {}", big, want);
    }

    #[test]
    fn euclidean_gram_is_symmetric_psd(alpha in 0.05f64..0.95, seed in any::<u64>(), n in 2usize..8) {
        let m = ManifoldSpec::euclidean(2).unwrap();
        let fs = FieldSpec::riesz(alpha, Point::Euclidean(vec![0.0, 0.0]));
        let g = gram(&m, &fs, &sample_points(&m, n, seed)).unwrap();
        prop_assert_eq!(g.max_asymmetry(), 0.0);
        let eig = SymmetricEigen::new(g.values.clone()).eigenvalues;
        let hi = eig.max();
        prop_assert!(eig.min() >= -1e-10 * hi.max(1.0), "λ_min {}", eig.min());
    }

    #[test]
    fn heat_kernel_is_symmetric_and_positive(m in manifold(), seed in any::<u64>(), lt in -2.0f64..1.0) {
        let t = 10f64.powf(lt);
        let p = sample_points(&m, 2, seed);
        let k = heat_kernel(&m, t, &p[0], &p[1]).unwrap();
        let a = k.value;
        let b = heat_kernel(&m, t, &p[1], &p[0]).unwrap().value;
        // eigen-sums cancel down to round-off of the on-diagonal magnitude
        let floor = k.tail_bound + 1e-13 * heat_kernel(&m, t, &p[0], &p[0]).unwrap().value;
        prop_assert!(a >= -floor && b >= -floor, "{:?}", k);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs() + floor, "{} vs {}", a, b);
    }

    #[test]
    fn format_float_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = format_float(v).parse().unwrap();
        prop_assert!(back == v);
    }

    #[test]
    fn log_edges_increase(lo in 1e-4f64..1.0, ratio in 1.01f64..1e3, n in 2usize..40) {
        let hi = lo * ratio;
        let e = log_edges(lo, hi, n).unwrap();
        prop_assert_eq!(e.len(), n);
        prop_assert_eq!(e[0], lo);
        prop_assert_eq!(e[n - 1], hi);
        prop_assert!(e.windows(2).all(|w| w[1] > w[0]));
    }
}
