use proptest::prelude::*;
use pucci_lab::matrix::{eig_sym, SymmetricMatrix};
use pucci_lab::pucci::{optimal_coefficient_for, pucci_minus, pucci_plus, EllipticityPair};

fn sym(dim: usize) -> impl Strategy<Value = SymmetricMatrix> {
    prop::collection::vec(-10.0f64..10.0, dim * (dim + 1) / 2).prop_map(move |u| SymmetricMatrix::new(dim, u).unwrap())
}

fn triple() -> impl Strategy<Value = (SymmetricMatrix, SymmetricMatrix, EllipticityPair, f64)> {
    (1usize..=3).prop_flat_map(|d| {
        (sym(d), sym(d), 0.1f64..5.0, 0.01f64..5.0, 0.0f64..10.0)
            .prop_map(|(m, n, lo, gap, mu)| (m, n, EllipticityPair::new(lo, lo + gap).unwrap(), mu))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn positive_homogeneity((m, _n, b, mu) in triple()) {
        let lhs = pucci_plus(&m.scale(mu), b).unwrap();
        let rhs = mu * pucci_plus(&m, b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn duality((m, _n, b, _mu) in triple()) {
        let lhs = pucci_minus(&m, b).unwrap();
        let rhs = -pucci_plus(&m.scale(-1.0), b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn lipschitz_sandwich((m, n, b, _mu) in triple()) {
        let diff = m.sub(&n).unwrap();
        let f = 0.5 * (pucci_plus(&m, b).unwrap() - pucci_plus(&n, b).unwrap());
        let lo = 0.5 * pucci_minus(&diff, b).unwrap();
        let hi = 0.5 * pucci_plus(&diff, b).unwrap();
        let tol = 1e-10 * (1.0 + f.abs());
        prop_assert!(lo <= f + tol && f <= hi + tol, "{lo} <= {f} <= {hi}");
    }

    #[test]
    fn supremum_attained((m, _n, b, _mu) in triple()) {
        let a = optimal_coefficient_for(&m, b).unwrap();
        let plus = pucci_plus(&m, b).unwrap();
        prop_assert!((a.trace_product(&m) - plus).abs() <= 1e-10 * (1.0 + plus.abs()));
        for e in eig_sym(&a).unwrap().values {
            prop_assert!(e >= b.lo() - 1e-10 && e <= b.hi() + 1e-10);
        }
    }

    #[test]
    fn plus_dominates_minus((m, _n, b, _mu) in triple()) {
        prop_assert!(pucci_minus(&m, b).unwrap() <= pucci_plus(&m, b).unwrap() + 1e-12);
    }
}

/// Random admissible coefficients never exceed the supremum.
#[test]
fn sampled_coefficients_below_supremum() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2000 {
        let d = rng.random_range(1..=3);
        let m = SymmetricMatrix::new(d, (0..d * (d + 1) / 2).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap();
        let b = EllipticityPair::new(1.0, 3.0).unwrap();
        let vals: Vec<f64> = (0..d).map(|_| rng.random_range(1.0..3.0)).collect();
        let q = eig_sym(
            &SymmetricMatrix::new(d, (0..d * (d + 1) / 2).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap(),
        )
        .unwrap();
        let a = SymmetricMatrix::from_spectrum(&vals, &q.vectors).unwrap();
        assert!(a.trace_product(&m) <= pucci_plus(&m, b).unwrap() + 1e-10);
        assert!(a.trace_product(&m) >= pucci_minus(&m, b).unwrap() - 1e-10);
    }
}
