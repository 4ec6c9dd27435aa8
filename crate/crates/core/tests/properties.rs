//! Property tests for the norm functionals and the Schur representation.

use doilab_core::doi::{self, divided_difference_symbols, doi_apply, LipschitzFunction};
use doilab_core::matrix::ComplexMatrix;
use doilab_core::norms::{schatten_norm, trace_product, NormOrder, SingularProfile};
use doilab_core::sampling;
use proptest::prelude::*;

fn profile_strategy() -> impl Strategy<Value = SingularProfile> {
    prop::collection::vec(0.0f64..10.0, 1..24).prop_map(SingularProfile::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_norm_dominates_every_tail(profile in profile_strategy()) {
        let weak = profile.weak_l1();
        for (i, s) in profile.values().iter().enumerate() {
            prop_assert!((i + 1) as f64 * s <= weak + 1e-12);
        }
    }

    #[test]
    fn m1_infinity_within_bounded_inclusion(profile in profile_strategy()) {
        let weak = profile.weak_l1();
        let m1 = profile.m1_infinity();
        prop_assert!(m1 <= 1.6 * weak + 1e-12);
        // Also dominated by the value at integer segment ends and never
        // below the best integer candidate.
        let mut best_integer = 0.0f64;
        for k in 1..=profile.len() {
            best_integer = best_integer
                .max(profile.partial_integral(k as f64) / (1.0 + k as f64).ln());
        }
        prop_assert!(m1 >= best_integer - 1e-12);
    }

    #[test]
    fn partial_integral_is_monotone_and_saturates(profile in profile_strategy(), t in 0.0f64..40.0) {
        let one = profile.partial_integral(t);
        let later = profile.partial_integral(t + 0.5);
        prop_assert!(later >= one - 1e-12);
        let total: f64 = profile.values().iter().sum();
        prop_assert!(one <= total + 1e-12);
    }

    #[test]
    fn schatten_norms_decrease_in_p(seed in 0u64..5000, d in 2usize..8) {
        let mut rng = sampling::rng_from_seed(seed);
        let x = sampling::ginibre(d, &mut rng);
        let mut prev = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 4.0, 16.0] {
            let norm = schatten_norm(&x, NormOrder::new(p).unwrap());
            prop_assert!(norm <= prev + 1e-9 * prev.max(1.0));
            prev = norm;
        }
        let inf = schatten_norm(&x, NormOrder::infinity());
        prop_assert!(inf <= prev + 1e-9 * prev.max(1.0));
    }

    #[test]
    fn unitary_invariance_of_schatten_norms(seed in 0u64..5000, d in 2usize..8, p in 1.0f64..12.0) {
        let mut rng = sampling::rng_from_seed(seed);
        let x = sampling::ginibre(d, &mut rng);
        let u = sampling::random_unitary(d, &mut rng);
        let v = sampling::random_unitary(d, &mut rng);
        let order = NormOrder::new(p).unwrap();
        let plain = schatten_norm(&x, order);
        let rotated = schatten_norm(&(&(&u * &x) * &v), order);
        prop_assert!((plain - rotated).abs() <= 1e-10 * plain.max(1.0));
    }

    #[test]
    fn hoelder_trace_inequality(seed in 0u64..5000, d in 2usize..8, p in 1.05f64..8.0) {
        let mut rng = sampling::rng_from_seed(seed);
        let x = sampling::ginibre(d, &mut rng);
        let y = sampling::ginibre(d, &mut rng);
        let order = NormOrder::new(p).unwrap();
        let lhs = trace_product(&x, &y).unwrap().norm();
        let rhs = schatten_norm(&x, order) * schatten_norm(&y, order.conjugate());
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }

    #[test]
    fn schur_representation_is_linear_and_multiplicative(seed in 0u64..5000, d in 2usize..8) {
        let mut rng = sampling::rng_from_seed(seed);
        let (_, s) = sampling::random_commuting_tuple(2, d, -1.0, 1.0, &mut rng);
        let x = sampling::ginibre(d, &mut rng);
        let y = sampling::ginibre(d, &mut rng);
        let f = LipschitzFunction::new(2, "max", 1.0, |xi: &[f64]| xi[0].max(xi[1]));
        let (_, phi_f) = divided_difference_symbols(&f);
        let (_, phi_1) = doi::direction_symbols(1, 2).unwrap();

        // Linearity in the matrix argument.
        let sum = doi_apply(&s, &phi_f, &(&x + &y)).unwrap();
        let split = &doi_apply(&s, &phi_f, &x).unwrap() + &doi_apply(&s, &phi_f, &y).unwrap();
        prop_assert!((&sum - &split).max_abs() <= 1e-10 * (1.0 + x.max_abs() + y.max_abs()));

        // Kernel products compose.
        let product = phi_f.pointwise_product(&phi_1).unwrap();
        let joint = doi_apply(&s, &product, &x).unwrap();
        let composed = doi_apply(&s, &phi_f, &doi_apply(&s, &phi_1, &x).unwrap()).unwrap();
        prop_assert!((&joint - &composed).max_abs() <= 1e-11 * (1.0 + x.max_abs()));
    }

    #[test]
    fn offdiag_projection_is_idempotent(seed in 0u64..5000, d in 2usize..8) {
        let mut rng = sampling::rng_from_seed(seed);
        let (_, s) = sampling::random_commuting_tuple(1, d, -2.0, 2.0, &mut rng);
        let x = sampling::ginibre(d, &mut rng);
        let once = doi::offdiag_project(&s, &x).unwrap();
        let twice = doi::offdiag_project(&s, &once).unwrap();
        prop_assert!((&once - &twice).max_abs() <= 1e-11 * (1.0 + x.max_abs()));
        let diag = doi_apply(&s, &doi::ScalarSymbol2n::delta(1), &once).unwrap();
        prop_assert!(diag.max_abs() <= 1e-11 * (1.0 + x.max_abs()));
    }
}

#[test]
fn zero_matrix_edge_cases() {
    let zero = ComplexMatrix::zeros(3);
    assert_eq!(schatten_norm(&zero, NormOrder::new(1.0).unwrap()), 0.0);
    let (profile, weak, m1inf) = doilab_core::norms::rearrangement_norms(&zero);
    assert!(profile.is_zero());
    assert_eq!((weak, m1inf), (0.0, 0.0));
}
