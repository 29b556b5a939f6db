//! Property tests for the symmetric-function layer: permutation
//! invariance, Newton-MacLaurin sign bounds, identity residuals, the
//! interlacing reduction contract, and the induction consistency between
//! the refined gap and its quartic/quintic building blocks.

use hypaf::symfunc::{
    cyclic_identity_sides, CyclicIdentity, EqualityClass, GapClass, KappaVector,
};
use proptest::prelude::*;

fn finite_entries(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, m)
}

fn horoconvex_entries(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..3.0, m).prop_map(|v| v.into_iter().map(|x| 1.0 + x).collect())
}

proptest! {
    #[test]
    fn sigma_is_permutation_invariant(values in finite_entries(7), swap_a in 0usize..7, swap_b in 0usize..7) {
        let a = KappaVector::new(values.clone()).unwrap();
        let mut shuffled = values;
        shuffled.swap(swap_a, swap_b);
        let b = KappaVector::new(shuffled).unwrap();
        // canonical sorted evaluation makes this bit-exact
        for (x, y) in a.sigma_all().iter().zip(b.sigma_all().iter()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn newton_maclaurin_gaps_are_nonnegative(values in horoconvex_entries(6), k in 1usize..5) {
        let v = KappaVector::new(values).unwrap();
        prop_assert!(v.nm_gap_upper(k).unwrap() >= -1e-12);
        prop_assert!(v.nm_gap_lower(k).unwrap() >= -1e-12);
    }

    #[test]
    fn newton_maclaurin_equality_at_constant_vectors(c in 0.1f64..10.0, k in 1usize..5) {
        let v = KappaVector::new(vec![c; 6]).unwrap();
        prop_assert!(v.nm_gap_upper(k).unwrap().abs() < 1e-10);
        prop_assert!(v.nm_gap_lower(k).unwrap().abs() < 1e-10);
    }

    #[test]
    fn cyclic_identities_hold_for_arbitrary_reals(values4 in finite_entries(4), values5 in finite_entries(5)) {
        for id in CyclicIdentity::ALL {
            let v = if id.arity() == 4 { &values4 } else { &values5 };
            let kappa = KappaVector::new(v.clone()).unwrap();
            let (lhs, rhs) = cyclic_identity_sides(id, &kappa).unwrap();
            let scale = lhs.abs().max(rhs.abs()).max(1e-14);
            prop_assert!(
                (lhs - rhs).abs() / scale < 1e-12,
                "{}: {} vs {}", id.tag(), lhs, rhs
            );
        }
    }

    #[test]
    fn reduction_preserves_means_and_cone(values in horoconvex_entries(9)) {
        let v = KappaVector::new(values).unwrap();
        let reduced = v.derivative_reduce().unwrap().kappa;
        let p = v.p_all();
        let q = reduced.p_all();
        for i in 1..v.m() {
            prop_assert!(
                (p[i] - q[i]).abs() <= 1e-9 * p[i].abs().max(1.0),
                "p_{} drift: {} vs {}", i, p[i], q[i]
            );
        }
        let min_out = reduced.values().iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(min_out >= 1.0 - 1e-10);
    }

    #[test]
    fn refined_gap_routes_agree_in_sign(values in horoconvex_entries(8)) {
        let v = KappaVector::new(values).unwrap();
        let report = v.refined_gap().unwrap();
        // the two routes differ by the positive factor (m-4) C(m,3)
        if report.gap.abs() > 1e-10 {
            prop_assert_eq!(report.gap.signum(), report.sigma_form_gap.signum());
        }
        prop_assert!(report.gap <= 1e-12);
    }

    #[test]
    fn induction_chain_matches_refined_sign(values in horoconvex_entries(8)) {
        // reduce down to five and four entries: the quartic and quintic
        // gaps evaluated there are nonpositive at every stage, and the
        // refined gap of the original vector is their p4-weighted sum.
        let v = KappaVector::new(values).unwrap();
        let refined = v.refined_gap().unwrap().gap;
        let mut current = v.clone();
        while current.m() > 4 {
            if current.m() >= 5 {
                prop_assert!(current.quintic_gap().unwrap() <= 1e-12);
            }
            prop_assert!(current.quartic_gap().unwrap() <= 1e-12);
            current = current.derivative_reduce().unwrap().kappa;
        }
        prop_assert!(current.quartic_gap().unwrap() <= 1e-12);
        // p1..p5 are preserved down to m = 5, so the refined gap there
        // reproduces the original
        let mut five = v.clone();
        while five.m() > 5 {
            five = five.derivative_reduce().unwrap().kappa;
        }
        let again = five.refined_gap().unwrap().gap;
        prop_assert!(
            (refined - again).abs() <= 1e-9 * refined.abs().max(1e-6),
            "refined {} vs reduced {}", refined, again
        );
    }

    #[test]
    fn classifier_consistent_with_gap(c in 1.0f64..4.0, spike in 1.01f64..4.0) {
        let all_equal = KappaVector::new(vec![c; 6]).unwrap();
        prop_assert_eq!(all_equal.classify_equality(1e-9), EqualityClass::EqualityCaseI);
        prop_assert_eq!(
            all_equal.refined_gap().unwrap().classification,
            GapClass::EqualityCaseI
        );
        let mut values = vec![1.0; 6];
        values[2] = spike;
        let spiked = KappaVector::new(values).unwrap();
        prop_assert_eq!(spiked.classify_equality(1e-9), EqualityClass::EqualityCaseII);
        prop_assert_eq!(
            spiked.refined_gap().unwrap().classification,
            GapClass::EqualityCaseII
        );
    }
}

/// The unit box bounds every pairwise product by one from above, which
/// flips both cyclic-sum brackets: the refined gap is nonnegative there.
proptest! {
    #[test]
    fn unit_box_refined_gap_is_nonnegative(values in prop::collection::vec(0.05f64..1.0, 6)) {
        let v = KappaVector::new(values).unwrap();
        let gap = v.refined_gap().unwrap().gap;
        prop_assert!(gap >= -1e-12, "gap {}", gap);
    }
}
