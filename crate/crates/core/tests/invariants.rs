use proptest::prelude::*;
use tsallis_core::ccq::{build_ccq, closed_form_iq, direct_iq, CcqState};
use tsallis_core::entropy::{q_log, tsallis};
use tsallis_core::lab::{
    general_ccq_subadditivity_gap, subadditivity_gap, theorem1_check, xi_bounds, BoundKind, InequalityVerdict, Side,
};
use tsallis_core::qstate::{haar_random_pure, partial_trace, random_density};
use tsallis_core::roof::{concave_roof, convex_roof};
use tsallis_core::{Bipartition, Dims, EntropicParameter, OptimizerBudget, PureFunctional, Verdict};

fn q(v: f64) -> EntropicParameter {
    EntropicParameter::new(v).unwrap()
}

fn dims(v: &[usize]) -> Dims {
    Dims::new(v.to_vec()).unwrap()
}

fn small_budget(seed: u64) -> OptimizerBudget {
    OptimizerBudget {
        restarts: 4,
        ..OptimizerBudget::default()
    }
    .with_seed(seed)
}

fn q_grid() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), 1.05f64..4.0]
}

fn kind() -> impl Strategy<Value = BoundKind> {
    prop_oneof![Just(BoundKind::Exact), Just(BoundKind::Upper), Just(BoundKind::Lower)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn closed_forms_agree_with_direct(seed in 0u64..100_000, d in 2usize..4, qv in q_grid()) {
        let rho = random_density(&dims(&[d, d]), 1 + (seed as usize) % (d * d), seed).unwrap();
        let cf = closed_form_iq(&rho, q(qv)).unwrap();
        let direct = direct_iq(&rho, q(qv)).unwrap();
        prop_assert!(cf.max_abs_diff(&direct) < 1e-9);
        // mutual informations are never negative
        prop_assert!(cf.x_ab >= -1e-12 && cf.y_ab >= -1e-12 && cf.xy_ab >= -1e-12);
    }

    #[test]
    fn ccq_state_is_a_state(seed in 0u64..100_000, d in 2usize..4) {
        let rho = random_density(&dims(&[d, d]), d, seed).unwrap();
        let ccq = build_ccq(&rho).unwrap();
        prop_assert_eq!(ccq.flag_dim(), d);
        let json = serde_json::to_string(&ccq).unwrap();
        let back: CcqState = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, ccq);
    }

    #[test]
    fn subadditivity_holds_at_one(seed in 0u64..100_000, d in 2usize..4) {
        let rho = random_density(&dims(&[d, d]), 1 + (seed as usize) % (d * d), seed).unwrap();
        prop_assert!(subadditivity_gap(&rho, q(1.0)).unwrap() >= -1e-10);
    }

    #[test]
    fn general_subadditivity_holds_at_one(seed in 0u64..100_000, d in 2usize..4) {
        let blocks = (0..d * d)
            .map(|j| random_density(&dims(&[2, 2]), 1 + j % 4, seed * 31 + j as u64).unwrap())
            .collect();
        let g = CcqState::general(blocks).unwrap();
        let s = general_ccq_subadditivity_gap(&g, q(1.0)).unwrap();
        prop_assert!(s.gap >= -1e-10);
        prop_assert!((s.gap - s.direct_gap).abs() < 1e-9);
    }

    #[test]
    fn xi_is_nonnegative(seed in 0u64..100_000, d in 2usize..4, qv in 1.05f64..4.0) {
        let psi = haar_random_pure(&dims(&[2, d, d]), seed);
        let xi = xi_bounds(&psi, q(qv)).unwrap();
        prop_assert!(xi.xi_b >= -1e-12 && xi.xi_c >= -1e-12);
    }

    #[test]
    fn entropy_is_bounded_by_q_log_dim(seed in 0u64..100_000, d in 1usize..6, qv in 0.2f64..4.0) {
        let rho = random_density(&dims(&[d]), d, seed).unwrap();
        let s = tsallis(&rho, q(qv));
        prop_assert!(s >= -1e-12);
        prop_assert!(s <= q_log(d as f64, q(qv)).unwrap() + 1e-10);
    }

    #[test]
    fn verdict_follows_bound_kinds(
        lesser in -2.0f64..2.0, greater in -2.0f64..2.0, lk in kind(), gk in kind(),
    ) {
        let v = InequalityVerdict::judge("x", Side::bound(lesser, lk, "l"), Side::bound(greater, gk, "g"), 1e-9);
        let gap = greater - lesser;
        prop_assert_eq!(v.gap, gap);
        let certifies = lk != BoundKind::Lower && gk != BoundKind::Upper;
        let refutes = lk != BoundKind::Upper && gk != BoundKind::Lower;
        let expected = if gap >= -1e-9 && certifies {
            Verdict::Verified
        } else if gap < -1e-9 && refutes {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
        prop_assert_eq!(v.verdict, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn roofs_bracket_the_marginal(seed in 0u64..100_000, qv in q_grid()) {
        let psi = haar_random_pure(&dims(&[2, 2, 2]), seed);
        let rho_ab = psi.reduced(&[0, 1]).unwrap();
        let cut = Bipartition::first(2).unwrap();
        let f = PureFunctional::Tsallis(q(qv));
        let budget = small_budget(seed);
        let lo = convex_roof(&rho_ab, &cut, f, &budget).unwrap();
        let hi = concave_roof(&rho_ab, &cut, f, &budget).unwrap();
        // both certificates are genuine decompositions
        prop_assert!((lo.reevaluate().unwrap() - lo.value).abs() < 1e-10);
        prop_assert!((hi.reevaluate().unwrap() - hi.value).abs() < 1e-10);
        let s_a = tsallis(&partial_trace(&rho_ab, &[0]).unwrap(), q(qv));
        prop_assert!(-1e-12 <= lo.value);
        prop_assert!(lo.value <= hi.value + 1e-9);
        // concavity caps the average at the entropy of the average
        prop_assert!(hi.value <= s_a + 1e-9);
    }

    #[test]
    fn polygamy_is_never_refuted(seed in 0u64..100_000, qv in q_grid()) {
        let psi = haar_random_pure(&dims(&[2, 2, 2]), seed);
        let v = theorem1_check(&psi, q(qv), &small_budget(seed), 1e-6).unwrap();
        prop_assert!(v.verdict != Verdict::Violated);
    }
}
