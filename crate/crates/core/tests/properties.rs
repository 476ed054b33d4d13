use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use repeaterlab::bounds::{
    achieving_operator, optimal_u, p_max, pairing_trace, steering_bound, trace_rearrangement_lb,
};
use repeaterlab::cli::{main_with, RateReport};
use repeaterlab::concentration::{apply_measurement, p_e, procrustean_for};
use repeaterlab::criterion::{achieved_rate, criterion_lhs, from_kets};
use repeaterlab::qmath::{partial_trace, random, schmidt, tensor, Ket};
use repeaterlab::repeater::{build_optimal_basis, projection_bounds, run_protocol_analytic};
use repeaterlab::states::{is_max_entangled, SchmidtState, MAX_ENTANGLED_TOL};

fn angle() -> impl Strategy<Value = f64> {
    (1e-3..=1.0f64).prop_map(|x| x * FRAC_PI_4)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn protocol_rate_is_the_smaller_concentration_rate(t in angle(), e in angle()) {
        let r = run_protocol_analytic(t, e).unwrap();
        let target = (2.0 * t.sin().powi(2)).min(2.0 * e.sin().powi(2));
        prop_assert!((r.p_ms - target).abs() < 1e-12);
        let total: f64 = r.per_outcome.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(r.ledger.bob_acts_probability <= 1.0 - r.direct_success() + 1e-12);
    }

    #[test]
    fn basis_is_orthonormal_and_saturates_bounds(t in angle(), e in angle(), b1 in -3.0..3.0f64, b2 in -3.0..3.0f64) {
        let basis = build_optimal_basis(t, e, b1, b2).unwrap();
        let g = basis.gram();
        prop_assert!(g.max_abs_diff(&repeaterlab::qmath::ComplexMatrix::identity(4)) < 1e-12);
        let (lo, hi) = projection_bounds(t, e).unwrap();
        let br = basis.branches();
        prop_assert!((br[0].0 - hi).abs() < 1e-12);
        prop_assert!((br[1].0 - lo).abs() < 1e-12);
        prop_assert!(is_max_entangled(&br[0].1, 2, 2, MAX_ENTANGLED_TOL));
        prop_assert!(is_max_entangled(&br[1].1, 2, 2, MAX_ENTANGLED_TOL));
    }

    #[test]
    fn criterion_routes_agree(seed in any::<u64>(), t in angle(), e in angle()) {
        let u = random::unitary(4, &mut rng(seed));
        let kets: Vec<Ket> = (0..4).map(|j| u.column(j)).collect();
        let m = from_kets(&kets).unwrap();
        let lhs = criterion_lhs(&m, t, e).unwrap();
        let p_s = achieved_rate(&m, t, e).unwrap();
        let small = t.min(e);
        prop_assert!((p_s - (1.0 - lhs)).abs() < 1e-10);
        prop_assert!(lhs >= (2.0 * small).cos() - 1e-10);
        prop_assert!(p_s <= 2.0 * small.sin().powi(2) + 1e-10);
    }

    #[test]
    fn filter_reaches_twice_the_smallest_eigenvalue(seed in any::<u64>()) {
        let psi = random::ket(4, &mut rng(seed));
        prop_assume!(schmidt(&psi, 2, 2).unwrap().min_coefficient() > 1e-6);
        let m = procrustean_for(&psi, 1).unwrap();
        let branches = apply_measurement(&m, &psi, &[2, 2], 1).unwrap();
        prop_assert!((branches[0].probability - p_e(&psi).unwrap()).abs() < 1e-10);
        let post = branches[0].state.as_ref().unwrap();
        prop_assert!(is_max_entangled(post, 2, 2, MAX_ENTANGLED_TOL));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let a = random::density(da, da, &mut r);
        let b = random::density(db, db, &mut r);
        let ab = tensor(&a, &b);
        prop_assert!(partial_trace(&ab, &[da, db], &[0]).unwrap().max_abs_diff(&a) < 1e-12);
        prop_assert!(partial_trace(&ab, &[da, db], &[1]).unwrap().max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn rearrangement_lower_bounds_trace(seed in any::<u64>(), d in 2usize..9) {
        let mut r = rng(seed);
        let a = random::hermitian(d, &mut r);
        let b = random::hermitian(d, &mut r);
        prop_assert!((&a * &b).trace().re >= trace_rearrangement_lb(&a, &b).unwrap() - 1e-10);
    }

    #[test]
    fn reversal_pairing_is_minimal(seed in any::<u64>(), da in 1usize..4, extra in 0usize..2) {
        let mut r = rng(seed);
        let a = SchmidtState::new(random::schmidt_coefficients(da, 0.05, &mut r)).unwrap();
        let b = SchmidtState::new(random::schmidt_coefficients(da + extra, 0.05, &mut r)).unwrap();
        let d = da + extra;
        let best = pairing_trace(&a, &b, &optimal_u(da, d)).unwrap();
        let v = random::unitary(d, &mut r);
        prop_assert!(pairing_trace(&a, &b, &v).unwrap() >= best - 1e-10 * best);
        prop_assert!((d as f64 / best - p_max(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn achieving_operator_respects_its_invariants(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let a = SchmidtState::new(random::schmidt_coefficients(da, 0.05, &mut r)).unwrap();
        let b = SchmidtState::new(random::schmidt_coefficients(db, 0.05, &mut r)).unwrap();
        let res = achieving_operator(&a, &b).unwrap();
        prop_assert!(res.achieved_p <= res.p_max + 1e-10);
        prop_assert!((0.0..=1.0).contains(&res.post_fidelity));
        if da == db {
            prop_assert!((res.achieved_p - res.p_max).abs() < 1e-10);
            prop_assert!(res.post_fidelity > 1.0 - 1e-10);
        }
    }

    #[test]
    fn steering_bound_is_at_most_one(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let rho = random::density(d, d, &mut r);
        let rho_i = random::density(d, 1, &mut r);
        let sb = steering_bound(&rho, &rho_i).unwrap();
        prop_assert!(sb > 0.0 && sb <= 1.0 + 1e-10);
        prop_assert!((steering_bound(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rate_report_round_trips(t in angle(), e in angle()) {
        let out = main_with(["rate".to_string(), "--theta".into(), t.to_string(), "--eta".into(), e.to_string()]);
        prop_assert_eq!(out.exit_code, 0);
        let parsed: RateReport = serde_json::from_str(&out.report).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", out.report);
    }
}
