use num_complex::Complex64;
use proptest::prelude::*;
use tlm_core::scalar::{
    exprel, exprel_minus_one, log_sum, phi_kappa, psi_kappa, sequence_power_sides, PhiPsiParams,
};

fn integrand(s: f64, kappa: f64, r: f64) -> f64 {
    let root = s.powf(1.0 / r);
    s.powf(kappa - 1.0) * (root + 1.0 / root).ln().powf(-r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequence_power_bound_holds(
        a in prop::collection::vec(0.0..10.0f64, 1..40),
        kappa in 0.1..5.0f64,
    ) {
        prop_assume!(a.iter().any(|&v| v > 0.0));
        let (lhs, rhs) = sequence_power_sides(&a, kappa).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-8), "{lhs} > {rhs}");
    }

    #[test]
    fn psi_increases_and_differentiates_to_its_integrand(
        t in 0.05..20.0f64,
        kappa in 0.3..3.0f64,
        r in 1.1..4.0f64,
    ) {
        let params = PhiPsiParams::new(kappa, r).unwrap();
        let h = 1e-3 * t;
        let (lo, hi) = (psi_kappa(t - h, params).unwrap(), psi_kappa(t + h, params).unwrap());
        prop_assert!(lo < hi);
        let slope = (hi - lo) / (2.0 * h);
        let want = integrand(t, kappa, r);
        prop_assert!((slope - want).abs() <= 1e-5 * want, "{slope} vs {want}");
    }

    #[test]
    fn phi_doubling_for_kappa_above_one(t in 1e-4..1e4f64, kappa in 1.0001..6.0f64) {
        let params = PhiPsiParams::new(kappa, 2.0).unwrap();
        let (a, b) = (phi_kappa(2.0 * t, params).unwrap(), phi_kappa(t, params).unwrap());
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!(a <= 2f64.powf(kappa) * b * (1.0 + 1e-12));
    }

    #[test]
    fn log_sum_agrees_with_direct_formula(t in 1e-3..1e3f64) {
        let direct = (t + 1.0 / t).ln();
        prop_assert!((log_sum(t) - direct).abs() <= 1e-14 * direct.max(1.0));
    }

    #[test]
    fn exprel_agrees_with_direct_quotient(re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let w = Complex64::new(re, im);
        prop_assume!(w.norm() > 0.05);
        let direct = (w.exp() - 1.0) / w;
        prop_assert!((exprel(w) - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        prop_assert!((exprel_minus_one(w) - (direct - 1.0)).norm() <= 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn exprel_series_is_accurate_near_zero(re in -1e-2..1e-2f64, im in -1e-2..1e-2f64) {
        let w = Complex64::new(re, im);
        prop_assume!(w.norm() > 0.0);
        // Taylor series to high order as the reference.
        let mut term = Complex64::new(1.0, 0.0);
        let mut reference = Complex64::new(0.0, 0.0);
        for k in 1..20 {
            term *= w / (k as f64 + 1.0);
            reference += term;
        }
        prop_assert!((exprel_minus_one(w) - reference).norm() <= 1e-15 * reference.norm().max(1e-300) + 1e-300);
        prop_assert!((exprel(w) - (reference + 1.0)).norm() <= 1e-15);
    }
}
