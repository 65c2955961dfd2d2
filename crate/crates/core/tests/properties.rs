//! Invariants checked over randomized inputs.

use proptest::prelude::*;

use dpi_core::casimir::{epsilon_d_bound, euler_maclaurin_delta};
use dpi_core::oscillator::{log_pi_with, spectrum_shift, Truncation};
use dpi_core::paths::{differentiable_twin, sample_brownian};
use dpi_core::special::{truncated_gaussian_ratio, zed};
use dpi_core::velocity::{s_diff, s_feynman_closed};
use dpi_core::{Amplitude, ModelParams};

fn oscillator(eps_d: f64, omega: f64) -> ModelParams {
    ModelParams::natural(2.1, Amplitude::EpsilonD(eps_d)).unwrap().with_omega(omega).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zed_in_unit_interval_and_decreasing(w in 1e-8f64..50.0, dw in 1e-6f64..5.0) {
        let (z1, z2) = (zed(w).unwrap(), zed(w + dw).unwrap());
        prop_assert!(z1 > 0.0 && z1 < 1.0);
        prop_assert!(z2 <= z1);
    }

    #[test]
    fn truncated_ratio_monotone_in_bound(b in 1e-3f64..1e3, big_b in 1e-3f64..10.0, k in 1.01f64..10.0) {
        let (r1, r2) = (truncated_gaussian_ratio(b, big_b).unwrap(), truncated_gaussian_ratio(b, k * big_b).unwrap());
        prop_assert!(r1 > 0.0);
        prop_assert!(r2 >= r1 * (1.0 - 1e-14));
        prop_assert!(r2 <= 0.5 / b * (1.0 + 1e-14));
    }

    #[test]
    fn restricted_series_below_feynman(tau in 1e-3f64..0.999, a in 0.5f64..100.0, alpha in 1.6f64..3.0) {
        let p = ModelParams::natural(alpha, Amplitude::A(a)).unwrap();
        let d = s_diff(tau, &p, 1e-8).unwrap();
        let f = s_feynman_closed(tau).unwrap();
        prop_assert!(d.value >= 0.0);
        prop_assert!(d.value <= f * (1.0 + 1e-8), "S_D = {} > S_F = {f}", d.value);
    }

    #[test]
    fn twin_is_idempotent_and_restricted(seed in any::<u64>(), a in 0.1f64..100.0, alpha in 1.2f64..3.0) {
        let p = ModelParams::natural(alpha, Amplitude::A(a)).unwrap();
        let path = sample_brownian(&p, 200, seed).unwrap();
        let once = differentiable_twin(&path, &p).unwrap();
        let twice = differentiable_twin(&once.twin, &p).unwrap();
        prop_assert_eq!(&once.twin, &twice.twin);
        prop_assert!(once.twin.restriction_satisfied(a, alpha));
        for (j, (c, t)) in path.coeffs.iter().zip(&once.twin.coeffs).enumerate() {
            if (j as u64) < once.j_d {
                prop_assert_eq!(c, t);
            }
        }
    }

    #[test]
    fn log_pi_nonnegative_and_monotone_in_omega(eps_d in 0.02f64..0.5, omega in 0.1f64..20.0, k in 1.05f64..3.0) {
        let trunc = Truncation::Adaptive { tol: 1e-9 };
        let l1 = log_pi_with(1.0, &oscillator(eps_d, omega), trunc).unwrap().log_pi;
        let l2 = log_pi_with(1.0, &oscillator(eps_d, k * omega), trunc).unwrap().log_pi;
        prop_assert!(l1 >= 0.0);
        prop_assert!(l2 >= l1 * (1.0 - 1e-8), "ln Pi({omega}) = {l1}, ln Pi({}) = {l2}", k * omega);
    }

    #[test]
    fn level_spacing_unchanged(eps_d in 0.02f64..0.5, omega in 0.1f64..20.0, n in 0u32..100) {
        let p = oscillator(eps_d, omega);
        let e = |n| spectrum_shift(1.0, &p, n, Truncation::Fixed(10_000)).unwrap().e_n;
        let gap = e(n + 1) - e(n);
        prop_assert!((gap - omega).abs() <= 1e-12 * omega.max(e(n + 1).abs()));
    }

    #[test]
    fn euler_maclaurin_is_linear(
        d1 in proptest::collection::vec(-10.0f64..10.0, 5),
        d2 in proptest::collection::vec(-10.0f64..10.0, 5),
        c in -5.0f64..5.0,
    ) {
        let mixed: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| a + c * b).collect();
        let lhs = euler_maclaurin_delta(&mixed, 5).unwrap();
        let rhs = euler_maclaurin_delta(&d1, 5).unwrap() + c * euler_maclaurin_delta(&d2, 5).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs() + rhs.abs()));
    }

    #[test]
    fn epsilon_d_bound_monotone(l in 1e-9f64..1e-3, k in 1.1f64..10.0, rel in 1e-4f64..0.5) {
        let (b1, b2) = (epsilon_d_bound(l, rel, 3e8).unwrap(), epsilon_d_bound(k * l, rel, 3e8).unwrap());
        prop_assert!(b2.epsilon_d > b1.epsilon_d && b2.epsilon_d_exact > b1.epsilon_d_exact);
        let looser = epsilon_d_bound(l, (rel * k).min(0.99), 3e8).unwrap();
        prop_assert!(looser.epsilon_d_exact > b1.epsilon_d_exact);
        prop_assert!(b1.omega_d_min_exact * b1.epsilon_d_exact - 1.0 < 1e-12);
    }
}
