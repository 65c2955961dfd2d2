//! Independent reference values: high-precision constants, brute-force sums
//! and closed forms, each computed here without the library's own algorithms.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use rand::distr::Distribution;

use dpi_core::casimir::{
    euler_maclaurin_delta, sum_minus_integral, sum_minus_integral_extrapolated, tanh_derivatives_at_zero,
    CasimirModel, Regulator,
};
use dpi_core::mc::{estimate, estimate_cross_moment, mode_distribution};
use dpi_core::special::{erf, erfc, li2_exp, log_erf_ratio, one_minus_zed, truncated_gaussian_ratio, zed};
use dpi_core::sum::neumaier_sum;
use dpi_core::velocity::{s_diff, s_feynman, s_feynman_closed, s_feynman_closed_at};
use dpi_core::{Amplitude, ModelParams};

const SEED: u64 = 7_331;

fn baseline() -> ModelParams {
    ModelParams::natural(2.1, Amplitude::A(10.0)).unwrap()
}

/// Composite Simpson with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner = neumaier_sum((1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }));
    h / 3.0 * (f(a) + inner + f(b))
}

#[test]
fn erf_matches_simpson_quadrature() {
    for x in [0.1, 0.5, 1.0, 2.0] {
        let q = 2.0 / PI.sqrt() * simpson(|t| (-t * t).exp(), 0.0, x, 2000);
        assert_relative_eq!(erf(x), q, max_relative = 1e-13);
    }
}

#[test]
fn erf_family_reference_values() {
    assert_relative_eq!(erf(1.0), 0.8427007929497149, max_relative = 1e-15);
    assert_relative_eq!(erf(0.1), 0.1124629160182849, max_relative = 1e-15);
    assert_relative_eq!(erfc(0.5), 0.4795001221869535, max_relative = 1e-15);
    assert_relative_eq!(erfc(5.0), 1.537459794428035e-12, max_relative = 1e-13);
    assert_relative_eq!(log_erf_ratio(0.3, 0.2).unwrap(), 0.3890854363923624, max_relative = 1e-14);
    assert_relative_eq!(log_erf_ratio(3.0, 2.0).unwrap(), 0.004666619080631629, max_relative = 1e-12);
}

#[test]
fn zed_reference_value_and_quadrature() {
    assert_relative_eq!(zed(1.0).unwrap(), 0.4925917963926311, max_relative = 1e-15);
    // 1 − Z(W) is the truncated second moment over the untruncated one.
    for (b, big_b) in [(0.5, 0.3), (2.0, 1.0), (1.0, 4.0)] {
        let num = simpson(|a| a * a * (-b * a * a).exp(), -big_b, big_b, 4000);
        let den = simpson(|a| (-b * a * a).exp(), -big_b, big_b, 4000);
        assert_relative_eq!(truncated_gaussian_ratio(b, big_b).unwrap(), num / den, max_relative = 1e-12);
        assert_relative_eq!(one_minus_zed(b * big_b * big_b).unwrap(), 2.0 * b * num / den, max_relative = 1e-12);
    }
}

#[test]
fn li2_reference_values() {
    let cases = [
        (Complex64::new(-0.5, 1.2), Complex64::new(0.13390711990207004, 0.6085544163375811)),
        (Complex64::new(-2.0, 3.0), Complex64::new(-0.12981890545144024, 0.017922417824170095)),
        (Complex64::new(-4.0, 0.5), Complex64::new(0.01611884340403005, 0.008852242981172698)),
        (Complex64::new(0.0, 0.7), Complex64::new(0.6678766380917989, 0.954448086482735)),
    ];
    for (mu, want) in cases {
        let got = li2_exp(mu).unwrap();
        assert!((got - want).norm() <= 1e-13 * want.norm(), "Li2(e^{mu}) = {got}, want {want}");
    }
}

#[test]
fn s_feynman_brute_force() {
    const N: usize = 4_000_000;
    for (tau, t0) in [(0.01, 0.0), (0.3, 0.0), (0.05, 0.2)] {
        let brute = neumaier_sum((1..=N).map(|j| {
            let jf = j as f64;
            let d = (jf * PI * (t0 + tau)).sin() - (jf * PI * t0).sin();
            d * d / (jf * jf)
        }));
        // Each term is at most 4/j², so the omitted tail is below 4/N.
        let closed = s_feynman_closed_at(tau, t0).unwrap();
        assert!((closed - brute).abs() <= 4.0 / N as f64, "tau = {tau}, t0 = {t0}");
        let series = s_feynman(tau, t0, 1e-12).unwrap();
        assert_relative_eq!(series.value, closed, max_relative = 1e-10);
    }
    assert_relative_eq!(s_feynman_closed(0.3).unwrap(), PI * PI * 0.3 * 0.7 / 2.0, max_relative = 1e-13);
}

#[test]
fn s_diff_brute_force() {
    const N: usize = 4_000_000;
    let p = baseline();
    let a2 = p.a_bar().powi(2);
    let q = 2.0 * (p.alpha - 1.0);
    for tau in [0.02, 0.25] {
        let brute = neumaier_sum((1..=N).map(|j| {
            let jf = j as f64;
            let s = (jf * PI * tau).sin();
            s * s / (jf * jf) * one_minus_zed(a2 / jf.powf(q)).unwrap()
        }));
        // Tail below Σ_{j>N} (2/3)Ā²j^{−q−2} < (2/3)Ā²N^{−q−1}/(q+1).
        let tail = 2.0 / 3.0 * a2 * (N as f64).powf(-q - 1.0) / (q + 1.0);
        let got = s_diff(tau, &p, 1e-12).unwrap();
        assert!((got.value - brute).abs() <= tail + 1e-11 * brute, "tau = {tau}: {} vs {brute}", got.value);
    }
}

#[test]
fn mc_three_modes_matches_exact_sum() {
    let p = baseline();
    let (eps, t0) = (0.2, 0.1);
    let tau = eps / p.t;
    let modes: Vec<_> = (1..=3)
        .map(|j| {
            let jf = j as f64;
            let c = ((jf * PI * (t0 + tau)).sin() - (jf * PI * t0).sin()) / eps;
            (mode_distribution(&p, j).unwrap(), c)
        })
        .collect();
    let exact: f64 = (1..=3)
        .zip(&modes)
        .map(|(j, (_, c))| {
            let jf = j as f64;
            let b = p.m * p.t * (jf * PI / p.t).powi(2) / (4.0 * p.hbar);
            truncated_gaussian_ratio(b, p.amplitude_a() / jf.powf(p.alpha)).unwrap() * c * c
        })
        .sum();
    let est = estimate(200_000, SEED, |rng| {
        let v: f64 = modes.iter().map(|(d, c)| d.sample(rng) * c).sum();
        v * v
    })
    .unwrap();
    assert!(est.z_score(exact) < 4.0, "MC {} +- {} vs exact {exact}", est.mean, est.stderr);
}

#[test]
fn cross_moments_vanish() {
    let p = baseline();
    for (j, k) in [(1, 2), (3, 7)] {
        let est = estimate_cross_moment(&p, j, k, 100_000, SEED).unwrap();
        assert!(est.z_score(0.0) < 4.0, "<a_{j} a_{k}> = {} +- {}", est.mean, est.stderr);
    }
}

#[test]
fn casimir_exponential_cutoff_closed_form() {
    // Σ n e^{−n/n_c} − n_c² = 1/(4 sinh²(1/2n_c)) − n_c² = −1/12 + 1/(240 n_c²) + O(n_c⁻⁴).
    for nc in [10.0_f64, 100.0] {
        let s = (0.5 / nc).sinh();
        let closed = 0.25 / (s * s) - nc * nc;
        let got = sum_minus_integral(|n| n, Regulator::Exp, nc).unwrap();
        assert!((got - closed).abs() <= 1e-9 * nc * nc, "n_c = {nc}: {got} vs {closed}");
    }
    let ex = sum_minus_integral_extrapolated(|n| n, Regulator::Exp, 10.0).unwrap();
    assert!((ex.value + 1.0 / 12.0).abs() < 1e-8, "{}", ex.value);
}

#[test]
fn tanh_euler_maclaurin_expansion() {
    // tanh'(0) = 1, tanh'''(0) = −2, tanh⁽⁵⁾(0) = 16, tanh⁽⁷⁾(0) = −272.
    let d = tanh_derivatives_at_zero(7).unwrap();
    for (got, want) in d.iter().zip([0.0, 1.0, 0.0, -2.0, 0.0, 16.0, 0.0, -272.0]) {
        assert_relative_eq!(*got, want, max_relative = 1e-14);
    }
    // f(n) = tanh(xn)/x has f' = 1, f''' = −2x², so K = 5 gives −1/12 − x²/360.
    let x = 0.05;
    let derivs = CasimirModel::Tanh.derivatives_at_zero(x, 5).unwrap();
    let delta = euler_maclaurin_delta(&derivs, 5).unwrap();
    assert_relative_eq!(delta, -1.0 / 12.0 - x * x / 360.0, max_relative = 1e-14);
    let brute = sum_minus_integral_extrapolated(CasimirModel::Tanh.mode_function(x), Regulator::Exp, 100.0).unwrap();
    assert!((brute.value - delta).abs() < x.powi(4), "{} vs {delta}", brute.value);
}
