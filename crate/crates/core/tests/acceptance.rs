//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line (written straight to stderr so it shows
//! without `--nocapture`).

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use dpi_core::casimir::{
    epsilon_d_bound, sum_minus_integral_extrapolated, CasimirModel, Regulator,
};
use dpi_core::commutator::commutator_expectation;
use dpi_core::mc::{estimate_mode_second_moment, estimate_v2};
use dpi_core::oscillator::{log_pi, log_pi_with, scan_e0_vs_omega, spectrum_shift, unitarity_diagnostic, Truncation};
use dpi_core::special::truncated_gaussian_ratio;
use dpi_core::velocity::{
    crossover_epsilon, low_resolution_correction_bound, regime_report, s_feynman, s_feynman_closed, v2_diff,
    v2_feynman, Model,
};
use dpi_core::{Amplitude, ModelParams, DEFAULT_TOL};

const SEED: u64 = 20_240_601;

fn report(id: u32, checks: &[(&str, bool, String)], elapsed: Duration, limit_s: f64) -> bool {
    let in_time = elapsed.as_secs_f64() < limit_s;
    let pass = in_time && checks.iter().all(|c| c.1);
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "criterion {id:>2}: {} ({:.2} s, limit {limit_s} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for (name, ok, detail) in checks {
        let _ = writeln!(err, "    [{}] {name}: {detail}", if *ok { "ok" } else { "FAIL" });
    }
    pass
}

fn baseline() -> ModelParams {
    ModelParams::natural(2.1, Amplitude::A(10.0)).unwrap()
}

fn shifted(omega: f64) -> ModelParams {
    ModelParams::natural(2.1, Amplitude::EpsilonD(0.1)).unwrap().with_omega(omega).unwrap()
}

#[test]
fn criterion_01_feynman_velocity_law() {
    let start = Instant::now();
    let p = baseline();
    let checks: Vec<_> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let r = v2_feynman(eps, &p, DEFAULT_TOL).unwrap().value * p.m * eps / p.hbar;
            ("m eps v2_F / hbar in [0.97, 1.03]", (0.97..=1.03).contains(&r), format!("eps = {eps:e}: {r:.6}"))
        })
        .collect();
    assert!(report(1, &checks, start.elapsed(), 5.0));
}

#[test]
fn criterion_02_t0_independence() {
    let start = Instant::now();
    let base = s_feynman(0.01, 0.0, DEFAULT_TOL).unwrap().value;
    let checks: Vec<_> = [0.1, 0.3, 0.7]
        .iter()
        .map(|&t0| {
            let d = (s_feynman(0.01, t0, DEFAULT_TOL).unwrap().value - base).abs();
            ("|S_F(0.01, t0) - S_F(0.01, 0)| <= 1e-8", d <= 1e-8, format!("t0 = {t0}: {d:.3e}"))
        })
        .collect();
    assert!(report(2, &checks, start.elapsed(), 5.0));
}

#[test]
fn criterion_03_closed_form_vs_series() {
    let start = Instant::now();
    let checks: Vec<_> = [1e-3, 1e-2, 0.1]
        .iter()
        .map(|&tau| {
            let d = (s_feynman_closed(tau).unwrap() - s_feynman(tau, 0.0, DEFAULT_TOL).unwrap().value).abs();
            ("|closed - series| <= 1e-8", d <= 1e-8, format!("tau = {tau}: {d:.3e}"))
        })
        .collect();
    assert!(report(3, &checks, start.elapsed(), 5.0));
}

#[test]
fn criterion_04_plateau_regularization() {
    let start = Instant::now();
    let p = baseline();
    let a = v2_diff(1e-5, &p, DEFAULT_TOL).unwrap().value;
    let b = v2_diff(1e-6, &p, DEFAULT_TOL).unwrap().value;
    let v2_uv = regime_report(&p).unwrap().v2_uv;
    let rel = (a - b).abs() / a.max(b);
    let checks = [
        ("v2_D(1e-5) and v2_D(1e-6) differ by < 5%", rel < 0.05, format!("{a:.6} vs {b:.6}, {:.4}%", 100.0 * rel)),
        (
            "both <= v2_UV = 10 pi",
            a <= v2_uv && b <= v2_uv,
            format!("max {:.6} vs v2_UV {v2_uv:.6} (excess {:.2}%)", a.max(b), 100.0 * (a.max(b) / v2_uv - 1.0)),
        ),
    ];
    assert!(report(4, &checks, start.elapsed(), 60.0));
}

#[test]
fn criterion_05_bifurcation_location() {
    let start = Instant::now();
    let eps = crossover_epsilon(&baseline(), 1e-8).unwrap();
    let checks = [("crossover in [0.005, 0.1]", (0.005..=0.1).contains(&eps), format!("eps = {eps:.5}"))];
    assert!(report(5, &checks, start.elapsed(), 60.0));
}

#[test]
fn criterion_06_low_resolution_correction() {
    let start = Instant::now();
    let p = baseline();
    let eps_d = p.epsilon_d().unwrap();
    // 10 eps_D exceeds T here, so the range is clipped below T.
    let (lo, hi) = (3.0 * eps_d, (10.0 * eps_d).min(0.99 * p.t));
    let checks: Vec<_> = (0..8)
        .map(|i| {
            let eps = lo + (hi - lo) * i as f64 / 7.0;
            let diff = v2_feynman(eps, &p, DEFAULT_TOL).unwrap().value - v2_diff(eps, &p, DEFAULT_TOL).unwrap().value;
            let bound = low_resolution_correction_bound(eps, &p);
            (
                "0 <= v2_F - v2_D <= 2hbarT/(pi^2 m Abar eps^2)",
                (0.0..=bound).contains(&diff),
                format!("eps = {eps:.4}: {diff:.4e} <= {bound:.4e}"),
            )
        })
        .collect();
    assert!(report(6, &checks, start.elapsed(), 60.0));
}

#[test]
fn criterion_07_commutator_regimes() {
    let start = Instant::now();
    let p = baseline();
    let c5 = commutator_expectation(1e-5, &p, Model::Differentiable, DEFAULT_TOL).unwrap();
    let c6 = commutator_expectation(1e-6, &p, Model::Differentiable, DEFAULT_TOL).unwrap();
    let slope = c6.value / 1e-6;
    let plateau_m = p.m * c6.v2.value;
    let uv_m = p.m * regime_report(&p).unwrap().v2_uv;
    let linear = c6.value / c5.value;
    let slope_rel = (uv_m - slope).abs() / slope;
    let c03 = commutator_expectation(0.3, &p, Model::Differentiable, DEFAULT_TOL).unwrap().value;
    let checks = [
        (
            "vanishes linearly (ratio over a decade = 0.1)",
            (linear - 0.1).abs() < 1e-3,
            format!("[x,p](1e-6)/[x,p](1e-5) = {linear:.6}"),
        ),
        (
            "slope m v2_UV within 20% of measured plateau m",
            slope_rel <= 0.2 && (slope - plateau_m).abs() <= 1e-9 * slope,
            format!("slope {slope:.4}, m v2_UV {uv_m:.4}, rel {:.2}%", 100.0 * slope_rel),
        ),
        (
            "[x,p](0.3) within 3% of hbar",
            (c03 - p.hbar).abs() <= 0.03 * p.hbar,
            format!("{c03:.5} hbar (Feynman exact: {:.5})", 1.0 - 0.3 / p.t),
        ),
    ];
    assert!(report(7, &checks, start.elapsed(), 30.0));
}

#[test]
fn criterion_08_monte_carlo_oracle() {
    let start = Instant::now();
    let p = baseline();
    let mut checks = Vec::new();
    for (i, eps) in [1e-3, 0.05].into_iter().enumerate() {
        let est = estimate_v2(&p, eps, 0.0, 1000, 100_000, SEED + i as u64).unwrap();
        let analytic = v2_diff(eps, &p, DEFAULT_TOL).unwrap().value;
        let z = est.z_score(analytic);
        checks.push((
            "estimate_v2 within 3 stderr of v2_diff",
            z < 3.0,
            format!(
                "eps = {eps}: MC {:.5} +- {:.5} vs {analytic:.5} (z = {z:.2}, omitted-mode bound {:.1e})",
                est.mean, est.stderr, est.truncation_bound
            ),
        ));
    }
    for j in [1usize, 2, 5, 20, 100, 1000] {
        let jf = j as f64;
        let b = p.m * p.t * (jf * PI / p.t).powi(2) / (4.0 * p.hbar);
        let big_b = p.amplitude_a() / jf.powf(p.alpha);
        let est = estimate_mode_second_moment(&p, j, 100_000, SEED + 100 + j as u64).unwrap();
        let exact = truncated_gaussian_ratio(b, big_b).unwrap();
        let z = est.z_score(exact);
        checks.push((
            "per-mode <a_j^2> within 3 sigma of truncated_gaussian_ratio",
            z < 3.0,
            format!("j = {j}: {:.5e} vs {exact:.5e} (z = {z:.2})", est.mean),
        ));
    }
    assert!(report(8, &checks, start.elapsed(), 120.0));
}

#[test]
fn criterion_09_oscillator_trivial_limits() {
    let start = Instant::now();
    let zero: Vec<f64> = [0.05, 1.0, 5.0].iter().map(|&t| log_pi(t, &shifted(0.0), DEFAULT_TOL).unwrap().log_pi).collect();
    let big = ModelParams::natural(2.1, Amplitude::A(1e12)).unwrap().with_omega(1.0).unwrap();
    let l = log_pi(1.0, &big, DEFAULT_TOL).unwrap().log_pi;
    let checks = [
        ("log_pi(omega = 0) = 0 exactly", zero.iter().all(|&v| v == 0.0), format!("{zero:?}")),
        ("A = 1e12: |log_pi| < 1e-8", l.abs() < 1e-8, format!("{l:.3e}")),
    ];
    assert!(report(9, &checks, start.elapsed(), 10.0));
}

#[test]
fn criterion_10_shift_magnitudes() {
    let start = Instant::now();
    let n = Truncation::Fixed(100_000);
    let r1 = spectrum_shift(1.0, &shifted(1.0), 0, n).unwrap().delta_omega;
    let r4 = spectrum_shift(1.0, &shifted(1e4), 0, n).unwrap().delta_omega / 1e4;
    let checks = [
        (
            "omega = 1: dw/w in [0.2%, 5%]",
            (0.002..=0.05).contains(&r1),
            format!("dw/w = {:.4}% (hbar dw / E0 = {:.4}%)", 100.0 * r1, 200.0 * r1),
        ),
        (
            "omega = 1e4: dw/w in [50%, 100%]",
            (0.5..=1.0).contains(&r4),
            format!("dw/w = {:.2}% (hbar dw / E0 = {:.2}%)", 100.0 * r4, 200.0 * r4),
        ),
    ];
    assert!(report(10, &checks, start.elapsed(), 300.0));
}

#[test]
fn criterion_11_unitarity() {
    let start = Instant::now();
    let p = shifted(1.0);
    let n = Truncation::Fixed(100_000);
    let long: Vec<f64> = (0..25).map(|i| 0.2 + 4.8 * i as f64 / 24.0).collect();
    let short: Vec<f64> = (0..9).map(|i| 0.01 + 0.04 * i as f64 / 8.0).collect();
    let a = unitarity_diagnostic(&long, &p, n, 0.1).unwrap();
    let b = unitarity_diagnostic(&short, &p, n, 0.1).unwrap();
    let checks = [
        (
            "T in [0.2, 5]: max relative deviation <= 10%",
            a.max_rel_deviation <= 0.1,
            format!("{:.4}% (mean dw {:.6e}, verdict {})", 100.0 * a.max_rel_deviation, a.mean_delta_omega, a.verdict.as_str()),
        ),
        (
            "T in [0.01, 0.05]: deviation > 50%",
            b.max_rel_deviation > 0.5,
            format!("{:.2}% (verdict {})", 100.0 * b.max_rel_deviation, b.verdict.as_str()),
        ),
    ];
    assert!(report(11, &checks, start.elapsed(), 300.0));
}

#[test]
fn criterion_12_level_spacing() {
    let start = Instant::now();
    let omega = 3.0;
    let p = shifted(omega);
    let checks: Vec<_> = [0u32, 5, 50]
        .iter()
        .map(|&n| {
            let a = spectrum_shift(1.0, &p, n, Truncation::Fixed(10_000)).unwrap().e_n;
            let b = spectrum_shift(1.0, &p, n + 1, Truncation::Fixed(10_000)).unwrap().e_n;
            let rel = ((b - a) - p.hbar * omega).abs() / (p.hbar * omega);
            ("E_{n+1} - E_n = hbar omega to 1e-12", rel <= 1e-12, format!("n = {n}: rel {rel:.2e}"))
        })
        .collect();
    assert!(report(12, &checks, start.elapsed(), 1.0));
}

#[test]
fn criterion_13_large_omega_linearity() {
    let start = Instant::now();
    let grid: Vec<f64> = (0..21).map(|i| 1e2 + (1e4 - 1e2) * i as f64 / 20.0).collect();
    let scan = scan_e0_vs_omega(&grid, &shifted(1.0), 1.0, Truncation::Fixed(100_000)).unwrap();
    let f = scan.fit;
    let checks = [(
        "relative residual of E0_D(omega) = a + b omega <= 5%",
        f.residual <= 0.05,
        format!("a = {:.4}, b = {:.5}, residual {:.3}% over {} points", f.a, f.b, 100.0 * f.residual, f.n_points),
    )];
    assert!(report(13, &checks, start.elapsed(), 300.0));
}

#[test]
fn criterion_14_casimir() {
    let start = Instant::now();
    let x: f64 = 0.1;
    let std_exp = sum_minus_integral_extrapolated(|n| n, Regulator::Exp, 100.0).unwrap().value;
    let std_gauss = sum_minus_integral_extrapolated(|n| n, Regulator::Gauss, 100.0).unwrap().value;
    let tanh_exp = sum_minus_integral_extrapolated(CasimirModel::Tanh.mode_function(x), Regulator::Exp, 100.0).unwrap().value;
    let tanh_gauss =
        sum_minus_integral_extrapolated(CasimirModel::Tanh.mode_function(x), Regulator::Gauss, 100.0).unwrap().value;
    let target = -1.0 / 12.0 - x * x / 40.0;
    let checks = [
        (
            "standard: -1/12 +- 1e-4",
            (std_exp + 1.0 / 12.0).abs() <= 1e-4,
            format!("{std_exp:.10} (error {:.2e})", (std_exp + 1.0 / 12.0).abs()),
        ),
        (
            "tanh x = 0.1: -1/12 - x^2/40 within x^4",
            (tanh_exp - target).abs() <= x.powi(4),
            format!(
                "{tanh_exp:.8} vs {target:.8} (gap {:.2e}); -1/12 - x^2/360 = {:.8}",
                (tanh_exp - target).abs(),
                -1.0 / 12.0 - x * x / 360.0
            ),
        ),
        (
            "regulator swap changes the result by < 1e-4",
            (std_exp - std_gauss).abs() < 1e-4 && (tanh_exp - tanh_gauss).abs() < 1e-4,
            format!("standard {:.2e}, tanh {:.2e}", (std_exp - std_gauss).abs(), (tanh_exp - tanh_gauss).abs()),
        ),
    ];
    assert!(report(14, &checks, start.elapsed(), 30.0));
}

#[test]
fn criterion_15_epsilon_d_bound() {
    let start = Instant::now();
    let b = epsilon_d_bound(1e-7, 0.01, 3e8).unwrap();
    let checks = [(
        "eps_D bound in [1e-16, 1e-14] s",
        (1e-16..=1e-14).contains(&b.epsilon_d),
        format!(
            "{:.3e} s (omega_D > {:.3e}/s; exact-coefficient form {:.3e} s)",
            b.epsilon_d, b.omega_d_min, b.epsilon_d_exact
        ),
    )];
    assert!(report(15, &checks, start.elapsed(), 1.0));
}

#[test]
fn fixed_truncation_matches_adaptive_tail_bracket() {
    // Not a criterion: the N = 1e5 partial sums used above sit within their tail bound.
    let p = shifted(1.0);
    let fixed = log_pi_with(1.0, &p, Truncation::Fixed(100_000)).unwrap();
    let full = log_pi(1.0, &p, 1e-12).unwrap();
    assert!(full.log_pi - fixed.log_pi <= fixed.tail_bound + full.tail_bound);
    assert!(full.log_pi >= fixed.log_pi);
}
