//! Harmonic-oscillator modification factor `Π(T)`, energy shifts, partition
//! functions and the unitarity (exponential-in-T) diagnostic.
//!
//! Everything is in Euclidean time and in log space:
//! `ln Π(T) = Σₙ [ln erf(cₙ√(kₙ² + ω²)) − ln erf(cₙkₙ)]`, `kₙ = nπ/T`, `cₙ = B/n^α`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::paths::ModelParams;
use crate::quad::integrate_graded;
use crate::special::{erfc, ln_erf, ln_erf_scaled, zed};
use crate::sum::block_sum;
use crate::velocity::adaptive_series;
use crate::{DEFAULT_TOL, SeriesValue};

/// How many factors of the product to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Sum until the tail bracket half-width is below `tol·max(1, |ln Π|)`.
    Adaptive { tol: f64 },
    /// Exactly `n` factors; the omitted tail is reported, not added.
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Adaptive { tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiResult {
    pub log_pi: f64,
    pub t: f64,
    pub n_terms: usize,
    /// Bound on `|ln Π_exact − log_pi|`.
    pub tail_bound: f64,
    pub converged: bool,
    pub params: ModelParams,
}

/// Per-`T` data of the product: `B`, `x = ωT/π`, `α`.
struct Product {
    k_unit: f64,
    big_b: f64,
    omega: f64,
    x: f64,
    alpha: f64,
}

impl Product {
    fn new(params: &ModelParams) -> Self {
        let omega = params.omega_or_zero();
        Self {
            k_unit: PI / params.t,
            big_b: params.b_len(),
            omega,
            x: omega * params.t / PI,
            alpha: params.alpha,
        }
    }

    fn term(&self, n: usize) -> f64 {
        self.term_at(n as f64)
    }

    /// `ln erf(u) − ln erf(v)` for the factor at real index `nf`.
    fn term_at(&self, nf: f64) -> f64 {
        let k = self.k_unit * nf;
        let c = self.big_b / nf.powf(self.alpha);
        let v = c * k;
        let r = self.omega / k;
        let u = v * (1.0 + r * r).sqrt();
        if v >= 1.0 {
            (-erfc(u)).ln_1p() - (-erfc(v)).ln_1p()
        } else {
            0.5 * (r * r).ln_1p() + ln_erf_scaled(u) - ln_erf_scaled(v)
        }
    }

    /// `∫_a^∞ ½ln(1 + x²/t²) dt`.
    fn g_integral(&self, a: f64) -> f64 {
        let x = self.x;
        x * (x / a).atan() - 0.5 * a * (x * x / (a * a)).ln_1p()
    }

    fn g(&self, n: f64) -> f64 {
        0.5 * (self.x * self.x / (n * n)).ln_1p()
    }

    /// Upper bound on the tail from `fₙ ≤ Z(vₙ²)·x²/(2n²)`, `Z(vₙ²)` growing in `n`.
    fn concavity_bound(&self, n: f64) -> f64 {
        let half_x2 = 0.5 * self.x * self.x;
        let mut m = n;
        let mut acc = 0.0;
        for _ in 0..200 {
            let v = self.big_b * self.k_unit * (2.0 * m).powf(1.0 - self.alpha);
            let w = v * v;
            let z = if w <= 0.0 {
                1.0
            } else if w.is_infinite() {
                0.0
            } else {
                zed(w).expect("positive finite W")
            };
            if z > 0.999 {
                return acc + half_x2 / m;
            }
            acc += z * half_x2 / (2.0 * m);
            m *= 2.0;
        }
        acc + half_x2 / m
    }

    /// Upper bound on `sup_{t≥N} f(t)` from `f(t) ≤ Z(v_t²)·x²/(2t²)` over dyadic blocks.
    fn peak_bound(&self, n: f64) -> f64 {
        let half_x2 = 0.5 * self.x * self.x;
        let mut m = n;
        let mut peak: f64 = 0.0;
        for _ in 0..200 {
            let v = self.big_b * self.k_unit * (2.0 * m).powf(1.0 - self.alpha);
            let w = v * v;
            let z = if w <= 0.0 {
                1.0
            } else if w.is_infinite() {
                0.0
            } else {
                zed(w).expect("positive finite W")
            };
            if z > 0.999 {
                return peak.max(half_x2 / (m * m));
            }
            peak = peak.max(z * half_x2 / (m * m));
            m *= 2.0;
        }
        peak.max(half_x2 / (m * m))
    }

    /// `[I − e, I + e]` with `I = ∫_N^∞ f = N∫₀¹ f(N/u)/u² du`.
    ///
    /// `f` rises from 0 and then decays, so the sum beyond `N` is within
    /// `sup f` of the integral.
    fn integral_bracket(&self, n: f64) -> Option<(f64, f64)> {
        let peak = self.peak_bound(n);
        let quad_tol = peak.max(1e-300);
        let integrand = |u: f64| {
            let t = n / u;
            self.term_at(t) / (u * u)
        };
        // Features sit where v_t ≈ 1 and where kₜ ≈ ω.
        let t_v = (self.big_b * self.k_unit).powf(1.0 / (self.alpha - 1.0));
        let layer = (n / t_v).min(n / self.x.max(1e-300)).min(1.0);
        let i = n * integrate_graded(&integrand, 0.0, 1.0, 1e-2 * layer, quad_tol / n).ok()?;
        let e = peak + quad_tol;
        Some((i - e, i + e))
    }

    /// Bracket `[lo, hi]` on `Σ_{n>N} fₙ`.
    fn tail_bracket(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let k2 = self.omega * self.big_b;
        let h = k2 * k2 / 3.0 * nf.powf(1.0 - 2.0 * self.alpha) / (2.0 * self.alpha - 1.0);
        let mut lo = (self.g_integral(nf) - 0.5 * self.g(nf) - h).max(0.0);
        let mut hi = self.g_integral(nf + 0.5).min(self.concavity_bound(nf));
        if let Some((ilo, ihi)) = self.integral_bracket(nf) {
            lo = lo.max(ilo);
            hi = hi.min(ihi);
        }
        (lo, hi.max(lo))
    }
}

fn check_pi_inputs(t: f64, params: &ModelParams) -> Result<ModelParams> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("log_pi", format!("T = {t}; must be positive")));
    }
    if !(params.alpha > 1.0) {
        return Err(domain("log_pi", format!("alpha = {}; need alpha > 1", params.alpha)));
    }
    params.with_total_time(t)
}

/// `ln Π(T)` summed adaptively to `tol`.
pub fn log_pi(t: f64, params: &ModelParams, tol: f64) -> Result<PiResult> {
    log_pi_with(t, params, Truncation::Adaptive { tol })
}

/// `ln Π(T)` with an explicit truncation rule. With `A` given through `ε_D`
/// the bound is `A(T)`; with a constant `A` it is used as is.
pub fn log_pi_with(t: f64, params: &ModelParams, truncation: Truncation) -> Result<PiResult> {
    let p = check_pi_inputs(t, params)?;
    let product = Product::new(&p);
    let done = |log_pi, n_terms, tail_bound, converged| PiResult { log_pi, t, n_terms, tail_bound, converged, params: p };
    if product.omega == 0.0 {
        return Ok(done(0.0, 0, 0.0, true));
    }
    match truncation {
        Truncation::Fixed(n) => {
            if n == 0 {
                return Err(Error::InvalidParams("n_terms must be at least 1".into()));
            }
            let partial = block_sum(1, n + 1, |j| product.term(j));
            let (_, hi) = product.tail_bracket(n);
            Ok(done(partial, n, hi, true))
        }
        Truncation::Adaptive { tol } => {
            let mid = |n: usize| {
                let (lo, hi) = product.tail_bracket(n);
                (0.5 * (lo + hi), 0.5 * (hi - lo))
            };
            match adaptive_series(|j| product.term(j), |n| mid(n).1, |n| mid(n).0, tol, 1.0) {
                Ok(s) => Ok(done(s.value, s.n_terms, s.tail_bound, true)),
                Err(Error::NonConvergence { partial }) => Err(Error::NonConvergence { partial }),
                Err(e) => Err(e),
            }
        }
    }
}

/// `Σ_{n≤N} ln erf(B·kₙ/n^α)`, the log of the truncated free-particle Erf product.
///
/// The full product diverges to zero for finite `A`, so only partial sums exist.
pub fn normalization_ratio(params: &ModelParams, n: usize) -> Result<SeriesValue> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let product = Product::new(params);
    let value = block_sum(1, n + 1, |j| {
        let jf = j as f64;
        ln_erf(product.big_b * product.k_unit * jf.powf(1.0 - product.alpha))
    });
    Ok(SeriesValue { value, n_terms: n, tail_bound: f64::INFINITY, converged: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumShift {
    pub t: f64,
    /// `Δω = ln Π(T)/T`.
    pub delta_omega: f64,
    pub log_pi: f64,
    pub n_terms: usize,
    pub n_level: u32,
    /// `E^D_n = ħω(n + ½) − ħΔω`.
    pub e_n: f64,
    pub e0_d: f64,
    /// `ħω`, unchanged by the shift.
    pub spacing: f64,
}

fn require_omega(func: &'static str, params: &ModelParams) -> Result<f64> {
    params.omega.ok_or_else(|| Error::InvalidParams(format!("{func}: omega is required")))
}

pub fn spectrum_shift(t: f64, params: &ModelParams, n_level: u32, truncation: Truncation) -> Result<SpectrumShift> {
    let omega = require_omega("spectrum_shift", params)?;
    let pi = log_pi_with(t, params, truncation)?;
    let hbar = params.hbar;
    let delta_omega = pi.log_pi / t;
    Ok(SpectrumShift {
        t,
        delta_omega,
        log_pi: pi.log_pi,
        n_terms: pi.n_terms,
        n_level,
        e_n: hbar * omega * (f64::from(n_level) + 0.5) - hbar * delta_omega,
        e0_d: hbar * omega * 0.5 - hbar * delta_omega,
        spacing: hbar * omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionFunctions {
    pub z_f: f64,
    pub z_d: f64,
    pub ln_z_f: f64,
    pub ln_z_d: f64,
}

/// `Z_F = e^{−ωT/2}/(1 − e^{−ωT})` and `Z_D = Z_F·Π(T)`.
pub fn partition_functions(t: f64, params: &ModelParams, truncation: Truncation) -> Result<PartitionFunctions> {
    let omega = require_omega("partition_functions", params)?;
    if !(omega > 0.0) {
        return Err(domain("partition_functions", "omega must be positive"));
    }
    let wt = omega * t;
    let ln_z_f = -0.5 * wt - (-(-wt).exp_m1()).ln();
    let ln_z_d = ln_z_f + log_pi_with(t, params, truncation)?.log_pi;
    Ok(PartitionFunctions { z_f: ln_z_f.exp(), z_d: ln_z_d.exp(), ln_z_f, ln_z_d })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    UnitaryCompatible,
    NonExponential,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::UnitaryCompatible => "unitary-compatible",
            Verdict::NonExponential => "non-exponential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRow {
    pub t: f64,
    pub delta_omega: f64,
    pub log_pi: f64,
    pub n_terms: usize,
    pub below_eps_d: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitarityReport {
    pub rows: Vec<ShiftRow>,
    /// Max `|Δω − mean|/|mean|` over `T ≥ ε_D` (over all `T` if none qualify).
    pub max_rel_deviation: f64,
    pub mean_delta_omega: f64,
    /// Same statistic over the `T < ε_D` points alone.
    pub sub_eps_d_deviation: Option<f64>,
    /// Least-squares slope of `ln Π` against `T` over the main grid.
    pub fitted_rate: Option<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn max_rel_deviation(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let spread = xs.iter().map(|x| (x - m).abs()).fold(0.0, f64::max);
    if spread == 0.0 {
        0.0
    } else {
        spread / m.abs()
    }
}

/// `Δω(T)` over a time grid and how constant it is.
pub fn unitarity_diagnostic(
    t_grid: &[f64],
    params: &ModelParams,
    truncation: Truncation,
    threshold: f64,
) -> Result<UnitarityReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParams("unitarity_diagnostic: empty T grid".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("unitarity_diagnostic: T grid must be sorted".into()));
    }
    let eps_d = params.epsilon_d()?;
    let shifts: Vec<(f64, PiResult)> = t_grid
        .par_iter()
        .map(|&t| Ok((t, log_pi_with(t, params, truncation)?)))
        .collect::<Result<_>>()?;
    let main: Vec<(f64, f64)> =
        shifts.iter().filter(|(t, _)| *t >= eps_d).map(|(t, p)| (*t, p.log_pi)).collect();
    let sub: Vec<f64> = shifts.iter().filter(|(t, _)| *t < eps_d).map(|(t, p)| p.log_pi / t).collect();
    let reference: Vec<(f64, f64)> = if main.is_empty() {
        shifts.iter().map(|(t, p)| (*t, p.log_pi)).collect()
    } else {
        main
    };
    let dw: Vec<f64> = reference.iter().map(|(t, l)| l / t).collect();
    let mean_delta_omega = mean(&dw);
    let max_dev = max_rel_deviation(&dw);
    let fitted_rate = (reference.len() >= 2).then(|| {
        let ts: Vec<f64> = reference.iter().map(|r| r.0).collect();
        let ls: Vec<f64> = reference.iter().map(|r| r.1).collect();
        let (mt, ml) = (mean(&ts), mean(&ls));
        let sxy: f64 = ts.iter().zip(&ls).map(|(t, l)| (t - mt) * (l - ml)).sum();
        let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
        sxy / sxx
    });
    let judge = |ok: bool| if ok { Verdict::UnitaryCompatible } else { Verdict::NonExponential };
    let rows = shifts
        .iter()
        .map(|(t, p)| {
            let delta_omega = p.log_pi / t;
            let dev = if mean_delta_omega == 0.0 {
                if delta_omega == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                (delta_omega - mean_delta_omega).abs() / mean_delta_omega.abs()
            };
            ShiftRow {
                t: *t,
                delta_omega,
                log_pi: p.log_pi,
                n_terms: p.n_terms,
                below_eps_d: *t < eps_d,
                verdict: judge(dev <= threshold),
            }
        })
        .collect();
    Ok(UnitarityReport {
        rows,
        max_rel_deviation: max_dev,
        mean_delta_omega,
        sub_eps_d_deviation: (!sub.is_empty()).then(|| max_rel_deviation(&sub)),
        fitted_rate,
        threshold,
        verdict: judge(max_dev <= threshold),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    /// Intercept.
    pub a: f64,
    /// Slope.
    pub b: f64,
    /// Root-mean-square relative residual over the fitted points.
    pub residual: f64,
    pub n_points: usize,
}

/// Least squares for `y ≈ a + b·x` with weights `1/y²`.
pub fn relative_linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidParams("linear fit needs at least 3 points".into()));
    }
    if ys.iter().any(|&y| y == 0.0 || !y.is_finite()) {
        return Err(Error::InvalidParams("linear fit: values must be finite and nonzero".into()));
    }
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let w = 1.0 / (y * y);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    let b = (sw * sxy - sx * sy) / det;
    let a = (sy - b * sx) / sw;
    let ss: f64 = xs.iter().zip(ys).map(|(&x, &y)| ((y - a - b * x) / y).powi(2)).sum();
    Ok(LinearFit { a, b, residual: (ss / xs.len() as f64).sqrt(), n_points: xs.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct E0Scan {
    /// `(ω, E^D_0)` in grid order.
    pub rows: Vec<(f64, f64)>,
    /// Fit over the larger-ω half of the grid.
    pub fit: LinearFit,
}

/// `E^D_0(ω)` on a grid at fixed `T`, with a linear fit over the larger-ω half.
pub fn scan_e0_vs_omega(omega_grid: &[f64], params: &ModelParams, t: f64, truncation: Truncation) -> Result<E0Scan> {
    if omega_grid.len() < 3 {
        return Err(Error::InvalidParams("scan_e0_vs_omega: need at least 3 grid points".into()));
    }
    if omega_grid.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidParams("scan_e0_vs_omega: omegas must be positive".into()));
    }
    let rows: Vec<(f64, f64)> = omega_grid
        .par_iter()
        .map(|&w| Ok((w, spectrum_shift(t, &params.with_omega(w)?, 0, truncation)?.e0_d)))
        .collect::<Result<_>>()?;
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let keep = (sorted.len().div_ceil(2)).max(3);
    let upper = &sorted[sorted.len() - keep..];
    let xs: Vec<f64> = upper.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = upper.iter().map(|r| r.1).collect();
    Ok(E0Scan { fit: relative_linear_fit(&xs, &ys)?, rows })
}
