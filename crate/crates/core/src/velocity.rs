//! Mean-square velocity at time resolution ε in the unrestricted (Feynman)
//! and restricted (differentiable) path measures.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::paths::ModelParams;
use crate::quad::integrate_graded;
use crate::special::{li2_exp, one_minus_zed, sin_pi, SeriesValue, ZETA2};
use crate::sum::{block_sum, Neumaier};
use crate::MAX_TERMS;

const FIRST_BLOCK: usize = 1024;

/// Sums `Σ_{j≥1} term(j)` until `bound(N) ≤ tol·max(|value|, floor)`.
///
/// `estimate(N)` is added to the partial sum as a tail correction and
/// `bound(N)` must be a non-increasing upper bound on the remaining error.
pub(crate) fn adaptive_series<T, B, E>(term: T, bound: B, estimate: E, tol: f64, floor: f64) -> Result<SeriesValue>
where
    T: Fn(usize) -> f64 + Sync,
    B: Fn(usize) -> f64,
    E: Fn(usize) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol = {tol}; must be positive")));
    }
    let mut acc = Neumaier::new();
    let mut n = 0;
    let mut next = FIRST_BLOCK;
    loop {
        acc.add(block_sum(n + 1, next + 1, &term));
        n = next;
        let value = acc.value() + estimate(n);
        let b = bound(n);
        let partial = SeriesValue { value, n_terms: n, tail_bound: b, converged: false };
        let scale = value.abs().max(floor);
        if b <= tol * scale || b == 0.0 {
            return Ok(SeriesValue { converged: true, ..partial });
        }
        if n >= MAX_TERMS || bound(MAX_TERMS) > tol * (scale + b) {
            return Err(Error::NonConvergence { partial });
        }
        // Smallest N whose bound meets the target at the current value.
        let target = tol * scale;
        let (mut lo, mut hi) = (n, MAX_TERMS);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if bound(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        next = hi.max(n + n / 8 + FIRST_BLOCK).min(MAX_TERMS);
    }
}

fn check_tau(func: &'static str, tau: f64) -> Result<()> {
    if (0.0..1.0).contains(&tau) {
        Ok(())
    } else {
        Err(domain(func, format!("tau = {tau}; need 0 <= tau < 1")))
    }
}

/// `Σ_{j≥M} 1/j²` from the asymptotic expansion of ψ'(M); error below `1/(30M⁹)`.
fn zeta2_tail(m: f64) -> f64 {
    let r = 1.0 / m;
    let r2 = r * r;
    r + r2 * (0.5 + r * (1.0 / 6.0 + r2 * (-1.0 / 30.0 + r2 / 42.0)))
}

/// Fold a frequency `θ/2π` onto `[0, ½]`; `cos(jθ)` depends only on this.
fn fold(x: f64) -> f64 {
    let r = x - x.floor();
    r.min(1.0 - r)
}

/// `[sin(jπ(t₀+τ)) − sin(jπt₀)]² = c₀ + Σ c_k cos(2πj·x_k)`.
pub(crate) struct CosineExpansion {
    pub(crate) constant: f64,
    pub(crate) terms: Vec<(f64, f64)>,
}

impl CosineExpansion {
    pub(crate) fn new(tau: f64, t0: f64) -> Self {
        let raw = [(t0 + tau, -0.5), (t0, -0.5), (0.5 * tau, -1.0), (t0 + 0.5 * tau, 1.0)];
        let mut constant = 1.0;
        let mut terms: Vec<(f64, f64)> = Vec::new();
        for (x, c) in raw {
            let x = fold(x);
            if x <= 1e-14 {
                constant += c;
            } else if let Some(t) = terms.iter_mut().find(|t| (t.0 - x).abs() <= 1e-14) {
                t.1 += c;
            } else {
                terms.push((x, c));
            }
        }
        terms.retain(|t| t.1.abs() > 1e-15);
        Self { constant, terms }
    }

    /// Abel-summation estimate of `Σ_{j>n} (c₀ + Σ c_k cos(2πj x_k))/j²`.
    fn tail_estimate(&self, n: usize) -> f64 {
        let m = (n + 1) as f64;
        let w = 1.0 / (m * m);
        let osc: f64 = self
            .terms
            .iter()
            .map(|&(x, c)| -c * w * sin_pi((2 * n + 1) as f64 * x) / (2.0 * sin_pi(x)))
            .sum();
        self.constant * zeta2_tail(m) + osc
    }

    /// Bound on the error of [`Self::tail_estimate`].
    fn tail_bound(&self, n: usize) -> f64 {
        let m = (n + 1) as f64;
        // w_{n+1} − w_{n+2} for w_j = 1/j².
        let dw = (2.0 * m + 1.0) / (m * m * (m + 1.0) * (m + 1.0));
        let osc: f64 = self
            .terms
            .iter()
            .map(|&(x, c)| {
                let s = sin_pi(x);
                c.abs() * dw / (2.0 * s * s)
            })
            .sum();
        osc + self.constant.abs() / (30.0 * m.powi(9))
    }
}

/// `S_F = Σ_j j⁻²[sin(jπ(t₀+τ)) − sin(jπt₀)]²` with `τ = ε/T`, `t₀` in units of `T`.
///
/// The tail beyond the summed terms is estimated by first-order Abel summation
/// of each cosine component; `tail_bound` bounds the estimate's error.
pub fn s_feynman(tau: f64, t0: f64, tol: f64) -> Result<SeriesValue> {
    check_tau("s_feynman", tau)?;
    if !(0.0..1.0).contains(&t0) {
        return Err(domain("s_feynman", format!("t0 = {t0}; need 0 <= t0 < 1")));
    }
    let expansion = CosineExpansion::new(tau, t0);
    let term = |j: usize| {
        let jf = j as f64;
        let d = sin_pi(jf * (t0 + tau)) - sin_pi(jf * t0);
        d * d / (jf * jf)
    };
    adaptive_series(term, |n| expansion.tail_bound(n), |n| expansion.tail_estimate(n), tol, 0.0)
}

fn re_li2(theta_over_pi: f64) -> f64 {
    li2_exp(Complex64::new(0.0, PI * theta_over_pi)).expect("unit circle").re
}

/// Closed form of [`s_feynman`] through `Li₂` on the unit circle.
pub fn s_feynman_closed_at(tau: f64, t0: f64) -> Result<f64> {
    check_tau("s_feynman_closed", tau)?;
    if !(0.0..1.0).contains(&t0) {
        return Err(domain("s_feynman_closed", format!("t0 = {t0}; need 0 <= t0 < 1")));
    }
    Ok(ZETA2 - 0.5 * re_li2(2.0 * (t0 + tau)) - 0.5 * re_li2(2.0 * t0) - re_li2(tau)
        + re_li2(2.0 * t0 + tau))
}

/// `S_F(τ)` at `t₀ = 0`: `ζ(2)/2 − ½·Re Li₂(e^{2iπτ})`, equal to `π²τ(1−τ)/2`.
pub fn s_feynman_closed(tau: f64) -> Result<f64> {
    s_feynman_closed_at(tau, 0.0)
}

/// `ζ(2) − Re Li₂(e^{iπτ}) = π²τ/2 − π²τ²/4`; matches `S_F` to first order in τ only.
pub fn s_feynman_first_order(tau: f64) -> Result<f64> {
    check_tau("s_feynman_first_order", tau)?;
    Ok(ZETA2 - re_li2(tau))
}

/// `1 − Z(W)` extended to `W = 0` and `W = ∞`.
fn damping(w: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else if w.is_infinite() {
        1.0
    } else {
        one_minus_zed(w).expect("positive finite W")
    }
}

/// `∫_a^b c·t^p dt`; `b` may be infinite when `p < −1`.
fn power_integral(c: f64, p: f64, a: f64, b: f64) -> f64 {
    if b <= a || c == 0.0 {
        return 0.0;
    }
    if (p + 1.0).abs() < 1e-12 {
        return c * (b / a).ln();
    }
    let hi = if b.is_infinite() { 0.0 } else { b.powf(p + 1.0) };
    c * (hi - a.powf(p + 1.0)) / (p + 1.0)
}

/// `∫_n^∞ min(cap, (πτt)²)/t² · min(1, (2/3)Ā²t^{−2(α−1)}) dt`.
///
/// The integrand is non-increasing, so this bounds the series tail beyond `n`.
pub(crate) fn restricted_tail_integral(n: f64, cap: f64, tau: f64, a_bar2: f64, alpha: f64) -> f64 {
    if tau == 0.0 {
        return 0.0;
    }
    let pt = PI * tau;
    let q = 2.0 * (alpha - 1.0);
    let t1 = cap.sqrt() / pt;
    let t2 = (2.0 * a_bar2 / 3.0).powf(1.0 / q);
    let mut cuts = vec![n];
    for t in [t1, t2] {
        if t > n && t.is_finite() {
            cuts.push(t);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.push(f64::INFINITY);
    cuts.windows(2)
        .map(|w| {
            let mid = if w[1].is_infinite() { 2.0 * w[0] + 1.0 } else { 0.5 * (w[0] + w[1]) };
            let (c1, p1) = if mid < t1 { (pt * pt, 0.0) } else { (cap, -2.0) };
            let (c2, p2) = if mid < t2 { (1.0, 0.0) } else { (2.0 * a_bar2 / 3.0, -q) };
            power_integral(c1 * c2, p1 + p2, w[0], w[1])
        })
        .sum()
}

fn require_alpha_above_one(func: &'static str, alpha: f64) -> Result<()> {
    if alpha > 1.0 {
        Ok(())
    } else {
        Err(domain(func, format!("alpha = {alpha}; need alpha > 1")))
    }
}

/// Bracket `(centre, half-width)` on `Σ_{j>n} sin²(jπτ)·h(j)`, `h(t) = (1 − Z(Ā²t^{−q}))/t²`.
///
/// `h` decreases, so `Σ_{j>n} h(j) ∈ [J − h(n), J]` with `J = ∫_n^∞ h = (1/n)∫₀¹(1 − Z(W_n u^q))du`,
/// and the `−½cos(2πjτ)` part of `sin²` is at most `½h(n+1)/sin(πτ)` by Abel summation.
fn damped_tail(n: f64, tau: f64, a2: f64, q: f64) -> Option<(f64, f64)> {
    let w_n = a2 / n.powf(q);
    let quad_tol = 1e-13;
    // The step of 1 − Z(W_n u^q) sits near u = W_n^{−1/q}.
    let layer = w_n.powf(-1.0 / q).min(1.0);
    let u_integral = integrate_graded(&|u: f64| damping(w_n * u.powf(q)), 0.0, 1.0, 1e-2 * layer, quad_tol).ok()?;
    let h = |t: f64| damping(a2 / t.powf(q)) / (t * t);
    let j = u_integral / n;
    let centre = 0.5 * (j - 0.5 * h(n));
    let half = 0.25 * h(n) + 0.5 * h(n + 1.0) / sin_pi(tau) + 0.5 * quad_tol / n;
    Some((centre, half))
}

/// `sup_{t>n} Z(Ā²t^{−q})/t²`, from `Z ≤ 1` and `Z(W) ≤ (2/√π)√W e^{−W}/erf(1)` for `W ≥ 1`.
fn zed_weight_sup(n: f64, a2: f64, q: f64) -> f64 {
    let w_n = a2 / n.powf(q);
    let small = w_n.min(1.0).powf(2.0 / q);
    let large = if w_n > 1.0 {
        // (2/√π)/erf(1) < 1.34; W^p e^{−W} peaks at W = p.
        let p = 0.5 + 2.0 / q;
        let w = p.clamp(1.0, w_n);
        1.34 * w.powf(p) * (-w).exp()
    } else {
        0.0
    };
    small.max(large) * a2.powf(-2.0 / q)
}

/// Bracket `(centre, half-width)` on `Σ_{j>n} sin²(jπτ)·(1/j² − g(j))`, `g(t) = Z(Ā²t^{−q})/t²`.
///
/// The `1/j²` part is the Feynman tail. `g` is unimodal (`d ln g/d ln W = ½ + 2/q − W − Z/2`
/// decreases since `|Z'| < 2`), so `Σ_{j>n} g` is within `2·sup g` of `J_g = (1/n)∫₀¹Z(W_n u^q)du`
/// and its `cos(2πjτ)` part is at most `sup g/sin(πτ)`. Tight when `Z` is negligible up to `n`.
fn feynman_minus_zed_tail(n: f64, tau: f64, a2: f64, q: f64, expansion: &CosineExpansion) -> Option<(f64, f64)> {
    let w_n = a2 / n.powf(q);
    let quad_tol = 1e-13;
    let layer = w_n.powf(-1.0 / q).min(1.0);
    let z_integral = integrate_graded(&|u: f64| 1.0 - damping(w_n * u.powf(q)), 0.0, 1.0, 1e-2 * layer, quad_tol).ok()?;
    let g_sup = zed_weight_sup(n, a2, q);
    let m = n as usize;
    let centre = expansion.tail_estimate(m) - 0.5 * z_integral / n;
    let half = expansion.tail_bound(m) + g_sup + 0.5 * g_sup / sin_pi(tau) + 0.5 * quad_tol / n;
    Some((centre, half))
}

/// `∫_n^∞ (1 − Z(Ā²t^{−q}))dt` for `q > 1`, with its quadrature error estimate.
///
/// With `t = n/u` the integral is `n∫₀¹(1 − Z(W_n u^q))/u² du`; below `W = 1e-3`
/// the integrand is replaced by `2W/3 − 8W²/45 + 16W³/945` and integrated exactly.
fn damped_integral(n: f64, a2: f64, q: f64) -> Option<(f64, f64)> {
    const W_SERIES: f64 = 1e-3;
    const COEFFS: [f64; 3] = [2.0 / 3.0, -8.0 / 45.0, 16.0 / 945.0];
    let w_n = a2 / n.powf(q);
    let u_s = (W_SERIES / w_n).powf(1.0 / q).min(1.0);
    let series: f64 = COEFFS
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = (i + 1) as f64;
            c * w_n.powf(k) * u_s.powf(k * q - 1.0) / (k * q - 1.0)
        })
        .sum();
    if u_s >= 1.0 {
        return Some((n * series, 1e-12 * n * series));
    }
    let quad_tol = 1e-13 * (series + 1.0);
    let rest = integrate_graded(&|u: f64| damping(w_n * u.powf(q)) / (u * u), u_s, 1.0, u_s, quad_tol).ok()?;
    Some((n * (series + rest), n * (quad_tol + 1e-12 * series)))
}

/// `S_D = Σ_j j⁻² sin²(jπτ)(1 − Z(W_j))`, `W_j = Ā²/j^{2(α−1)}`.
///
/// Three tail brackets are available and the narrowest is used: `[0, I]` with
/// `I` the integral of the termwise bound `min(1,(jπτ)²)·min(1, 2W_j/3)/j²`,
/// the monotone-weight bracket of [`damped_tail`], and the Feynman tail minus
/// the `Z` part of [`feynman_minus_zed_tail`], which wins for large `A`.
pub fn s_diff(tau: f64, params: &ModelParams, tol: f64) -> Result<SeriesValue> {
    check_tau("s_diff", tau)?;
    require_alpha_above_one("s_diff", params.alpha)?;
    let a2 = params.a_bar().powi(2);
    let q = 2.0 * (params.alpha - 1.0);
    let term = |j: usize| {
        let jf = j as f64;
        let s = sin_pi(jf * tau);
        s * s / (jf * jf) * damping(a2 / jf.powf(q))
    };
    let expansion = CosineExpansion::new(tau, 0.0);
    // (estimate, half-width) of the tail beyond n: the narrowest available bracket.
    let bracket = |n: usize| {
        let nf = n as f64;
        let crude = restricted_tail_integral(nf, 1.0, tau, a2, params.alpha);
        [damped_tail(nf, tau, a2, q), feynman_minus_zed_tail(nf, tau, a2, q, &expansion)]
            .into_iter()
            .flatten()
            .fold((0.5 * crude, 0.5 * crude), |best, b| if b.1 < best.1 { b } else { best })
    };
    adaptive_series(term, |n| bracket(n).1, |n| bracket(n).0, tol, 0.0)
}

fn check_eps(func: &'static str, eps: f64, params: &ModelParams) -> Result<()> {
    if eps > 0.0 && eps < params.t {
        Ok(())
    } else {
        Err(domain(func, format!("eps = {eps}; need 0 < eps < T = {}", params.t)))
    }
}

/// `(2ħ/mT)(T/πε)²`, the factor turning an `S` series into `⟨v²⟩`.
fn velocity_prefactor(eps: f64, params: &ModelParams) -> f64 {
    let r = params.t / (PI * eps);
    2.0 * params.hbar / (params.m * params.t) * r * r
}

fn scale_result(r: Result<SeriesValue>, k: f64) -> Result<SeriesValue> {
    match r {
        Ok(s) => Ok(s.scaled(k)),
        Err(Error::NonConvergence { partial }) => Err(Error::NonConvergence { partial: partial.scaled(k) }),
        Err(e) => Err(e),
    }
}

/// Feynman `⟨v²⟩` at resolution ε; `≈ ħ/(mε)` for `ε ≪ T`.
pub fn v2_feynman(eps: f64, params: &ModelParams, tol: f64) -> Result<SeriesValue> {
    check_eps("v2_feynman", eps, params)?;
    scale_result(s_feynman(eps / params.t, 0.0, tol), velocity_prefactor(eps, params))
}

/// Restricted-measure `⟨v²⟩` at resolution ε.
pub fn v2_diff(eps: f64, params: &ModelParams, tol: f64) -> Result<SeriesValue> {
    check_eps("v2_diff", eps, params)?;
    scale_result(s_diff(eps / params.t, params, tol), velocity_prefactor(eps, params))
}

/// `lim_{ε→0} v2_diff = (2ħ/mT)·Σ_j (1 − Z(W_j))`, finite for `α > 3/2`.
pub fn uv_plateau(params: &ModelParams, tol: f64) -> Result<SeriesValue> {
    if !(params.alpha > 1.5) {
        return Err(domain("uv_plateau", format!("alpha = {}; need alpha > 3/2", params.alpha)));
    }
    let a2 = params.a_bar().powi(2);
    let q = 2.0 * (params.alpha - 1.0);
    let t2 = (2.0 * a2 / 3.0).powf(1.0 / q);
    let term = |j: usize| damping(a2 / (j as f64).powf(q));
    // (estimate, half-width) of the tail beyond n; the terms decrease, so the
    // tail lies in [J(n) − term(n), J(n)].
    let bracket = |n: usize| {
        let nf = n as f64;
        let crude = power_integral(1.0, 0.0, nf, t2) + power_integral(2.0 * a2 / 3.0, -q, nf.max(t2), f64::INFINITY);
        match damped_integral(nf, a2, q) {
            Some((j, err)) if 0.5 * term(n) + err < crude => (j - 0.5 * term(n), 0.5 * term(n) + err),
            _ => (0.0, crude),
        }
    };
    let k = 2.0 * params.hbar / (params.m * params.t);
    scale_result(adaptive_series(term, |n| bracket(n).1, |n| bracket(n).0, tol, 0.0), k)
}

/// Two-regime characterization of the restricted `⟨v²⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// `v²_UV = (πA/T)√(ħ/mT)`.
    pub v2_uv: f64,
    /// `C = (4/π³)(1/A)(ħT/m)^{3/2}`.
    pub c_coeff: f64,
    pub epsilon_d: f64,
    /// `p_UV = m·√v²_UV`.
    pub p_uv: f64,
}

pub fn regime_report(params: &ModelParams) -> Result<RegimeReport> {
    if !(params.alpha > 2.0) {
        return Err(Error::FractalRegime { alpha: params.alpha });
    }
    let a = params.amplitude_a();
    let (m, hbar, t) = (params.m, params.hbar, params.t);
    let v2_uv = PI * a / t * (hbar / (m * t)).sqrt();
    let c_coeff = 4.0 / PI.powi(3) / a * (hbar * t / m).powf(1.5);
    Ok(RegimeReport { v2_uv, c_coeff, epsilon_d: params.epsilon_d()?, p_uv: m * v2_uv.sqrt() })
}

/// Upper bound `(2ħT/π²mĀ)/ε²` on `v2_feynman − v2_diff` above `ε_D`.
pub fn low_resolution_correction_bound(eps: f64, params: &ModelParams) -> f64 {
    2.0 * params.hbar * params.t / (PI * PI * params.m * params.a_bar()) / (eps * eps)
}

/// The ε at which `v2_diff` falls to half of `v2_feynman`, located by
/// bisection in `ln ε` on `[10⁻⁶T, T/2]`.
pub fn crossover_epsilon(params: &ModelParams, tol: f64) -> Result<f64> {
    let ratio = |eps: f64| -> Result<f64> {
        let tau = eps / params.t;
        Ok(s_diff(tau, params, tol)?.value / s_feynman_closed(tau)?)
    };
    // Both sums are symmetric under tau -> 1 - tau, so the ratio rises on (0, T/2] only.
    let (mut lo, mut hi) = ((1e-6 * params.t).ln(), (0.5 * params.t).ln());
    if ratio(lo.exp())? >= 0.5 || ratio(hi.exp())? <= 0.5 {
        return Err(domain("crossover_epsilon", "ratio v2_diff/v2_feynman does not cross 1/2 in range"));
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid.exp())? < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Feynman,
    Differentiable,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Feynman => "feynman",
            Model::Differentiable => "differentiable",
        })
    }
}

pub fn v2(eps: f64, params: &ModelParams, model: Model, tol: f64) -> Result<SeriesValue> {
    match model {
        Model::Feynman => v2_feynman(eps, params, tol),
        Model::Differentiable => v2_diff(eps, params, tol),
    }
}

/// One row of a `⟨v²⟩` scan; non-converged rows carry the partial sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub eps: f64,
    pub model: Model,
    pub v2: SeriesValue,
}

/// Evaluates `⟨v²⟩` on a grid, in parallel, rows in grid order.
pub fn scan_v2(eps_grid: &[f64], params: &ModelParams, model: Model, tol: f64) -> Result<Vec<ScanRow>> {
    for &eps in eps_grid {
        check_eps("scan_v2", eps, params)?;
    }
    eps_grid
        .par_iter()
        .map(|&eps| {
            let v2 = match v2(eps, params, model, tol) {
                Ok(s) => s,
                Err(Error::NonConvergence { partial }) => partial,
                Err(e) => return Err(e),
            };
            Ok(ScanRow { eps, model, v2 })
        })
        .collect()
}
