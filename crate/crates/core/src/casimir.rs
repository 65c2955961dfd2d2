//! One-dimensional Casimir toy model: regularized sum-minus-integral,
//! Euler–Maclaurin evaluation, the tanh ground-state model, and the `ε_D` bound.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::quad::integrate;
use crate::special::bernoulli;
use crate::sum::Neumaier;

/// Smooth cutoff `g(n/n_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regulator {
    /// `e^{−x}`.
    #[default]
    Exp,
    /// `e^{−x²}`.
    Gauss,
}

impl Regulator {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Regulator::Exp => (-x).exp(),
            Regulator::Gauss => (-x * x).exp(),
        }
    }

    /// Multiple of `n_c` beyond which `g` is below 1e-26.
    fn reach(self) -> f64 {
        match self {
            Regulator::Exp => 60.0,
            Regulator::Gauss => 8.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regulator::Exp => "exp",
            Regulator::Gauss => "gauss",
        }
    }
}

impl fmt::Display for Regulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Σ_{n≥0} f(n)g(n/n_c) − ∫₀^∞ f(t)g(t/n_c)dt` at a single cutoff.
///
/// Summed as `Σₙ [F(n) − ∫ₙ^{n+1}F]` up to where `g` is negligible.
pub fn sum_minus_integral<F: Fn(f64) -> f64>(f: F, regulator: Regulator, n_c: f64) -> Result<f64> {
    if !(n_c >= 10.0 && n_c.is_finite()) {
        return Err(domain("sum_minus_integral", format!("n_c = {n_c}; need n_c >= 10")));
    }
    let big_f = |t: f64| f(t) * regulator.eval(t / n_c);
    let n_max = (regulator.reach() * n_c).ceil() as usize;
    let mut acc = Neumaier::new();
    for n in 0..n_max {
        let a = n as f64;
        let fa = big_f(a);
        let scale = fa.abs().max(big_f(a + 1.0).abs());
        let integral = integrate(&big_f, a, a + 1.0, 1e-15 * scale.max(f64::MIN_POSITIVE))?;
        acc.add(fa);
        acc.add(-integral);
    }
    let edge = big_f(n_max as f64);
    if !acc.value().is_finite() || edge.abs() > 1e-12 {
        return Err(Error::Quadrature(format!("integrand does not decay: F({n_max}) = {edge:e}")));
    }
    Ok(acc.value())
}

/// Neville extrapolation to `h = 0` of values `ys` taken at `hs`.
pub fn extrapolate_to_zero(hs: &[f64], ys: &[f64]) -> Result<f64> {
    if hs.len() != ys.len() || hs.is_empty() {
        return Err(Error::InvalidParams("extrapolation needs matching nonempty samples".into()));
    }
    let mut p = ys.to_vec();
    for level in 1..hs.len() {
        for i in 0..hs.len() - level {
            let (hi, hj) = (hs[i], hs[i + level]);
            p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
        }
    }
    Ok(p[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// `(n_c, raw sum-minus-integral)` per cutoff.
    pub raw: Vec<(f64, f64)>,
    /// `|value − two-point extrapolation of the two largest cutoffs|`.
    pub error_estimate: f64,
}

/// Richardson extrapolation in `n_c⁻²` over the cutoffs `n_c, 10n_c, 100n_c`.
///
/// Both regulators give an expansion in even powers of `1/n_c` for odd `f`.
pub fn sum_minus_integral_extrapolated<F>(f: F, regulator: Regulator, n_c: f64) -> Result<Extrapolated>
where
    F: Fn(f64) -> f64,
{
    let cutoffs = [n_c, 10.0 * n_c, 100.0 * n_c];
    let mut raw = Vec::with_capacity(cutoffs.len());
    for &nc in &cutoffs {
        raw.push((nc, sum_minus_integral(&f, regulator, nc)?));
    }
    let hs: Vec<f64> = cutoffs.iter().map(|n| n.powi(-2)).collect();
    let ys: Vec<f64> = raw.iter().map(|r| r.1).collect();
    let value = extrapolate_to_zero(&hs, &ys)?;
    let coarse = extrapolate_to_zero(&hs[1..], &ys[1..])?;
    Ok(Extrapolated { value, raw, error_estimate: (value - coarse).abs() })
}

/// `−Σ_{k=1}^{K} B_k/k! · f^{(k−1)}(0)` with `B₁ = −½`.
///
/// `derivs[i]` is `f^{(i)}(0)`.
pub fn euler_maclaurin_delta(derivs: &[f64], k_max: usize) -> Result<f64> {
    if derivs.len() < k_max {
        return Err(Error::InvalidParams(format!(
            "euler_maclaurin_delta: K = {k_max} needs {k_max} derivatives, got {}",
            derivs.len()
        )));
    }
    let mut fact = 1.0;
    let mut acc = 0.0;
    for (k, d) in (1..=k_max).zip(derivs) {
        fact *= k as f64;
        acc -= bernoulli(k)? / fact * d;
    }
    Ok(acc)
}

/// `tanh^{(n)}(0)` for `n = 0..=max_order`; odd orders `2m−1` equal `2^{2m}(2^{2m}−1)B_{2m}/(2m)`.
pub fn tanh_derivatives_at_zero(max_order: usize) -> Result<Vec<f64>> {
    (0..=max_order)
        .map(|n| {
            if n % 2 == 0 {
                return Ok(0.0);
            }
            let two_m = n + 1;
            let p = 2f64.powi(two_m as i32);
            Ok(p * (p - 1.0) * bernoulli(two_m)? / two_m as f64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CasimirModel {
    /// `f(n) = n`.
    Standard,
    /// `f_D(n) = tanh(xn)/x` with `x = πc/(Lω_D)`.
    Tanh,
}

impl CasimirModel {
    pub fn as_str(self) -> &'static str {
        match self {
            CasimirModel::Standard => "standard",
            CasimirModel::Tanh => "tanh",
        }
    }

    /// Mode function for smallness parameter `x`.
    pub fn mode_function(self, x: f64) -> impl Fn(f64) -> f64 {
        move |n: f64| match self {
            CasimirModel::Tanh if x > 0.0 => (x * n).tanh() / x,
            _ => n,
        }
    }

    /// `f^{(k)}(0)` for `k < count`.
    pub fn derivatives_at_zero(self, x: f64, count: usize) -> Result<Vec<f64>> {
        match self {
            CasimirModel::Standard => Ok((0..count).map(|k| if k == 1 { 1.0 } else { 0.0 }).collect()),
            CasimirModel::Tanh => {
                let t = tanh_derivatives_at_zero(count.saturating_sub(1))?;
                Ok(t.iter().enumerate().map(|(k, d)| d * x.powi(k as i32 - 1)).take(count).collect())
            }
        }
    }
}

impl fmt::Display for CasimirModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirConfig {
    pub l: f64,
    /// `ω_D`; `f64::INFINITY` gives the standard mode function.
    pub omega_d: f64,
    pub c: f64,
    pub hbar: f64,
    /// Smallest of the three extrapolation cutoffs.
    pub n_c: f64,
    pub regulator: Regulator,
}

impl CasimirConfig {
    pub fn new(l: f64, omega_d: f64) -> Result<Self> {
        let cfg = Self { l, omega_d, c: 1.0, hbar: 1.0, n_c: 100.0, regulator: Regulator::Exp };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && !v.is_nan();
        if !(ok(self.l) && ok(self.omega_d) && ok(self.c) && ok(self.hbar) && self.n_c >= 10.0)
            || !self.l.is_finite()
            || !self.c.is_finite()
            || !self.n_c.is_finite()
        {
            return Err(Error::InvalidParams(format!("invalid Casimir configuration {self:?}")));
        }
        Ok(())
    }

    /// `x = πc/(Lω_D)`.
    pub fn x(&self) -> f64 {
        PI * self.c / (self.l * self.omega_d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirEnergy {
    /// `ΔE(L) = ½(ħcπ/L)·coefficient`.
    pub delta_e: f64,
    /// Extrapolated sum-minus-integral of the mode function.
    pub coefficient: f64,
    pub error_estimate: f64,
    pub x: f64,
    pub model: CasimirModel,
}

pub fn casimir_energy(config: &CasimirConfig, model: CasimirModel) -> Result<CasimirEnergy> {
    config.validate()?;
    let x = config.x();
    let ex = sum_minus_integral_extrapolated(model.mode_function(x), config.regulator, config.n_c)?;
    Ok(CasimirEnergy {
        delta_e: 0.5 * config.hbar * config.c * PI / config.l * ex.value,
        coefficient: ex.value,
        error_estimate: ex.error_estimate,
        x,
        model,
    })
}

/// Upper bounds on `ε_D` from requiring the tanh correction to stay below
/// `rel_error` of the leading `−1/12`, with `ε_D = 1/ω_D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonDBound {
    /// `L_exp/c`, from `ω_D > c/L_exp` with O(1) factors dropped.
    pub epsilon_d: f64,
    pub omega_d_min: f64,
    /// Solution of `(1/360)x² ≤ rel_error/12` with the computed tanh coefficient.
    pub epsilon_d_exact: f64,
    pub omega_d_min_exact: f64,
    /// Largest admissible `x = πc/(L_exp ω_D)`.
    pub x_max: f64,
}

pub fn epsilon_d_bound(l_exp: f64, rel_error: f64, c: f64) -> Result<EpsilonDBound> {
    if !(l_exp > 0.0 && l_exp.is_finite() && c > 0.0 && c.is_finite()) {
        return Err(domain("epsilon_d_bound", format!("L = {l_exp}, c = {c}; both must be positive")));
    }
    if !(rel_error > 0.0 && rel_error < 1.0) {
        return Err(domain("epsilon_d_bound", format!("rel_error = {rel_error}; need 0 < rel_error < 1")));
    }
    let derivs = CasimirModel::Tanh.derivatives_at_zero(1.0, 5)?;
    let leading = euler_maclaurin_delta(&derivs[..2], 2)?.abs();
    let quadratic = (euler_maclaurin_delta(&derivs, 5)? + leading).abs();
    let x_max = (rel_error * leading / quadratic).sqrt();
    let omega_d_min_exact = PI * c / (l_exp * x_max);
    Ok(EpsilonDBound {
        epsilon_d: l_exp / c,
        omega_d_min: c / l_exp,
        epsilon_d_exact: 1.0 / omega_d_min_exact,
        omega_d_min_exact,
        x_max,
    })
}
