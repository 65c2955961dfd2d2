//! Special functions: erf/erfc, log-space Erf ratios, the truncated-Gaussian
//! factor `Z(W)`, `Li₂(e^μ)`, Riemann ζ and Bernoulli numbers.

// The fdlibm coefficients are kept digit for digit as published.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_2_SQRT_PI, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{domain, Error, Result};

/// ζ(2) = π²/6.
pub const ZETA2: f64 = PI * PI / 6.0;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// A numerically summed series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub n_terms: usize,
    /// Upper bound on `|exact − value|` from the omitted tail.
    pub tail_bound: f64,
    pub converged: bool,
}

impl SeriesValue {
    /// Multiplies value and tail bound by a positive constant.
    pub fn scaled(self, k: f64) -> Self {
        Self { value: self.value * k, tail_bound: self.tail_bound * k.abs(), ..self }
    }
}

// Rational approximations from fdlibm s_erf.c.
const ERX: f64 = 8.45062911510467529297e-01;
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 5] = [
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];
const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 6] = [
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];
const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 8] = [
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];
const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 7] = [
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

#[inline]
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// `1 + x·poly(c, x)`, the denominator shape used by every branch.
#[inline]
fn poly1(c: &[f64], x: f64) -> f64 {
    1.0 + x * poly(c, x)
}

/// `erfc(x)·x` for `1.25 ≤ x < 28`, asymptotic branch.
fn erfc_tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (poly(&RA, s), poly1(&SA, s))
    } else {
        (poly(&RB, s), poly1(&SB, s))
    };
    // Split x so that x² is formed exactly in the leading exponential.
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / q).exp()
}

/// Error function, relative error below 1e-15 for all finite `x`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let r = if a < 0.84375 {
        if a < 3.725_290_298_461_914e-9 {
            if a < 2.848_094_538_889_218e-306 {
                0.125 * (8.0 * a + EFX8 * a)
            } else {
                a + EFX * a
            }
        } else {
            let z = a * a;
            a + a * (poly(&PP, z) / poly1(&QQ, z))
        }
    } else if a < 1.25 {
        let s = a - 1.0;
        ERX + poly(&PA, s) / poly1(&QA, s)
    } else if a >= 6.0 {
        1.0
    } else {
        1.0 - erfc_tail(a) / a
    };
    r.copysign(x)
}

/// Complementary error function `1 − erf(x)` without cancellation for `x > 0`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    if a < 0.84375 {
        let y = if a < 1.387_778_780_781_445_7e-17 {
            a
        } else {
            let z = a * a;
            let t = a * (poly(&PP, z) / poly1(&QQ, z));
            if a < 0.25 {
                a + t
            } else {
                return if x < 0.0 { 1.0 + (0.5 + (t + (a - 0.5))) } else { 0.5 - (t + (a - 0.5)) };
            }
        };
        return if x < 0.0 { 1.0 + y } else { 1.0 - y };
    }
    if a < 1.25 {
        let s = a - 1.0;
        let p = poly(&PA, s) / poly1(&QA, s);
        return if x < 0.0 { 1.0 + ERX + p } else { 1.0 - ERX - p };
    }
    if a < 28.0 {
        if x < 0.0 {
            return if a > 6.0 { 2.0 } else { 2.0 - erfc_tail(a) / a };
        }
        return erfc_tail(a) / a;
    }
    if x < 0.0 {
        2.0
    } else {
        0.0
    }
}

/// `ln erf(z)` for `z > 0`.
pub fn ln_erf(z: f64) -> f64 {
    if z < 0.5 {
        erf(z).ln()
    } else {
        (-erfc(z)).ln_1p()
    }
}

/// `E(W) − 1` with `E(W) = erf(√W)·√π/(2√W) = Σ (−W)^k/(k!(2k+1))`, for `W < 1`.
fn scaled_erf_m1_series(w: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 1..40 {
        term *= -w / k as f64;
        let t = term / (2 * k + 1) as f64;
        acc += t;
        if t.abs() < 1e-18 * acc.abs() {
            break;
        }
    }
    acc
}

/// `h(z) = ln(erf(z)·√π/(2z))`, finite and smooth at `z = 0` where `h ≈ −z²/3`.
pub fn ln_erf_scaled(z: f64) -> f64 {
    let w = z * z;
    if w < 0.25 {
        scaled_erf_m1_series(w).ln_1p()
    } else {
        (erf(z) * SQRT_PI / (2.0 * z)).ln()
    }
}

/// `ln(erf(u)/erf(v))`, absolute error below 1e-13.
pub fn log_erf_ratio(u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0 && v > 0.0) || u.is_nan() || v.is_nan() {
        return Err(domain("log_erf_ratio", format!("u = {u}, v = {v}; both must be positive")));
    }
    if u == v {
        return Ok(0.0);
    }
    Ok(ln_erf(u) - ln_erf(v))
}

fn check_w(func: &'static str, w: f64) -> Result<()> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("W = {w}; must be positive and finite")))
    }
}

/// `Z(W) = (2/√π)·√W·e^{−W}/erf(√W)`.
pub fn zed(w: f64) -> Result<f64> {
    check_w("zed", w)?;
    if w < 0.25 {
        Ok((-w).exp() / (1.0 + scaled_erf_m1_series(w)))
    } else {
        let s = w.sqrt();
        Ok(FRAC_2_SQRT_PI * s * (-w).exp() / erf(s))
    }
}

/// `1 − Z(W)` without cancellation at small `W`, where it behaves as `2W/3`.
pub fn one_minus_zed(w: f64) -> Result<f64> {
    check_w("one_minus_zed", w)?;
    if w >= 0.5 {
        return Ok(1.0 - zed(w)?);
    }
    // E(W) − e^{−W} = Σ_{k≥1} (−1)^{k+1}·2k·W^k/(k!(2k+1)).
    let mut pow = 1.0;
    let mut num = 0.0;
    for k in 1..40 {
        pow *= w / k as f64;
        let t = 2.0 * k as f64 * pow / (2 * k + 1) as f64;
        num += if k % 2 == 1 { t } else { -t };
        if t < 1e-18 * num {
            break;
        }
    }
    Ok(num / (1.0 + scaled_erf_m1_series(w)))
}

/// Second moment `∫ξ²e^{−bξ²} / ∫e^{−bξ²}` over `|ξ| ≤ B`, equal to `(1/2b)(1 − Z(bB²))`.
pub fn truncated_gaussian_ratio(b: f64, big_b: f64) -> Result<f64> {
    if !(b > 0.0 && big_b > 0.0) || !b.is_finite() || big_b.is_nan() {
        return Err(domain("truncated_gaussian_ratio", format!("b = {b}, B = {big_b}")));
    }
    let w = b * big_b * big_b;
    if w.is_infinite() {
        return Ok(0.5 / b);
    }
    Ok(0.5 / b * one_minus_zed(w)?)
}

/// `sin(πx)`, exact at integers and half-integers.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (0.5 * x).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// `cos(πx)`, exact at integers and half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = (x - 2.0 * (0.5 * x).round()).abs();
    sin_pi(0.5 - r)
}

/// Riemann ζ(s) for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(domain("zeta", format!("s = {s}; need s > 1")));
    }
    if s > 60.0 {
        return Ok(1.0 + 2f64.powf(-s) + 3f64.powf(-s));
    }
    // Euler–Maclaurin with the head summed directly up to n − 1.
    const N: f64 = 12.0;
    let head: f64 = (1..12).map(|k| (k as f64).powf(-s)).sum();
    let mut acc = head + N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    let mut rising = s;
    let mut npow = N.powf(-s - 1.0);
    let mut fact = 2.0;
    for j in 1..=9 {
        let k = 2 * j;
        acc += bernoulli(k)? / fact * rising * npow;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        npow /= N * N;
        fact *= ((k + 1) * (k + 2)) as f64;
    }
    Ok(acc)
}

const BERNOULLI_MAX: usize = 20;

fn bernoulli_table() -> &'static [Ratio<i128>; BERNOULLI_MAX + 1] {
    static TABLE: OnceLock<[Ratio<i128>; BERNOULLI_MAX + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b = [Ratio::from_integer(0i128); BERNOULLI_MAX + 1];
        b[0] = Ratio::from_integer(1);
        for m in 1..=BERNOULLI_MAX {
            let mut acc = Ratio::from_integer(0i128);
            let mut binom: i128 = 1;
            for (j, bj) in b.iter().enumerate().take(m) {
                acc += *bj * binom;
                binom = binom * (m as i128 + 1 - j as i128) / (j as i128 + 1);
            }
            b[m] = -acc / (m as i128 + 1);
        }
        b
    })
}

/// Exact Bernoulli number `B_k` (`B₁ = −1/2`), `k ≤ 20`.
pub fn bernoulli_exact(k: usize) -> Result<Ratio<i128>> {
    bernoulli_table()
        .get(k)
        .copied()
        .ok_or_else(|| Error::Unsupported(format!("bernoulli({k}): only k <= {BERNOULLI_MAX}")))
}

/// `B_k` as a float, `k ≤ 20`.
pub fn bernoulli(k: usize) -> Result<f64> {
    let r = bernoulli_exact(k)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

const LI2_TERMS: usize = 60;

/// `c_n = (−1)^n ζ(2n)/(n(2n+1)(2π)^{2n})`, odd-power coefficients of the log expansion.
fn li2_coeffs() -> &'static [f64; LI2_TERMS] {
    static C: OnceLock<[f64; LI2_TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; LI2_TERMS];
        let two_pi_sq = 4.0 * PI * PI;
        let mut scale = 1.0;
        for (i, ci) in c.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            scale /= two_pi_sq;
            let z = zeta(2.0 * n).expect("2n > 1");
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            *ci = sign * z * scale / (n * (2.0 * n + 1.0));
        }
        c
    })
}

/// `Li₂(e^μ)` for `Re μ ≤ 0`, absolute error below 1e-13.
///
/// `Im μ` is reduced into `(−π, π]`. Near the origin the expansion
/// `ζ(2) + μ(1 − ln(−μ)) − μ²/4 + Σ c_n μ^{2n+1}` is used, elsewhere the
/// direct series `Σ e^{jμ}/j²` with `|e^μ| ≤ 0.22`.
pub fn li2_exp(mu: Complex64) -> Result<Complex64> {
    if !(mu.re.is_finite() && mu.im.is_finite()) || mu.re > 0.0 {
        return Err(domain("li2_exp", format!("mu = {mu}; need finite mu with Re mu <= 0")));
    }
    let two_pi = 2.0 * PI;
    let mut im = mu.im - two_pi * (mu.im / two_pi).round();
    if im <= -PI {
        im += two_pi;
    }
    let mu = Complex64::new(mu.re, im);
    if mu.re == 0.0 && mu.im == 0.0 {
        return Ok(Complex64::new(ZETA2, 0.0));
    }
    if mu.norm() <= 3.5 {
        Ok(li2_log_series(mu))
    } else {
        Ok(li2_direct(mu))
    }
}

fn li2_log_series(mu: Complex64) -> Complex64 {
    let mu2 = mu * mu;
    let mut acc = Complex64::new(ZETA2, 0.0) + mu * (1.0 - (-mu).ln()) - mu2 / 4.0;
    let mut pow = mu;
    for &c in li2_coeffs() {
        pow *= mu2;
        let t = pow * c;
        acc += t;
        if t.norm() < 1e-18 {
            break;
        }
    }
    acc
}

fn li2_direct(mu: Complex64) -> Complex64 {
    let z = mu.exp();
    let mut zp = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..200 {
        zp *= z;
        let t = zp / (j * j) as f64;
        acc += t;
        if t.norm() < 1e-18 {
            break;
        }
    }
    acc
}
