//! Monte-Carlo oracle for the restricted measure.
//!
//! Mode amplitudes are independent, each with density `∝ e^{−b a²}` on
//! `|a| ≤ B`, so paths are sampled exactly mode by mode with no Markov chain.
//! Samples are drawn in chunks of [`CHUNK`]; chunk `c` uses
//! `ChaCha20Rng::seed_from_u64(seed)` on stream `c`, and chunk statistics are
//! merged in chunk order, so results do not depend on the thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::paths::ModelParams;
use crate::special::{erf, sin_pi};
use crate::velocity::{restricted_tail_integral, CosineExpansion};

/// Samples per RNG stream.
pub const CHUNK: usize = 4096;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_MODES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Bound on the bias from omitted modes; 0 when nothing is omitted.
    pub truncation_bound: f64,
}

impl McEstimate {
    /// `|mean − reference|` in units of `stderr`.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference).abs() / self.stderr
    }
}

/// Density `∝ e^{−b a²}` on `|a| ≤ B`.
///
/// Gaussian proposals are used when their acceptance `erf(√(bB²))` is at
/// least 0.1, uniform proposals on `[−B, B]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGaussian {
    b: f64,
    big_b: f64,
    sigma: f64,
    gaussian_proposal: bool,
}

impl TruncatedGaussian {
    pub fn new(b: f64, big_b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite() && big_b > 0.0) {
            return Err(domain("truncated_gaussian", format!("b = {b}, B = {big_b}; both must be positive")));
        }
        let w = b * big_b * big_b;
        Ok(Self { b, big_b, sigma: (0.5 / b).sqrt(), gaussian_proposal: erf(w.sqrt()) >= 0.1 })
    }
}

impl Distribution<f64> for TruncatedGaussian {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.gaussian_proposal {
            loop {
                let z: f64 = rng.sample(StandardNormal);
                let a = self.sigma * z;
                if a.abs() <= self.big_b {
                    return a;
                }
            }
        }
        loop {
            let a = rng.random_range(-self.big_b..=self.big_b);
            if rng.random::<f64>() < (-self.b * a * a).exp() {
                return a;
            }
        }
    }
}

pub fn sample_truncated_gaussian<R: Rng + ?Sized>(b: f64, big_b: f64, rng: &mut R) -> Result<f64> {
    Ok(TruncatedGaussian::new(b, big_b)?.sample(rng))
}

/// Count, mean and sum of squared deviations of one chunk.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

/// Mean and standard error of `draw` over `n_samples` chunked, seeded samples.
pub fn estimate<F>(n_samples: usize, seed: u64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    if n_samples < 2 {
        return Err(Error::InvalidParams("n_samples must be at least 2".into()));
    }
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n_samples - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.n - 1.0);
    Ok(McEstimate {
        mean: total.mean,
        stderr: (var / total.n).sqrt(),
        n_samples,
        seed,
        truncation_bound: 0.0,
    })
}

/// Per-mode measure: `b_j = mTλ_j/4ħ` with `λ_j = (jπ/T)²`, `B_j = A/j^α`.
pub fn mode_distribution(params: &ModelParams, j: usize) -> Result<TruncatedGaussian> {
    if j == 0 {
        return Err(Error::InvalidParams("mode index starts at 1".into()));
    }
    let jf = j as f64;
    let b = params.m * params.t * (jf * PI / params.t).powi(2) / (4.0 * params.hbar);
    TruncatedGaussian::new(b, params.amplitude_a() / jf.powf(params.alpha))
}

/// Empirical `⟨a_j²⟩`.
pub fn estimate_mode_second_moment(params: &ModelParams, j: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    let d = mode_distribution(params, j)?;
    estimate(n_samples, seed, |rng| {
        let a = d.sample(rng);
        a * a
    })
}

/// Empirical `⟨a_j a_k⟩`.
pub fn estimate_cross_moment(params: &ModelParams, j: usize, k: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    let (dj, dk) = (mode_distribution(params, j)?, mode_distribution(params, k)?);
    estimate(n_samples, seed, |rng| dj.sample(rng) * dk.sample(rng))
}

/// Bound on `Σ_{j>N} Δs_j²(1 − Z_j)/j²`, the series tail left out by `N` modes.
///
/// The weights `(1 − Z_j)/j²` decrease, so each cosine component of `Δs_j²`
/// contributes at most `w_{N+1}/sin(πx)` by Abel summation; the constant part is
/// bounded by an integral. The cruder `Δs_j² ≤ min(4, (jπτ)²)` bound is also tried.
fn omitted_modes_bound(n: usize, tau: f64, t0: f64, params: &ModelParams) -> f64 {
    let nf = n as f64;
    let a2 = params.a_bar().powi(2);
    let crude = restricted_tail_integral(nf, 4.0, tau, a2, params.alpha);
    let expansion = CosineExpansion::new(tau, t0);
    let m = nf + 1.0;
    let w = (1.0 / (m * m)) * (2.0 * a2 / 3.0 * m.powf(-2.0 * (params.alpha - 1.0))).min(1.0);
    let osc: f64 = expansion.terms.iter().map(|&(x, c)| c.abs() * w / sin_pi(x)).sum();
    let flat = expansion.constant.abs() * restricted_tail_integral(nf, 1.0, 1.0 / (PI * nf), a2, params.alpha);
    crude.min(osc + flat)
}

/// Monte-Carlo `⟨v²⟩` with `v = Σ_{j≤N} a_j Δs_j/ε`, `Δs_j = sin(jπ(t₀+ε)/T) − sin(jπt₀/T)`.
///
/// Fails with [`Error::InsufficientModes`] when the omitted-mode bias bound
/// exceeds the standard error.
pub fn estimate_v2(
    params: &ModelParams,
    eps: f64,
    t0: f64,
    n_modes: usize,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(eps > 0.0 && eps < params.t) || !(0.0..params.t).contains(&t0) {
        return Err(domain("estimate_v2", format!("eps = {eps}, t0 = {t0}; need 0 < eps < T, 0 <= t0 < T")));
    }
    if n_modes == 0 {
        return Err(Error::InvalidParams("N_modes must be at least 1".into()));
    }
    let (tau, s0) = (eps / params.t, t0 / params.t);
    let modes: Vec<(TruncatedGaussian, f64)> = (1..=n_modes)
        .map(|j| {
            let jf = j as f64;
            let ds = sin_pi(jf * (s0 + tau)) - sin_pi(jf * s0);
            Ok((mode_distribution(params, j)?, ds / eps))
        })
        .collect::<Result<_>>()?;
    let mut est = estimate(n_samples, seed, |rng| {
        let v: f64 = modes.iter().map(|(d, c)| d.sample(rng) * c).sum();
        v * v
    })?;
    let prefactor = 2.0 * params.hbar * params.t / (params.m * PI * PI * eps * eps);
    est.truncation_bound = prefactor * omitted_modes_bound(n_modes, tau, s0, params);
    if est.truncation_bound > est.stderr {
        return Err(Error::InsufficientModes { truncation_bound: est.truncation_bound, stderr: est.stderr });
    }
    Ok(est)
}

/// Monte-Carlo `ln Π_N(T)` over the first `N` modes.
///
/// Each factor is `√(b'_j/b_j)·E[e^{−δ a_j²}]` with `δ = mTω²/4ħ`, the
/// expectation taken under the free restricted measure; modes are independent,
/// so one expectation of `e^{−δΣa_j²}` covers the product. The reported
/// standard error is that of the logarithm (delta method).
pub fn estimate_log_pi(t: f64, params: &ModelParams, n_modes: usize, n_samples: usize, seed: u64) -> Result<McEstimate> {
    let omega = params.omega.ok_or_else(|| Error::InvalidParams("estimate_log_pi: omega is required".into()))?;
    if n_modes == 0 {
        return Err(Error::InvalidParams("N_modes must be at least 1".into()));
    }
    let p = params.with_total_time(t)?;
    let delta = p.m * t * omega * omega / (4.0 * p.hbar);
    let modes: Vec<TruncatedGaussian> = (1..=n_modes).map(|j| mode_distribution(&p, j)).collect::<Result<_>>()?;
    let est = estimate(n_samples, seed, |rng| {
        let s: f64 = modes.iter().map(|d| d.sample(rng).powi(2)).sum();
        (-delta * s).exp()
    })?;
    let x = omega * t / PI;
    let jacobian: f64 = (1..=n_modes).map(|j| 0.5 * (x * x / (j * j) as f64).ln_1p()).sum();
    Ok(McEstimate {
        mean: est.mean.ln() + jacobian,
        stderr: est.stderr / est.mean,
        n_samples,
        seed,
        truncation_bound: x * x / (2.0 * n_modes as f64),
    })
}
