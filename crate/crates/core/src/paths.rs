//! Sine-series paths, the amplitude restriction `|aₙ| ≤ A/n^α`, and the
//! scale relations between `A`, `ε_D` and `j_D`.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{domain, Error, Result};
use crate::special::{sin_pi, cos_pi, zeta};

/// Name of the generator behind every seeded operation.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha::ChaCha20Rng, seed_from_u64, stream = replica index)";

/// Which amplitude parameter is primary; the other is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    /// Constant bound `A` (length).
    A(f64),
    /// Differentiability scale `ε_D` (time); `A = A(T)`.
    EpsilonD(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub m: f64,
    pub hbar: f64,
    /// Total time `T`.
    pub t: f64,
    pub alpha: f64,
    pub amplitude: Amplitude,
    pub omega: Option<f64>,
}

impl ModelParams {
    pub fn new(m: f64, hbar: f64, t: f64, alpha: f64, amplitude: Amplitude) -> Result<Self> {
        let p = Self { m, hbar, t, alpha, amplitude, omega: None };
        p.validate()?;
        Ok(p)
    }

    /// `m = ħ = T = 1`.
    pub fn natural(alpha: f64, amplitude: Amplitude) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, alpha, amplitude)
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParams(format!("omega = {omega}; need finite omega >= 0")));
        }
        self.omega = Some(omega);
        Ok(self)
    }

    pub fn with_total_time(mut self, t: f64) -> Result<Self> {
        self.t = t;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} = {x}; must be positive and finite")))
            }
        };
        pos("m", self.m)?;
        pos("hbar", self.hbar)?;
        pos("T", self.t)?;
        pos("alpha", self.alpha)?;
        match self.amplitude {
            Amplitude::A(a) => pos("A", a)?,
            Amplitude::EpsilonD(e) => pos("epsilon_D", e)?,
        }
        if let Some(w) = self.omega {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParams(format!("omega = {w}; need finite omega >= 0")));
            }
        }
        Ok(())
    }

    /// `√(ħT/m)`, the Brownian coefficient scale.
    pub fn brownian_scale(&self) -> f64 {
        (self.hbar * self.t / self.m).sqrt()
    }

    /// The amplitude bound `A` at the current `T`.
    pub fn amplitude_a(&self) -> f64 {
        match self.amplitude {
            Amplitude::A(a) => a,
            Amplitude::EpsilonD(e) => self.brownian_scale() * (self.t / e).powf(self.alpha - 1.0),
        }
    }

    /// `ε_D` from `(T/ε_D)^{α−1} = A/√(ħT/m)`.
    pub fn epsilon_d(&self) -> Result<f64> {
        require_alpha_above_one("epsilon_d", self.alpha)?;
        Ok(match self.amplitude {
            Amplitude::EpsilonD(e) => e,
            Amplitude::A(a) => self.t * (a / self.brownian_scale()).powf(-1.0 / (self.alpha - 1.0)),
        })
    }

    /// `Ā = √(mπ²/4ħT)·A`.
    pub fn a_bar(&self) -> f64 {
        (self.m * PI * PI / (4.0 * self.hbar * self.t)).sqrt() * self.amplitude_a()
    }

    /// `B = A·√(mT/4ħ)`.
    pub fn b_len(&self) -> f64 {
        self.amplitude_a() * (self.m * self.t / (4.0 * self.hbar)).sqrt()
    }

    pub fn omega_or_zero(&self) -> f64 {
        self.omega.unwrap_or(0.0)
    }
}

fn require_alpha_above_one(func: &'static str, alpha: f64) -> Result<()> {
    if alpha > 1.0 {
        Ok(())
    } else {
        Err(domain(func, format!("alpha = {alpha}; need alpha > 1")))
    }
}

/// `x(t) = Σ aₙ sin(nπt/T)`, `n = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPath {
    pub t: f64,
    pub coeffs: Vec<f64>,
}

impl FourierPath {
    pub fn new(t: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("T = {t}; must be positive and finite")));
        }
        Ok(Self { t, coeffs })
    }

    fn check_time(&self, s: f64) -> Result<()> {
        if (0.0..=self.t).contains(&s) {
            Ok(())
        } else {
            Err(domain("eval_path", format!("t = {s} outside [0, {}]", self.t)))
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        self.check_time(s)?;
        let x = s / self.t;
        Ok(self.coeffs.iter().enumerate().map(|(i, a)| a * sin_pi((i + 1) as f64 * x)).sum())
    }

    pub fn velocity(&self, s: f64) -> Result<f64> {
        self.check_time(s)?;
        let x = s / self.t;
        let k = PI / self.t;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let n = (i + 1) as f64;
                a * n * k * cos_pi(n * x)
            })
            .sum())
    }

    /// `|aₙ| ≤ A/n^α` for every stored coefficient.
    pub fn restriction_satisfied(&self, a: f64, alpha: f64) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| c.abs() <= a / ((i + 1) as f64).powf(alpha))
    }

    /// Writes `n,a_n` rows.
    pub fn write_coeffs_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,a_n")?;
        for (i, a) in self.coeffs.iter().enumerate() {
            writeln!(w, "{},{a:e}", i + 1)?;
        }
        Ok(())
    }

    /// Writes `t,x` rows on the given time grid.
    pub fn write_trajectory_csv<W: Write>(&self, mut w: W, grid: &[f64]) -> io::Result<()> {
        writeln!(w, "t,x")?;
        for &s in grid {
            let x = self.eval(s).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
            writeln!(w, "{s:e},{x:e}")?;
        }
        Ok(())
    }
}

/// Sup bounds on `|x(t)|` and `|ẋ(t)|` over the restricted path space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBounds {
    pub x_bound: f64,
    pub v_bound: f64,
}

pub fn sup_bounds(params: &ModelParams) -> SupBounds {
    let a = params.amplitude_a();
    let alpha = params.alpha;
    let x_bound = if alpha > 1.0 { a * zeta(alpha).expect("alpha > 1") } else { f64::INFINITY };
    let v_bound = if alpha > 2.0 {
        PI * a / params.t * zeta(alpha - 1.0).expect("alpha > 2")
    } else {
        f64::INFINITY
    };
    SupBounds { x_bound, v_bound }
}

/// Brownian coefficients `aⱼ = √(ħT/m)·Nⱼ/j` with `Nⱼ ~ U[−1, 1]`.
pub fn sample_brownian(params: &ModelParams, n: usize, seed: u64) -> Result<FourierPath> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let s = params.brownian_scale();
    let coeffs = (1..=n).map(|j| s * rng.random_range(-1.0..=1.0) / j as f64).collect();
    FourierPath::new(params.t, coeffs)
}

/// `j_D = floor((A/√(ħT/m))^{1/(α−1)})`.
pub fn crossover_index(params: &ModelParams) -> Result<u64> {
    require_alpha_above_one("crossover_index", params.alpha)?;
    let r = params.amplitude_a() / params.brownian_scale();
    let p = params.alpha - 1.0;
    let f = r.powf(1.0 / p);
    if f >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    let limit = r * (1.0 + 1e-12);
    let mut j = f.floor() as u64;
    while ((j + 1) as f64).powf(p) <= limit {
        j += 1;
    }
    while j > 0 && (j as f64).powf(p) > limit {
        j -= 1;
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Twin {
    pub twin: FourierPath,
    pub j_d: u64,
}

/// Clamps coefficients to `sign(aⱼ)·min(|aⱼ|, A/j^α)`.
///
/// Brownian coefficients with `j ≤ j_D` already satisfy the bound, so they pass
/// through unchanged.
pub fn differentiable_twin(p: &FourierPath, params: &ModelParams) -> Result<Twin> {
    let j_d = crossover_index(params)?;
    let a = params.amplitude_a();
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let bound = a / ((i + 1) as f64).powf(params.alpha);
            c.signum() * c.abs().min(bound)
        })
        .collect();
    Ok(Twin { twin: FourierPath::new(p.t, coeffs)?, j_d })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRelations {
    pub epsilon_d: f64,
    pub a_of_t: f64,
    pub j_d: u64,
}

pub fn scale_relations(params: &ModelParams) -> Result<ScaleRelations> {
    let epsilon_d = params.epsilon_d()?;
    let a_of_t = params.brownian_scale() * (params.t / epsilon_d).powf(params.alpha - 1.0);
    Ok(ScaleRelations { epsilon_d, a_of_t, j_d: crossover_index(params)? })
}
