//! Resolution-dependent canonical commutator `⟨[x,p]⟩ = mε⟨v²⟩(ε)` and the
//! GUP-form coefficient it implies.

use std::f64::consts::PI;
use std::fmt;

use crate::error::Result;
use crate::paths::ModelParams;
use crate::special::SeriesValue;
use crate::velocity::{regime_report, v2, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `ε < ε_D`: the path looks smooth and the commutator vanishes linearly.
    SubEpsD,
    /// `ε ≥ ε_D`: Brownian-like, the commutator approaches ħ.
    SuperEpsD,
}

impl Regime {
    /// `SubEpsD` below `ε_D`; `SuperEpsD` otherwise, including when `ε_D` is undefined.
    pub fn classify(eps: f64, params: &ModelParams) -> Regime {
        match params.epsilon_d() {
            Ok(e) if eps < e => Regime::SubEpsD,
            _ => Regime::SuperEpsD,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SubEpsD => "sub_eps_D",
            Regime::SuperEpsD => "super_eps_D",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorReport {
    pub eps: f64,
    /// `⟨[x,p]⟩ = mε⟨v²⟩`.
    pub value: f64,
    pub regime: Regime,
    /// The underlying `⟨v²⟩` series.
    pub v2: SeriesValue,
    /// GUP coefficient and validity scale; `None` for the Feynman model or `α ≤ 2`.
    pub gup: Option<Gup>,
}

/// `[x,p]_D = ħ(1 − βp²)`, valid for `p < p_D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gup {
    pub hbar: f64,
    /// `β = (2/π)²/p²_UV`.
    pub beta: f64,
    pub p_uv: f64,
    /// `p_D = √(ħm/ε_D)`.
    pub p_d: f64,
}

impl Gup {
    pub fn modified_commutator(&self, p: f64) -> f64 {
        self.hbar * (1.0 - self.beta * p * p)
    }

    pub fn valid_for(&self, p: f64) -> bool {
        p.abs() < self.p_d
    }
}

/// `⟨p²⟩ = m²⟨v²⟩`.
pub fn momentum_squared_from_velocity(v2: f64, m: f64) -> f64 {
    m * m * v2
}

pub fn gup_coefficient(params: &ModelParams) -> Result<Gup> {
    let r = regime_report(params)?;
    let beta = (2.0 / PI).powi(2) / (r.p_uv * r.p_uv);
    let p_d = (params.hbar * params.m / r.epsilon_d).sqrt();
    Ok(Gup { hbar: params.hbar, beta, p_uv: r.p_uv, p_d })
}

pub fn commutator_expectation(eps: f64, params: &ModelParams, model: Model, tol: f64) -> Result<CommutatorReport> {
    let v2 = v2(eps, params, model, tol)?;
    let regime = Regime::classify(eps, params);
    let gup = match model {
        Model::Differentiable if params.alpha > 2.0 => Some(gup_coefficient(params)?),
        _ => None,
    };
    Ok(CommutatorReport { eps, value: params.m * eps * v2.value, regime, v2, gup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::Amplitude;
    use approx::assert_relative_eq;

    fn baseline() -> ModelParams {
        ModelParams::natural(2.1, Amplitude::A(10.0)).unwrap()
    }

    #[test]
    fn feynman_commutator_is_hbar_at_fine_resolution() {
        let p = baseline();
        for eps in [0.02, 0.01, 0.001] {
            let c = commutator_expectation(eps, &p, Model::Feynman, 1e-10).unwrap();
            assert_relative_eq!(c.value, 1.0 - eps, max_relative = 1e-8);
            assert_relative_eq!(c.value, 1.0, max_relative = 0.021);
            assert!(c.gup.is_none());
        }
    }

    #[test]
    fn differentiable_commutator_vanishes_linearly() {
        let p = baseline();
        let a = commutator_expectation(1e-4, &p, Model::Differentiable, 1e-10).unwrap();
        let b = commutator_expectation(1e-5, &p, Model::Differentiable, 1e-10).unwrap();
        assert_eq!(a.regime, Regime::SubEpsD);
        assert_relative_eq!(a.value / b.value, 10.0, max_relative = 0.01);
        assert_relative_eq!(a.value, p.m * 1e-4 * a.v2.value);
    }

    #[test]
    fn differentiable_commutator_below_feynman() {
        let p = baseline();
        for eps in [0.5, 0.2, 0.05, 0.005] {
            let d = commutator_expectation(eps, &p, Model::Differentiable, 1e-10).unwrap();
            let f = commutator_expectation(eps, &p, Model::Feynman, 1e-10).unwrap();
            assert!(d.value <= f.value);
        }
    }

    #[test]
    fn super_eps_d_follows_c_over_eps() {
        // ε = 10ε_D lies beyond T here; use a smaller ε_D to test ħ − mC/ε.
        let p = ModelParams::natural(2.1, Amplitude::A(200.0)).unwrap();
        let r = regime_report(&p).unwrap();
        let eps = 10.0 * r.epsilon_d;
        let d = commutator_expectation(eps, &p, Model::Differentiable, 1e-10).unwrap();
        assert_eq!(d.regime, Regime::SuperEpsD);
        let f = commutator_expectation(eps, &p, Model::Feynman, 1e-10).unwrap();
        let predicted = f.value - p.m * r.c_coeff / eps;
        assert!((d.value - predicted).abs() < p.m * r.c_coeff / eps);
    }

    #[test]
    fn gup_identities() {
        let p = baseline();
        let g = gup_coefficient(&p).unwrap();
        let r = regime_report(&p).unwrap();
        assert_relative_eq!(g.beta, (2.0 / PI).powi(2) / (10.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(g.beta, r.c_coeff / (p.hbar * p.hbar), max_relative = 1e-12);
        assert_relative_eq!(g.p_d, (1.0 / r.epsilon_d).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(g.modified_commutator(0.0), 1.0);
        assert!(g.modified_commutator(1.0) < 1.0);
        assert!(g.valid_for(0.5 * g.p_d) && !g.valid_for(2.0 * g.p_d));
        let big = ModelParams::natural(2.1, Amplitude::A(1e14)).unwrap();
        assert!(gup_coefficient(&big).unwrap().beta < 1e-14);
        assert_eq!(momentum_squared_from_velocity(3.0, 2.0), 12.0);
    }
}
