//! One function per subcommand; each returns the table it will print.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use dpi_core::casimir::{casimir_energy, epsilon_d_bound, CasimirConfig, CasimirModel, Regulator};
use dpi_core::commutator::{gup_coefficient, Regime};
use dpi_core::mc::{estimate_log_pi, estimate_mode_second_moment, estimate_v2};
use dpi_core::oscillator::{log_pi_with, scan_e0_vs_omega, unitarity_diagnostic, Truncation};
use dpi_core::paths::{crossover_index, differentiable_twin, sample_brownian, sup_bounds};
use dpi_core::special::truncated_gaussian_ratio;
use dpi_core::velocity::{regime_report, scan_v2, v2_diff, Model};
use dpi_core::{Amplitude, Error, ModelParams};

use crate::args::{
    CasimirArgs, CasimirChoice, CommutatorArgs, ModelChoice, OracleArgs, PathsArgs, RegulatorChoice, Scan,
    SpectrumArgs, UnitarityArgs, V2Args,
};
use crate::error::{usage, CliError};
use crate::output::{num, Document, Table};

/// `points` values from `min` to `max`, both included.
pub fn grid(name: &str, min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(usage(format!("{name} grid: need finite min <= max, got [{min}, {max}]")));
    }
    if points == 0 {
        return Err(usage(format!("{name} grid: need at least 1 point")));
    }
    if log && min <= 0.0 {
        return Err(usage(format!("{name} grid: a log grid needs min > 0, got {min}")));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            match (i, log) {
                (0, _) => min,
                (i, _) if i == points - 1 => max,
                (_, true) => (min.ln() + f * (max / min).ln()).exp(),
                (_, false) => min + f * (max - min),
            }
        })
        .collect())
}

fn params_meta(table: &mut Table, p: &ModelParams) {
    table.meta("params", format!("{p:?}"));
    table.meta("A", num(p.amplitude_a()));
    if let Ok(e) = p.epsilon_d() {
        table.meta("epsilon_D", num(e));
    }
}

fn truncation_label(t: Truncation) -> String {
    match t {
        Truncation::Fixed(n) => format!("fixed, {n} factors"),
        Truncation::Adaptive { tol } => format!("adaptive, tol {tol:e}"),
    }
}

fn require_omega(p: &ModelParams) -> Result<f64, CliError> {
    p.omega.ok_or_else(|| usage("--omega is required"))
}

pub fn v2(a: &V2Args, tol: f64) -> Result<Table, CliError> {
    let p = a.model.params(Amplitude::A(10.0))?;
    let eps = grid("eps", a.eps_min, a.eps_max, a.points, a.log)?;
    if a.eps_max >= p.t || a.eps_min <= 0.0 {
        return Err(usage(format!("eps grid [{}, {}] must lie inside (0, T = {})", a.eps_min, a.eps_max, p.t)));
    }
    let feynman = scan_v2(&eps, &p, Model::Feynman, tol)?;
    let diff = scan_v2(&eps, &p, Model::Differentiable, tol)?;
    let mut t = Table::new(vec!["eps", "v2", "n_terms", "tail_bound", "model"]);
    params_meta(&mut t, &p);
    if let Ok(r) = regime_report(&p) {
        t.meta("v2_UV", num(r.v2_uv));
    }
    for row in feynman.iter().zip(&diff).flat_map(|(f, d)| [f, d]) {
        t.converged &= row.v2.converged;
        t.rows.push(vec![
            num(row.eps),
            num(row.v2.value),
            row.v2.n_terms.to_string(),
            num(row.v2.tail_bound),
            row.model.to_string(),
        ]);
    }
    Ok(t)
}

pub fn spectrum(a: &SpectrumArgs, tol: f64) -> Result<Table, CliError> {
    let p = a.model.params(Amplitude::EpsilonD(0.1))?;
    let trunc = a.truncation.truncation(tol);
    match a.scan {
        Scan::Time => {
            require_omega(&p)?;
            let ts = grid("T", a.min.unwrap_or(0.2), a.max.unwrap_or(5.0), a.points, a.log)?;
            let rows: Vec<(f64, f64, usize, bool)> = ts
                .par_iter()
                .map(|&t| match log_pi_with(t, &p, trunc) {
                    Ok(r) => Ok((t, r.log_pi, r.n_terms, true)),
                    Err(Error::NonConvergence { partial }) => Ok((t, partial.value, partial.n_terms, false)),
                    Err(e) => Err(e),
                })
                .collect::<Result<_, _>>()?;
            let mut table = Table::new(vec!["T", "delta_omega", "log_pi", "n_terms"]);
            params_meta(&mut table, &p);
            table.meta("truncation", truncation_label(trunc));
            for (t, l, n, ok) in rows {
                table.converged &= ok;
                table.rows.push(vec![num(t), num(l / t), num(l), n.to_string()]);
            }
            Ok(table)
        }
        Scan::Omega => {
            let ws = grid("omega", a.min.unwrap_or(1e2), a.max.unwrap_or(1e4), a.points, a.log)?;
            let scan = scan_e0_vs_omega(&ws, &p, p.t, trunc)?;
            let mut table = Table::new(vec!["omega", "E0_D"]);
            params_meta(&mut table, &p);
            table.meta("truncation", truncation_label(trunc));
            table.meta("fit", "E0_D = a + b omega over the larger-omega half of the grid, weights 1/E0_D^2");
            table.json = Some(json!({
                "a": scan.fit.a,
                "b": scan.fit.b,
                "residual": scan.fit.residual,
                "n_points": scan.fit.n_points,
            }));
            table.rows = scan.rows.iter().map(|&(w, e)| vec![num(w), num(e)]).collect();
            Ok(table)
        }
    }
}

pub fn unitarity(a: &UnitarityArgs, tol: f64) -> Result<Table, CliError> {
    let p = a.model.params(Amplitude::EpsilonD(0.1))?;
    require_omega(&p)?;
    let trunc = a.truncation.truncation(tol);
    let ts = grid("T", a.t_min, a.t_max, a.points, a.log)?;
    let r = unitarity_diagnostic(&ts, &p, trunc, a.threshold)?;
    let mut table = Table::new(vec!["T", "delta_omega", "log_pi", "n_terms", "below_eps_D", "verdict"]);
    params_meta(&mut table, &p);
    table.meta("truncation", truncation_label(trunc));
    table.json = Some(json!({
        "verdict": r.verdict.as_str(),
        "max_rel_deviation": r.max_rel_deviation,
        "mean_delta_omega": r.mean_delta_omega,
        "sub_eps_D_deviation": r.sub_eps_d_deviation,
        "fitted_rate": r.fitted_rate,
        "threshold": r.threshold,
        "n_points": r.rows.len(),
    }));
    table.rows = r
        .rows
        .iter()
        .map(|s| {
            vec![
                num(s.t),
                num(s.delta_omega),
                num(s.log_pi),
                s.n_terms.to_string(),
                s.below_eps_d.to_string(),
                s.verdict.as_str().to_owned(),
            ]
        })
        .collect();
    Ok(table)
}

pub fn paths(a: &PathsArgs, seed: u64) -> Result<Table, CliError> {
    let p = a.model.params(Amplitude::A(10.0))?;
    let brownian = sample_brownian(&p, a.n_modes, seed)?;
    let path = if a.twin { differentiable_twin(&brownian, &p)?.twin } else { brownian };
    let bounds = sup_bounds(&p);
    let mut table = match a.trajectory_points {
        None => {
            let mut t = Table::new(vec!["n", "a_n"]);
            t.rows = path.coeffs.iter().enumerate().map(|(i, c)| vec![(i + 1).to_string(), num(*c)]).collect();
            t
        }
        Some(k) => {
            let ts = grid("t", 0.0, p.t, k, false)?;
            let mut t = Table::new(vec!["t", "x"]);
            t.rows = ts.iter().map(|&s| Ok(vec![num(s), num(path.eval(s)?)])).collect::<Result<_, Error>>()?;
            t
        }
    };
    params_meta(&mut table, &p);
    table.meta("path", if a.twin { "restricted twin" } else { "brownian" });
    table.meta("j_D", crossover_index(&p)?);
    table.meta("restriction_satisfied", path.restriction_satisfied(p.amplitude_a(), p.alpha));
    table.meta("sup_x_bound", num(bounds.x_bound));
    table.meta("sup_v_bound", num(bounds.v_bound));
    Ok(table)
}

pub fn commutator(a: &CommutatorArgs, tol: f64) -> Result<Table, CliError> {
    let p = a.model.params(Amplitude::A(10.0))?;
    let eps = grid("eps", a.eps_min, a.eps_max, a.points, a.log)?;
    let model = match a.path_model {
        ModelChoice::Feynman => Model::Feynman,
        ModelChoice::Differentiable => Model::Differentiable,
    };
    let rows = scan_v2(&eps, &p, model, tol)?;
    let mut table = Table::new(vec!["eps", "commutator", "regime"]);
    params_meta(&mut table, &p);
    table.meta("model", model);
    if model == Model::Differentiable && p.alpha > 2.0 {
        let g = gup_coefficient(&p)?;
        table.meta("gup_beta", num(g.beta));
        table.meta("p_UV", num(g.p_uv));
        table.meta("p_D", num(g.p_d));
    }
    for r in rows {
        table.converged &= r.v2.converged;
        let value = p.m * r.eps * r.v2.value;
        table.rows.push(vec![num(r.eps), num(value), Regime::classify(r.eps, &p).to_string()]);
    }
    Ok(table)
}

/// A CSV scan over `L`, or a JSON document in bound mode.
pub fn casimir(a: &CasimirArgs) -> Result<Document, CliError> {
    if a.bound {
        let b = epsilon_d_bound(a.l_exp, a.rel_error, a.c)?;
        return Ok(Document::Json(json!({
            "L_exp": a.l_exp,
            "rel_error": a.rel_error,
            "c": a.c,
            "epsilon_D": b.epsilon_d,
            "omega_D_min": b.omega_d_min,
            "epsilon_D_exact": b.epsilon_d_exact,
            "omega_D_min_exact": b.omega_d_min_exact,
            "x_max": b.x_max,
        })));
    }
    let models: &[CasimirModel] = match a.model {
        CasimirChoice::Standard => &[CasimirModel::Standard],
        CasimirChoice::Tanh => &[CasimirModel::Tanh],
        CasimirChoice::Both => &[CasimirModel::Standard, CasimirModel::Tanh],
    };
    let regulator = match a.regulator {
        RegulatorChoice::Exp => Regulator::Exp,
        RegulatorChoice::Gauss => Regulator::Gauss,
    };
    let ls = grid("L", a.l_min, a.l_max, a.points, a.log)?;
    let jobs: Vec<(f64, CasimirModel)> = ls.iter().flat_map(|&l| models.iter().map(move |&m| (l, m))).collect();
    let energies = jobs
        .par_iter()
        .map(|&(l, model)| {
            let cfg = CasimirConfig { l, omega_d: a.omega_d, c: a.c, hbar: a.hbar, n_c: a.n_c, regulator };
            Ok((l, casimir_energy(&cfg, model)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut table = Table::new(vec!["L", "delta_E", "model", "x", "coefficient", "error_estimate"]);
    table.meta("omega_D", num(a.omega_d));
    table.meta("regulator", regulator);
    table.meta("extrapolation", format!("Richardson in n_c^-2 over n_c = {0}, {1}, {2}", a.n_c, 10.0 * a.n_c, 100.0 * a.n_c));
    table.rows = energies
        .iter()
        .map(|(l, e)| {
            vec![num(*l), num(e.delta_e), e.model.to_string(), num(e.x), num(e.coefficient), num(e.error_estimate)]
        })
        .collect();
    Ok(Document::Csv(table))
}

pub fn oracle(a: &OracleArgs, tol: f64, seed: u64) -> Result<Table, CliError> {
    let p = a.model.params(Amplitude::A(10.0))?;
    let mut table = Table::new(vec!["quantity", "mean", "stderr", "n_samples", "seed", "reference", "z_score"]);
    params_meta(&mut table, &p);
    table.meta("n_modes", a.n_modes);
    table.meta("reference", "v2: analytic series; a2: truncated Gaussian ratio; ln_pi: product over the same n_modes factors");
    let mut push = |name: String, est: dpi_core::mc::McEstimate, reference: f64| {
        table.rows.push(vec![
            name,
            num(est.mean),
            num(est.stderr),
            est.n_samples.to_string(),
            est.seed.to_string(),
            num(reference),
            format!("{:.3}", est.z_score(reference)),
        ]);
    };
    for &eps in &a.eps {
        let est = estimate_v2(&p, eps, 0.0, a.n_modes, a.n_samples, seed)?;
        push(format!("v2[eps={eps}]"), est, v2_diff(eps, &p, tol)?.value);
    }
    for &j in &a.modes {
        let est = estimate_mode_second_moment(&p, j, a.n_samples, seed)?;
        let jf = j as f64;
        let b = p.m * p.t * (jf * PI / p.t).powi(2) / (4.0 * p.hbar);
        push(format!("a2[j={j}]"), est, truncated_gaussian_ratio(b, p.amplitude_a() / jf.powf(p.alpha))?);
    }
    if !a.log_pi_t.is_empty() {
        require_omega(&p)?;
    }
    for &t in &a.log_pi_t {
        let est = estimate_log_pi(t, &p, a.n_modes, a.n_samples, seed)?;
        // The sampler keeps n_modes factors, so the reference does too.
        push(format!("ln_pi[T={t}]"), est, log_pi_with(t, &p, Truncation::Fixed(a.n_modes))?.log_pi);
    }
    Ok(table)
}
