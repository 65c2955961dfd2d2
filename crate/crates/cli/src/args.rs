//! Flag definitions. Natural units (`m = ħ = T = c = 1`) are the defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpi_core::oscillator::Truncation;
use dpi_core::{Amplitude, ModelParams};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "dpi", version, about = "Restricted-Fourier path integral numerics as CSV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative tolerance of adaptive series.
    #[arg(long, global = true, default_value_t = dpi_core::DEFAULT_TOL)]
    pub tol: f64,

    /// Seed of every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Also write the JSON verdict or fit of `unitarity` and `spectrum --scan omega` here.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Feynman and restricted <v^2> over a resolution grid.
    V2(V2Args),
    /// Oscillator shift over T, or ground-state energy over omega.
    Spectrum(SpectrumArgs),
    /// Constancy of the shift over a T grid, with a JSON verdict.
    Unitarity(UnitarityArgs),
    /// A seeded Brownian path or its restricted twin.
    Paths(PathsArgs),
    /// <[x,p]> = m eps <v^2> over a resolution grid.
    Commutator(CommutatorArgs),
    /// Casimir energies over L, or the bound on epsilon_D.
    Casimir(CasimirArgs),
    /// Monte-Carlo estimates next to their analytic references.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Total time T.
    #[arg(long = "T", default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 2.1)]
    pub alpha: f64,
    /// Constant amplitude bound A.
    #[arg(long = "A", conflicts_with = "epsilon_d")]
    pub a: Option<f64>,
    /// Differentiability scale epsilon_D; A then follows T.
    #[arg(long = "epsilon-D")]
    pub epsilon_d: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
}

impl ModelArgs {
    /// Uses `default` when neither `--A` nor `--epsilon-D` is given.
    pub fn params(&self, default: Amplitude) -> Result<ModelParams, CliError> {
        let amplitude = match (self.a, self.epsilon_d) {
            (Some(a), _) => Amplitude::A(a),
            (None, Some(e)) => Amplitude::EpsilonD(e),
            (None, None) => default,
        };
        let p = ModelParams::new(self.m, self.hbar, self.t, self.alpha, amplitude)?;
        Ok(match self.omega {
            Some(w) => p.with_omega(w)?,
            None => p,
        })
    }
}

#[derive(Args, Debug)]
pub struct TruncationArgs {
    /// Keep exactly this many factors of the product instead of summing adaptively.
    #[arg(long)]
    pub n_terms: Option<usize>,
}

impl TruncationArgs {
    pub fn truncation(&self, tol: f64) -> Truncation {
        match self.n_terms {
            Some(n) => Truncation::Fixed(n),
            None => Truncation::Adaptive { tol },
        }
    }
}

#[derive(Args, Debug)]
pub struct V2Args {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1e-4)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    pub log: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan {
    Time,
    Omega,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long, value_enum, default_value_t = Scan::Time)]
    pub scan: Scan,
    /// Grid minimum: T for `--scan time`, omega for `--scan omega`.
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    #[arg(long)]
    pub log: bool,
}

#[derive(Args, Debug)]
pub struct UnitarityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long = "T-min", default_value_t = 0.2)]
    pub t_min: f64,
    #[arg(long = "T-max", default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    #[arg(long)]
    pub log: bool,
    /// Largest relative deviation of the shift still called constant.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct PathsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    pub n_modes: usize,
    /// Export the restricted twin instead of the Brownian path.
    #[arg(long)]
    pub twin: bool,
    /// Sample `t,x` at this many points over [0, T] instead of listing coefficients.
    #[arg(long)]
    pub trajectory_points: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Feynman,
    Differentiable,
}

#[derive(Args, Debug)]
pub struct CommutatorArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "model", value_enum, default_value_t = ModelChoice::Differentiable)]
    pub path_model: ModelChoice,
    #[arg(long, default_value_t = 1e-5)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 30)]
    pub points: usize,
    #[arg(long)]
    pub log: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirChoice {
    Standard,
    Tanh,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegulatorChoice {
    Exp,
    Gauss,
}

#[derive(Args, Debug)]
pub struct CasimirArgs {
    #[arg(long, value_enum, default_value_t = CasimirChoice::Both)]
    pub model: CasimirChoice,
    #[arg(long = "L-min", default_value_t = 1.0)]
    pub l_min: f64,
    #[arg(long = "L-max", default_value_t = 10.0)]
    pub l_max: f64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long)]
    pub log: bool,
    #[arg(long = "omega-D", default_value_t = 10.0)]
    pub omega_d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Smallest of the three extrapolation cutoffs.
    #[arg(long = "n-c", default_value_t = 100.0)]
    pub n_c: f64,
    #[arg(long, value_enum, default_value_t = RegulatorChoice::Exp)]
    pub regulator: RegulatorChoice,
    /// Print the epsilon_D bound as JSON instead of scanning L.
    #[arg(long)]
    pub bound: bool,
    /// Experimental length scale of the bound (same units as c).
    #[arg(long = "L-exp", default_value_t = 1e-7)]
    pub l_exp: f64,
    /// Allowed relative deviation from -1/12.
    #[arg(long, default_value_t = 0.01)]
    pub rel_error: f64,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Resolutions at which <v^2> is sampled.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 5e-2])]
    pub eps: Vec<f64>,
    /// Modes whose second moment is sampled.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 5, 20, 100, 1000])]
    pub modes: Vec<usize>,
    /// Times at which ln Pi is sampled; needs `--omega`.
    #[arg(long = "log-pi-T", value_delimiter = ',')]
    pub log_pi_t: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_modes: usize,
}
