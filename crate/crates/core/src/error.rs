use thiserror::Error;

use crate::special::SeriesValue;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("velocity is not bounded for alpha = {alpha} <= 2 (fractal regime)")]
    FractalRegime { alpha: f64 },

    #[error(
        "series did not converge: {} terms, tail bound {:e} on partial value {:e}",
        partial.n_terms, partial.tail_bound, partial.value
    )]
    NonConvergence { partial: SeriesValue },

    #[error("insufficient modes: omitted-mode bound {truncation_bound:e} exceeds stderr {stderr:e}")]
    InsufficientModes { truncation_bound: f64, stderr: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { func, detail: detail.into() }
}
