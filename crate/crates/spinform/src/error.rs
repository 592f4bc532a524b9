//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate chart at (u, v) = ({u}, {v}): {detail}")]
    DegenerateChart { u: f64, v: f64, detail: String },

    #[error("point off the model space (quadric residual {0:.3e})")]
    OffModelSpace(f64),

    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("parameter point ({u}, {v}) outside the chart rectangle")]
    OutsideRectangle { u: f64, v: f64 },

    #[error("curve leaves the chart rectangle at ({u}, {v})")]
    CurveExitsRectangle { u: f64, v: f64 },

    #[error("spinor field vanishes near node ({i}, {j}): |phi| = {norm:.3e}")]
    VanishingSpinor { i: usize, j: usize, norm: f64 },

    #[error(
        "holonomy violates flatness: max plaquette deviation per unit area {found:.3e} \
         exceeds threshold {threshold:.3e} (non-integrable (T, eta) data)"
    )]
    FlatnessViolation { found: f64, threshold: f64 },

    #[error("grid too small: need at least {need} nodes per axis, got {got}")]
    GridTooSmall { need: usize, got: usize },

    #[error("degenerate sampling step {0:.3e}")]
    DegenerateStep(f64),

    #[error("transport produced non-finite spinor values")]
    NonFiniteField,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: configuration problems exit with 2,
    /// everything else (identity failures, numerical errors) with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownSurface(_)
            | Error::Config(_)
            | Error::GridTooSmall { .. }
            | Error::Io(_) => 2,
            _ => 1,
        }
    }
}
