//! Error types shared across the library.

use thiserror::Error;

/// Unified error type for construction, solving, and I/O failures.
#[derive(Debug, Error)]
pub enum Error {
    /// Operator or state dimensions do not match the Hilbert space they are used with.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Embedding request is inconsistent with the target space layout.
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    /// A frequency argument outside its physical domain.
    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),

    /// Drive divergence: the cavity response has no finite linewidth to regularize it.
    #[error("divergent drive: delta_c = 0 with gamma_c = 0 gives an unbounded cavity population")]
    DivergentDrive,

    /// A parameter that appears in a denominator is zero.
    #[error("division by zero: {0} must be nonzero")]
    DivisionByZero(&'static str),

    /// The adiabatic supermode expansion is used outside its validity window.
    #[error("expansion invalid: (g/omega_m)(sqrt(n+) - sqrt(n-)) = {ratio:.4} exceeds 0.1")]
    ExpansionInvalid { ratio: f64 },

    /// The Liouvillian kernel is not one-dimensional, so no unique steady state exists.
    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    /// A state leaked past the numerical tolerance for positivity; the mode basis is too small.
    #[error("truncation too small: minimum eigenvalue {min_eigenvalue:.3e} is below tolerance")]
    TruncationTooSmall { min_eigenvalue: f64 },

    /// Integrator step control failed or the requested step violates its resolution bound.
    #[error("step size: {0}")]
    StepSize(String),

    /// Steady-state residual failed to reach the required tolerance.
    #[error("steady-state residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    /// Correlation functions are undefined when the mode occupation underflows.
    #[error("undefined correlation: mean occupation {occupation:.3e} is below 1e-12")]
    UndefinedCorrelation { occupation: f64 },

    /// The requested minimum sits on the edge of the scanned interval.
    #[error("boundary minimum: objective is smallest at axis value {axis_value} on the bracket edge")]
    BoundaryMinimum { axis_value: f64 },

    /// Sweep or run configuration is malformed.
    #[error("config: {0}")]
    Config(String),

    /// Filesystem failure while reading configs or writing results.
    #[error("file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Internal numerical routine failure.
    #[error("solver: {0}")]
    Solver(String),
}

impl Error {
    /// Short stable identifier used in per-point error markers.
    pub fn slug(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::InvalidEmbedding(_) => "invalid_embedding",
            Error::InvalidFrequency(_) => "invalid_frequency",
            Error::DivergentDrive => "divergent_drive",
            Error::DivisionByZero(_) => "division_by_zero",
            Error::ExpansionInvalid { .. } => "expansion_invalid",
            Error::DegenerateSteadyState(_) => "degenerate_steady_state",
            Error::TruncationTooSmall { .. } => "truncation_too_small",
            Error::StepSize(_) => "step_size",
            Error::ResidualTooLarge { .. } => "residual",
            Error::UndefinedCorrelation { .. } => "undefined_correlation",
            Error::BoundaryMinimum { .. } => "boundary_minimum",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Solver(_) => "solver",
        }
    }

    /// True for errors caused by user-supplied configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Io { .. }
                | Error::InvalidDimension(_)
                | Error::InvalidEmbedding(_)
                | Error::InvalidFrequency(_)
                | Error::DivisionByZero(_)
        )
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Solver(e.to_string())
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
