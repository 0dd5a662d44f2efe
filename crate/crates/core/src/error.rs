use serde::Serialize;
use thiserror::Error;

/// Every failure the library can report. Each variant maps to a stable
/// snake_case code used in CLI error objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite function value on the difference stencil around x = {x}")]
    StencilFailure { x: f64 },
    #[error("target {target} is outside [{f_lo}, {f_hi}]")]
    BracketMiss { target: f64, f_lo: f64, f_hi: f64 },
    #[error("non-finite evaluation at x = {x}")]
    EvalFailure { x: f64 },
    #[error("H = {h} is not in the tail region (H must be > 0)")]
    OutsideTailRegion { h: f64 },
    #[error("slowly varying function is not finite and positive at x = {x}")]
    DomainError { x: f64 },
    #[error("grid is too short or too narrow: {reason}")]
    InsufficientGrid { reason: String },
    #[error("x = {x} is below the support lower bound {lower}")]
    BelowSupport { x: f64, lower: f64 },
    #[error("y = {y} is below the range of H (minimum {min})")]
    BelowRange { y: f64, min: f64 },
    #[error("F(x) is numerically 0 or 1 at x = {x}")]
    TailUnderflow { x: f64 },
    #[error("point (gamma = {gamma}, x = {x}) violates 1 + gamma x > 0")]
    OutsideSupport { gamma: f64, x: f64 },
    #[error("block size must satisfy log n > 0, got {log_n}")]
    InvalidBlockSize { log_n: f64 },
    #[error("asymptotic penultimate results exclude theta = 1")]
    ThetaOneExcluded,
    #[error("no grid point satisfies the GEV support constraint")]
    GridSupportEmpty,
    #[error("every remainder denominator is below the cutoff")]
    DegenerateProfile,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::StencilFailure { .. } => "stencil_failure",
            Error::BracketMiss { .. } => "bracket_miss",
            Error::EvalFailure { .. } => "eval_failure",
            Error::OutsideTailRegion { .. } => "outside_tail_region",
            Error::DomainError { .. } => "domain_error",
            Error::InsufficientGrid { .. } => "insufficient_grid",
            Error::BelowSupport { .. } => "below_support",
            Error::BelowRange { .. } => "below_range",
            Error::TailUnderflow { .. } => "tail_underflow",
            Error::OutsideSupport { .. } => "outside_support",
            Error::InvalidBlockSize { .. } => "invalid_block_size",
            Error::ThetaOneExcluded => "theta_one_excluded",
            Error::GridSupportEmpty => "grid_support_empty",
            Error::DegenerateProfile => "degenerate_profile",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnknownModel(_) => "unknown_model",
        }
    }

    /// Usage errors (bad model name or parameters) as opposed to numeric failures.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::UnknownModel(_))
    }

    pub fn info(&self) -> ErrorInfo {
        ErrorInfo {
            code: self.code().to_string(),
            message: self.to_string(),
        }
    }
}

/// Serializable form of an [`Error`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

/// `value` or `{"error": {code, message}}` when serialized.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Value(T),
    Failed { error: ErrorInfo },
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v),
            Err(e) => Outcome::Failed { error: e.info() },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
