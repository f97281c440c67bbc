use alloc::string::String;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown variable `{name}` at byte {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("variable count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("simplex piece {piece} has affinely dependent vertices")]
    DegenerateSimplex { piece: usize },
    #[error("series is zero or has a negligible leading coefficient")]
    ZeroSeries,
    #[error("quadrature did not converge: estimate {value:e} with error {err_estimate:e} > tol {tol:e}")]
    NotConverged { value: f64, err_estimate: f64, tol: f64 },
    #[error("integrand is negative ({value:e}) at a quadrature node")]
    NegativeIntegrand { value: f64 },
    #[error("|t|·R = {product} is not below 1")]
    RadiusExceeded { product: f64 },
    #[error("no relation found within order {max_order}, degree {max_degree}")]
    NotFound { max_order: usize, max_degree: usize },
    #[error("need at least {needed} terms, have {have}")]
    InsufficientMoments { needed: usize, have: usize },
    #[error("working order {needed} exceeds the cap {cap}")]
    OrderExhausted { needed: usize, cap: usize },
    #[error("continuation hits a zero of c_0 at s = {at}")]
    PoleAt { at: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::UnknownVariable { .. } => "UnknownVariable",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::DegenerateSimplex { .. } => "DegenerateSimplex",
            Error::ZeroSeries => "ZeroSeries",
            Error::NotConverged { .. } => "NotConverged",
            Error::NegativeIntegrand { .. } => "NegativeIntegrand",
            Error::RadiusExceeded { .. } => "RadiusExceeded",
            Error::NotFound { .. } => "NotFound",
            Error::InsufficientMoments { .. } => "InsufficientMoments",
            Error::OrderExhausted { .. } => "OrderExhausted",
            Error::PoleAt { .. } => "PoleAt",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Numerical failures as opposed to bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::OrderExhausted { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
