use thiserror::Error;

/// First violated condition found while validating a reference
/// acceptance distribution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceViolation {
    #[error("missing required knot at beta = {0}")]
    MissingKnot(f64),
    #[error("knot betas must be strictly increasing")]
    KnotOrder,
    #[error("knot beta {beta} outside [-1, 1]")]
    KnotRange { beta: f64 },
    #[error("value {value} at beta {beta} outside [0, 1]")]
    ValueRange { beta: f64, value: f64 },
    #[error("endpoint value at beta = {beta} must be 0, got {value}")]
    Endpoint { beta: f64, value: f64 },
    #[error("apex value at beta = 0 must be 1, got {value}")]
    Apex { value: f64 },
    #[error("monotonicity violated on [{left}, {right}]")]
    Monotonicity { left: f64, right: f64 },
}

#[derive(Debug, Error)]
pub enum BpvError {
    #[error("invalid market context: {0}")]
    InvalidContext(String),
    #[error("invalid investor profile: {0}")]
    InvalidProfile(String),
    #[error("profile incompatible with equilibrium price: {0}")]
    InvalidPairing(String),
    #[error("invalid reference distribution: {0}")]
    InvalidReference(#[from] ReferenceViolation),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature failed to converge on [{a}, {b}]")]
    QuadratureDivergence { a: f64, b: f64 },
    #[error("membership mass is numerically zero; centroid undefined")]
    DegenerateMass,
    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
    #[error("no sign change found while scanning for a stance threshold")]
    NoSignChange,
}

pub type Result<T> = std::result::Result<T, BpvError>;
