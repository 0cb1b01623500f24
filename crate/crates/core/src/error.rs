use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
    #[error("invalid symplectic element: {0}")]
    InvalidElement(String),
    #[error("invalid boundary label: {0}")]
    InvalidBoundaryLabel(String),
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("too close to the hyperelliptic locus: {0}")]
    HyperellipticProximity(String),
    #[error("degenerate line: {0}")]
    DegenerateLine(String),
    #[error("line is contained in the quartic: {0}")]
    LineInQuartic(String),
    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),
    #[error("unsupported orbit: {0}")]
    UnsupportedOrbit(String),
    #[error("missing order for symbol {0}")]
    MissingOrder(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("mixed weight: {0}")]
    MixedWeight(String),
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("resource limit exceeded: {0}")]
    ResourceExhausted(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
