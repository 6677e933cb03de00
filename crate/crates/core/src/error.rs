//! Library error type.

use std::fmt;

/// Errors reported by domain, solver, exchange-map, and strategy operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability parameter was outside its valid range.
    InvalidProbability(f64),
    /// An element id is not inside the universe it was used with.
    ElementOutsideUniverse { element: usize, universe: usize },
    /// An operation that enumerates 2^n states was asked to run on a
    /// universe larger than its cap.
    UniverseTooLarge { size: usize, max: usize },
    /// A numeric parameter was outside its documented range.
    InvalidParameter(String),
    /// The requested solver cannot run on the given domain or objective.
    IncompatibleSolver(String),
    /// The operation does not support this domain kind.
    UnsupportedDomain(String),
    /// A structural certificate failed verification.
    CertificateInvalid(String),
    /// A combinatorial construction could not be completed for this input.
    ConstructionFailed(String),
    /// Exact enumeration was requested for a map with continuous
    /// internal randomness; use Monte-Carlo certification instead.
    ExactCertificationUnsupported,
    /// Exchange maps passed to a composition disagree on (X, Y) or on
    /// their insertion rule.
    MismatchedMaps(String),
    /// A set violated the cardinality bound required by the operation.
    CardinalityBound { len: usize, max: usize },
    /// A knapsack item larger than 1/3 was found where only light items
    /// are allowed.
    HeavyItemPresent { element: usize, size: f64 },
    /// A configuration file failed validation.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProbability(p) => {
                write!(f, "probability {p} is outside (0, 1]")
            }
            Error::ElementOutsideUniverse { element, universe } => {
                write!(f, "element {element} outside universe of size {universe}")
            }
            Error::UniverseTooLarge { size, max } => {
                write!(f, "universe of size {size} exceeds the cap of {max} for this operation")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::IncompatibleSolver(msg) => write!(f, "incompatible solver: {msg}"),
            Error::UnsupportedDomain(msg) => write!(f, "unsupported domain: {msg}"),
            Error::CertificateInvalid(msg) => write!(f, "certificate invalid: {msg}"),
            Error::ConstructionFailed(msg) => write!(f, "construction failed: {msg}"),
            Error::ExactCertificationUnsupported => {
                write!(f, "map has continuous internal randomness; exact enumeration unavailable")
            }
            Error::MismatchedMaps(msg) => write!(f, "mismatched exchange maps: {msg}"),
            Error::CardinalityBound { len, max } => {
                write!(f, "set of size {len} violates cardinality bound {max}")
            }
            Error::HeavyItemPresent { element, size } => {
                write!(f, "item {element} has size {size} > 1/3")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
