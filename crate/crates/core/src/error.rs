use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("ambient mismatch: {left} vs {right} marked points")]
    AmbientMismatch { left: usize, right: usize },
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("normal form needs at least 5 marked points, got {0}")]
    NormalFormUnavailable(usize),
    #[error("flow mismatch at vertex {vertex}: expected {expected}, got {actual}")]
    FlowMismatch {
        vertex: usize,
        expected: Box<Rational>,
        actual: Box<Rational>,
    },
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("degrees must lie in [1, m-1]: {0}")]
    DegreesNotReduced(String),
    #[error("partitions do not form a stable tree: {0}")]
    NotATree(String),
    #[error("no unbalancing cyclic order found for {0}")]
    UnbalanceNotFound(String),
    #[error("modulus {modulus} does not divide the degree sum {sum}")]
    ModulusMismatch { modulus: i64, sum: i64 },
    #[error("modulus {0} is too small")]
    ModulusTooSmall(i64),
    #[error("certificate search failed: {0}")]
    CertificateSearchFailed(String),
    #[error("unsupported option combination: {0}")]
    UnsupportedOptionCombo(String),
    #[error("invalid cyclic order: {0}")]
    InvalidOrder(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular elimination system: {0}")]
    Singular(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
