use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("empty operand: {0}")]
    EmptySet(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("relation pair ({0}, {1}) is not in A x B")]
    RelationOutOfRange(i64, i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree bound violated: element {element} has degree {degree} > {bound}")]
    DegreeViolation {
        element: i64,
        degree: usize,
        bound: usize,
    },
    #[error("certificate does not cover the given pair")]
    CertificateMismatch,
    #[error("subset check failed: {0}")]
    NotSubset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
