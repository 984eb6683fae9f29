use thiserror::Error;

/// Errors raised by the library. Domain errors (bad input to a mathematical
/// operation) are distinguished from numerical failures so the CLI can map
/// them to exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("elements belong to different quaternion algebras")]
    AlgebraMismatch,
    #[error("matrix coefficient domains differ: {0} vs {1}")]
    DomainMismatch(&'static str, &'static str),
    #[error("alpha = {0} is a square; use the split matrix form directly")]
    AlphaIsSquare(String),
    #[error("algebra is definite; no real embedding exists")]
    Definite,
    #[error("no splitting mod {p}: {reason}")]
    NoSplitting { p: u64, reason: String },
    #[error("lattice is not an order: {0}")]
    NotAnOrder(String),
    #[error("element is not {0}")]
    WrongElementType(String),
    #[error("numerical singularity: {0}")]
    Singular(String),
    #[error("sample too close to a seam of the potential (psi = {psi}, seam = {seam})")]
    SeamProximity { psi: f64, seam: f64 },
    #[error("quadrature did not converge after {refinements} refinements (last delta {delta:e}, value {value})")]
    NoConvergence {
        refinements: usize,
        delta: f64,
        value: f64,
    },
    #[error("convention fault: {0}")]
    Convention(String),
    #[error("not in catalog: discriminant {0}")]
    NotInCatalog(i64),
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("eigenvalues match neither value nor conjugate (first {first}, second {second})")]
    EigenInconsistent { first: String, second: String },
    #[error("range exhausted: {0}")]
    RangeExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
