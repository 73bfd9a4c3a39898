use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (relative residual {0:.3e})")]
    NotHermitian(f64),
    #[error("linear system has no solution (relative residual {0:.3e})")]
    NoSolution(f64),
    #[error("operation needs operator norms, which the structure-constant presentation does not carry")]
    NormUnavailable,
    #[error("Zettl decomposition inconclusive: {0}")]
    DecompositionInconclusive(String),
    #[error("subspace is not an ideal (residual {0:.3e})")]
    NotAnIdeal(f64),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("solver budget exceeded: {0}")]
    SolverBudgetExceeded(String),
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("closure did not stabilize after {0} rounds")]
    ClosureDidNotStabilize(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
