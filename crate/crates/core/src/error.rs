use thiserror::Error;

/// Errors raised by the simulation, optimization and metric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("two-qubit gate must act on neighbouring qubits, got ({first}, {second})")]
    NotNearestNeighbour { first: usize, second: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("at least {min} qubits required, got {found}")]
    TooFewQubits { min: usize, found: usize },

    #[error("{found} qubits exceeds the dense cap of {max}")]
    TooManyQubits { max: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("trotter step {step} out of range (0..{steps})")]
    StepOutOfRange { step: usize, steps: usize },

    #[error("parameter vector has length {found}, ansatz expects {expected}")]
    ParameterCount { expected: usize, found: usize },

    #[error("probability {p} outside the valid range [0, {max}]")]
    InvalidProbability { p: f64, max: f64 },

    #[error("budget {budget} too small, at least {required} evaluations needed")]
    BudgetTooSmall { budget: u64, required: u64 },

    #[error("empty sample set")]
    EmptySamples,

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
