use thiserror::Error;

use crate::qcore::QuantumError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("branch tree exceeds the cap of {cap} branches")]
    BranchCapExceeded { cap: usize },
    #[error("algorithm declared {declared} qubits but touched {used}")]
    QubitBudgetExceeded { declared: usize, used: usize },
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("no verified coefficient set after {attempts} draws (best max acceptance {best})")]
    SearchFailure { attempts: usize, best: f64 },
    #[error("instance family is empty")]
    EmptyFamily,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, Error>;
