use thiserror::Error;

/// Errors raised while building or scoring DEA models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeaError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linear program solver failure: {0}")]
    Solver(String),

    #[error("oriented model is infeasible under variable returns to scale: {0}")]
    InfeasibleOriented(String),

    #[error("outer optimizer budget exhausted after {evaluations} inner solves (best value {best})")]
    BudgetExhausted { evaluations: usize, best: f64 },

    #[error("division by near-zero score {value} in {context}")]
    DivisionByNearZero { context: String, value: f64 },

    #[error("unknown DMU name `{0}`")]
    UnknownDmu(String),
}

pub type Result<T> = std::result::Result<T, DeaError>;
