use thiserror::Error;

/// Errors produced by the model builders and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge for {context}")]
    EigenNoConvergence { context: String },

    #[error("enumeration budget exceeded: {required} sums requested, cap is {cap} (raise the cap to at least {required} or restrict max_terms)")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("exact diagonalization is capped at n_cells <= {cap}, got {n_cells}")]
    OracleCapExceeded { n_cells: usize, cap: usize },

    #[error("ill-conditioned Lyapunov solve: min |λi + λj| = {min_eigen_sum:e}, residual = {residual:e}")]
    IllConditionedSteadyState { min_eigen_sum: f64, residual: f64 },

    #[error("need at least {needed} points for a fit, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
