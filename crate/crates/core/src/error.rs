use thiserror::Error;

/// Errors produced by the solvers and data transformations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sobolev index {tau} outside the supported range [0, 3/2)")]
    SobolevIndex { tau: f64 },

    #[error("ODE step size underflow at x = {x} (lambda = {lambda})")]
    StepUnderflow { x: f64, lambda: f64 },

    #[error("no bracket for eigenvalue {index} in scan window [{lo}, {hi}]")]
    BracketNotFound { index: usize, lo: f64, hi: f64 },

    #[error("lambda = {lambda} is not an eigenvalue (residual {residual:e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },

    #[error("eigenvalue {lambda} is negative; sqrt(lambda)-normalized norming constants are only defined for real data with lambda >= 0")]
    NegativeEigenvalue { lambda: f64 },

    #[error("unsupported smoothness theta = {theta}: {reason}")]
    UnsupportedSmoothness { theta: f64, reason: String },

    #[error("singular basis: {0}")]
    SingularBasis(String),

    #[error("ill-posed data: Gelfand-Levitan system singular at x = {x}")]
    IllPosed { x: f64 },

    #[error("noise of size {epsilon} destroys ordering/positivity at index {index}")]
    NoiseUnrecoverable { epsilon: f64, index: usize },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::BracketNotFound { .. }
                | Error::IllPosed { .. }
                | Error::SingularBasis(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
