use thiserror::Error;

/// Errors raised by the solver, the limiters and the training pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A state left the admissible set (non-positive density or pressure).
    #[error("inadmissible state: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A cell update produced an inadmissible state.
    #[error("positivity failure in cell {cell} at t = {time:.6e}")]
    Positivity { cell: usize, time: f64 },

    /// A half-cell state was inadmissible, which only happens when the
    /// time step exceeds the half CFL limit.
    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate stencil: {0}")]
    DegenerateStencil(String),

    #[error("step budget of {0} steps exceeded before reaching t_end")]
    StepBudget(usize),

    #[error("initial condition generation failed: {0}")]
    Generation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Format(String),
}

impl Error {
    /// True for failures of the numerical scheme itself (as opposed to bad
    /// input or I/O).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Positivity { .. }
                | Error::Cfl(_)
                | Error::Precondition(_)
                | Error::StepBudget(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
