use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },

    /// No admissible configuration exists; the message names the binding constraint.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("geometry is degenerate: {0}")]
    DegenerateGeometry(String),

    /// Angle of attack left the tabulated aerodynamic envelope.
    #[error("angle of attack {alpha_deg:.3} deg outside aerodynamic envelope [{min_deg:.3}, {max_deg:.3}] deg")]
    OutOfEnvelope {
        alpha_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },

    #[error("simulation diverged at t = {time:.4} s: {reason}")]
    Diverged { time: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Io(_) | Error::Csv(_) => 2,
            _ => 3,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
