use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge density is undefined for graphs with {n} < 2 vertices")]
    UndefinedDensity { n: usize },

    /// A brute-force routine was asked to go past its configured size guard.
    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("{}", match .line { Some(l) => format!("line {l}: {message}"), None => message.clone() })]
    Parse { line: Option<usize>, message: String },

    #[error("graph is not perfect: {0}")]
    PerfectnessViolation(String),

    #[error("theta value {theta} is too far from an integer to round (residual {residual:e})")]
    Accuracy { theta: f64, residual: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("generation failed after {restarts} restarts; closest density achieved {closest_density:.4}")]
    GenerationFailure { restarts: usize, closest_density: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: Some(line),
            message: message.into(),
        }
    }
}
