use thiserror::Error;

use crate::solver::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("parameter validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("iteration diverged at step {iteration} (max |v| = {magnitude:e})")]
    Diverged { iteration: usize, magnitude: f64 },

    #[error("problem too large for the direct solver: {inside} unknowns (limit {limit})")]
    Size { inside: usize, limit: usize },

    #[error("singular steady-state system (pivot {pivot:e} at unknown {row})")]
    Rank { row: usize, pivot: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("snake diverged at iteration {iteration}")]
    SnakeDiverged { iteration: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn format(offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }
}
