use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input or configuration; maps to CLI exit code 2.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data coverage error: {0}")]
    Coverage(String),

    #[error("Born series diverges: estimated contraction {contraction:.4} after {iterations} iterations")]
    Divergence { contraction: f64, iterations: usize },

    #[error("Born series did not converge in {iterations} iterations (last relative update {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("at k = {k}, dir = [{:.6}, {:.6}, {:.6}]: {source}", dir[0], dir[1], dir[2])]
    AtSample {
        k: f64,
        dir: [f64; 3],
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True when the failure is numerical (solver or oracle), as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Divergence { .. } | Error::NonConvergence { .. } | Error::Oracle(_) => true,
            Error::AtSample { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
