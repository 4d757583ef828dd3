use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("covariate error: {0}")]
    Covariate(String),

    #[error("outcome vector error: {0}")]
    Outcome(String),

    #[error("unknown effect `{name}`; valid effects: {valid}")]
    UnknownEffect { name: String, valid: String },

    #[error("effect {effect} is not defined for {graph} networks")]
    Directionality { effect: String, graph: &'static str },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "incremental statistic for {effect} drifted from recomputed value \
         ({incremental} vs {recomputed}); change statistic kernel is inconsistent"
    )]
    KernelMismatch {
        effect: String,
        incremental: f64,
        recomputed: f64,
    },

    #[error("exact enumeration refused: {free} free nodes exceeds the cap of {cap}")]
    TooLarge { free: usize, cap: usize },

    #[error(
        "maximum likelihood estimate does not exist: observed {effect} = {observed} \
         lies on the boundary [{min}, {max}] of its attainable range"
    )]
    NonExistence {
        effect: String,
        observed: f64,
        min: f64,
        max: f64,
    },

    #[error("exact MLE did not converge: {0}")]
    NoConvergence(String),

    #[error("statistic covariance matrix is singular; collinear or constant effects: {0}")]
    SingularCovariance(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the statistical failures (degenerate or non-existent MLE)
    /// as opposed to usage or I/O problems.
    pub fn is_statistical(&self) -> bool {
        matches!(
            self,
            Error::NonExistence { .. } | Error::NoConvergence(_) | Error::SingularCovariance(_)
        )
    }
}
