use thiserror::Error;

use crate::bases::BasisError;
use crate::graph::GraphError;
use crate::harness::ConfigError;
use crate::qbayes::QBayesError;
use crate::scs::ScsError;
use crate::sgp::SgpError;
use crate::spine::SpineError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spine(#[from] SpineError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Scs(#[from] ScsError),
    #[error(transparent)]
    QBayes(#[from] QBayesError),
    #[error(transparent)]
    Sgp(#[from] SgpError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors caused by bad input (files, parameters, configs) as
    /// opposed to failures while running a valid workload.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Graph(e) => !matches!(e, GraphError::Numerical(_)),
            Error::Config(_) | Error::Basis(_) => true,
            Error::Spine(e) => matches!(e, SpineError::LengthMismatch { .. }),
            Error::Scs(e) => matches!(e, ScsError::QuadraticMemory { .. } | ScsError::Parameter(_)),
            Error::QBayes(e) => matches!(e, QBayesError::Parameter(_)),
            Error::Sgp(e) => matches!(e, SgpError::TooLarge { .. } | SgpError::Parameter(_)),
            Error::Io { .. } => true,
        }
    }
}
