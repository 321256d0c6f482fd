use thiserror::Error;

/// Failure modes surfaced by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the function.
    #[error("domain error in {context}: {detail}")]
    Domain {
        context: &'static str,
        detail: String,
    },

    /// An iterative solver or adaptive rule could not reach its tolerance.
    #[error("{context} did not converge: {detail}")]
    NonConvergence {
        context: &'static str,
        detail: String,
    },

    /// A quantity that must be strictly positive (a variance, a mass) collapsed.
    #[error("degenerate {context}: {detail}")]
    Degenerate {
        context: &'static str,
        detail: String,
    },

    /// Parameter set rejected before any computation started.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            context,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_converge(context: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            context,
            detail: detail.into(),
        }
    }

    pub(crate) fn degenerate(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Degenerate {
            context,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
