use thiserror::Error;

/// Errors raised by the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate edge between {u} and {v}")]
    DuplicateEdge { u: String, v: String },

    #[error("self-loop at node {0}")]
    SelfLoop(String),

    #[error("negative weight {weight} on edge {u}-{v}")]
    NegativeWeight { u: String, v: String, weight: String },

    #[error("node index {index} out of range for {count} nodes")]
    NodeOutOfRange { index: usize, count: usize },

    #[error("edges {0} and {1} share an endpoint")]
    NotAMatching(usize, usize),

    #[error("{what}: size {size} exceeds the configured bound {limit}")]
    BoundExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("separator returned a constraint that is satisfied at the query point")]
    SeparatorContract,

    #[error("constraint system is infeasible")]
    Infeasible,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invariant(message: impl Into<String>) -> Self {
        Error::Invariant(message.into())
    }

    /// True for errors caused by malformed input rather than solver state.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::DuplicateEdge { .. }
                | Error::SelfLoop(_)
                | Error::NegativeWeight { .. }
                | Error::NodeOutOfRange { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
