//! Tunable bounds shared by the solver pipeline.

use crate::lp::DEFAULT_GENERATION_LIMIT;
use crate::matching::{DEFAULT_ENUMERATION_LIMIT, DEFAULT_ODD_SET_NODE_LIMIT};
use crate::par::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Largest `|E|` for which all matchings are listed explicitly.
    pub enumeration_limit: usize,
    /// Largest support scanned for violated odd sets when computing duals.
    pub odd_set_node_limit: usize,
    /// Cap on optimal matchings listed by the large-instance fallback.
    pub optimal_matching_cap: usize,
    /// Cap on cutting-plane rounds per LP.
    pub generation_limit: usize,
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            odd_set_node_limit: DEFAULT_ODD_SET_NODE_LIMIT,
            optimal_matching_cap: 100_000,
            generation_limit: DEFAULT_GENERATION_LIMIT,
            execution: Execution::default(),
        }
    }
}

impl SolveOptions {
    pub fn with_execution(self, execution: Execution) -> Self {
        SolveOptions { execution, ..self }
    }

    pub fn with_enumeration_limit(self, enumeration_limit: usize) -> Self {
        SolveOptions {
            enumeration_limit,
            ..self
        }
    }
}
