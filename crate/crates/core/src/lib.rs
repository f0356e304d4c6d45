//! Exact nucleolus computation for weighted cooperative matching games.
//!
//! A matching game is an undirected graph with nonnegative edge weights; the
//! value of a coalition is the maximum weight of a matching inside it. This
//! crate computes the leastcore and the nucleolus exactly over the rationals,
//! using compact LPs indexed by nodes and edges, and ships a brute-force
//! coalition-level implementation used to certify the compact pipeline on
//! small instances.

pub mod error;
pub mod game;
pub mod leastcore;
pub mod lp;
pub mod maschler;
pub mod matching;
pub mod options;
pub mod oracle;
pub mod par;
pub mod rational;

pub use error::{Error, Result};
pub use game::{Allocation, Coalition, Edge, EdgeId, GameFormat, GameInstance, Matching, NodeId};
pub use options::SolveOptions;
pub use par::Execution;
pub use rational::Rational;
