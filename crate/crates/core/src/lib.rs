//! Leximin allocations of mixed goods and chores.
//!
//! Every agent has a `{-1, 0, c}` order-neutral submodular valuation: each
//! marginal gain is `-1`, `0` or `c`, and the multiset of marginal gains seen
//! while building a bundle does not depend on the insertion order. For this
//! class [`solver::solve`] computes a complete allocation whose sorted utility
//! vector is lexicographically maximal, which is also welfare maximizing.
//!
//! Beside the solver the crate ships brute-force [`oracle`]s, fairness
//! checkers in [`fairness`], seeded instance generators and JSON I/O in
//! [`instgen`], and a command-line front end in [`cli`].
//!
//! ```
//! use manna::instgen::fixtures;
//! use manna::solver::solve;
//!
//! let inst = fixtures::ex2();
//! let report = solve(&inst).unwrap();
//! assert_eq!(report.sorted.values(), &[0, inst.c()]);
//! ```

pub mod cli;
pub mod error;
pub mod exchange;
pub mod fairness;
pub mod instgen;
pub mod itemset;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod threshold;
pub mod valuations;
pub mod yankee;

pub use error::{Error, Result};
pub use itemset::ItemSet;
pub use model::{lex_compare, utility_vector, AgentId, Allocation, Instance, ItemId, SortedUtilityVector, UtilityVector};
pub use solver::{solve, SolveReport};
pub use threshold::TriDecomposition;
pub use valuations::{Group, ValuationSpec};
