#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Shapley-value centrality for five coalitional games on graphs: closed-form
//! solvers, a Gaussian approximation for the weighted-threshold game, a
//! brute-force oracle, permutation sampling and a benchmark harness.

pub mod approx;
pub mod bench;
pub mod error;
pub mod exact;
pub mod games;
pub mod generate;
pub mod graph;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod shapley;

pub use error::{Error, Result};
pub use games::{characteristic_value, Coalition, DecayFn, Game, GameSpec};
pub use graph::{Graph, NodeId};
pub use montecarlo::{mc_shapley, max_relative_error, ConvergenceTrace, RngSeed};
pub use params::NodeParam;
pub use shapley::{Method, ShapleyVector};
