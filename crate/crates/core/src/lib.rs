//! Two-community detection with standardized edge-count statistics.
//!
//! The crate scores a binary labelling of a directed or undirected graph by
//! how far its within-group edge counts sit from their expectation under the
//! permutation null (labels shuffled with group sizes held fixed). Two
//! statistics come out of that:
//!
//! * `Z_w`, a size-weighted sum of the two within-group counts. Maximizing it
//!   recovers assortative structure, minimizing it disassortative structure.
//! * `Z_d`, the difference of the two counts. Maximizing it recovers
//!   core-periphery structure.
//!
//! [`optimizer`] searches label space with multi-restart greedy flips,
//! [`selection`] decides which of the three fits best describes the graph,
//! and [`genmodels`] samples planted-partition graphs to benchmark all of it.
//! [`oracle`] holds brute-force reference computations used by the tests.

pub mod detect;
pub mod edgestats;
mod error;
pub mod evaluation;
pub mod genmodels;
pub mod graph;
pub mod oracle;
pub mod optimizer;
pub mod selection;
pub mod sweep;

pub use error::{Error, Result};

pub use edgestats::{MomentSet, Partition};
pub use graph::{Graph, GraphConstants};
pub use optimizer::{FitConfig, FitResult, Objective};
