//! Edge colorings of complete graphs and the edges that lie in no
//! monochromatic copy of a fixed pattern graph `H` (NIM-H edges).
//!
//! The crate covers the whole pipeline: pattern generators and a DSL,
//! exact Turán numbers (closed forms where known, exhaustive search
//! otherwise), the explicit colorings that realise the known lower bounds,
//! NIM edge computation, and exhaustive or heuristic maximisation of the
//! NIM count over all colorings.

pub mod coloring;
pub mod constructions;
pub mod embed;
pub mod error;
pub mod graph;
pub mod iso;
pub mod ledger;
pub mod nim;
pub mod pattern;
mod pool;
pub mod search;
pub mod turan;

pub use coloring::{Color, EdgeColoring};
pub use error::{Error, Result};
pub use graph::{edge_index, edge_unindex, pair_count, SimpleGraph};
pub use nim::{contains, contains_through_edge, nim_edges, nim_edges_anchored, NimReport};
pub use pattern::{parse_pattern, Family, PatternGraph};
pub use search::SearchResult;
pub use turan::TuranResult;

/// Version string recorded in ledger entries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
