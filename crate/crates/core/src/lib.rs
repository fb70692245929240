//! Parallel triad census for large directed graphs.
//!
//! The graph is held in a compact CSR layout where each neighbor entry carries
//! a 2-bit direction code ([`graph`]). The census follows the subquadratic
//! edge-driven scheme: every adjacent pair `u < v` contributes its dyadic
//! triads in one step and its connected triads through a merge walk over the
//! two sorted neighbor lists ([`kernel`]). [`parallel`] flattens the pair loop
//! into one index range claimed dynamically by worker threads and spreads the
//! counts over hash-selected shard vectors.

pub mod bench;
pub mod census;
pub mod gen;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod oracle;
pub mod parallel;
pub mod verify;

pub use census::{total_triads, TriadCensus, TriadClass};
pub use graph::{build_graph, BuildOptions, CompactDigraph, EdgeCode, EdgeList, NeighborEntry, NodeId, SelfLoopPolicy};
pub use kernel::{census_sequential, TriadCodeTable};
pub use parallel::{census_parallel, RunConfig};
