//! Exact selective graph coloring on perfect graphs.
//!
//! The crate bundles the pieces of a cutting-plane workbench: a dense graph
//! type, a brute-force perfectness oracle, an MCS maximum clique solver, exact
//! coloring, a small simplex / 0-1 branch-and-bound engine with lazy cut
//! callbacks, the selective coloring solvers built on top of it, a theta-number
//! SDP, the random perfect-graph generator, and instance I/O plus an
//! experiment harness.

pub mod clique;
pub mod coloring;
pub mod deadline;
pub mod error;
pub mod graph;
pub mod harness;
pub mod instance;
pub mod io;
pub mod lp;
pub mod perfect;
pub mod perfectgen;
pub mod selcol;
pub mod theta;

pub use error::{Error, Result};
pub use graph::{BitSet, Graph, GraphBuilder, VertexSet};
pub use instance::{SelColInstance, Selection};
