//! Leafy out-trees and out-branchings in digraphs.
//!
//! The crate decides whether a digraph has an out-tree (or a spanning
//! out-branching) with at least `k` leaves in `2^{O(k log k)} n^{O(1)}` time,
//! and always hands back a checkable witness for a YES answer. The solvers
//! work on a locally optimal out-branching: either it already has enough
//! leaves, or some vertex collects many back-arc heads (which yields a leafy
//! out-tree directly), or the out-branching is the skeleton of a tree
//! decomposition of small width on which an exact dynamic program runs.
//!
//! Alongside the solvers sit constructive versions of the supporting
//! combinatorial bounds (out-tree to out-branching conversion losing at most
//! a factor 3, the staged path procedure and the `√n / 4` leaf bound for
//! digraphs of minimum in-degree 3), brute-force oracles for small digraphs
//! and seeded instance generators.

pub mod arborescence;
pub mod bounds;
pub mod decomposition;
pub mod digraph;
pub mod dp;
pub mod error;
pub mod generate;
pub mod oracle;
pub mod solver;

pub use arborescence::{OutTree, RoleSets};
pub use digraph::{parse_digraph, Arc, Digraph, VertexId};
pub use error::{Error, ParseError, Result};
