//! Semi-streaming spanning tree algorithms.
//!
//! Graphs arrive as edge streams ([`harness::GraphStream`]) that algorithms
//! may only read in whole, metered passes. The crate covers
//!
//! * max-leaf spanning trees via a single-pass sparsifier ([`mlst`]),
//! * BFS with a pass/space tradeoff, diameter and Steiner tree applications ([`bfs`]),
//! * DFS via connectivity certificates and the Aggarwal-Anderson scheme ([`dfs`]),
//!
//! on top of linear sketches ([`sketch`]) and connectivity certificates
//! ([`cert`]). Every algorithm has a brute-force counterpart in [`oracle`]
//! for desk-scale verification.

pub mod acceptance;
pub mod bfs;
pub mod cert;
pub mod cli;
pub mod dfs;
pub mod error;
pub mod graph;
pub mod harness;
pub mod mlst;
pub mod oracle;
pub mod rng;
pub mod sketch;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{AdjacencyGraph, Edge, Node, UnionFind};
pub use harness::{generate, GraphStream, Model, StreamSession};
pub use tree::RootedTree;
