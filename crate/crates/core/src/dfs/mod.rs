//! Depth-first search trees in few passes.

mod aa;
mod common;
mod flow;
mod maximal;
mod paths;
mod simple;

pub use aa::{dfs_aa, initial_segment, reduce_separator, AaSubproblem, DfsAaResult, InitialSegment, Portal, SEPARATOR_TARGET};
pub use maximal::{maximal_paths, MaximalPathsResult};
pub use paths::{MaximalPathsInstance, OutputPath, PathSystem};
pub use simple::{dfs_simple, DfsSimpleResult, SimpleLevel};
