//! Brute-force references used to check the streaming algorithms at desk
//! scale. Nothing here calls into the streaming modules; the only shared
//! code is the graph and tree types.

mod cache;
mod cds;
mod flow;
mod paths;
mod steiner;

pub use cache::OracleCache;
pub use cds::{connected_max_cut_exact, exact_leaf, leaf_by_tree_enumeration, min_connected_dominating_set};
pub use flow::{edge_connectivity, node_connectivity, node_connectivity_brute};
pub use paths::{
    exact_distances, floyd_warshall, is_bfs_tree, is_dfs_tree, maximality_check, output_well_formed, reference_dfs,
};
pub use steiner::{steiner_exhaustive, steiner_opt};

use crate::error::{Error, Result};

/// Size caps for the exponential oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub cds_nodes: usize,
    pub steiner_terminals: usize,
    pub cut_nodes: usize,
    pub tree_enumeration_nodes: usize,
}

impl OracleBudget {
    /// Min-CDS search works on 128-bit masks. It is exact at any size up to
    /// that, but only fast when the optimum is small or n is at most ~20.
    pub const DEFAULT: OracleBudget = OracleBudget { cds_nodes: 128, steiner_terminals: 8, cut_nodes: 16, tree_enumeration_nodes: 9 };
}

pub(crate) fn over(what: &str, got: usize, cap: usize) -> Result<()> {
    if got > cap {
        Err(Error::OracleBudget(format!("{what}: {got} exceeds the cap of {cap}")))
    } else {
        Ok(())
    }
}
