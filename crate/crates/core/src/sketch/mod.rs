//! Linear sketches for turnstile streams and maximal matching in both models.

pub mod hash;
mod forest;
mod l0;
mod matching;

pub use forest::{boruvka_rounds, ForestSketch, FOREST_REPS};
pub use l0::{ceil_log2, default_reps, Cell, L0Params, L0Query, L0Sketch};
pub use matching::{matching_round_cap, maximal_matching, maximal_matching_grouped_in, maximal_matching_in, EdgeFilter, Matching, NodeGroups};
