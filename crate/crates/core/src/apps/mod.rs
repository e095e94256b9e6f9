//! Applications of the counting factorization: synthetic graphs, graph
//! functions, and substring and episode counting.

pub mod episode;
pub mod graph;
pub mod graph_fn;
pub mod substring;
pub mod words;

pub use episode::{episode_bound, minimal_occurrence_ending, EpisodeCounterState};
pub use graph::{
    edge_index, edge_pair, pair_count, st_cut_bound, EdgeUpdate, GraphStream, SyntheticGraph,
};
pub use graph_fn::{
    graph_fn_bound, DifferenceProvider, EdgeCount, EdgeEvent, GraphFnEstimator, VertexDegree,
};
pub use substring::{substring_bound, suffix_indicator, SubstringCounterState};
pub use words::{Alphabet, WordIndex};
