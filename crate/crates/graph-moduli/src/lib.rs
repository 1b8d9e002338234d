//! Spaces of planar metric graphs with labelled infinite rays: trees (the
//! moduli of local expansions of a zero) and graphs with one cycle, with
//! explicit charts to Euclidean space.

pub mod cycle;
pub mod distance;
pub mod sub;
pub mod tree;

pub use cycle::{coords_to_cycle, cycle_chart, split_root, zip_roots, CycleGraph, Root};
pub use distance::{cycle_distance, graph_distance, tree_distance, Graph};
pub use sub::{Sub, MERGE_EPS};
pub use tree::{coords_to_tree, enumerate_types, tree_chart, whitehead_move, LabelledTree};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("bad ray labels: {0}")]
    Labels(String),
    #[error("chart dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("move not applicable: {0}")]
    Move(String),
}
