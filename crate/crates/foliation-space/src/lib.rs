//! The space of measured foliations of the punctured plane with poles of
//! orders (n, m): cutting leaf spaces along their cycle, the fibration over
//! the folded half-plane, global charts, and the chart on pairs.

mod chart;
mod sides;

pub use chart::{
    coords_to_fnm, coords_to_pair, f2_membership, fnm_chart, fnm_dimension, pair_chart, pair_dimension, project_pi,
    FoldedPoint,
};
pub use sides::{
    compose, compose_graph, compose_plane, compose_ring, decompose, decompose_graph, descriptor_distance, plane_tree, Base,
    Sides,
};

use foliation_extractor::GraphError as RibbonError;
use graph_moduli::GraphError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error("cycle lengths differ: {0} vs {1}")]
    TauMismatch(f64, f64),
    #[error("{0}")]
    Shape(String),
    #[error("chart dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("both foliations have zero transverse measure")]
    Diagonal,
}

