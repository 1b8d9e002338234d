//! Singular-flat surfaces glued from half-planes, strips and a ring
//! domain, built from the leaf spaces of a horizontal and a vertical
//! measured foliation, and read back by tracing leaves through the pieces.

mod complex;
mod cover;
mod extract;
mod frame;
mod leaf;

pub use complex::{
    build_from_pair, build_from_pair_with, planar_build, BoundaryLine, DeckMap, FlatPiece, Gluing, LineShape,
    Occurrence, SegmentRef, SurfaceComplex,
};
pub use extract::{extract_leaf_spaces, verify_roundtrip, LeafSpaces, RoundTrip};
pub use frame::{PoleFrame, RegionBijection};

use foliation_extractor::ExtractError;
use foliation_space::SpaceError;
use graph_moduli::GraphError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("both foliations have zero transverse measure")]
    Diagonal,
    #[error("{0}")]
    Shape(String),
    #[error("region bijection: {0}")]
    Bijection(String),
    #[error("complex is not invariant under the deck map: {0}")]
    NotInvariant(String),
    #[error("inconsistent complex: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}
