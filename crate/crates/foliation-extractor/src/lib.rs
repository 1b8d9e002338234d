//! Critical graphs, region classification, leaf spaces, transverse measure
//! and twist of the horizontal and vertical foliations.

mod assemble;
mod geom;
mod graph;
mod numeric;

pub use assemble::{
    assemble, boundary_lines, Assembly, BoundaryLine, CriticalGraph, CriticalVertex, Facing, ProngEnd, RegionRec,
    SectorProbe, HEIGHT_AGREEMENT,
};
pub use geom::{segment_hit, unrolled_turn, Crossing, PolylineIndex};
pub use graph::{twist_parameters as twist_from_parts, Edge, FoliationDescriptor, GraphError, MetricRibbonGraph, Ray, Slot};
pub use numeric::{
    build_critical_graph, classify_regions, extract, extract_pair, face_labels, leaf_space, probe_sectors, twist_parameters,
    ExtractConfig, Extraction, Traced,
};

use qd_core::{FoliationKind, QdError};
use trajectory_tracer::TraceError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error(transparent)]
    Qd(#[from] QdError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{kind:?} leaf from zero {zero} prong {prong} hit the step limit after retries")]
    Unresolved { zero: usize, prong: usize, kind: FoliationKind },
    #[error("inconsistent foliation data: {0}")]
    Inconsistent(String),
}
