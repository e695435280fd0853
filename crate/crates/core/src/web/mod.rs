//! Webs: planar trivalent bipartite graphs and their spatial diagrams.

mod canon;
mod diagram;
mod moves;
mod planar;
mod resolve;

pub use canon::canonical_form;
pub use moves::{apply_move, apply_move_with_inverse, candidate_moves, face_walk, simplify_joins, ArcSide, Move, MoveKind};
pub use diagram::{Crossing, CrossingSign, DiagramVertex, End, Port, WebDiagram};
pub use planar::{Dart, EdgeId, Face, PlanarEdge, PlanarVertex, PlanarWeb, Polarity, Side, VertexId};
pub use resolve::{arc_edge_map, resolve, resolution_web, Resolution};
pub(crate) use resolve::{wide_edge_id, wide_vertices};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WebError {
    #[error("malformed diagram: {0}")]
    Malformed(String),

    #[error("orientation condition violated at vertex {vertex}: arcs must be all incoming or all outgoing")]
    Orientation { vertex: usize },

    #[error("diagram is not planar: component {component} has genus {genus}")]
    NonPlanar { component: usize, genus: i64 },

    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),

    #[error("invalid planar web: {0}")]
    InvalidWeb(String),
}
