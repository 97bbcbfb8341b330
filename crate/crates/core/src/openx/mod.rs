//! OpenDRIVE and OpenSCENARIO document models for the emitted subset.
//!
//! The models carry exactly what the serializers in the std crate write; the
//! builders here turn a road model and a scenario parameter set into them.

mod odr;
mod osc;
pub mod spiral;

pub use odr::{
    build_opendrive, Geometry, GeometryShape, LaneOffset, LaneSection, OdrDocument, OdrHeader, OdrLane, OdrRoad,
    POSE_TOLERANCE, STRAIGHT_CURVATURE,
};
pub use osc::{
    build_openscenario, Action, BoundingBox, Condition, Entity, Event, FileHeader, InitState, ManeuverGroup,
    OscDocument, ParameterDeclaration, ADVERSARY, EGO,
};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpenXError {
    #[error("road model has no sections")]
    EmptyModel,
    #[error("missing mandatory element {0}")]
    Missing(&'static str),
    #[error("geometry {index} starts {gap:e} m / {heading_gap:e} rad off its predecessor's end")]
    Discontinuity { index: usize, gap: f64, heading_gap: f64 },
    #[error("story has no events")]
    EmptyStory,
    #[error("unknown entity {0:?}")]
    UnknownEntity(String),
    #[error("adversary already ends in lane {lane}; no lane change to encode")]
    NoLaneChange { lane: i32 },
    #[error("{0}")]
    Invalid(String),
}

#[cfg(test)]
mod tests;
