//! Ego reference line, road sections and Frenet coordinates.

mod lanes;
mod reference_line;
mod section;

pub use lanes::{assign_lane, lane_interval, LaneAssignment};
pub use reference_line::{build_reference_line, Clamp, FrenetPose, FrenetProjection, ReferenceLine};
pub use section::{sectionize, RoadModel, RoadSection};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RoadModelError {
    #[error("ego path is {length:.3} m long, need at least {min} m")]
    Stationary { length: f64, min: f64 },
    #[error("reference line needs at least 2 poses, got {0}")]
    TooFewPoses(usize),
    #[error("point is {t:.2} m from the reference line (bound {bound} m)")]
    BeyondLateralBound { t: f64, bound: f64 },
    #[error("every road section is degenerate")]
    NoValidSection,
}
