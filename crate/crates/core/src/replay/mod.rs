//! Kinematic interpretation of the emitted scenario subset and trajectory
//! similarity metrics.

mod compare;
mod interpret;

pub use compare::{common_samples, compare, real_trace, SimilarityReport};
pub use interpret::{interpret, ReplayParams, SimTrace, TraceSample};

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("events never triggered within {limit} s: {events:?}")]
    Timeout { limit: f64, events: Vec<String> },
    #[error("entity {0:?} has no init state")]
    NoInit(String),
    #[error("lane {lane} does not exist at s = {s:.2}")]
    UnknownLane { lane: i32, s: f64 },
    #[error("traces overlap for {overlap:.2} s, need {min} s")]
    InsufficientOverlap { overlap: f64, min: f64 },
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
}
