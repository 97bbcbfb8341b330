//! Per-vehicle Frenet histories, cut-in/cut-out detection and scenario
//! parameter extraction.

mod detect;
mod history;
mod params;

pub use detect::{detect_events, DetectParams, ScenarioKind, ScenarioMark};
pub use history::{build_histories, sample_state, HistoryParams, HistorySample, Histories, TrackHistory};
pub use params::{extract_parameters, ActorParameters, ScenarioParameters, TriggerRule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectError {
    #[error("scenario window of {length:.2} s is shorter than the required {min} s")]
    InsufficientWindow { length: f64, min: f64 },
    #[error("{actor} has a {gap:.2} s gap around t = {time:.2} s (max {max} s)")]
    DataGap { actor: &'static str, time: f64, gap: f64, max: f64 },
    #[error("{actor} has no data at t = {time:.2} s")]
    NoData { actor: &'static str, time: f64 },
    #[error("sample count must be at least 2, got {0}")]
    TooFewSamples(usize),
    #[error("adversary track {0} is not in the histories")]
    UnknownTrack(u32),
}

#[cfg(test)]
mod tests;
