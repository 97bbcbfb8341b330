use alloc::vec::Vec;

use crate::math::{round, sqrt};
use crate::road_model::RoadModel;
use crate::scenario_detect::TrackHistory;

use super::{ReplayError, TraceSample};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimilarityReport {
    pub rmse_s: f64,
    pub rmse_t: f64,
    pub rmse_speed: f64,
    pub max_abs_s_error: f64,
    pub sample_count: usize,
}

/// Recorded trajectory over `[start, end]` at step `dt`, with times relative
/// to `start`. Samples the recording does not cover are skipped.
pub fn real_trace(history: &TrackHistory, model: &RoadModel, start: f64, end: f64, dt: f64) -> Vec<TraceSample> {
    let n = round((end - start) / dt) as usize;
    (0..=n)
        .filter_map(|k| {
            let rel = k as f64 * dt;
            let time = (start + rel).min(end);
            crate::scenario_detect::sample_state(history, time, model).map(|s| TraceSample {
                time: rel,
                s: s.frenet.s,
                t: s.frenet.t,
                lane: s.lane,
                speed: s.speed,
            })
        })
        .collect()
}

/// Sample pairs at the timestamps both traces share (within 1 µs).
pub fn common_samples(real: &[TraceSample], sim: &[TraceSample]) -> Vec<(TraceSample, TraceSample)> {
    let mut pairs = Vec::new();
    let mut j = 0;
    for r in real {
        while j < sim.len() && sim[j].time < r.time - 1e-6 {
            j += 1;
        }
        if let Some(s) = sim.get(j) {
            if (s.time - r.time).abs() <= 1e-6 {
                pairs.push((*r, *s));
            }
        }
    }
    pairs
}

/// Pointwise errors on the timestamps both traces share.
pub fn compare(real: &[TraceSample], sim: &[TraceSample], min_overlap: f64) -> Result<SimilarityReport, ReplayError> {
    let pairs = common_samples(real, sim);
    let overlap = match (pairs.first(), pairs.last()) {
        (Some(a), Some(b)) => b.0.time - a.0.time,
        _ => 0.0,
    };
    if overlap < min_overlap - 1e-9 {
        return Err(ReplayError::InsufficientOverlap { overlap, min: min_overlap });
    }
    let n = pairs.len() as f64;
    let rms = |f: &dyn Fn(&TraceSample, &TraceSample) -> f64| sqrt(pairs.iter().map(|(r, s)| { let d = f(r, s); d * d }).sum::<f64>() / n);
    Ok(SimilarityReport {
        rmse_s: rms(&|r, s| r.s - s.s),
        rmse_t: rms(&|r, s| r.t - s.t),
        rmse_speed: rms(&|r, s| r.speed - s.speed),
        max_abs_s_error: pairs.iter().map(|(r, s)| (r.s - s.s).abs()).fold(0.0, f64::max),
        sample_count: pairs.len(),
    })
}
