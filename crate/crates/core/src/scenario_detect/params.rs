use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::road_model::RoadModel;

use super::history::{gap_at, sample_at, HistorySample, TrackHistory};
use super::{DetectError, Histories, ScenarioKind, ScenarioMark};

/// Sampled state of one actor over the scenario window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActorParameters {
    pub initial_speed: f64,
    /// s-coordinate at the window start.
    pub initial_position: f64,
    pub initial_lane: i32,
    pub speed: Vec<f64>,
    /// Path length driven since the window start.
    pub distance: Vec<f64>,
}

/// Direction in which the ego–adversary gap must cross the triggering
/// distance for the lane change to start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub enum TriggerRule {
    GreaterThan,
    LessThan,
}

impl TriggerRule {
    pub fn as_str(self) -> &'static str {
        match self {
            TriggerRule::GreaterThan => "greaterThan",
            TriggerRule::LessThan => "lessThan",
        }
    }

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            TriggerRule::GreaterThan => value > threshold,
            TriggerRule::LessThan => value < threshold,
        }
    }
}

/// The parameter vector of one cut-in or cut-out scenario.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioParameters {
    pub kind: ScenarioKind,
    pub adversary_id: u32,
    pub t_cut: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub ego: ActorParameters,
    pub adversary: ActorParameters,
    /// Signed s-difference adversary − ego at lane-change initiation.
    pub triggering_distance: f64,
    pub trigger_rule: TriggerRule,
    pub initiation_time: f64,
    pub final_lane: i32,
    pub lane_change_duration: f64,
    pub m: usize,
}

impl ScenarioParameters {
    pub fn window_length(&self) -> f64 {
        self.window_end - self.window_start
    }
}

fn state(
    actor: &'static str,
    h: &TrackHistory,
    time: f64,
    model: &RoadModel,
    max_gap: f64,
) -> Result<HistorySample, DetectError> {
    let gap = gap_at(&h.raw, time);
    if gap > max_gap {
        return Err(DetectError::DataGap { actor, time, gap, max: max_gap });
    }
    sample_at(&h.raw, time, model).ok_or(DetectError::NoData { actor, time })
}

fn actor_parameters(
    actor: &'static str,
    h: &TrackHistory,
    times: &[f64],
    model: &RoadModel,
    max_gap: f64,
) -> Result<ActorParameters, DetectError> {
    let states = times
        .iter()
        .map(|&t| state(actor, h, t, model, max_gap))
        .collect::<Result<Vec<_>, _>>()?;
    let first = states[0];
    Ok(ActorParameters {
        initial_speed: first.speed,
        initial_position: first.frenet.s,
        initial_lane: first.lane,
        speed: states.iter().map(|s| s.speed).collect(),
        distance: states.iter().map(|s| (s.s_traveled - first.s_traveled).max(0.0)).collect(),
    })
}

/// Extracts the parameter vector of a detected scenario.
///
/// Speeds and driven distances are sampled at `m` evenly spaced instants
/// spanning the window, both ends included. The lane change is taken to start
/// half its duration before the lane-edge crossing; the triggering distance is
/// the s-gap at that instant and the rule is the direction the gap must move
/// from its value at the window start to reach it.
pub fn extract_parameters(
    mark: &ScenarioMark,
    histories: &Histories,
    model: &RoadModel,
    cfg: &PipelineConfig,
) -> Result<ScenarioParameters, DetectError> {
    let m = cfg.samples;
    if m < 2 {
        return Err(DetectError::TooFewSamples(m));
    }
    let length = mark.window_end - mark.window_start;
    if !(length >= cfg.min_window) {
        return Err(DetectError::InsufficientWindow { length, min: cfg.min_window });
    }
    let adv = histories
        .track(mark.adversary_id)
        .ok_or(DetectError::UnknownTrack(mark.adversary_id))?;
    let ego = &histories.ego;
    let times: Vec<f64> = (0..m)
        .map(|i| {
            if i == m - 1 {
                mark.window_end
            } else {
                mark.window_start + length * i as f64 / (m - 1) as f64
            }
        })
        .collect();
    let ego_p = actor_parameters("ego", ego, &times, model, cfg.max_interp_gap)?;
    let adv_p = actor_parameters("adversary", adv, &times, model, cfg.max_interp_gap)?;

    let initiation_time = (mark.t_cross - 0.5 * cfg.lane_change_duration).clamp(mark.window_start, mark.window_end);
    let gap = |t: f64| -> Result<f64, DetectError> {
        let a = state("adversary", adv, t, model, cfg.max_interp_gap)?;
        let e = state("ego", ego, t, model, cfg.max_interp_gap)?;
        Ok(a.frenet.s - e.frenet.s)
    };
    let triggering_distance = gap(initiation_time)?;
    let start_gap = gap(mark.window_start)?;
    let trigger_rule = if start_gap > triggering_distance {
        TriggerRule::LessThan
    } else {
        TriggerRule::GreaterThan
    };
    let final_lane = state("adversary", adv, mark.window_end, model, cfg.max_interp_gap)?.lane;

    Ok(ScenarioParameters {
        kind: mark.kind,
        adversary_id: mark.adversary_id,
        t_cut: mark.t_cut,
        window_start: mark.window_start,
        window_end: mark.window_end,
        ego: ego_p,
        adversary: adv_p,
        triggering_distance,
        trigger_rule,
        initiation_time,
        final_lane,
        lane_change_duration: cfg.lane_change_duration,
        m,
    })
}
