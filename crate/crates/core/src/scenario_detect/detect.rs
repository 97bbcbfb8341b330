use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::math::abs;
use crate::road_model::{lane_interval, RoadModel};

use super::history::{HistorySample, Histories, TrackHistory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScenarioKind {
    CutIn,
    CutOut,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::CutIn => "cut_in",
            ScenarioKind::CutOut => "cut_out",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioMark {
    pub kind: ScenarioKind,
    pub adversary_id: u32,
    /// First observation satisfying the trigger.
    pub t_cut: f64,
    /// Interpolated time the adversary crossed the ego lane boundary.
    pub t_cross: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub clipped_start: bool,
    pub clipped_end: bool,
    /// The vehicle was outside the modeled lanes whenever it qualified as a
    /// candidate, as when it joins from a side road.
    pub junction: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectParams {
    pub candidate_lateral: f64,
    pub trigger_lateral: f64,
    pub ahead_tolerance: f64,
    pub window_before: f64,
    pub window_after: f64,
    pub rate_hz: f64,
}

impl From<&PipelineConfig> for DetectParams {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            candidate_lateral: cfg.candidate_lateral,
            trigger_lateral: cfg.trigger_lateral,
            ahead_tolerance: cfg.ahead_tolerance,
            window_before: cfg.window_before,
            window_after: cfg.window_after,
            rate_hz: cfg.history_rate_hz,
        }
    }
}

struct Rules<'a> {
    p: &'a DetectParams,
}

impl Rules<'_> {
    fn in_ego_lane(&self, v: &HistorySample, ego: &HistorySample) -> bool {
        !v.out_of_map && v.lane == ego.lane
    }

    fn ahead(&self, v: &HistorySample, ego: &HistorySample) -> bool {
        v.frenet.s >= ego.frenet.s - self.p.ahead_tolerance
    }

    fn cut_in_candidate(&self, v: &HistorySample, ego: &HistorySample) -> bool {
        !self.in_ego_lane(v, ego) && abs(v.frenet.t) > self.p.candidate_lateral && self.ahead(v, ego)
    }

    fn cut_in_trigger(&self, v: &HistorySample, ego: &HistorySample) -> bool {
        self.in_ego_lane(v, ego) && abs(v.frenet.t) < self.p.trigger_lateral
    }

    fn cut_out_candidate(&self, v: &HistorySample, ego: &HistorySample) -> bool {
        self.in_ego_lane(v, ego) && abs(v.frenet.t) < self.p.trigger_lateral && self.ahead(v, ego)
    }

    fn cut_out_trigger(&self, v: &HistorySample, ego: &HistorySample) -> bool {
        !self.in_ego_lane(v, ego) && abs(v.frenet.t) > self.p.candidate_lateral
    }

    fn trigger(&self, kind: ScenarioKind, v: &HistorySample, ego: &HistorySample) -> bool {
        match kind {
            ScenarioKind::CutIn => self.cut_in_trigger(v, ego),
            ScenarioKind::CutOut => self.cut_out_trigger(v, ego),
        }
    }

    fn candidate(&self, kind: ScenarioKind, v: &HistorySample, ego: &HistorySample) -> bool {
        match kind {
            ScenarioKind::CutIn => self.cut_in_candidate(v, ego),
            ScenarioKind::CutOut => self.cut_out_candidate(v, ego),
        }
    }
}

/// Ego sample at the same instant, looked up by time.
fn ego_at(ego: &[HistorySample], time: f64) -> Option<&HistorySample> {
    let i = ego.partition_point(|e| e.time < time - 1e-6);
    ego.get(i).filter(|e| abs(e.time - time) <= 1e-6)
}

/// Runs the candidate/trigger state machines of both kinds over each track's
/// fixed-rate samples.
///
/// A mark is emitted at the first sample satisfying the trigger after the
/// vehicle qualified as candidate, and the machine re-arms only when the
/// vehicle qualifies again. The detection instant is refined to the first
/// recorded frame after the previous sample that satisfies the trigger.
pub fn detect_events(histories: &Histories, model: &RoadModel, p: &DetectParams) -> Vec<ScenarioMark> {
    let rules = Rules { p };
    let mut marks = Vec::new();
    for track in &histories.tracks {
        for kind in [ScenarioKind::CutIn, ScenarioKind::CutOut] {
            let mut armed = false;
            let mut all_off_map = true;
            let mut prev_time: Option<f64> = None;
            for v in &track.samples {
                let Some(ego) = ego_at(&histories.ego.samples, v.time) else {
                    prev_time = None;
                    continue;
                };
                if rules.candidate(kind, v, ego) {
                    if !armed {
                        all_off_map = true;
                    }
                    armed = true;
                    all_off_map &= v.out_of_map;
                } else if armed && rules.trigger(kind, v, ego) {
                    let from = prev_time.unwrap_or(v.time - 1.0 / p.rate_hz);
                    let t_cut = refine(&rules, kind, track, &histories.ego.raw, from, v.time);
                    marks.push(make_mark(kind, track, &histories.ego, model, t_cut, all_off_map && kind == ScenarioKind::CutIn, p));
                    armed = false;
                }
                prev_time = Some(v.time);
            }
        }
    }
    marks.sort_by(|a, b| a.t_cut.total_cmp(&b.t_cut).then(a.adversary_id.cmp(&b.adversary_id)));
    marks
}

fn refine(rules: &Rules, kind: ScenarioKind, track: &TrackHistory, ego_raw: &[HistorySample], from: f64, to: f64) -> f64 {
    track
        .raw
        .iter()
        .filter(|r| r.time > from && r.time <= to)
        .find(|r| ego_at(ego_raw, r.time).is_some_and(|e| rules.trigger(kind, r, e)))
        .map_or(to, |r| r.time)
}

/// Last time before `t_cut` at which the adversary crossed the ego lane edge,
/// interpolated between frames.
fn crossing_time(track: &TrackHistory, ego_raw: &[HistorySample], model: &RoadModel, kind: ScenarioKind, t_cut: f64) -> f64 {
    let end = track.raw.partition_point(|r| r.time <= t_cut);
    for k in (1..end).rev() {
        let (a, b) = (&track.raw[k - 1], &track.raw[k]);
        let Some(e) = ego_at(ego_raw, b.time) else { continue };
        let inside = |s: &HistorySample| !s.out_of_map && s.lane == e.lane;
        let (outer, crossed) = match kind {
            ScenarioKind::CutIn => (a, !inside(a) && inside(b)),
            ScenarioKind::CutOut => (b, inside(a) && !inside(b)),
        };
        if crossed {
            let width = model.section_at(outer.frenet.s).width;
            let (lo, hi) = lane_interval(e.lane, width);
            let edge = if outer.frenet.t > hi { hi } else { lo };
            let (ta, tb) = (a.frenet.t, b.frenet.t);
            if (ta - tb).abs() > 1e-12 {
                let u = ((ta - edge) / (ta - tb)).clamp(0.0, 1.0);
                return a.time + u * (b.time - a.time);
            }
            return b.time;
        }
    }
    t_cut
}

fn make_mark(
    kind: ScenarioKind,
    track: &TrackHistory,
    ego: &TrackHistory,
    model: &RoadModel,
    t_cut: f64,
    junction: bool,
    p: &DetectParams,
) -> ScenarioMark {
    let first = track.raw[0].time.max(ego.raw[0].time);
    let last = track.raw[track.raw.len() - 1].time.min(ego.raw[ego.raw.len() - 1].time);
    let want_start = t_cut - p.window_before;
    let want_end = t_cut + p.window_after;
    let window_start = want_start.max(first);
    let window_end = want_end.min(last);
    let t_cross = crossing_time(track, &ego.raw, model, kind, t_cut);
    ScenarioMark {
        kind,
        adversary_id: track.track_id,
        t_cut,
        t_cross,
        window_start,
        window_end,
        clipped_start: window_start > want_start,
        clipped_end: window_end < want_end,
        junction,
    }
}

