use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::ingest::{track_to_odom, DriveLog, ObjectClass};
use crate::math::{ceil, floor, interp, Vec2};
use crate::road_model::{assign_lane, FrenetPose, RoadModel};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistorySample {
    pub time: f64,
    pub frenet: FrenetPose,
    pub lane: i32,
    pub out_of_map: bool,
    pub speed: f64,
    /// Path length driven since the first observation.
    pub s_traveled: f64,
}

/// Frenet history of one vehicle: every usable frame plus the resampled
/// fixed-rate series the detector runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackHistory {
    pub track_id: u32,
    pub class: ObjectClass,
    pub raw: Vec<HistorySample>,
    pub samples: Vec<HistorySample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histories {
    pub ego: TrackHistory,
    /// Ordered by track id.
    pub tracks: Vec<TrackHistory>,
    /// Tracks observed for less than the minimum duration.
    pub dropped_tracks: usize,
    /// Observations dropped for projecting off the reference line.
    pub dropped_samples: usize,
}

impl Histories {
    pub fn track(&self, id: u32) -> Option<&TrackHistory> {
        self.tracks
            .binary_search_by_key(&id, |t| t.track_id)
            .ok()
            .map(|i| &self.tracks[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryParams {
    pub rate_hz: f64,
    pub min_duration: f64,
    pub max_gap: f64,
    pub lateral_bound: f64,
}

impl From<&PipelineConfig> for HistoryParams {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            rate_hz: cfg.history_rate_hz,
            min_duration: cfg.min_track_duration,
            max_gap: cfg.max_interp_gap,
            lateral_bound: cfg.frenet_lateral_bound,
        }
    }
}

/// Interpolated state of `raw` at `time`, with the lane re-assigned from the
/// interpolated Frenet pose. `None` outside the observed span.
pub(crate) fn sample_at(raw: &[HistorySample], time: f64, model: &RoadModel) -> Option<HistorySample> {
    let times: Vec<f64> = raw.iter().map(|r| r.time).collect();
    let get = |f: fn(&HistorySample) -> f64| {
        let ys: Vec<f64> = raw.iter().map(f).collect();
        interp(&times, &ys, time)
    };
    let frenet = FrenetPose {
        s: get(|r| r.frenet.s)?,
        t: get(|r| r.frenet.t)?,
    };
    let lane = assign_lane(frenet, model);
    Some(HistorySample {
        time,
        frenet,
        lane: lane.lane,
        out_of_map: lane.out_of_map,
        speed: get(|r| r.speed)?,
        s_traveled: get(|r| r.s_traveled)?,
    })
}

/// Interpolated state of a history at `time`; `None` outside its span.
pub fn sample_state(history: &TrackHistory, time: f64, model: &RoadModel) -> Option<HistorySample> {
    sample_at(&history.raw, time, model)
}

/// Largest time step between consecutive raw samples bracketing `time`.
pub(crate) fn gap_at(raw: &[HistorySample], time: f64) -> f64 {
    let k = raw.partition_point(|r| r.time <= time);
    if k == 0 || k >= raw.len() {
        return 0.0;
    }
    raw[k].time - raw[k - 1].time
}

fn finish(track_id: u32, class: ObjectClass, raw: Vec<(f64, Vec2, f64)>, model: &RoadModel, p: &HistoryParams, dropped: &mut usize) -> TrackHistory {
    let mut samples: Vec<HistorySample> = Vec::with_capacity(raw.len());
    for (time, pos, speed) in raw {
        let proj = match model.ref_line.to_frenet(pos, p.lateral_bound) {
            Ok(proj) if !proj.is_clamped() => proj,
            _ => {
                *dropped += 1;
                continue;
            }
        };
        let lane = assign_lane(proj.pose, model);
        let s_traveled = match samples.last() {
            Some(prev) => prev.s_traveled + 0.5 * (prev.speed + speed) * (time - prev.time),
            None => 0.0,
        };
        samples.push(HistorySample {
            time,
            frenet: proj.pose,
            lane: lane.lane,
            out_of_map: lane.out_of_map,
            speed,
            s_traveled,
        });
    }
    let resampled = resample(&samples, model, p);
    TrackHistory {
        track_id,
        class,
        raw: samples,
        samples: resampled,
    }
}

fn resample(raw: &[HistorySample], model: &RoadModel, p: &HistoryParams) -> Vec<HistorySample> {
    let (Some(first), Some(last)) = (raw.first(), raw.last()) else {
        return Vec::new();
    };
    let k0 = ceil(first.time * p.rate_hz - 1e-9) as i64;
    let k1 = floor(last.time * p.rate_hz + 1e-9) as i64;
    (k0..=k1)
        .filter_map(|k| {
            let time = (k as f64 / p.rate_hz).clamp(first.time, last.time);
            if gap_at(raw, time) > p.max_gap {
                return None;
            }
            sample_at(raw, time, model).map(|mut s| {
                s.time = k as f64 / p.rate_hz;
                s
            })
        })
        .collect()
}

/// Builds the ego history and one history per tracked vehicle.
///
/// Track positions go base_link → odom → Frenet; speed is the magnitude of the
/// reported over-ground velocity and `s_traveled` its trapezoidal integral.
/// Tracks observed for less than `min_duration` are dropped and counted, as are
/// individual observations that project off either end of the reference line.
pub fn build_histories(log: &DriveLog, model: &RoadModel, p: &HistoryParams) -> Histories {
    let mut dropped_samples = 0;
    let ego_raw = log
        .frames()
        .iter()
        .map(|f| (f.t, f.ego.position(), f.ego.speed))
        .collect();
    let ego = finish(0, ObjectClass::Car, ego_raw, model, p, &mut dropped_samples);

    let mut per_track: Vec<(u32, ObjectClass, Vec<(f64, Vec2, f64)>)> = Vec::new();
    for frame in log.frames() {
        for obj in &frame.tracks {
            let odom = track_to_odom(obj, &frame.ego);
            let entry = match per_track.binary_search_by_key(&obj.track_id, |e| e.0) {
                Ok(i) => &mut per_track[i],
                Err(i) => {
                    per_track.insert(i, (obj.track_id, obj.class, Vec::new()));
                    &mut per_track[i]
                }
            };
            entry.2.push((frame.t, odom.position, odom.velocity.norm()));
        }
    }

    let mut tracks = Vec::new();
    let mut dropped_tracks = 0;
    for (id, class, raw) in per_track {
        let span = raw.last().map_or(0.0, |l| l.0) - raw.first().map_or(0.0, |f| f.0);
        if span < p.min_duration {
            dropped_tracks += 1;
            continue;
        }
        let history = finish(id, class, raw, model, p, &mut dropped_samples);
        if history.raw.len() < 2 {
            dropped_tracks += 1;
            continue;
        }
        tracks.push(history);
    }
    Histories {
        ego,
        tracks,
        dropped_tracks,
        dropped_samples,
    }
}
