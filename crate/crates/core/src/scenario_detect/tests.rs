use alloc::vec::Vec;

use super::*;
use crate::config::PipelineConfig;
use crate::ingest::{DriveLog, EgoPose, LogMeta, ObjectClass, SensorFrame, TrackedObject};
use crate::math::{cos, PI};
use crate::road_model::fixtures::straight_model;
use crate::road_model::RoadModel;

const RATE: f64 = 25.0;

/// Ego driving along +x at `ego_speed`; each actor is (id, first time, last
/// time, position-at-time function in odom).
struct Actor {
    id: u32,
    from: f64,
    to: f64,
    pos: fn(f64) -> (f64, f64),
}

fn drive(duration: f64, ego_speed: f64, actors: &[Actor]) -> DriveLog {
    let n = (duration * RATE) as usize;
    let frames = (0..=n)
        .map(|k| {
            let t = k as f64 / RATE;
            let ego = EgoPose { t, x: ego_speed * t, y: 0.0, heading: 0.0, speed: ego_speed };
            let tracks = actors
                .iter()
                .filter(|a| t >= a.from - 1e-9 && t <= a.to + 1e-9)
                .map(|a| {
                    let (x, y) = (a.pos)(t);
                    let h = 1e-4;
                    let (x2, y2) = (a.pos)(t + h);
                    let (x1, y1) = (a.pos)(t - h);
                    TrackedObject {
                        track_id: a.id,
                        class: ObjectClass::Car,
                        x: x - ego.x,
                        y,
                        vx: (x2 - x1) / (2.0 * h),
                        vy: (y2 - y1) / (2.0 * h),
                    }
                })
                .collect();
            SensorFrame { t, ego, points: Vec::new(), tracks }
        })
        .collect();
    DriveLog::new(frames, LogMeta::default()).unwrap()
}

fn cfg() -> PipelineConfig {
    PipelineConfig::default()
}

fn run(log: &DriveLog, model: &RoadModel) -> (Histories, Vec<ScenarioMark>) {
    let c = cfg();
    let h = build_histories(log, model, &HistoryParams::from(&c));
    let marks = detect_events(&h, model, &DetectParams::from(&c));
    (h, marks)
}

/// Lateral offset of a 3 s cosine lane change from −3.5 m to 0 starting at 10 s.
fn cut_in_y(t: f64) -> f64 {
    let u = ((t - 10.0) / 3.0).clamp(0.0, 1.0);
    -3.5 + 3.5 * 0.5 * (1.0 - cos(PI * u))
}

#[test]
fn constant_speed_ego_history() {
    let model = straight_model(200.0, 0, 2);
    let (h, _) = run(&drive(10.0, 10.0, &[]), &model);
    assert_eq!(h.ego.samples.len(), 11);
    for (k, s) in h.ego.samples.iter().enumerate() {
        assert!((s.s_traveled - 10.0 * k as f64).abs() < 1e-9);
        assert_eq!(s.lane, -1);
    }
}

#[test]
fn short_track_is_dropped() {
    let model = straight_model(200.0, 0, 2);
    let actors = [Actor { id: 3, from: 2.0, to: 3.5, pos: |t| (10.0 * t + 20.0, -3.5) }];
    let (h, _) = run(&drive(10.0, 10.0, &actors), &model);
    assert_eq!(h.dropped_tracks, 1);
    assert!(h.tracks.is_empty());
}

#[test]
fn history_follows_scripted_lateral_offset() {
    let model = straight_model(400.0, 0, 2);
    let actors = [Actor { id: 7, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 15.0, cut_in_y(t)) }];
    let (h, _) = run(&drive(20.0, 12.0, &actors), &model);
    let track = h.track(7).unwrap();
    for s in &track.samples {
        assert!((s.frenet.t - cut_in_y(s.time)).abs() < 0.1);
    }
}

#[test]
fn cut_in_is_detected_near_crossing() {
    let model = straight_model(400.0, 0, 2);
    let actors = [Actor { id: 7, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 15.0, cut_in_y(t)) }];
    let (_, marks) = run(&drive(20.0, 12.0, &actors), &model);
    assert_eq!(marks.len(), 1);
    let m = marks[0];
    assert_eq!(m.kind, ScenarioKind::CutIn);
    assert!((m.t_cut - 11.5).abs() <= 1.0, "{m:?}");
    assert!((m.t_cross - 11.5).abs() < 0.05, "{m:?}");
    assert!(!m.junction);
    assert!((m.window_start - (m.t_cut - 8.0)).abs() < 1e-9);
    assert!(!m.clipped_start);
    assert!(m.clipped_end || (m.window_end - (m.t_cut + 5.0)).abs() < 1e-9);
}

#[test]
fn parallel_vehicle_is_not_a_cut_in() {
    let model = straight_model(400.0, 0, 2);
    let actors = [Actor { id: 1, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 5.0, -3.5) }];
    let (_, marks) = run(&drive(20.0, 12.0, &actors), &model);
    assert!(marks.is_empty());
}

#[test]
fn cut_out_is_detected() {
    let model = straight_model(400.0, 0, 2);
    let actors = [Actor { id: 2, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 20.0, -3.5 - cut_in_y(t)) }];
    let (_, marks) = run(&drive(20.0, 12.0, &actors), &model);
    let outs: Vec<_> = marks.iter().filter(|m| m.kind == ScenarioKind::CutOut).collect();
    assert_eq!(outs.len(), 1);
    assert!((outs[0].t_cut - 11.5).abs() <= 1.0);
    assert!(marks.iter().all(|m| m.kind == ScenarioKind::CutOut));
}

#[test]
fn side_road_join_is_flagged() {
    // single-lane road; the vehicle approaches from 8 m right, outside the map
    let model = straight_model(400.0, 0, 1);
    let actors = [Actor { id: 4, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 20.0, -8.0 * (1.0 - ((t - 8.0) / 4.0).clamp(0.0, 1.0))) }];
    let (_, marks) = run(&drive(20.0, 12.0, &actors), &model);
    assert_eq!(marks.len(), 1);
    assert_eq!(marks[0].kind, ScenarioKind::CutIn);
    assert!(marks[0].junction);
}

#[test]
fn threshold_consistency_of_marks() {
    let model = straight_model(400.0, 0, 2);
    let actors = [
        Actor { id: 7, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 15.0, cut_in_y(t)) },
        Actor { id: 8, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 40.0, -3.5 - cut_in_y(t)) },
    ];
    let (h, marks) = run(&drive(20.0, 12.0, &actors), &model);
    for m in &marks {
        let tr = h.track(m.adversary_id).unwrap();
        let at_cut = tr.raw.iter().find(|r| (r.time - m.t_cut).abs() < 1e-9).unwrap();
        let earlier = tr.raw.iter().filter(|r| r.time < m.t_cut);
        match m.kind {
            ScenarioKind::CutIn => {
                assert!(at_cut.frenet.t.abs() < 0.5);
                assert!(earlier.clone().any(|r| r.frenet.t.abs() > 1.5));
            }
            ScenarioKind::CutOut => {
                assert!(at_cut.frenet.t.abs() > 1.5);
                assert!(earlier.clone().any(|r| r.frenet.t.abs() < 0.5));
            }
        }
    }
}

#[test]
fn constant_speed_parameters() {
    let model = straight_model(600.0, 0, 2);
    let actors = [Actor { id: 7, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 15.0, cut_in_y(t)) }];
    let log = drive(20.0, 12.0, &actors);
    let (h, marks) = run(&log, &model);
    let mut c = cfg();
    let p = extract_parameters(&marks[0], &h, &model, &c).unwrap();
    assert_eq!(p.ego.speed.len(), 10);
    assert_eq!(p.ego.distance[0], 0.0);
    let len = p.window_length();
    for (i, d) in p.ego.distance.iter().enumerate() {
        assert!((d - 12.0 * i as f64 * len / 9.0).abs() < 0.2);
    }
    assert!(p.adversary.distance.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(p.adversary.initial_lane, -2);
    assert_eq!(p.final_lane, -1);
    // both at 12 m/s: the gap stays at 15 m
    assert!((p.triggering_distance - 15.0).abs() < 0.05);
    assert!((p.initiation_time - 10.0).abs() < 0.05);

    c.samples = 1;
    assert_eq!(extract_parameters(&marks[0], &h, &model, &c), Err(DetectError::TooFewSamples(1)));
}

#[test]
fn adversary_distance_closed_form() {
    // adversary at 15 m/s over a 13 s window, m = 10
    let model = straight_model(800.0, 0, 2);
    let actors = [Actor {
        id: 9,
        from: 0.0,
        to: 25.0,
        pos: |t| (15.0 * t + 5.0, -3.5 + 3.5 * 0.5 * (1.0 - cos(PI * ((t - 10.0) / 3.0).clamp(0.0, 1.0)))),
    }];
    let log = drive(25.0, 12.0, &actors);
    let (h, marks) = run(&log, &model);
    let p = extract_parameters(&marks[0], &h, &model, &cfg()).unwrap();
    assert!((p.window_length() - 13.0).abs() < 1e-9);
    for (i, d) in p.adversary.distance.iter().enumerate() {
        // the lateral motion adds under 1 cm of path length
        assert!((d - 15.0 * i as f64 * 13.0 / 9.0).abs() < 0.2, "{i}: {d}");
    }
    assert_eq!(p.trigger_rule, TriggerRule::GreaterThan);
}

#[test]
fn short_window_is_rejected() {
    let model = straight_model(400.0, 0, 2);
    let actors = [Actor { id: 7, from: 0.0, to: 20.0, pos: |t| (12.0 * t + 15.0, cut_in_y(t)) }];
    let (h, marks) = run(&drive(20.0, 12.0, &actors), &model);
    let mut m = marks[0];
    m.window_start = m.window_end - 2.0;
    assert!(matches!(extract_parameters(&m, &h, &model, &cfg()), Err(DetectError::InsufficientWindow { .. })));
}

mod properties {
    use super::*;
    use crate::road_model::{assign_lane, FrenetPose};
    use proptest::prelude::*;

    fn history(id: u32, ts: &[f64], gap: f64, model: &RoadModel) -> TrackHistory {
        let samples: Vec<HistorySample> = ts
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let frenet = FrenetPose { s: 10.0 * k as f64 + gap, t };
                let lane = assign_lane(frenet, model);
                HistorySample { time: k as f64, frenet, lane: lane.lane, out_of_map: lane.out_of_map, speed: 10.0, s_traveled: 10.0 * k as f64 }
            })
            .collect();
        TrackHistory { track_id: id, class: ObjectClass::Car, raw: samples.clone(), samples }
    }

    proptest! {
        #[test]
        fn marks_respect_thresholds_and_rearming(ts in proptest::collection::vec(-6.0f64..6.0, 4..40), gap in -5.0f64..30.0) {
            let model = straight_model(1000.0, 1, 2);
            let n = ts.len();
            let ego = history(0, &vec![0.0; n], 0.0, &model);
            let track = history(1, &ts, gap, &model);
            let h = Histories { ego, tracks: vec![track.clone()], dropped_tracks: 0, dropped_samples: 0 };
            let marks = detect_events(&h, &model, &DetectParams::from(&cfg()));
            for kind in [ScenarioKind::CutIn, ScenarioKind::CutOut] {
                let mut last: Option<f64> = None;
                for m in marks.iter().filter(|m| m.kind == kind) {
                    let k = m.t_cut as usize;
                    let t = ts[k].abs();
                    match kind {
                        ScenarioKind::CutIn => prop_assert!(t < 0.5),
                        ScenarioKind::CutOut => prop_assert!(t > 1.5),
                    }
                    // a candidate sample lies strictly between consecutive marks
                    let from = last.map_or(0, |l| l as usize + 1);
                    let requalified = (from..k).any(|i| match kind {
                        ScenarioKind::CutIn => ts[i].abs() > 1.5 && track.samples[i].lane != -1,
                        ScenarioKind::CutOut => ts[i].abs() < 0.5,
                    });
                    prop_assert!(requalified);
                    last = Some(m.t_cut);
                }
            }
        }
    }
}
