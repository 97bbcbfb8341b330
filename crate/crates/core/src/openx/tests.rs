use alloc::vec::Vec;

use super::*;
use crate::math::{cos, sin, Vec2};
use crate::road_model::fixtures::straight_model;
use crate::road_model::RoadModel;
use crate::scenario_detect::{ActorParameters, ScenarioKind, ScenarioParameters, TriggerRule};

fn with_curvatures(mut model: RoadModel, ks: &[f64]) -> RoadModel {
    let mut prev = 0.0;
    for (s, &k) in model.sections.iter_mut().zip(ks) {
        s.curvature = k;
        s.curvature_diff = k - prev;
        prev = k;
    }
    model
}

/// Independent midpoint-rule integration of a geometry element with 1e-4 m steps.
fn integrate(g: &Geometry) -> (Vec2, f64) {
    let (k0, k1) = g.shape.curvatures();
    let n = (g.length / 1e-4) as usize;
    let h = g.length / n as f64;
    let (mut x, mut y) = (g.x, g.y);
    for i in 0..n {
        let u = (i as f64 + 0.5) * h;
        let th = g.hdg + k0 * u + (k1 - k0) * u * u / (2.0 * g.length);
        x += cos(th) * h;
        y += sin(th) * h;
    }
    (Vec2::new(x, y), g.hdg + k0 * g.length + (k1 - k0) * g.length / 2.0)
}

#[test]
fn straight_two_lane_road() {
    let doc = build_opendrive(&straight_model(100.0, 0, 2), "straight").unwrap();
    assert_eq!(doc.road.geometries.len(), 4);
    assert_eq!(doc.road.lane_sections.len(), 4);
    for (g, ls) in doc.road.geometries.iter().zip(&doc.road.lane_sections) {
        assert_eq!(g.shape, GeometryShape::Line);
        let ids: Vec<i32> = ls.right.iter().map(|l| l.id).collect();
        assert_eq!(ids, [-1, -2]);
        assert!(ls.left.is_empty());
    }
    assert_eq!(doc.road.lane_center(10.0, -1), Some(0.0));
    assert_eq!(doc.road.lane_center(10.0, -2), Some(-3.5));
    assert_eq!(doc.road.lane_at(10.0, -1.75), Some(-2));
    assert_eq!(doc.road.lane_at(10.0, 1.75), Some(-1));
    assert_eq!(doc.road.lane_at(10.0, 1.76), None);
}

#[test]
fn element_shapes_follow_section_curvature() {
    let model = with_curvatures(straight_model(75.0, 0, 2), &[0.0, 0.01, 0.01]);
    let doc = build_opendrive(&model, "curve").unwrap();
    let shapes: Vec<GeometryShape> = doc.road.geometries.iter().map(|g| g.shape).collect();
    assert_eq!(shapes[0], GeometryShape::Line);
    assert_eq!(shapes[1], GeometryShape::Spiral { curv_start: 0.0, curv_end: 0.01 });
    assert_eq!(shapes[2], GeometryShape::Spiral { curv_start: 0.01, curv_end: 0.01 });
}

#[test]
fn chained_geometry_is_continuous() {
    let ks = [0.0, 0.004, -0.008, -0.008, 0.01, 0.0, 0.002];
    let model = with_curvatures(straight_model(170.0, 1, 2), &ks);
    let doc = build_opendrive(&model, "s_curve").unwrap();
    let gs = &doc.road.geometries;
    for w in gs.windows(2) {
        let (end, hdg) = integrate(&w[0]);
        assert!(end.distance(Vec2::new(w[1].x, w[1].y)) < 1e-6);
        assert!((crate::math::wrap_angle(hdg - w[1].hdg)).abs() < 1e-6);
    }
    let total: f64 = gs.iter().map(|g| g.length).sum();
    assert!((total - model.total_length()).abs() < 1e-9);
    assert!((doc.road.length - 170.0).abs() < 1e-9);
}

#[test]
fn empty_model_is_rejected() {
    let mut model = straight_model(50.0, 0, 2);
    model.sections.clear();
    assert_eq!(build_opendrive(&model, "x"), Err(OpenXError::EmptyModel));
}

fn constant_speed_params() -> ScenarioParameters {
    let m = 10;
    let actor = |v: f64, s0: f64, lane: i32| ActorParameters {
        initial_speed: v,
        initial_position: s0,
        initial_lane: lane,
        speed: alloc::vec![v; m],
        distance: (0..m).map(|i| v * i as f64 * 13.0 / 9.0).collect(),
    };
    ScenarioParameters {
        kind: ScenarioKind::CutIn,
        adversary_id: 7,
        t_cut: 12.0,
        window_start: 4.0,
        window_end: 17.0,
        ego: actor(12.0, 40.0, -1),
        adversary: actor(15.0, 50.0, -2),
        triggering_distance: 25.0,
        trigger_rule: TriggerRule::GreaterThan,
        initiation_time: 10.0,
        final_lane: -1,
        lane_change_duration: 3.0,
        m,
    }
}

#[test]
fn scenario_event_counts_and_values() {
    let p = constant_speed_params();
    let doc = build_openscenario(&p, "drive.xodr", "drive_scenario1").unwrap();
    let adv = &doc.maneuver_groups[1];
    assert_eq!(doc.maneuver_groups[0].events.len(), 9);
    assert_eq!(adv.events.len(), 10);
    for e in &adv.events[..9] {
        assert!(matches!(e.action, Action::AbsoluteSpeed { speed, .. } if speed == 15.0));
    }
    assert!(matches!(adv.events[9].action, Action::LaneChange { target_lane: -1, duration } if duration == 3.0));
    assert_eq!(doc.parameter("SourceTrack"), Some("7"));
}

#[test]
fn events_carry_the_sampled_values() {
    let mut p = constant_speed_params();
    p.adversary.speed = (0..10).map(|i| 10.0 + i as f64 * 0.5).collect();
    let doc = build_openscenario(&p, "drive.xodr", "s").unwrap();
    let mut distances = Vec::new();
    let mut speeds = Vec::new();
    for e in &doc.maneuver_groups[1].events {
        if let (Condition::TraveledDistance { value, .. }, Action::AbsoluteSpeed { speed, .. }) = (&e.condition, &e.action) {
            distances.push(*value);
            speeds.push(*speed);
        }
    }
    assert_eq!(distances, p.adversary.distance[..9]);
    assert_eq!(speeds, p.adversary.speed[1..]);
}

#[test]
fn cut_out_targets_the_final_lane() {
    let mut p = constant_speed_params();
    p.kind = ScenarioKind::CutOut;
    p.adversary.initial_lane = -1;
    p.final_lane = -2;
    let doc = build_openscenario(&p, "d.xodr", "s").unwrap();
    let last = doc.maneuver_groups[1].events.last().unwrap();
    assert!(matches!(last.action, Action::LaneChange { target_lane: -2, .. }));
}

#[test]
fn degenerate_lane_change_is_rejected() {
    let mut p = constant_speed_params();
    p.final_lane = -2;
    assert_eq!(build_openscenario(&p, "d.xodr", "s"), Err(OpenXError::NoLaneChange { lane: -2 }));
}

#[test]
fn empty_story_is_rejected() {
    let mut doc = build_openscenario(&constant_speed_params(), "d.xodr", "s").unwrap();
    for g in &mut doc.maneuver_groups {
        g.events.clear();
    }
    assert_eq!(doc.validate(), Err(OpenXError::EmptyStory));
}
