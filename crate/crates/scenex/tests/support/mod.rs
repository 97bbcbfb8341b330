//! Shared helpers for the integration suites: corpus runs and independent
//! oracles.
#![allow(dead_code)]

use scenex::synth::{corpus_drive, synthesize_drive, DriveSpec, GroundTruth, TruthEvent, CORPUS_DRIVES};
use scenex_core::ingest::DriveLog;
use scenex_core::math::Vec2;
use scenex_core::openx::{GeometryShape, OdrDocument};
use scenex_core::pipeline::{extract, Extraction};
use scenex_core::scenario_detect::ScenarioMark;
use scenex_core::PipelineConfig;

pub struct Drive {
    pub spec: DriveSpec,
    pub log: DriveLog,
    pub truth: GroundTruth,
}

pub fn synth(spec: DriveSpec, seed: u64) -> Drive {
    let (log, truth) = synthesize_drive(&spec, seed).expect("feasible spec");
    Drive { spec, log, truth }
}

pub fn corpus() -> Vec<Drive> {
    (0..CORPUS_DRIVES).map(|i| synth(corpus_drive(i), 100 + i as u64)).collect()
}

pub fn run(drive: &Drive, cfg: &PipelineConfig) -> Extraction {
    extract(&drive.log, cfg, &drive.spec.name).expect("pipeline succeeds")
}

/// The detected mark for a scripted event: same actor and kind.
pub fn matching_mark<'a>(event: &TruthEvent, marks: impl IntoIterator<Item = &'a ScenarioMark>) -> Option<&'a ScenarioMark> {
    marks.into_iter().find(|m| m.adversary_id == event.actor && m.kind == event.kind)
}

/// Composite Simpson integration of the direction along one planView element.
pub fn integrate_element(x: f64, y: f64, hdg: f64, length: f64, shape: GeometryShape, steps: usize) -> (Vec2, f64) {
    let (k0, k1) = match shape {
        GeometryShape::Line => (0.0, 0.0),
        GeometryShape::Spiral { curv_start, curv_end } => (curv_start, curv_end),
    };
    let theta = |u: f64| hdg + k0 * u + 0.5 * (k1 - k0) * u * u / length;
    let n = steps + steps % 2;
    let h = length / n as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for i in 0..=n {
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let t = theta(i as f64 * h);
        sx += w * t.cos();
        sy += w * t.sin();
    }
    (Vec2::new(x + sx * h / 3.0, y + sy * h / 3.0), theta(length))
}

/// Largest position and heading gaps between each element's integrated end
/// and its successor's start.
pub fn planview_gaps(doc: &OdrDocument) -> (f64, f64) {
    let g = &doc.road.geometries;
    let mut worst = (0.0f64, 0.0f64);
    for w in g.windows(2) {
        let (end, hdg) = integrate_element(w[0].x, w[0].y, w[0].hdg, w[0].length, w[0].shape, 2000);
        let gap = (end - Vec2::new(w[1].x, w[1].y)).norm();
        let d = (hdg - w[1].hdg).rem_euclid(std::f64::consts::TAU);
        let dh = d.min(std::f64::consts::TAU - d);
        worst = (worst.0.max(gap), worst.1.max(dh));
    }
    worst
}
