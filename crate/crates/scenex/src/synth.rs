//! Scripted synthetic drives with ground truth, for tests and the `synth`
//! subcommand.
//!
//! The road is described by the curvature profile of the ego lane centre,
//! which doubles as the ego path. Each frame carries one road-aligned lidar
//! cross-section a fixed distance ahead of the ego, and one track per visible
//! actor. Actors follow their lane centre and change lanes with a cosine
//! lateral profile, so the lane-edge crossing falls at the midpoint of the
//! manoeuvre.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use scenex_core::ingest::{
    to_base_link, velocity_to_base_link, DriveLog, EgoPose, LidarPoint, LogMeta, ObjectClass, SensorFrame,
    TrackedObject,
};
use scenex_core::math::{wrap_angle, Vec2};
use scenex_core::openx::spiral::pose_at;
use scenex_core::scenario_detect::ScenarioKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("infeasible drive spec: {0}")]
    Infeasible(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
}

fn infeasible<T>(msg: impl Into<String>) -> Result<T, SynthError> {
    Err(SynthError::Infeasible(msg.into()))
}

/// Speed over time: constant part, a linear acceleration window and a sinusoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedProfile {
    pub initial: f64,
    pub accel: f64,
    pub accel_start: f64,
    pub accel_end: f64,
    pub amplitude: f64,
    pub period: f64,
    pub phase: f64,
}

impl Default for SpeedProfile {
    fn default() -> Self {
        Self { initial: 10.0, accel: 0.0, accel_start: 0.0, accel_end: 0.0, amplitude: 0.0, period: 10.0, phase: 0.0 }
    }
}

impl SpeedProfile {
    pub fn constant(v: f64) -> Self {
        Self { initial: v, ..Self::default() }
    }

    fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn speed(&self, t: f64) -> f64 {
        let ramp = (t - self.accel_start).clamp(0.0, (self.accel_end - self.accel_start).max(0.0));
        self.initial + self.accel * ramp + self.amplitude * (self.omega() * t + self.phase).sin()
    }

    /// Distance covered over `[0, t]`.
    pub fn distance(&self, t: f64) -> f64 {
        let span = (self.accel_end - self.accel_start).max(0.0);
        let u = (t - self.accel_start).clamp(0.0, span);
        let ramp = 0.5 * self.accel * u * u + self.accel * span * (t - self.accel_end).max(0.0);
        let sine = self.amplitude / self.omega() * (self.phase.cos() - (self.omega() * t + self.phase).cos());
        self.initial * t + ramp + sine
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvePiece {
    pub length: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoadSpec {
    pub lane_width: f64,
    /// Lanes left of the ego lane.
    pub lanes_left: usize,
    /// The ego lane and the lanes right of it.
    pub lanes_right: usize,
    /// Curvature profile of the ego lane centre; straight beyond its end.
    pub curvature: Vec<CurvePiece>,
}

impl Default for RoadSpec {
    fn default() -> Self {
        Self { lane_width: 3.5, lanes_left: 1, lanes_right: 1, curvature: Vec::new() }
    }
}

impl RoadSpec {
    pub fn lane_exists(&self, id: i32) -> bool {
        (id < 0 && (-id) as usize <= self.lanes_right) || (id > 0 && id as usize <= self.lanes_left)
    }

    pub fn lane_center(&self, id: i32) -> f64 {
        if id > 0 {
            id as f64 * self.lane_width
        } else {
            (id + 1) as f64 * self.lane_width
        }
    }

    /// Lateral offsets of all markings, right to left.
    pub fn marking_offsets(&self) -> Vec<f64> {
        let w = self.lane_width;
        let right = -(self.lanes_right as f64 - 0.5) * w;
        (0..=self.lanes_left + self.lanes_right).map(|k| right + k as f64 * w).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Maneuver {
    CutIn,
    CutOut,
    KeepLane,
    /// Enters the ego lane from outside the road, as from a side road.
    JoinFromSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorScript {
    pub id: u32,
    pub maneuver: Maneuver,
    /// Lane at the start; ignored for `join_from_side`.
    #[serde(default = "ego_lane")]
    pub lane: i32,
    #[serde(default = "ego_lane")]
    pub target_lane: i32,
    /// Lateral offset the actor starts from when joining from the side (m).
    #[serde(default)]
    pub side_offset: f64,
    /// Time the lateral manoeuvre starts (s).
    #[serde(default)]
    pub start: f64,
    #[serde(default = "three")]
    pub duration: f64,
    /// Longitudinal offset from the ego at t = 0 (m).
    pub gap: f64,
    pub speed: SpeedProfile,
    #[serde(default)]
    pub appear: f64,
    #[serde(default)]
    pub disappear: Option<f64>,
}

fn ego_lane() -> i32 {
    -1
}

fn three() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LidarSpec {
    /// Distance of the scanned cross-section ahead of the ego (m).
    pub scan_ahead: f64,
    pub spacing: f64,
    pub dash_length: f64,
    pub gap_length: f64,
    pub marking_width: f64,
    pub curb_height: f64,
    pub shoulder: f64,
    /// Scanned width beyond each curb (m).
    pub margin: f64,
    pub road_intensity: f64,
    pub road_intensity_sd: f64,
    pub marking_intensity: [f64; 2],
}

impl Default for LidarSpec {
    fn default() -> Self {
        Self {
            scan_ahead: 8.0,
            spacing: 0.1,
            dash_length: 6.0,
            gap_length: 3.0,
            marking_width: 0.15,
            curb_height: 0.15,
            shoulder: 0.5,
            margin: 2.0,
            road_intensity: 0.2,
            road_intensity_sd: 0.02,
            marking_intensity: [0.85, 0.95],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub name: String,
    pub duration: f64,
    #[serde(default = "default_rate")]
    pub frame_rate_hz: f64,
    /// Standard deviation of the planar lidar point noise (m).
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub road: RoadSpec,
    pub ego_speed: SpeedProfile,
    #[serde(default)]
    pub actors: Vec<ActorScript>,
    #[serde(default)]
    pub lidar: LidarSpec,
}

fn default_rate() -> f64 {
    25.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthEvent {
    pub actor: u32,
    pub kind: ScenarioKind,
    pub start: f64,
    pub duration: f64,
    /// Time the actor crosses the ego lane edge.
    pub crossing_time: f64,
    pub from_lane: i32,
    pub to_lane: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub name: String,
    pub seed: u64,
    pub lane_width: f64,
    pub lanes_left: usize,
    pub lanes_right: usize,
    pub marking_offsets: Vec<f64>,
    /// Odom polylines of every marking, sampled each metre along the ego path.
    pub markings: Vec<Vec<[f64; 2]>>,
    pub events: Vec<TruthEvent>,
    /// Crossing times of side-road joins into the ego lane.
    pub side_joins: Vec<TruthEvent>,
}

/// Ego-lane centre line: chained linear-curvature pieces, straight beyond.
struct Centerline {
    pieces: Vec<(f64, Vec2, f64, CurvePiece)>,
}

impl Centerline {
    fn new(profile: &[CurvePiece]) -> Self {
        let mut pieces = Vec::new();
        let (mut s, mut p, mut h) = (0.0, Vec2::ZERO, 0.0);
        for c in profile {
            pieces.push((s, p, h, *c));
            let (q, hq) = pose_at(p, h, c.start, c.end, c.length, c.length, 1e-11);
            s += c.length;
            p = q;
            h = hq;
        }
        pieces.push((s, p, h, CurvePiece { length: f64::INFINITY, start: 0.0, end: 0.0 }));
        Self { pieces }
    }

    /// Position, heading and curvature at arc length `s` (straight before 0).
    fn eval(&self, s: f64) -> (Vec2, f64, f64) {
        if s < 0.0 {
            return (Vec2::new(s, 0.0), 0.0, 0.0);
        }
        let i = self.pieces.partition_point(|pc| pc.0 <= s).saturating_sub(1);
        let (s0, p, h, c) = self.pieces[i];
        let u = s - s0;
        if c.length.is_infinite() {
            return (p + Vec2::from_heading(h) * u, h, 0.0);
        }
        let (q, hq) = pose_at(p, h, c.start, c.end, c.length, u, 1e-11);
        (q, hq, c.start + (c.end - c.start) * u / c.length)
    }

    /// Point offset `t` to the left of the centre line at `s`.
    fn point(&self, s: f64, t: f64) -> Vec2 {
        let (p, h, _) = self.eval(s);
        p + Vec2::from_heading(h).perp() * t
    }
}

struct ActorMotion<'a> {
    script: &'a ActorScript,
    from: f64,
    to: f64,
}

impl ActorMotion<'_> {
    fn lateral(&self, t: f64) -> (f64, f64) {
        let sc = self.script;
        let u = ((t - sc.start) / sc.duration).clamp(0.0, 1.0);
        let offset = self.from + (self.to - self.from) * 0.5 * (1.0 - (PI * u).cos());
        let rate = if t > sc.start && t < sc.start + sc.duration {
            (self.to - self.from) * 0.5 * PI / sc.duration * (PI * u).sin()
        } else {
            0.0
        };
        (offset, rate)
    }

    fn visible(&self, t: f64) -> bool {
        t >= self.script.appear - 1e-9 && self.script.disappear.is_none_or(|d| t <= d + 1e-9)
    }
}

fn validate(spec: &DriveSpec) -> Result<(), SynthError> {
    let road = &spec.road;
    if road.lanes_left + road.lanes_right < 2 || road.lanes_right < 1 {
        return infeasible("the road needs at least two lanes including the ego lane");
    }
    if !(road.lane_width > 0.0) || !(spec.duration > 0.0) || !(spec.frame_rate_hz > 0.0) {
        return infeasible("lane width, duration and frame rate must be positive");
    }
    if spec.noise_sigma < 0.0 {
        return infeasible("noise_sigma must not be negative");
    }
    let positive = |p: &SpeedProfile| (0..=(spec.duration * 10.0) as usize).all(|k| p.speed(k as f64 * 0.1) > 0.0);
    if !positive(&spec.ego_speed) {
        return infeasible("ego speed must stay positive");
    }
    let mut ids: Vec<u32> = spec.actors.iter().map(|a| a.id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return infeasible("actor ids must be unique");
    }
    for a in &spec.actors {
        let check = |lane: i32| {
            if road.lane_exists(lane) {
                Ok(())
            } else {
                infeasible(format!("actor {} uses lane {lane}, which the road does not have", a.id))
            }
        };
        match a.maneuver {
            Maneuver::CutIn => {
                check(a.lane)?;
                if a.lane == -1 || a.target_lane != -1 {
                    return infeasible(format!("cut_in actor {} must move from another lane into lane -1", a.id));
                }
            }
            Maneuver::CutOut => {
                check(a.target_lane)?;
                if a.lane != -1 || a.target_lane == -1 {
                    return infeasible(format!("cut_out actor {} must leave lane -1", a.id));
                }
            }
            Maneuver::KeepLane => {
                check(a.lane)?;
                if a.target_lane != a.lane && a.target_lane != -1 {
                    return infeasible(format!("keep_lane actor {} cannot have a target lane", a.id));
                }
            }
            Maneuver::JoinFromSide => check(a.target_lane)?,
        }
        if !(a.duration > 0.0) || !positive(&a.speed) {
            return infeasible(format!("actor {} needs a positive duration and speed", a.id));
        }
    }
    Ok(())
}

fn motion<'a>(road: &RoadSpec, a: &'a ActorScript) -> ActorMotion<'a> {
    let (from, to) = match a.maneuver {
        Maneuver::KeepLane => (road.lane_center(a.lane), road.lane_center(a.lane)),
        Maneuver::JoinFromSide => (a.side_offset, road.lane_center(a.target_lane)),
        _ => (road.lane_center(a.lane), road.lane_center(a.target_lane)),
    };
    ActorMotion { script: a, from, to }
}

fn truth_event(a: &ActorScript, kind: ScenarioKind) -> TruthEvent {
    TruthEvent {
        actor: a.id,
        kind,
        start: a.start,
        duration: a.duration,
        crossing_time: a.start + 0.5 * a.duration,
        from_lane: a.lane,
        to_lane: a.target_lane,
    }
}

/// Generates the drive log and its ground truth.
pub fn synthesize_drive(spec: &DriveSpec, seed: u64) -> Result<(DriveLog, GroundTruth), SynthError> {
    validate(spec)?;
    let road = &spec.road;
    let lidar = &spec.lidar;
    let line = Centerline::new(&road.curvature);
    let markings = road.marking_offsets();
    let motions: Vec<ActorMotion> = spec.actors.iter().map(|a| motion(road, a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.noise_sigma.max(0.0)).expect("finite sigma");
    let road_intensity = Normal::new(lidar.road_intensity, lidar.road_intensity_sd).expect("finite sd");
    let right_edge = markings[0] - lidar.shoulder;
    let left_edge = markings[markings.len() - 1] + lidar.shoulder;
    let period = lidar.dash_length + lidar.gap_length;

    let n = (spec.duration * spec.frame_rate_hz).round() as usize;
    let mut frames = Vec::with_capacity(n);
    for k in 0..n {
        let time = k as f64 / spec.frame_rate_hz;
        let s_ego = spec.ego_speed.distance(time);
        let (pos, heading, _) = line.eval(s_ego);
        let ego = EgoPose { t: time, x: pos.x, y: pos.y, heading: wrap_angle(heading), speed: spec.ego_speed.speed(time) };

        let s_scan = s_ego + lidar.scan_ahead;
        let start = right_edge - lidar.margin + rng.random::<f64>() * lidar.spacing;
        let count = ((left_edge + lidar.margin - start) / lidar.spacing) as usize + 1;
        let mut points = Vec::with_capacity(count);
        for j in 0..count {
            let t = start + j as f64 * lidar.spacing;
            let on_marking = markings.iter().enumerate().any(|(m, &mt)| {
                let phase = 2.0 * m as f64;
                (t - mt).abs() <= 0.5 * lidar.marking_width && (s_scan + phase).rem_euclid(period) < lidar.dash_length
            });
            let z = if t < right_edge || t > left_edge { lidar.curb_height } else { 0.0 };
            let intensity = if on_marking {
                rng.random_range(lidar.marking_intensity[0]..=lidar.marking_intensity[1])
            } else {
                road_intensity.sample(&mut rng).clamp(0.0, 0.3)
            };
            let odom = line.point(s_scan, t);
            let mut local = to_base_link(odom, &ego);
            if spec.noise_sigma > 0.0 {
                local = local + Vec2::new(noise.sample(&mut rng), noise.sample(&mut rng));
            }
            points.push(LidarPoint::new(local.x, local.y, z, intensity));
        }

        let mut tracks = Vec::new();
        for m in &motions {
            if !m.visible(time) {
                continue;
            }
            let s = m.script.gap + m.script.speed.distance(time);
            let v = m.script.speed.speed(time);
            let (t, t_rate) = m.lateral(time);
            let (_, h, kappa) = line.eval(s);
            let odom = line.point(s, t);
            let tangent = Vec2::from_heading(h);
            let velocity = tangent * (v * (1.0 - kappa * t)) + tangent.perp() * t_rate;
            let local = to_base_link(odom, &ego);
            let lv = velocity_to_base_link(velocity, &ego);
            tracks.push(TrackedObject { track_id: m.script.id, class: ObjectClass::Car, x: local.x, y: local.y, vx: lv.x, vy: lv.y });
        }
        frames.push(SensorFrame { t: time, ego, points, tracks });
    }
    let log = DriveLog::new(frames, LogMeta { frame_rate_hz: spec.frame_rate_hz, sensor: format!("synthetic:{}", spec.name) })
        .map_err(|e| SynthError::Infeasible(e.to_string()))?;

    let s_end = spec.ego_speed.distance(spec.duration) + lidar.scan_ahead;
    let samples = s_end.ceil() as usize;
    let truth = GroundTruth {
        name: spec.name.clone(),
        seed,
        lane_width: road.lane_width,
        lanes_left: road.lanes_left,
        lanes_right: road.lanes_right,
        markings: markings
            .iter()
            .map(|&t| {
                (0..=samples)
                    .map(|i| {
                        let p = line.point(i as f64, t);
                        [p.x, p.y]
                    })
                    .collect()
            })
            .collect(),
        marking_offsets: markings,
        events: spec
            .actors
            .iter()
            .filter_map(|a| match a.maneuver {
                Maneuver::CutIn => Some(truth_event(a, ScenarioKind::CutIn)),
                Maneuver::CutOut => Some(truth_event(a, ScenarioKind::CutOut)),
                _ => None,
            })
            .collect(),
        side_joins: spec
            .actors
            .iter()
            .filter(|a| a.maneuver == Maneuver::JoinFromSide)
            .map(|a| {
                let m = motion(road, a);
                // the edge of the ego lane nearest the side the actor comes from
                let edge = if m.from < m.to { m.to - 0.5 * road.lane_width } else { m.to + 0.5 * road.lane_width };
                let u = ((edge - m.from) / (m.to - m.from)).clamp(0.0, 1.0);
                let crossing = a.start + a.duration * (1.0 - 2.0 * u).acos() / PI;
                TruthEvent { crossing_time: crossing, ..truth_event(a, ScenarioKind::CutIn) }
            })
            .collect(),
    };
    Ok((log, truth))
}

fn cut(id: u32, maneuver: Maneuver, lane: i32, target_lane: i32, crossing: f64, gap: f64, speed: SpeedProfile) -> ActorScript {
    ActorScript {
        id,
        maneuver,
        lane,
        target_lane,
        side_offset: 0.0,
        start: crossing - 1.5,
        duration: 3.0,
        gap,
        speed,
        appear: 0.0,
        disappear: None,
    }
}

fn sine(initial: f64, amplitude: f64, period: f64, phase: f64) -> SpeedProfile {
    SpeedProfile { initial, amplitude, period, phase, ..SpeedProfile::default() }
}

fn s_curve(k: f64) -> Vec<CurvePiece> {
    let p = |length, start, end| CurvePiece { length, start, end };
    vec![p(60.0, 0.0, 0.0), p(40.0, 0.0, k), p(80.0, k, k), p(60.0, k, -k), p(80.0, -k, -k), p(40.0, -k, 0.0)]
}

/// One drive of the detection corpus: two cut-ins and one cut-out on a
/// three-lane road with the ego in the middle lane.
pub fn corpus_drive(index: usize) -> DriveSpec {
    let i = index as f64;
    let curvature = match index % 6 {
        0 | 1 => Vec::new(),
        2 => s_curve(0.005),
        3 => s_curve(0.01),
        4 => {
            let p = |length, start, end| CurvePiece { length, start, end };
            vec![p(50.0, 0.0, 0.0), p(50.0, 0.0, 0.01), p(150.0, 0.01, 0.01), p(50.0, 0.01, 0.0)]
        }
        _ => s_curve(-0.006),
    };
    let v = 11.0 + 0.5 * i;
    DriveSpec {
        name: format!("corpus_{index}"),
        duration: 60.0,
        frame_rate_hz: 25.0,
        noise_sigma: 0.05,
        road: RoadSpec { lane_width: 3.5, lanes_left: 1, lanes_right: 2, curvature },
        ego_speed: sine(v, 0.4, 11.0, i),
        // Every adversary keeps at least 0.3 m/s of relative speed, so the
        // ego-adversary gap crosses the triggering distance cleanly.
        actors: vec![
            cut(10, Maneuver::CutIn, 1, -1, 14.0 + 0.3 * i, 8.0, sine(v + 1.5, 0.8, 7.0, 0.5 * i)),
            cut(20, Maneuver::CutOut, -1, -2, 30.0 - 0.2 * i, 45.0, sine(v - 1.2, 0.6, 6.0, 1.0 + i)),
            cut(30, Maneuver::CutIn, -2, -1, 46.0 + 0.2 * i, 80.0, sine(v - 1.5, 0.8, 8.0, 2.0 + i)),
        ],
        lidar: LidarSpec::default(),
    }
}

pub const CORPUS_DRIVES: usize = 6;

/// Side-road join into the ego lane: a cut-in the detector cannot tell from a
/// real one.
pub fn junction_join() -> DriveSpec {
    DriveSpec {
        name: "junction_join".into(),
        duration: 30.0,
        frame_rate_hz: 25.0,
        noise_sigma: 0.05,
        road: RoadSpec { lane_width: 3.5, lanes_left: 1, lanes_right: 1, curvature: Vec::new() },
        ego_speed: SpeedProfile::constant(10.0),
        actors: vec![ActorScript {
            id: 7,
            maneuver: Maneuver::JoinFromSide,
            lane: -1,
            target_lane: -1,
            side_offset: -9.0,
            start: 11.0,
            duration: 4.0,
            gap: 20.0,
            speed: SpeedProfile::constant(10.5),
            appear: 9.0,
            disappear: None,
        }],
        lidar: LidarSpec::default(),
    }
}

fn plain(name: &str, duration: f64, curvature: Vec<CurvePiece>, actors: Vec<ActorScript>) -> DriveSpec {
    DriveSpec {
        name: name.into(),
        duration,
        frame_rate_hz: 25.0,
        noise_sigma: 0.0,
        road: RoadSpec { lane_width: 3.5, lanes_left: 1, lanes_right: 1, curvature },
        ego_speed: SpeedProfile::constant(10.0),
        actors,
        lidar: LidarSpec::default(),
    }
}

/// Names accepted by [`fixture`].
pub const FIXTURES: &[&str] =
    &["two_lane_cut_in", "keep_lane", "straight_road", "arc_road", "junction_join", "corpus_0", "corpus_1", "corpus_2", "corpus_3", "corpus_4", "corpus_5"];

pub fn fixture(name: &str) -> Result<DriveSpec, SynthError> {
    let keep = ActorScript {
        id: 1,
        maneuver: Maneuver::KeepLane,
        lane: 1,
        target_lane: 1,
        side_offset: 0.0,
        start: 0.0,
        duration: 3.0,
        gap: 10.0,
        speed: SpeedProfile::constant(10.0),
        appear: 0.0,
        disappear: None,
    };
    Ok(match name {
        "two_lane_cut_in" => {
            let mut spec = plain(name, 25.0, Vec::new(), vec![cut(1, Maneuver::CutIn, 1, -1, 11.5, 12.0, SpeedProfile::constant(11.0))]);
            spec.noise_sigma = 0.05;
            spec
        }
        "keep_lane" => plain(name, 10.0, Vec::new(), vec![keep]),
        "straight_road" => plain(name, 12.0, Vec::new(), Vec::new()),
        "arc_road" => plain(name, 25.0, vec![CurvePiece { length: 1000.0, start: 0.01, end: 0.01 }], Vec::new()),
        "junction_join" => junction_join(),
        _ => match name.strip_prefix("corpus_").and_then(|i| i.parse::<usize>().ok()) {
            Some(i) if i < CORPUS_DRIVES => corpus_drive(i),
            _ => return Err(SynthError::UnknownFixture(name.into())),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use scenex_core::ingest::to_odom;

    #[test]
    fn speed_profile_distance_matches_quadrature() {
        let p = SpeedProfile { initial: 8.0, accel: 0.5, accel_start: 2.0, accel_end: 6.0, amplitude: 1.2, period: 7.0, phase: 0.4 };
        let n = 20_000;
        let h = 12.0 / n as f64;
        let sum: f64 = (0..n).map(|k| p.speed((k as f64 + 0.5) * h) * h).sum();
        assert!((sum - p.distance(12.0)).abs() < 1e-6);
    }

    #[test]
    fn keep_lane_fixture_has_250_frames() {
        let (log, truth) = synthesize_drive(&fixture("keep_lane").unwrap(), 1).unwrap();
        assert_eq!(log.frames().len(), 250);
        assert!(truth.events.is_empty());
    }

    #[test]
    fn cut_in_fixture_crosses_at_midpoint() {
        let (_, truth) = synthesize_drive(&fixture("two_lane_cut_in").unwrap(), 1).unwrap();
        assert_eq!(truth.events.len(), 1);
        assert_eq!(truth.events[0].crossing_time, 11.5);
        assert_eq!(truth.events[0].kind, ScenarioKind::CutIn);
    }

    #[test]
    fn seeds_change_noise_only() {
        let spec = fixture("two_lane_cut_in").unwrap();
        let (a, ta) = synthesize_drive(&spec, 1).unwrap();
        let (b, tb) = synthesize_drive(&spec, 2).unwrap();
        assert_eq!(ta.events, tb.events);
        assert_eq!(ta.markings, tb.markings);
        assert_eq!(a.frames()[5].tracks, b.frames()[5].tracks);
        assert_ne!(a.frames()[5].points, b.frames()[5].points);
        assert_eq!(a, synthesize_drive(&spec, 1).unwrap().0);
    }

    #[test]
    fn rejects_missing_lane() {
        let mut spec = fixture("two_lane_cut_in").unwrap();
        spec.actors[0].lane = -5;
        spec.actors[0].maneuver = Maneuver::KeepLane;
        spec.actors[0].target_lane = -5;
        assert!(matches!(synthesize_drive(&spec, 0), Err(SynthError::Infeasible(_))));
    }

    #[test]
    fn arc_track_stays_on_lane_center() {
        let mut spec = fixture("arc_road").unwrap();
        let mut keep = fixture("keep_lane").unwrap().actors.remove(0);
        keep.speed = SpeedProfile::constant(12.0);
        spec.actors.push(keep);
        let (log, _) = synthesize_drive(&spec, 0).unwrap();
        // On a circle of radius 100 centred at (0, 100), lane +1 has radius 96.5.
        for f in log.frames().iter().step_by(25) {
            let tr = f.tracks[0];
            let p = to_odom(Vec2::new(tr.x, tr.y), &f.ego);
            assert!(((p - Vec2::new(0.0, 100.0)).norm() - 96.5).abs() < 1e-6);
            let v = scenex_core::ingest::velocity_to_odom(Vec2::new(tr.vx, tr.vy), &f.ego);
            assert!((v.norm() - 12.0 * (1.0 - 0.01 * 3.5)).abs() < 1e-6);
        }
    }

    #[test]
    fn markings_are_where_the_scan_sees_them() {
        let (log, truth) = synthesize_drive(&fixture("straight_road").unwrap(), 3).unwrap();
        let bright: Vec<f64> = log.frames()[0].points.iter().filter(|p| p.intensity > 0.5).map(|p| p.y).collect();
        assert!(!bright.is_empty());
        for y in bright {
            assert!(truth.marking_offsets.iter().any(|&m| (m - y).abs() <= 0.075 + 1e-9));
        }
    }
}
