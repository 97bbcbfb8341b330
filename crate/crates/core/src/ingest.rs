//! Drive-log domain types and the base_link → odom transform.
//!
//! A drive log is a time-ordered sequence of [`SensorFrame`]s. Lidar points and
//! tracked objects are expressed in the moving vehicle frame (base_link); ego
//! poses are expressed in the fixed odom frame anchored at the start location.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{wrap_angle, Vec2, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LidarPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Reflectivity normalized to `[0, 1]`.
    pub intensity: f64,
}

impl LidarPoint {
    pub const fn new(x: f64, y: f64, z: f64, intensity: f64) -> Self {
        Self { x, y, z, intensity }
    }

    pub fn xy(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgoPose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Radians in `(-π, π]`.
    pub heading: f64,
    pub speed: f64,
}

impl EgoPose {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ObjectClass {
    Car,
    Truck,
    Other,
}

impl ObjectClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectClass::Car => "car",
            ObjectClass::Truck => "truck",
            ObjectClass::Other => "other",
        }
    }
}

/// One tracker output. Position and velocity are in base_link; the velocity is
/// the object's over-ground velocity expressed in base_link axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedObject {
    pub track_id: u32,
    pub class: ObjectClass,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorFrame {
    pub t: f64,
    pub ego: EgoPose,
    pub points: Vec<LidarPoint>,
    pub tracks: Vec<TrackedObject>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogMeta {
    pub frame_rate_hz: f64,
    pub sensor: String,
}

impl Default for LogMeta {
    fn default() -> Self {
        Self {
            frame_rate_hz: DEFAULT_FRAME_RATE_HZ,
            sensor: String::new(),
        }
    }
}

/// Default lidar frame rate (Hz).
pub const DEFAULT_FRAME_RATE_HZ: f64 = 25.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DriveLog {
    frames: Vec<SensorFrame>,
    meta: LogMeta,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("record {index}: {reason}")]
    Malformed { index: usize, reason: String },
    #[error("record {index}: timestamp {t} does not increase over previous {prev}")]
    NonMonotonic { index: usize, t: f64, prev: f64 },
    #[error("record {index}: missing required field `{field}`")]
    MissingField { index: usize, field: String },
    #[error("drive log needs at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("frame rate must be > 0, got {0}")]
    BadFrameRate(f64),
}

fn finite(vals: &[f64]) -> bool {
    vals.iter().all(|v| v.is_finite())
}

impl SensorFrame {
    /// Checks the per-frame invariants; `index` is used for error reporting.
    pub fn validate(&self, index: usize) -> Result<(), IngestError> {
        let bad = |reason: &str| IngestError::Malformed {
            index,
            reason: reason.into(),
        };
        if !finite(&[self.t, self.ego.t, self.ego.x, self.ego.y, self.ego.heading, self.ego.speed]) {
            return Err(bad("non-finite ego pose"));
        }
        if self.t != self.ego.t {
            return Err(bad("frame t differs from ego.t"));
        }
        if !(self.ego.heading > -PI && self.ego.heading <= PI) {
            return Err(bad("ego heading outside (-pi, pi]"));
        }
        if self.ego.speed < 0.0 {
            return Err(bad("negative ego speed"));
        }
        for p in &self.points {
            if !finite(&[p.x, p.y, p.z, p.intensity]) {
                return Err(bad("non-finite lidar point"));
            }
            if !(0.0..=1.0).contains(&p.intensity) {
                return Err(bad("intensity outside [0, 1]"));
            }
        }
        for (i, tr) in self.tracks.iter().enumerate() {
            if !finite(&[tr.x, tr.y, tr.vx, tr.vy]) {
                return Err(bad("non-finite track"));
            }
            if self.tracks[..i].iter().any(|o| o.track_id == tr.track_id) {
                return Err(bad("duplicate track id in frame"));
            }
        }
        Ok(())
    }
}

impl DriveLog {
    /// Builds a log, verifying every invariant.
    pub fn new(frames: Vec<SensorFrame>, meta: LogMeta) -> Result<Self, IngestError> {
        if !(meta.frame_rate_hz.is_finite() && meta.frame_rate_hz > 0.0) {
            return Err(IngestError::BadFrameRate(meta.frame_rate_hz));
        }
        if frames.len() < 2 {
            return Err(IngestError::TooFewFrames(frames.len()));
        }
        for (i, f) in frames.iter().enumerate() {
            f.validate(i)?;
            if i > 0 && f.t <= frames[i - 1].t {
                return Err(IngestError::NonMonotonic {
                    index: i,
                    t: f.t,
                    prev: frames[i - 1].t,
                });
            }
        }
        Ok(Self { frames, meta })
    }

    pub fn frames(&self) -> &[SensorFrame] {
        &self.frames
    }

    pub fn meta(&self) -> &LogMeta {
        &self.meta
    }

    pub fn start_time(&self) -> f64 {
        self.frames[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.frames[self.frames.len() - 1].t
    }

    pub fn ego_poses(&self) -> Vec<EgoPose> {
        self.frames.iter().map(|f| f.ego).collect()
    }

    pub fn into_parts(self) -> (Vec<SensorFrame>, LogMeta) {
        (self.frames, self.meta)
    }
}

/// Transforms a base_link position into the odom frame.
pub fn to_odom(p: Vec2, pose: &EgoPose) -> Vec2 {
    p.rotate(pose.heading) + pose.position()
}

/// Inverse of [`to_odom`].
pub fn to_base_link(p: Vec2, pose: &EgoPose) -> Vec2 {
    (p - pose.position()).rotate(-pose.heading)
}

/// Rotates a base_link velocity into odom axes (no translation).
pub fn velocity_to_odom(v: Vec2, pose: &EgoPose) -> Vec2 {
    v.rotate(pose.heading)
}

pub fn velocity_to_base_link(v: Vec2, pose: &EgoPose) -> Vec2 {
    v.rotate(-pose.heading)
}

/// Odom-frame position and velocity of a tracked object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdomTrack {
    pub track_id: u32,
    pub class: ObjectClass,
    pub position: Vec2,
    pub velocity: Vec2,
}

pub fn track_to_odom(obj: &TrackedObject, pose: &EgoPose) -> OdomTrack {
    OdomTrack {
        track_id: obj.track_id,
        class: obj.class,
        position: to_odom(Vec2::new(obj.x, obj.y), pose),
        velocity: velocity_to_odom(Vec2::new(obj.vx, obj.vy), pose),
    }
}

/// Normalizes a heading into `(-π, π]`.
pub fn normalize_heading(h: f64) -> f64 {
    wrap_angle(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::FRAC_PI_2;
    use proptest::prelude::*;

    fn pose(x: f64, y: f64, heading: f64) -> EgoPose {
        EgoPose { t: 0.0, x, y, heading, speed: 0.0 }
    }

    fn frame(t: f64) -> SensorFrame {
        SensorFrame {
            t,
            ego: EgoPose { t, x: t, y: 0.0, heading: 0.0, speed: 1.0 },
            points: Vec::new(),
            tracks: Vec::new(),
        }
    }

    #[test]
    fn to_odom_examples() {
        assert_eq!(to_odom(Vec2::new(1.0, 0.0), &pose(0.0, 0.0, 0.0)), Vec2::new(1.0, 0.0));
        assert_eq!(to_odom(Vec2::new(1.0, 0.0), &pose(10.0, 0.0, 0.0)), Vec2::new(11.0, 0.0));
        let q = to_odom(Vec2::new(1.0, 0.0), &pose(0.0, 0.0, FRAC_PI_2));
        assert!((q.x - 0.0).abs() < 1e-12 && (q.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn velocity_is_rotated_not_translated() {
        let p = pose(100.0, -50.0, FRAC_PI_2);
        let v = velocity_to_odom(Vec2::new(2.0, 0.0), &p);
        assert!(v.x.abs() < 1e-12 && (v.y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn minimal_log_and_ordering_errors() {
        let log = DriveLog::new(alloc::vec![frame(0.0), frame(0.04)], LogMeta::default()).unwrap();
        assert_eq!(log.frames().len(), 2);
        let err = DriveLog::new(alloc::vec![frame(1.0), frame(0.5)], LogMeta::default()).unwrap_err();
        assert!(matches!(err, IngestError::NonMonotonic { index: 1, .. }));
        assert!(matches!(
            DriveLog::new(alloc::vec![frame(0.0)], LogMeta::default()),
            Err(IngestError::TooFewFrames(1))
        ));
    }

    #[test]
    fn rejects_bad_intensity_and_duplicate_ids() {
        let mut f = frame(0.0);
        f.points.push(LidarPoint::new(1.0, 0.0, 0.0, 1.5));
        assert!(f.validate(0).is_err());
        let mut f = frame(0.0);
        let tr = TrackedObject { track_id: 3, class: ObjectClass::Car, x: 1.0, y: 0.0, vx: 0.0, vy: 0.0 };
        f.tracks.push(tr);
        f.tracks.push(tr);
        assert!(f.validate(0).is_err());
    }

    proptest! {
        #[test]
        fn rigid_transform_preserves_distance(
            ax in -100.0..100.0f64, ay in -100.0..100.0f64,
            bx in -100.0..100.0f64, by in -100.0..100.0f64,
            px in -1e3..1e3f64, py in -1e3..1e3f64, h in -3.14..3.14f64,
        ) {
            let pose = pose(px, py, h);
            let (a, b) = (Vec2::new(ax, ay), Vec2::new(bx, by));
            let d0 = a.distance(b);
            let d1 = to_odom(a, &pose).distance(to_odom(b, &pose));
            prop_assert!((d0 - d1).abs() < 1e-9);
            let back = to_odom(to_base_link(a, &pose), &pose);
            prop_assert!(back.distance(a) < 1e-9);
        }
    }
}
