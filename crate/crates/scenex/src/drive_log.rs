//! JSON Lines drive-log format.
//!
//! The first line is a header object (`frame_rate_hz`, `format_version`, and
//! optionally `sensor` and `intensity_scale`); every further line is one
//! frame. Writers emit keys in a fixed order, readers accept any order.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use scenex_core::ingest::{DriveLog, EgoPose, IngestError, LidarPoint, LogMeta, ObjectClass, SensorFrame, TrackedObject};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: String },
    #[error("line {line}: unsupported format_version {version}")]
    Version { line: usize, version: u32 },
    #[error("log has no header line")]
    Empty,
    #[error("{0}")]
    Invalid(#[from] IngestError),
}

impl LogError {
    /// 1-based line number the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            LogError::Malformed { line, .. } | LogError::MissingField { line, .. } | LogError::Version { line, .. } => Some(*line),
            LogError::Invalid(e) => frame_index(e).map(|i| i + 2),
            _ => None,
        }
    }
}

fn frame_index(e: &IngestError) -> Option<usize> {
    match e {
        IngestError::Malformed { index, .. } | IngestError::NonMonotonic { index, .. } | IngestError::MissingField { index, .. } => {
            Some(*index)
        }
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    frame_rate_hz: f64,
    format_version: u32,
    #[serde(default)]
    sensor: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    intensity_scale: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Serialize, Deserialize)]
struct EgoRecord {
    t: f64,
    x: f64,
    y: f64,
    heading: f64,
    speed: f64,
}

#[derive(Serialize, Deserialize)]
struct TrackRecord {
    id: u32,
    class: ObjectClass,
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
}

#[derive(Serialize, Deserialize)]
struct FrameRecord {
    t: f64,
    ego: EgoRecord,
    points: Vec<[f64; 4]>,
    tracks: Vec<TrackRecord>,
}

fn parse_error(line: usize, e: serde_json::Error) -> LogError {
    let message = e.to_string();
    if let Some(rest) = message.strip_prefix("missing field `") {
        if let Some(end) = rest.find('`') {
            return LogError::MissingField { line, field: rest[..end].to_string() };
        }
    }
    LogError::Malformed { line, message }
}

fn frame_from(r: FrameRecord, scale: f64) -> SensorFrame {
    SensorFrame {
        t: r.t,
        ego: EgoPose { t: r.ego.t, x: r.ego.x, y: r.ego.y, heading: r.ego.heading, speed: r.ego.speed },
        points: r.points.iter().map(|p| LidarPoint::new(p[0], p[1], p[2], p[3] / scale)).collect(),
        tracks: r
            .tracks
            .into_iter()
            .map(|t| TrackedObject { track_id: t.id, class: t.class, x: t.x, y: t.y, vx: t.vx, vy: t.vy })
            .collect(),
    }
}

fn record_from(f: &SensorFrame) -> FrameRecord {
    FrameRecord {
        t: f.t,
        ego: EgoRecord { t: f.ego.t, x: f.ego.x, y: f.ego.y, heading: f.ego.heading, speed: f.ego.speed },
        points: f.points.iter().map(|p| [p.x, p.y, p.z, p.intensity]).collect(),
        tracks: f
            .tracks
            .iter()
            .map(|t| TrackRecord { id: t.track_id, class: t.class, x: t.x, y: t.y, vx: t.vx, vy: t.vy })
            .collect(),
    }
}

/// Parses a drive log from JSON Lines text. Intensities are divided by the
/// header's `intensity_scale` so they land in [0, 1].
pub fn read_drive_log(reader: impl BufRead) -> Result<DriveLog, LogError> {
    let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (hline, header) = lines.next().ok_or(LogError::Empty)?;
    let header: Header = serde_json::from_str(&header?).map_err(|e| parse_error(hline, e))?;
    if header.format_version != FORMAT_VERSION {
        return Err(LogError::Version { line: hline, version: header.format_version });
    }
    if !(header.intensity_scale > 0.0) {
        return Err(LogError::Malformed { line: hline, message: "intensity_scale must be positive".into() });
    }
    let mut frames = Vec::new();
    for (line, text) in lines {
        let record: FrameRecord = serde_json::from_str(&text?).map_err(|e| parse_error(line, e))?;
        frames.push(frame_from(record, header.intensity_scale));
    }
    let meta = LogMeta { frame_rate_hz: header.frame_rate_hz, sensor: header.sensor };
    Ok(DriveLog::new(frames, meta)?)
}

pub fn load_drive_log(path: &Path) -> Result<DriveLog, LogError> {
    read_drive_log(BufReader::new(File::open(path)?))
}

pub fn write_drive_log(log: &DriveLog, mut w: impl Write) -> Result<(), LogError> {
    let header = Header {
        frame_rate_hz: log.meta().frame_rate_hz,
        format_version: FORMAT_VERSION,
        sensor: log.meta().sensor.clone(),
        intensity_scale: 1.0,
    };
    serde_json::to_writer(&mut w, &header).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    for frame in log.frames() {
        serde_json::to_writer(&mut w, &record_from(frame)).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn drive_log_bytes(log: &DriveLog) -> Vec<u8> {
    let mut out = Vec::new();
    write_drive_log(log, &mut out).expect("writing to memory");
    out
}

pub fn save_drive_log(log: &DriveLog, path: &Path) -> Result<(), LogError> {
    crate::fsutil::write_atomic(path, &drive_log_bytes(log))?;
    Ok(())
}
