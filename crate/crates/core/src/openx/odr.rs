use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{abs, wrap_angle, Vec2};
use crate::road_model::RoadModel;

use super::spiral::{curvature_at, pose_at};
use super::OpenXError;

/// Quadrature tolerance for chaining geometry start poses (m).
pub const POSE_TOLERANCE: f64 = 1e-9;
/// Curvatures below this magnitude are treated as straight.
pub const STRAIGHT_CURVATURE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OdrHeader {
    pub rev_major: u32,
    pub rev_minor: u32,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryShape {
    Line,
    Spiral { curv_start: f64, curv_end: f64 },
}

impl GeometryShape {
    pub fn curvatures(&self) -> (f64, f64) {
        match *self {
            GeometryShape::Line => (0.0, 0.0),
            GeometryShape::Spiral { curv_start, curv_end } => (curv_start, curv_end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub hdg: f64,
    pub length: f64,
    pub shape: GeometryShape,
}

impl Geometry {
    /// Pose at arc length `u` from the element start.
    pub fn pose_at(&self, u: f64) -> (Vec2, f64) {
        let (k0, k1) = self.shape.curvatures();
        pose_at(Vec2::new(self.x, self.y), self.hdg, k0, k1, self.length, u, POSE_TOLERANCE)
    }

    pub fn end_pose(&self) -> (Vec2, f64) {
        self.pose_at(self.length)
    }

    pub fn curvature_at(&self, u: f64) -> f64 {
        let (k0, k1) = self.shape.curvatures();
        curvature_at(k0, k1, self.length, u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdrLane {
    pub id: i32,
    pub lane_type: String,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneSection {
    pub s: f64,
    /// Ordered outward: 1, 2, ...
    pub left: Vec<OdrLane>,
    /// Ordered outward: −1, −2, ...
    pub right: Vec<OdrLane>,
}

impl LaneSection {
    pub fn lane_count(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Polynomial lateral shift of the lane reference from the road reference line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneOffset {
    pub s: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdrRoad {
    pub name: String,
    pub id: String,
    pub length: f64,
    pub geometries: Vec<Geometry>,
    pub lane_offsets: Vec<LaneOffset>,
    pub lane_sections: Vec<LaneSection>,
}

impl OdrRoad {
    fn index_at<T>(items: &[T], s: f64, key: impl Fn(&T) -> f64) -> usize {
        items.partition_point(|g| key(g) <= s).saturating_sub(1)
    }

    pub fn geometry_at(&self, s: f64) -> &Geometry {
        &self.geometries[Self::index_at(&self.geometries, s, |g| g.s)]
    }

    pub fn curvature_at(&self, s: f64) -> f64 {
        let g = self.geometry_at(s);
        g.curvature_at((s - g.s).clamp(0.0, g.length))
    }

    pub fn lane_section_at(&self, s: f64) -> &LaneSection {
        &self.lane_sections[Self::index_at(&self.lane_sections, s, |l| l.s)]
    }

    pub fn lane_offset_at(&self, s: f64) -> f64 {
        if self.lane_offsets.is_empty() {
            return 0.0;
        }
        self.lane_offsets[Self::index_at(&self.lane_offsets, s, |o| o.s)].a
    }

    /// Lateral span (right edge, left edge) of lane `id` at `s`.
    pub fn lane_span(&self, s: f64, id: i32) -> Option<(f64, f64)> {
        let section = self.lane_section_at(s);
        let mut edge = self.lane_offset_at(s);
        let lanes = if id > 0 { &section.left } else { &section.right };
        for lane in lanes {
            let next = if id > 0 { edge + lane.width } else { edge - lane.width };
            if lane.id == id {
                return Some(if id > 0 { (edge, next) } else { (next, edge) });
            }
            edge = next;
        }
        None
    }

    pub fn lane_center(&self, s: f64, id: i32) -> Option<f64> {
        self.lane_span(s, id).map(|(lo, hi)| 0.5 * (lo + hi))
    }

    /// Lane containing lateral offset `t` at `s`, spans half-open below.
    pub fn lane_at(&self, s: f64, t: f64) -> Option<i32> {
        let section = self.lane_section_at(s);
        section
            .right
            .iter()
            .chain(section.left.iter())
            .map(|l| l.id)
            .find(|&id| self.lane_span(s, id).is_some_and(|(lo, hi)| t > lo && t <= hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdrDocument {
    pub header: OdrHeader,
    pub road: OdrRoad,
}

fn lanes(count: usize, sign: i32, width: f64) -> Vec<OdrLane> {
    (1..=count as i32)
        .map(|k| OdrLane {
            id: sign * k,
            lane_type: String::from("driving"),
            width,
        })
        .collect()
}

/// Converts a road model into a one-road OpenDRIVE document.
///
/// Each section becomes one geometry element: a line when both its own and
/// the previous section's curvature are negligible, otherwise a spiral from
/// the previous curvature to its own. Start poses are chained by integrating
/// each predecessor. The lane reference is offset by half a lane so lane −1
/// is centered on the ego path.
pub fn build_opendrive(model: &RoadModel, name: &str) -> Result<OdrDocument, OpenXError> {
    if model.sections.is_empty() {
        return Err(OpenXError::EmptyModel);
    }
    let start = model.ref_line.vertices()[0];
    let mut pose = (start, model.ref_line.headings()[0]);
    let mut prev_curvature = 0.0;
    let mut geometries = Vec::with_capacity(model.sections.len());
    let mut lane_offsets = Vec::with_capacity(model.sections.len());
    let mut lane_sections = Vec::with_capacity(model.sections.len());
    for section in &model.sections {
        let shape = if abs(prev_curvature) < STRAIGHT_CURVATURE && abs(section.curvature) < STRAIGHT_CURVATURE {
            GeometryShape::Line
        } else {
            GeometryShape::Spiral {
                curv_start: prev_curvature,
                curv_end: section.curvature,
            }
        };
        let g = Geometry {
            s: section.s_dist,
            x: pose.0.x,
            y: pose.0.y,
            hdg: wrap_angle(pose.1),
            length: section.length,
            shape,
        };
        pose = g.end_pose();
        geometries.push(g);
        prev_curvature = section.curvature;
        lane_offsets.push(LaneOffset {
            s: section.s_dist,
            a: 0.5 * section.width,
        });
        lane_sections.push(LaneSection {
            s: section.s_dist,
            left: lanes(section.lanes_left, 1, section.width),
            right: lanes(section.lanes_right, -1, section.width),
        });
    }
    let doc = OdrDocument {
        header: OdrHeader {
            rev_major: 1,
            rev_minor: 4,
            name: String::from(name),
        },
        road: OdrRoad {
            name: String::from(name),
            id: String::from("1"),
            length: model.sections.iter().map(|s| s.length).sum(),
            geometries,
            lane_offsets,
            lane_sections,
        },
    };
    doc.validate()?;
    Ok(doc)
}

impl OdrDocument {
    /// Checks geometry continuity, lane-section ordering and lane numbering.
    pub fn validate(&self) -> Result<(), OpenXError> {
        let road = &self.road;
        if road.geometries.is_empty() {
            return Err(OpenXError::Missing("planView geometry"));
        }
        if road.lane_sections.is_empty() {
            return Err(OpenXError::Missing("laneSection"));
        }
        let mut s = 0.0;
        for (i, g) in road.geometries.iter().enumerate() {
            if !(g.length > 0.0) || abs(g.s - s) > 1e-6 {
                return Err(OpenXError::Invalid(alloc::format!("geometry {i} has s {} / length {}", g.s, g.length)));
            }
            if i > 0 {
                let (end, hdg) = road.geometries[i - 1].end_pose();
                let gap = end.distance(Vec2::new(g.x, g.y));
                let turn = abs(wrap_angle(hdg - g.hdg));
                if gap > 1e-6 || turn > 1e-6 {
                    return Err(OpenXError::Discontinuity { index: i, gap, heading_gap: turn });
                }
            }
            s += g.length;
        }
        if abs(s - road.length) > 1e-6 {
            return Err(OpenXError::Invalid(alloc::format!("road length {} but geometries sum to {s}", road.length)));
        }
        for (i, ls) in road.lane_sections.iter().enumerate() {
            if i > 0 && !(ls.s > road.lane_sections[i - 1].s) {
                return Err(OpenXError::Invalid(alloc::format!("laneSection {i} s is not increasing")));
            }
            let ok = ls.left.iter().enumerate().all(|(k, l)| l.id == k as i32 + 1 && l.width > 0.0)
                && ls.right.iter().enumerate().all(|(k, l)| l.id == -(k as i32) - 1 && l.width > 0.0)
                && ls.lane_count() > 0;
            if !ok {
                return Err(OpenXError::Invalid(alloc::format!("laneSection {i} has bad lane ids")));
            }
        }
        Ok(())
    }

    /// Odom position of road coordinates (s, t).
    pub fn position(&self, s: f64, t: f64) -> Vec2 {
        let g = self.road.geometry_at(s);
        let (p, hdg) = g.pose_at((s - g.s).clamp(0.0, g.length));
        p + Vec2::from_heading(hdg).perp() * t
    }
}
