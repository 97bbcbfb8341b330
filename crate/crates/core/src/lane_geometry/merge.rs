use alloc::vec::Vec;

use crate::math::{abs, Vec2};

use super::{LanePoint, MarkCluster};

/// The chord between the first and last point of a completed mark cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment {
    pub first: LanePoint,
    pub last: LanePoint,
}

impl LineSegment {
    /// `None` when the cluster has no two distinct end points.
    pub fn from_cluster(c: &MarkCluster) -> Option<Self> {
        let first = *c.points.first()?;
        let last = *c.points.last()?;
        if c.points.len() < 2 || first.pos() == last.pos() {
            return None;
        }
        Some(Self { first, last })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneLine {
    pub segments: Vec<LineSegment>,
}

impl LaneLine {
    pub fn polyline(&self) -> Vec<Vec2> {
        self.segments
            .iter()
            .flat_map(|s| [s.first.pos(), s.last.pos()])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MergeOutcome {
    Merged { lane: usize, distance: f64 },
    NewLane { lane: usize },
}

/// Distance between `p` and the point the extended `seg` reaches at `p`'s
/// abscissa, using the slope-intercept form of the segment's line.
///
/// Steep segments (|Δx| < |Δy|) are evaluated with the axes swapped so the
/// slope stays bounded.
pub fn projected_distance(seg: &LineSegment, p: Vec2) -> f64 {
    let (a, b) = (seg.first.pos(), seg.last.pos());
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    if abs(dx) >= abs(dy) {
        let slope = dy / dx;
        let intercept = a.y - slope * a.x;
        let projected = Vec2::new(p.x, slope * p.x + intercept);
        projected.distance(p)
    } else {
        let slope = dx / dy;
        let intercept = a.x - slope * a.y;
        let projected = Vec2::new(slope * p.y + intercept, p.y);
        projected.distance(p)
    }
}

/// Appends `seg` to the nearest lane whose last segment, extended, passes
/// within `merge_distance` of `seg.first`; otherwise starts a new lane.
pub fn merge_segment(seg: LineSegment, lanes: &mut Vec<LaneLine>, merge_distance: f64) -> MergeOutcome {
    let start = seg.first.pos();
    let mut best: Option<(usize, f64)> = None;
    for (i, lane) in lanes.iter().enumerate() {
        let Some(last) = lane.segments.last() else { continue };
        let d = projected_distance(last, start);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    match best {
        Some((lane, distance)) if distance < merge_distance => {
            lanes[lane].segments.push(seg);
            MergeOutcome::Merged { lane, distance }
        }
        _ => {
            lanes.push(LaneLine { segments: alloc::vec![seg] });
            MergeOutcome::NewLane { lane: lanes.len() - 1 }
        }
    }
}
