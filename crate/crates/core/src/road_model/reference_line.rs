use alloc::vec::Vec;

use crate::ingest::EgoPose;
use crate::math::{abs, Vec2};

use super::RoadModelError;

/// The ego path resampled at a fixed chord length.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLine {
    vertices: Vec<Vec2>,
    cumulative_s: Vec<f64>,
    headings: Vec<f64>,
    spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrenetPose {
    pub s: f64,
    /// Signed lateral offset, positive to the left of the travel direction.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clamp {
    None,
    /// The point projects before the first vertex.
    Start,
    /// The point projects past the last vertex.
    End,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetProjection {
    pub pose: FrenetPose,
    pub clamp: Clamp,
    /// Segment index and parameter of the foot point.
    pub segment: usize,
    pub u: f64,
}

impl FrenetProjection {
    pub fn is_clamped(&self) -> bool {
        self.clamp != Clamp::None
    }
}

/// Next point on `path` (after segment `seg` at parameter `u0`) at exactly
/// `r` from `c`.
fn walk(path: &[Vec2], c: Vec2, r: f64, mut seg: usize, mut u0: f64) -> Option<(usize, f64, Vec2)> {
    while seg + 1 < path.len() {
        let a = path[seg];
        let d = path[seg + 1] - a;
        let dd = d.norm_sq();
        if dd > 0.0 {
            // |a + u d − c|² = r²
            let f = a - c;
            let b = f.dot(d);
            let disc = b * b - dd * (f.norm_sq() - r * r);
            if disc >= 0.0 {
                let u = (-b + crate::math::sqrt(disc)) / dd;
                if u >= u0 && u <= 1.0 + 1e-9 {
                    let u = u.min(1.0);
                    return Some((seg, u, a + d * u));
                }
            }
        }
        seg += 1;
        u0 = 0.0;
    }
    None
}

/// Resamples the ego path at `spacing` metres of chord length.
///
/// Every resampled vertex lies on the input polyline at exactly `spacing` from
/// its predecessor; the trailing remainder shorter than `spacing` is dropped.
/// Each vertex heading is the direction of the chord to the next vertex.
pub fn build_reference_line(
    poses: &[EgoPose],
    spacing: f64,
    min_length: f64,
) -> Result<ReferenceLine, RoadModelError> {
    if poses.len() < 2 {
        return Err(RoadModelError::TooFewPoses(poses.len()));
    }
    let mut path: Vec<Vec2> = Vec::with_capacity(poses.len());
    for p in poses {
        let q = p.position();
        if path.last() != Some(&q) {
            path.push(q);
        }
    }
    let length: f64 = path.windows(2).map(|w| w[0].distance(w[1])).sum();
    if length < min_length || path.len() < 2 {
        return Err(RoadModelError::Stationary {
            length,
            min: min_length,
        });
    }

    let mut vertices = alloc::vec![path[0]];
    let (mut seg, mut u) = (0usize, 0.0);
    while let Some((s, nu, p)) = walk(&path, *vertices.last().unwrap(), spacing, seg, u) {
        vertices.push(p);
        seg = s;
        u = nu;
    }
    if vertices.len() < 2 {
        return Err(RoadModelError::Stationary {
            length,
            min: min_length,
        });
    }
    Ok(ReferenceLine::from_vertices(vertices, spacing))
}

impl ReferenceLine {
    /// Builds a line from vertices already spaced `spacing` apart.
    pub fn from_vertices(vertices: Vec<Vec2>, spacing: f64) -> Self {
        let n = vertices.len();
        let cumulative_s = (0..n).map(|i| i as f64 * spacing).collect();
        let mut headings: Vec<f64> = vertices.windows(2).map(|w| (w[1] - w[0]).heading()).collect();
        let last = headings.last().copied().unwrap_or(0.0);
        headings.push(last);
        Self {
            vertices,
            cumulative_s,
            headings,
            spacing,
        }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cumulative_s(&self) -> &[f64] {
        &self.cumulative_s
    }

    pub fn headings(&self) -> &[f64] {
        &self.headings
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn length(&self) -> f64 {
        *self.cumulative_s.last().unwrap_or(&0.0)
    }

    /// Closest point on the polyline (global minimum, ties to the smaller s).
    ///
    /// Points projecting before the start or past the end are clamped to the
    /// end vertex with the lateral offset taken from the extended end segment.
    pub fn project(&self, p: Vec2) -> FrenetProjection {
        let n = self.vertices.len();
        let mut best = (f64::INFINITY, 0usize, 0.0f64, 0.0f64);
        for i in 0..n - 1 {
            let a = self.vertices[i];
            let d = self.vertices[i + 1] - a;
            let raw = (p - a).dot(d) / d.norm_sq();
            let u = raw.clamp(0.0, 1.0);
            let dist = (a + d * u - p).norm_sq();
            if dist < best.0 {
                best = (dist, i, u, raw);
            }
        }
        let (_, i, u, raw) = best;
        let a = self.vertices[i];
        let d = self.vertices[i + 1] - a;
        let dir = d * (1.0 / d.norm());
        let clamp = if i == 0 && raw < 0.0 {
            Clamp::Start
        } else if i == n - 2 && raw > 1.0 {
            Clamp::End
        } else {
            Clamp::None
        };
        let foot = a + d * u;
        let t = match clamp {
            Clamp::None => {
                let side = dir.cross(p - foot);
                let dist = (p - foot).norm();
                if side < 0.0 {
                    -dist
                } else {
                    dist
                }
            }
            _ => dir.cross(p - foot),
        };
        let s = self.cumulative_s[i] + u * (self.cumulative_s[i + 1] - self.cumulative_s[i]);
        FrenetProjection {
            pose: FrenetPose { s, t },
            clamp,
            segment: i,
            u,
        }
    }

    /// [`ReferenceLine::project`] with the lateral bound enforced.
    pub fn to_frenet(&self, p: Vec2, lateral_bound: f64) -> Result<FrenetProjection, RoadModelError> {
        let proj = self.project(p);
        if abs(proj.pose.t) > lateral_bound {
            return Err(RoadModelError::BeyondLateralBound {
                t: proj.pose.t,
                bound: lateral_bound,
            });
        }
        Ok(proj)
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = self.vertices.len();
        let s = s.clamp(0.0, self.length());
        let i = (self.cumulative_s.partition_point(|&v| v <= s)).clamp(1, n - 1) - 1;
        let u = (s - self.cumulative_s[i]) / (self.cumulative_s[i + 1] - self.cumulative_s[i]);
        (i, u)
    }

    /// Point at arc length `s` offset `t` along the segment's left normal.
    pub fn from_frenet(&self, s: f64, t: f64) -> Vec2 {
        let (i, u) = self.locate(s);
        let a = self.vertices[i];
        let d = self.vertices[i + 1] - a;
        let n = d.perp() * (1.0 / d.norm());
        a + d * u + n * t
    }

    /// Heading of the segment containing `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        self.headings[self.locate(s).0]
    }

    /// Curvature at each vertex by the central gradient of the headings.
    pub fn vertex_curvatures(&self) -> Vec<f64> {
        let n = self.vertices.len();
        let h = &self.headings;
        let s = &self.cumulative_s;
        // the last heading duplicates the final chord, so differentiate chords only
        let m = n - 1;
        (0..n)
            .map(|i| {
                if m < 2 {
                    return 0.0;
                }
                let (lo, hi) = if i == 0 {
                    (0, 1)
                } else if i >= m - 1 {
                    (m - 2, m - 1)
                } else {
                    (i - 1, i + 1)
                };
                crate::math::wrap_angle(h[hi] - h[lo]) / (s[hi] - s[lo])
            })
            .collect()
    }
}
