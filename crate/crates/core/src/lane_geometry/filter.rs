use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::config::PipelineConfig;
use crate::ingest::{to_odom, EgoPose, LidarPoint};
use crate::math::{abs, atan2, hypot, mean_std};

use super::LanePoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurbThresholds {
    /// Prefilter on the first difference of the inclination angle (rad).
    pub d1: f64,
    /// Threshold on the second difference of the inclination angle (rad).
    pub d2: f64,
}

impl From<&PipelineConfig> for CurbThresholds {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            d1: cfg.curb_d1_threshold,
            d2: cfg.curb_d2_threshold,
        }
    }
}

impl Default for CurbThresholds {
    fn default() -> Self {
        Self::from(&PipelineConfig::default())
    }
}

fn azimuth(p: &LidarPoint) -> f64 {
    atan2(p.y, p.x)
}

/// Index of the last road point on one side, walking outward from the centre.
fn curb_cut(side: &[LidarPoint], th: &CurbThresholds) -> usize {
    // inclination of the chord between neighbours, zero baseline before the first
    let mut prev_angle = 0.0;
    let mut prev_d1 = 0.0;
    for i in 0..side.len().saturating_sub(1) {
        let (a, b) = (&side[i], &side[i + 1]);
        let angle = atan2(b.z - a.z, hypot(b.x - a.x, b.y - a.y));
        let d1 = angle - prev_angle;
        let d2 = d1 - prev_d1;
        if abs(d1) > th.d1 && abs(d2) > th.d2 {
            return i;
        }
        prev_angle = angle;
        prev_d1 = d1;
    }
    side.len().saturating_sub(1)
}

/// Keeps the road-surface points of one scan.
///
/// Points are split at the forward axis and ordered by azimuth from the centre
/// outward; on each side everything past the first curb-like slope break is
/// dropped. The result lists the left side (centre → out) then the right side
/// (centre → out).
pub fn filter_road_points(points: &[LidarPoint], th: &CurbThresholds) -> Vec<LidarPoint> {
    let mut left: Vec<(f64, LidarPoint)> = Vec::new();
    let mut right: Vec<(f64, LidarPoint)> = Vec::new();
    for p in points {
        let az = azimuth(p);
        if az >= 0.0 {
            left.push((az, *p));
        } else {
            right.push((-az, *p));
        }
    }
    let by_angle = |a: &(f64, LidarPoint), b: &(f64, LidarPoint)| {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
    };
    left.sort_by(by_angle);
    right.sort_by(by_angle);

    let mut out = Vec::with_capacity(points.len());
    for side in [left, right] {
        let side: Vec<LidarPoint> = side.into_iter().map(|(_, p)| p).collect();
        if side.is_empty() {
            continue;
        }
        let last = curb_cut(&side, th);
        out.extend_from_slice(&side[..=last]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityRule {
    pub k: f64,
    pub absolute: Option<f64>,
    pub min_contrast: f64,
    pub min_points: usize,
}

impl From<&PipelineConfig> for IntensityRule {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            k: cfg.intensity_k,
            absolute: cfg.intensity_absolute,
            min_contrast: cfg.intensity_min_contrast,
            min_points: cfg.min_road_points,
        }
    }
}

impl Default for IntensityRule {
    fn default() -> Self {
        Self::from(&PipelineConfig::default())
    }
}

impl IntensityRule {
    /// Intensity a point must exceed to count as lane marking in this scan.
    pub fn threshold(&self, road_points: &[LidarPoint]) -> f64 {
        if let Some(abs_threshold) = self.absolute {
            return abs_threshold;
        }
        let (mean, std) = mean_std(road_points.iter().map(|p| p.intensity));
        (mean + self.k * std).max(mean + self.min_contrast)
    }
}

/// Picks the lane-marking returns of a scan and moves them into odom.
pub fn extract_lane_points(
    road_points: &[LidarPoint],
    pose: &EgoPose,
    scan_index: usize,
    rule: &IntensityRule,
) -> Vec<LanePoint> {
    if road_points.len() < rule.min_points {
        return Vec::new();
    }
    let threshold = rule.threshold(road_points);
    road_points
        .iter()
        .filter(|p| p.intensity > threshold)
        .map(|p| {
            let q = to_odom(p.xy(), pose);
            LanePoint {
                x: q.x,
                y: q.y,
                intensity: p.intensity,
                scan_index,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn scan_line(forward: f64, half_width: f64, curb_at: Option<f64>, curb_h: f64) -> Vec<LidarPoint> {
        let n = (2.0 * half_width / 0.1).round() as i64;
        (0..=n)
            .map(|i| {
                let y = -half_width + i as f64 * 0.1;
                let z = match curb_at {
                    Some(c) if y.abs() > c + 1e-9 => curb_h,
                    _ => 0.0,
                };
                LidarPoint::new(forward, y, z, 0.2)
            })
            .collect()
    }

    #[test]
    fn flat_scan_keeps_everything() {
        let pts = scan_line(8.0, 6.0, None, 0.0);
        assert_eq!(filter_road_points(&pts, &CurbThresholds::default()).len(), pts.len());
    }

    #[test]
    fn single_point_is_kept() {
        let pts = [LidarPoint::new(5.0, 0.0, 0.3, 0.2)];
        assert_eq!(filter_road_points(&pts, &CurbThresholds::default()), pts.to_vec());
    }

    #[test]
    fn curb_step_removes_points_beyond_curb() {
        let pts = scan_line(8.0, 6.0, Some(3.5), 0.15);
        // oracle: the inclination between the last road point and the first curb
        // point is atan2(0.15, 0.1) ≈ 0.98 rad, everything before it is flat
        let step = atan2(0.15, 0.1);
        assert!(step > 0.1 && step > 0.05);
        let kept = filter_road_points(&pts, &CurbThresholds::default());
        let expected = pts.iter().filter(|p| p.y.abs() <= 3.5 + 1e-9).count();
        assert_eq!(kept.len(), expected);
        assert!(kept.iter().all(|p| p.y.abs() <= 3.5 + 1e-9 && p.z == 0.0));
    }

    #[test]
    fn uniform_scan_has_no_lane_points() {
        let pts: Vec<_> = (0..50).map(|i| LidarPoint::new(8.0, i as f64 * 0.1, 0.0, 0.3)).collect();
        let pose = EgoPose { t: 0.0, x: 0.0, y: 0.0, heading: 0.0, speed: 0.0 };
        assert!(extract_lane_points(&pts, &pose, 0, &IntensityRule::default()).is_empty());
    }

    #[test]
    fn too_few_road_points() {
        let pts = [
            LidarPoint::new(8.0, 0.0, 0.0, 0.2),
            LidarPoint::new(8.0, 0.1, 0.0, 0.9),
            LidarPoint::new(8.0, 0.2, 0.0, 0.2),
        ];
        let pose = EgoPose { t: 0.0, x: 0.0, y: 0.0, heading: 0.0, speed: 0.0 };
        assert!(extract_lane_points(&pts, &pose, 0, &IntensityRule::default()).is_empty());
    }

    #[test]
    fn stripes_are_separated_from_road() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut pts = Vec::new();
        let mut stripes = 0;
        for i in 0..120 {
            let y = -6.0 + i as f64 * 0.1;
            let on_stripe = [-1.75f64, 1.75, 5.25].iter().any(|m| (y - m).abs() < 0.075);
            let intensity = if on_stripe {
                stripes += 1;
                0.9
            } else {
                0.2 + rng.random_range(-0.02..0.02)
            };
            pts.push(LidarPoint::new(8.0, y, 0.0, intensity));
        }
        // oracle: recompute the adaptive threshold from the generated sample
        let n = pts.len() as f64;
        let mean = pts.iter().map(|p| p.intensity).sum::<f64>() / n;
        let var = pts.iter().map(|p| (p.intensity - mean).powi(2)).sum::<f64>() / n;
        let threshold = mean + 2.0 * var.sqrt();
        assert!(threshold < 0.9 && threshold > 0.22);

        let pose = EgoPose { t: 0.0, x: 2.0, y: 1.0, heading: 0.0, speed: 0.0 };
        let lane = extract_lane_points(&pts, &pose, 4, &IntensityRule::default());
        assert_eq!(lane.len(), stripes);
        assert!(lane.iter().all(|p| p.intensity == 0.9 && p.scan_index == 4));
        // moved into odom
        assert!(lane.iter().all(|p| (p.x - 10.0).abs() < 1e-12));
    }

    #[test]
    fn absolute_override() {
        let pts: Vec<_> = (0..10)
            .map(|i| LidarPoint::new(8.0, i as f64, 0.0, 0.1 * i as f64))
            .collect();
        let rule = IntensityRule { absolute: Some(0.55), ..IntensityRule::default() };
        let pose = EgoPose { t: 0.0, x: 0.0, y: 0.0, heading: 0.0, speed: 0.0 };
        assert_eq!(extract_lane_points(&pts, &pose, 0, &rule).len(), 4);
    }
}
