use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::math::Vec2;

/// A lane-marking return in the odom frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanePoint {
    pub x: f64,
    pub y: f64,
    pub intensity: f64,
    pub scan_index: usize,
}

impl LanePoint {
    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// A group of lane points believed to belong to one painted mark.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkCluster {
    pub points: Vec<LanePoint>,
    pub inactive_count: u32,
    pub active: bool,
}

impl MarkCluster {
    fn new(p: LanePoint) -> Self {
        Self {
            points: alloc::vec![p],
            inactive_count: 0,
            active: true,
        }
    }

    /// Distance from `p` to the nearest member point.
    pub fn nearest_distance(&self, p: Vec2) -> f64 {
        self.points
            .iter()
            .map(|q| q.pos().distance(p))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub join_distance: f64,
    pub inactivity_limit: u32,
}

impl From<&PipelineConfig> for ClusterParams {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            join_distance: cfg.cluster_join_distance,
            inactivity_limit: cfg.inactivity_limit,
        }
    }
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self::from(&PipelineConfig::default())
    }
}

/// Folds one scan's lane points into the active stack.
///
/// Each point joins the cluster holding its nearest member when that distance
/// is below the join distance (lowest stack index on ties), otherwise it opens a
/// new cluster. Afterwards touched clusters reset their inactivity counter and
/// all others count one more idle scan; clusters idle for more than the limit
/// leave the stack and are returned, in stack order.
pub fn ingest_scan_points(
    new_points: &[LanePoint],
    stack: &mut Vec<MarkCluster>,
    params: &ClusterParams,
) -> Vec<MarkCluster> {
    let mut touched: Vec<bool> = alloc::vec![false; stack.len()];
    for p in new_points {
        let pos = p.pos();
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in stack.iter().enumerate() {
            let d = c.nearest_distance(pos);
            if d < params.join_distance && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, _)) => {
                stack[i].points.push(*p);
                touched[i] = true;
            }
            None => {
                stack.push(MarkCluster::new(*p));
                touched.push(true);
            }
        }
    }

    let mut promoted = Vec::new();
    let mut kept = Vec::with_capacity(stack.len());
    for (mut c, hit) in stack.drain(..).zip(touched) {
        if hit {
            c.inactive_count = 0;
        } else {
            c.inactive_count += 1;
        }
        if c.inactive_count > params.inactivity_limit {
            c.active = false;
            promoted.push(c);
        } else {
            kept.push(c);
        }
    }
    *stack = kept;
    promoted
}

/// Promotes every remaining cluster at the end of the data.
pub fn flush_clusters(stack: &mut Vec<MarkCluster>) -> Vec<MarkCluster> {
    let mut out: Vec<MarkCluster> = core::mem::take(stack);
    for c in &mut out {
        c.active = false;
    }
    out
}
