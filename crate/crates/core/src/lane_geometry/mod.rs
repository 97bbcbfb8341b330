//! Lane-marking extraction and lane construction.
//!
//! Per scan: [`filter_road_points`] drops everything beyond the curbs and
//! [`extract_lane_points`] keeps the high-intensity returns. Across scans the
//! points are folded into two stacks: active mark clusters
//! ([`ingest_scan_points`]) and lane lines assembled from the segments of
//! completed clusters ([`merge_segment`]). [`build_lanelet_map`] then cuts the
//! lane lines into fixed-length sections and fills missing lanes.

mod cluster;
mod filter;
mod lanelet;
#[cfg(test)]
pub(crate) use lanelet::section_count;
mod merge;

pub use cluster::{flush_clusters, ingest_scan_points, ClusterParams, LanePoint, MarkCluster};
pub use filter::{extract_lane_points, filter_road_points, CurbThresholds, IntensityRule};
pub use lanelet::{
    build_lanelet_map, fill_section_gaps, Lanelet, LaneletMapModel, LaneletParams, LaneletSection,
    Linestring,
};
pub use merge::{merge_segment, projected_distance, LaneLine, LineSegment, MergeOutcome};

use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::ingest::DriveLog;

/// Result of running lane construction over a whole drive.
#[derive(Debug, Clone, PartialEq)]
pub struct LaneConstruction {
    pub lanes: Vec<LaneLine>,
    /// Promoted clusters with fewer than two distinct points.
    pub discarded_clusters: usize,
    /// Points kept by the curb filter, summed over all scans.
    pub road_point_count: usize,
    pub lane_point_count: usize,
}

/// Runs filtering, extraction and the two-stack construction over every scan.
pub fn construct_lanes(log: &DriveLog, cfg: &PipelineConfig) -> LaneConstruction {
    let curb = CurbThresholds::from(cfg);
    let rule = IntensityRule::from(cfg);
    let cluster_params = ClusterParams::from(cfg);
    let mut active: Vec<MarkCluster> = Vec::new();
    let mut lanes: Vec<LaneLine> = Vec::new();
    let mut discarded = 0;
    let mut road_point_count = 0;
    let mut lane_point_count = 0;

    let mut absorb = |promoted: Vec<MarkCluster>, lanes: &mut Vec<LaneLine>| {
        for cluster in promoted {
            match LineSegment::from_cluster(&cluster) {
                Some(seg) => {
                    merge_segment(seg, lanes, cfg.merge_distance);
                }
                None => discarded += 1,
            }
        }
    };

    for (scan_index, frame) in log.frames().iter().enumerate() {
        let road = filter_road_points(&frame.points, &curb);
        road_point_count += road.len();
        let lane_points = extract_lane_points(&road, &frame.ego, scan_index, &rule);
        lane_point_count += lane_points.len();
        let promoted = ingest_scan_points(&lane_points, &mut active, &cluster_params);
        absorb(promoted, &mut lanes);
    }
    absorb(flush_clusters(&mut active), &mut lanes);

    LaneConstruction {
        lanes,
        discarded_clusters: discarded,
        road_point_count,
        lane_point_count,
    }
}
