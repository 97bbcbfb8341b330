use crate::math::ceil;

use super::{FrenetPose, RoadModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaneAssignment {
    /// OpenDRIVE lane id: −1 is the ego lane, negative ids to the right,
    /// positive ids to the left.
    pub lane: i32,
    /// The offset lies beyond the modeled lanes and was snapped to the edge lane.
    pub out_of_map: bool,
}

/// Lane id for lateral offset `t` with lanes of width `w` centered on the
/// ego lane. Every interval is half-open on its lower side, so a boundary
/// below the ego lane belongs to the outer lane.
pub(crate) fn lane_for_offset(t: f64, w: f64) -> i32 {
    let j = ceil((t - 0.5 * w) / w) as i32;
    if j > 0 {
        j
    } else {
        j - 1
    }
}

/// Lateral interval of lane `id` as (exclusive lower, inclusive upper).
pub fn lane_interval(id: i32, w: f64) -> (f64, f64) {
    let j = if id > 0 { id } else { id + 1 } as f64;
    (0.5 * w + (j - 1.0) * w, 0.5 * w + j * w)
}

/// Assigns a lane id using the section containing `fp.s`.
pub fn assign_lane(fp: FrenetPose, model: &RoadModel) -> LaneAssignment {
    let section = model.section_at(fp.s);
    let lane = lane_for_offset(fp.t, section.width);
    let left = section.lanes_left as i32;
    let right = -(section.lanes_right as i32);
    if lane > left {
        LaneAssignment { lane: if left > 0 { left } else { -1 }, out_of_map: true }
    } else if lane < right {
        LaneAssignment { lane: right, out_of_map: true }
    } else {
        LaneAssignment { lane, out_of_map: false }
    }
}


#[cfg(test)]
mod model_tests {
    use super::*;
    use crate::road_model::fixtures::straight_model;

    #[test]
    fn snaps_beyond_the_edges() {
        let model = straight_model(100.0, 1, 2);
        let at = |t| assign_lane(FrenetPose { s: 10.0, t }, &model);
        assert_eq!(at(0.0), LaneAssignment { lane: -1, out_of_map: false });
        assert_eq!(at(3.5), LaneAssignment { lane: 1, out_of_map: false });
        assert_eq!(at(9.0), LaneAssignment { lane: 1, out_of_map: true });
        assert_eq!(at(-3.5), LaneAssignment { lane: -2, out_of_map: false });
        assert_eq!(at(-9.0), LaneAssignment { lane: -2, out_of_map: true });
        let single = straight_model(100.0, 0, 1);
        assert_eq!(assign_lane(FrenetPose { s: 10.0, t: 3.5 }, &single), LaneAssignment { lane: -1, out_of_map: true });
    }
}
