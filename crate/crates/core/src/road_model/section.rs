use alloc::vec::Vec;

use crate::lane_geometry::{LaneletMapModel, LaneletSection};

use super::lanes::lane_for_offset;
use super::{ReferenceLine, RoadModelError};

/// One fixed-length stretch of road with its lane layout and curvature.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoadSection {
    pub index: usize,
    pub s_dist: f64,
    pub length: f64,
    /// Average lane width (m).
    pub width: f64,
    pub no_of_lanes: usize,
    /// Lanes left of the ego lane (positive ids).
    pub lanes_left: usize,
    /// The ego lane and the lanes right of it (ids −1..−lanes_right).
    pub lanes_right: usize,
    pub curvature: f64,
    pub curvature_diff: f64,
    /// The lanelet map had no lanelet here; the lane layout was copied from
    /// the nearest valid section.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadModel {
    pub sections: Vec<RoadSection>,
    pub ref_line: ReferenceLine,
    pub lane_width: f64,
}

impl RoadModel {
    pub fn section_at(&self, s: f64) -> &RoadSection {
        let i = self.sections.partition_point(|sec| sec.s_dist <= s);
        &self.sections[i.saturating_sub(1)]
    }

    pub fn total_length(&self) -> f64 {
        self.sections.iter().map(|s| s.length).sum()
    }

    pub fn degenerate_sections(&self) -> Vec<usize> {
        self.sections.iter().filter(|s| s.degenerate).map(|s| s.index).collect()
    }
}

struct Layout {
    width: f64,
    left: usize,
    right: usize,
}

fn layout(section: &LaneletSection) -> Option<Layout> {
    let width = section.mean_width()?;
    if section.degenerate || !(width > 0.0) {
        return None;
    }
    let mut left = 0;
    let mut right = 1;
    for lanelet in &section.lanelets {
        let center = 0.5 * (section.linestrings[lanelet.left].mean_t + section.linestrings[lanelet.right].mean_t);
        let id = lane_for_offset(center, width);
        if id > 0 {
            left = left.max(id as usize);
        } else {
            right = right.max((-id) as usize);
        }
    }
    Some(Layout { width, left, right })
}

/// Builds one road section per lanelet-map section.
///
/// Curvature is the mean heading gradient over the section's reference-line
/// vertices. Sections without lanelets keep their curvature but take the lane
/// layout of the nearest valid section (ties to the earlier one) and are
/// flagged degenerate.
pub fn sectionize(map: &LaneletMapModel, ref_line: &ReferenceLine) -> Result<RoadModel, RoadModelError> {
    let layouts: Vec<Option<Layout>> = map.sections.iter().map(layout).collect();
    let valid: Vec<usize> = (0..layouts.len()).filter(|&i| layouts[i].is_some()).collect();
    if valid.is_empty() {
        return Err(RoadModelError::NoValidSection);
    }

    let kappa = ref_line.vertex_curvatures();
    let s = ref_line.cumulative_s();
    let last = map.sections.len() - 1;
    let mut sections = Vec::with_capacity(map.sections.len());
    let mut prev_curvature = 0.0;
    for (i, ls) in map.sections.iter().enumerate() {
        let (mut sum, mut count) = (0.0, 0usize);
        for (k, &sv) in s.iter().enumerate() {
            if sv >= ls.s_start && (sv < ls.s_end || (i == last && sv <= ls.s_end)) {
                sum += kappa[k];
                count += 1;
            }
        }
        let curvature = if count > 0 { sum / count as f64 } else { prev_curvature };
        let source = valid
            .iter()
            .copied()
            .min_by_key(|&v| v.abs_diff(i))
            .expect("valid is non-empty");
        let lay = layouts[source].as_ref().expect("valid index");
        sections.push(RoadSection {
            index: i,
            s_dist: ls.s_start,
            length: ls.s_end - ls.s_start,
            width: lay.width,
            no_of_lanes: lay.left + lay.right,
            lanes_left: lay.left,
            lanes_right: lay.right,
            curvature,
            curvature_diff: if i == 0 { curvature } else { curvature - prev_curvature },
            degenerate: source != i,
        });
        prev_curvature = curvature;
    }
    let lane_width = valid.iter().map(|&i| sections[i].width).sum::<f64>() / valid.len() as f64;
    Ok(RoadModel {
        sections,
        ref_line: ref_line.clone(),
        lane_width,
    })
}
