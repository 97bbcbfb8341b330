use alloc::vec::Vec;

use crate::config::PipelineConfig;
use crate::math::{abs, Vec2};
use crate::road_model::{FrenetPose, ReferenceLine};

use super::LaneLine;

/// An ordered point sequence approximating one marking inside one section.
#[derive(Debug, Clone, PartialEq)]
pub struct Linestring {
    pub points: Vec<Vec2>,
    pub frenet: Vec<FrenetPose>,
    pub mean_t: f64,
    /// True for linestrings inserted to fill a missing lane.
    pub interpolated: bool,
}

impl Linestring {
    fn from_frenet(frenet: Vec<FrenetPose>, ref_line: &ReferenceLine, interpolated: bool) -> Self {
        let points = frenet.iter().map(|f| ref_line.from_frenet(f.s, f.t)).collect();
        let mean_t = frenet.iter().map(|f| f.t).sum::<f64>() / frenet.len() as f64;
        Self {
            points,
            frenet,
            mean_t,
            interpolated,
        }
    }
}

/// Lane between two adjacent linestrings (indices into the section's list).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lanelet {
    pub right: usize,
    pub left: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneletSection {
    pub index: usize,
    pub s_start: f64,
    pub s_end: f64,
    /// Sorted by increasing mean lateral offset (right to left).
    pub linestrings: Vec<Linestring>,
    pub lanelets: Vec<Lanelet>,
    pub inserted: usize,
    pub degenerate: bool,
}

impl LaneletSection {
    /// Mean lateral spacing of adjacent linestrings.
    pub fn mean_width(&self) -> Option<f64> {
        if self.linestrings.len() < 2 {
            return None;
        }
        let span = self.linestrings.last().unwrap().mean_t - self.linestrings[0].mean_t;
        Some(span / (self.linestrings.len() - 1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneletMapModel {
    pub sections: Vec<LaneletSection>,
}

impl LaneletMapModel {
    pub fn degenerate_count(&self) -> usize {
        self.sections.iter().filter(|s| s.degenerate).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneletParams {
    pub section_length: f64,
    pub gap_threshold: f64,
    pub merge_distance: f64,
    pub lateral_bound: f64,
}

impl From<&PipelineConfig> for LaneletParams {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            section_length: cfg.section_length,
            gap_threshold: cfg.gap_threshold,
            merge_distance: cfg.linestring_merge_distance,
            lateral_bound: cfg.frenet_lateral_bound,
        }
    }
}

/// Number of sections covering `length`, the last one possibly shorter.
pub(crate) fn section_count(length: f64, section_length: f64) -> usize {
    let n = crate::math::ceil(length / section_length - 1e-9);
    (n as usize).max(1)
}

/// Pieces of one lane line falling into each section, as Frenet samples with
/// interpolated points at the section boundaries.
///
/// The line is first split wherever the bridge from one segment to the next
/// jumps laterally by at least `max_jump`: such a step means the lane line
/// picked up a segment of a neighbouring marking, and the bridge between them
/// is not a marking.
fn cut_lane_line(
    line: &LaneLine,
    ref_line: &ReferenceLine,
    bounds: &[f64],
    lateral_bound: f64,
    max_jump: f64,
) -> Vec<Vec<Vec<FrenetPose>>> {
    let n = bounds.len() - 1;
    let mut pieces: Vec<Vec<Vec<FrenetPose>>> = (0..n).map(|_| Vec::new()).collect();
    let project = |p: Vec2| {
        let proj = ref_line.to_frenet(p, lateral_bound).ok()?;
        (!proj.is_clamped()).then_some(proj.pose)
    };
    let mut runs: Vec<Vec<FrenetPose>> = Vec::new();
    let mut last_t: Option<f64> = None;
    for seg in &line.segments {
        let ends: Vec<FrenetPose> = [seg.first.pos(), seg.last.pos()].into_iter().filter_map(project).collect();
        let (Some(first), Some(end)) = (ends.first().copied(), ends.last().copied()) else { continue };
        match (runs.last_mut(), last_t) {
            (Some(run), Some(t)) if abs(first.t - t) < max_jump => run.extend(ends),
            _ => runs.push(ends),
        }
        last_t = Some(end.t);
    }
    let section_of = |s: f64| bounds[1..n].partition_point(|&b| b <= s);
    for mut run in runs {
        run.sort_by(|a, b| a.s.total_cmp(&b.s));
        let mut run_pieces: Vec<Vec<FrenetPose>> = (0..n).map(|_| Vec::new()).collect();
        for (i, f) in run.iter().enumerate() {
            let k = section_of(f.s);
            run_pieces[k].push(*f);
            if let Some(next) = run.get(i + 1) {
                let k2 = section_of(next.s);
                for b in (k + 1)..=k2 {
                    let sb = bounds[b];
                    let u = (sb - f.s) / (next.s - f.s);
                    let cut = FrenetPose {
                        s: sb,
                        t: f.t + u * (next.t - f.t),
                    };
                    run_pieces[b - 1].push(cut);
                    run_pieces[b].push(cut);
                }
            }
        }
        for (k, piece) in run_pieces.into_iter().enumerate() {
            if !piece.is_empty() {
                pieces[k].push(piece);
            }
        }
    }
    pieces
}

/// Merges linestrings closer than `merge_distance` laterally into one.
fn merge_close(mut items: Vec<Vec<FrenetPose>>, merge_distance: f64) -> Vec<Vec<FrenetPose>> {
    let mean = |v: &Vec<FrenetPose>| v.iter().map(|f| f.t).sum::<f64>() / v.len() as f64;
    items.retain(|v| v.len() >= 2);
    items.sort_by(|a, b| mean(a).total_cmp(&mean(b)));
    let mut out: Vec<Vec<FrenetPose>> = Vec::new();
    for item in items {
        match out.last_mut() {
            Some(prev) if abs(mean(prev) - mean(&item)) < merge_distance => {
                prev.extend(item);
                prev.sort_by(|a, b| a.s.total_cmp(&b.s));
            }
            _ => out.push(item),
        }
    }
    out
}

/// Inserts midline linestrings until no adjacent pair is more than
/// `gap_threshold` apart. Returns the number inserted.
pub fn fill_section_gaps(
    linestrings: &mut Vec<Linestring>,
    s_range: (f64, f64),
    ref_line: &ReferenceLine,
    gap_threshold: f64,
) -> usize {
    let mut inserted = 0;
    let mut i = 0;
    while i + 1 < linestrings.len() {
        let (a, b) = (linestrings[i].mean_t, linestrings[i + 1].mean_t);
        if b - a > gap_threshold {
            let t = 0.5 * (a + b);
            let samples = midline_samples(s_range, t);
            linestrings.insert(i + 1, Linestring::from_frenet(samples, ref_line, true));
            inserted += 1;
        } else {
            i += 1;
        }
    }
    inserted
}

fn midline_samples((s0, s1): (f64, f64), t: f64) -> Vec<FrenetPose> {
    let n = (crate::math::ceil(s1 - s0) as usize).max(1);
    (0..=n)
        .map(|k| FrenetPose {
            s: s0 + (s1 - s0) * k as f64 / n as f64,
            t,
        })
        .collect()
}

/// Cuts the lane lines into sections along the reference line and fills
/// missing lanes.
pub fn build_lanelet_map(
    lanes: &[LaneLine],
    ref_line: &ReferenceLine,
    params: &LaneletParams,
) -> LaneletMapModel {
    let total = ref_line.length();
    let n = section_count(total, params.section_length);
    let mut bounds: Vec<f64> = (0..n).map(|i| i as f64 * params.section_length).collect();
    bounds.push(total);

    let mut per_section: Vec<Vec<Vec<FrenetPose>>> = (0..n).map(|_| Vec::new()).collect();
    for lane in lanes {
        let pieces = cut_lane_line(lane, ref_line, &bounds, params.lateral_bound, params.merge_distance);
        for (k, section_pieces) in pieces.into_iter().enumerate() {
            per_section[k].extend(section_pieces);
        }
    }

    let sections = per_section
        .into_iter()
        .enumerate()
        .map(|(index, pieces)| {
            let s_range = (bounds[index], bounds[index + 1]);
            let mut linestrings: Vec<Linestring> = merge_close(pieces, params.merge_distance)
                .into_iter()
                .map(|f| Linestring::from_frenet(f, ref_line, false))
                .collect();
            let inserted = fill_section_gaps(&mut linestrings, s_range, ref_line, params.gap_threshold);
            let lanelets = (0..linestrings.len().saturating_sub(1))
                .map(|i| Lanelet { right: i, left: i + 1 })
                .collect::<Vec<_>>();
            LaneletSection {
                index,
                s_start: s_range.0,
                s_end: s_range.1,
                degenerate: lanelets.is_empty(),
                linestrings,
                lanelets,
                inserted,
            }
        })
        .collect();
    LaneletMapModel { sections }
}
