//! Every threshold the pipeline consumes comes from the configuration: moving
//! any single key away from its default changes what the pipeline produces.

mod support;

use scenex::synth::{fixture, SpeedProfile};
use scenex_core::pipeline::{compare_scenario, extract};
use scenex_core::PipelineConfig;
use support::{synth, Drive};

/// Everything the pipeline produces for one drive, replay included.
fn fingerprint(drive: &Drive, cfg: &PipelineConfig) -> String {
    let ex = match extract(&drive.log, cfg, "drive") {
        Ok(ex) => ex,
        Err(e) => return format!("error: {e:?}"),
    };
    let mut out = format!("{:?}\n{:?}\n{:?}\n{:?}\n", ex.lanes, ex.lanelet_map, ex.road, ex.histories);
    for o in &ex.scenarios {
        out += &format!("{:?}\n{:?}\n", o.mark, o.result);
        if let Ok((_, doc)) = &o.result {
            out += &format!("{:?}\n", compare_scenario(doc, &ex.opendrive, &ex.histories, &ex.road, cfg));
        }
    }
    out
}

/// The drive on which a key shows its effect.
#[derive(Clone, Copy)]
enum Case {
    CutIn,
    /// Cut-in by a car riding level with the ego, 1.5 m behind it.
    Alongside,
}

/// A value for each key that is far enough from the default to matter.
const OVERRIDES: &[(&str, f64, Case)] = &[
    ("cluster_join_distance", 0.3, Case::CutIn),
    ("inactivity_limit", 1e6, Case::CutIn),
    ("merge_distance", 0.01, Case::CutIn),
    ("section_length", 20.0, Case::CutIn),
    ("gap_threshold", 3.0, Case::CutIn),
    ("linestring_merge_distance", 0.02, Case::CutIn),
    ("candidate_lateral", 4.0, Case::CutIn),
    ("trigger_lateral", 1.0, Case::CutIn),
    ("ahead_tolerance", 0.5, Case::Alongside),
    ("window_before", 6.0, Case::CutIn),
    ("window_after", 4.0, Case::CutIn),
    ("min_window", 20.0, Case::CutIn),
    ("samples", 7.0, Case::CutIn),
    ("lane_change_duration", 2.0, Case::CutIn),
    ("intensity_k", 50.0, Case::CutIn),
    ("intensity_absolute", 0.9, Case::CutIn),
    ("intensity_min_contrast", 0.8, Case::CutIn),
    ("min_road_points", 1000.0, Case::CutIn),
    ("curb_d2_threshold", 10.0, Case::CutIn),
    ("curb_d1_threshold", 10.0, Case::CutIn),
    ("ref_line_spacing", 0.25, Case::CutIn),
    ("min_path_length", 1e5, Case::CutIn),
    ("frenet_lateral_bound", 4.0, Case::CutIn),
    ("history_rate_hz", 2.0, Case::CutIn),
    ("min_track_duration", 100.0, Case::CutIn),
    ("max_interp_gap", 0.01, Case::CutIn),
    ("dt", 0.05, Case::CutIn),
    ("replay_timeout", 1.0, Case::CutIn),
    ("replay_tail", 4.0, Case::CutIn),
];

#[test]
fn every_key_changes_the_output() {
    let cut_in = synth(fixture("two_lane_cut_in").unwrap(), 11);
    let mut spec = fixture("two_lane_cut_in").unwrap();
    spec.actors[0].gap = -1.5;
    spec.actors[0].speed = SpeedProfile::constant(10.0);
    let alongside = synth(spec, 11);

    let base = PipelineConfig::default();
    let reference = [fingerprint(&cut_in, &base), fingerprint(&alongside, &base)];
    assert_eq!(reference[0], fingerprint(&cut_in, &base), "pipeline is not deterministic");
    assert!(reference[1].contains("CutIn"), "the alongside cut-in is detected by default");

    let listed: Vec<&str> = OVERRIDES.iter().map(|(k, _, _)| *k).collect();
    assert_eq!(listed, PipelineConfig::KEYS, "every key needs an override");

    let unchanged: Vec<&str> = OVERRIDES
        .iter()
        .filter(|(key, value, drive)| {
            let mut cfg = base.clone();
            cfg.set(key, *value).unwrap();
            let (drive, reference) = match drive {
                Case::CutIn => (&cut_in, &reference[0]),
                Case::Alongside => (&alongside, &reference[1]),
            };
            fingerprint(drive, &cfg) == *reference
        })
        .map(|(key, _, _)| *key)
        .collect();
    assert!(unchanged.is_empty(), "keys without effect: {unchanged:?}");
}
