//! Every tunable threshold consumed by the pipeline.

use alloc::string::String;
use core::fmt;

/// Pipeline tunables. Defaults reproduce the thresholds of the reference method.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PipelineConfig {
    /// A lane point joins a cluster when its nearest member is closer than this (m).
    pub cluster_join_distance: f64,
    /// Clusters inactive for more than this many scans are promoted.
    pub inactivity_limit: u32,
    /// A segment merges into a lane when its projected distance is below this (m).
    pub merge_distance: f64,
    pub section_length: f64,
    /// Adjacent linestrings further apart than this indicate a missing lane (m).
    pub gap_threshold: f64,
    /// Linestrings of one section closer than this laterally are the same marking (m).
    pub linestring_merge_distance: f64,
    pub candidate_lateral: f64,
    pub trigger_lateral: f64,
    /// "Ahead or parallel": adversary s ≥ ego s − this (m).
    pub ahead_tolerance: f64,
    pub window_before: f64,
    pub window_after: f64,
    pub min_window: f64,
    /// Number of speed/distance samples per actor (m).
    pub samples: usize,
    pub lane_change_duration: f64,
    pub intensity_k: f64,
    /// When set, lane points are those above this absolute intensity.
    pub intensity_absolute: Option<f64>,
    /// Minimum margin above the scan mean a lane point must clear.
    pub intensity_min_contrast: f64,
    pub min_road_points: usize,
    pub curb_d2_threshold: f64,
    pub curb_d1_threshold: f64,
    pub ref_line_spacing: f64,
    pub min_path_length: f64,
    pub frenet_lateral_bound: f64,
    pub history_rate_hz: f64,
    pub min_track_duration: f64,
    pub max_interp_gap: f64,
    pub dt: f64,
    pub replay_timeout: f64,
    pub replay_tail: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            cluster_join_distance: 1.0,
            inactivity_limit: 20,
            merge_distance: 0.25,
            section_length: 25.0,
            gap_threshold: 5.0,
            linestring_merge_distance: 1.0,
            candidate_lateral: 1.5,
            trigger_lateral: 0.5,
            ahead_tolerance: 2.0,
            window_before: 8.0,
            window_after: 5.0,
            min_window: 3.0,
            samples: 10,
            lane_change_duration: 3.0,
            intensity_k: 2.0,
            intensity_absolute: None,
            intensity_min_contrast: 0.1,
            min_road_points: 5,
            curb_d2_threshold: 0.05,
            curb_d1_threshold: 0.1,
            ref_line_spacing: 0.5,
            min_path_length: 1.0,
            frenet_lateral_bound: 50.0,
            history_rate_hz: 1.0,
            min_track_duration: 2.0,
            max_interp_gap: 2.0,
            dt: 0.1,
            replay_timeout: 120.0,
            replay_tail: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}` must be {requirement}, got {value}")]
    Invalid {
        key: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

impl PipelineConfig {
    /// Names of all numeric keys accepted by [`PipelineConfig::set`].
    pub const KEYS: &'static [&'static str] = &[
        "cluster_join_distance",
        "inactivity_limit",
        "merge_distance",
        "section_length",
        "gap_threshold",
        "linestring_merge_distance",
        "candidate_lateral",
        "trigger_lateral",
        "ahead_tolerance",
        "window_before",
        "window_after",
        "min_window",
        "samples",
        "lane_change_duration",
        "intensity_k",
        "intensity_absolute",
        "intensity_min_contrast",
        "min_road_points",
        "curb_d2_threshold",
        "curb_d1_threshold",
        "ref_line_spacing",
        "min_path_length",
        "frenet_lateral_bound",
        "history_rate_hz",
        "min_track_duration",
        "max_interp_gap",
        "dt",
        "replay_timeout",
        "replay_tail",
    ];

    /// Sets one key from a numeric value. Integer keys truncate toward zero.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        match key {
            "cluster_join_distance" => self.cluster_join_distance = value,
            "inactivity_limit" => self.inactivity_limit = value.max(0.0) as u32,
            "merge_distance" => self.merge_distance = value,
            "section_length" => self.section_length = value,
            "gap_threshold" => self.gap_threshold = value,
            "linestring_merge_distance" => self.linestring_merge_distance = value,
            "candidate_lateral" => self.candidate_lateral = value,
            "trigger_lateral" => self.trigger_lateral = value,
            "ahead_tolerance" => self.ahead_tolerance = value,
            "window_before" => self.window_before = value,
            "window_after" => self.window_after = value,
            "min_window" => self.min_window = value,
            "samples" => self.samples = value.max(0.0) as usize,
            "lane_change_duration" => self.lane_change_duration = value,
            "intensity_k" => self.intensity_k = value,
            "intensity_absolute" => self.intensity_absolute = Some(value),
            "intensity_min_contrast" => self.intensity_min_contrast = value,
            "min_road_points" => self.min_road_points = value.max(0.0) as usize,
            "curb_d2_threshold" => self.curb_d2_threshold = value,
            "curb_d1_threshold" => self.curb_d1_threshold = value,
            "ref_line_spacing" => self.ref_line_spacing = value,
            "min_path_length" => self.min_path_length = value,
            "frenet_lateral_bound" => self.frenet_lateral_bound = value,
            "history_rate_hz" => self.history_rate_hz = value,
            "min_track_duration" => self.min_track_duration = value,
            "max_interp_gap" => self.max_interp_gap = value,
            "dt" => self.dt = value,
            "replay_timeout" => self.replay_timeout = value,
            "replay_tail" => self.replay_tail = value,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive: [(&'static str, f64); 26] = [
            ("cluster_join_distance", self.cluster_join_distance),
            ("inactivity_limit", self.inactivity_limit as f64),
            ("merge_distance", self.merge_distance),
            ("section_length", self.section_length),
            ("gap_threshold", self.gap_threshold),
            ("linestring_merge_distance", self.linestring_merge_distance),
            ("candidate_lateral", self.candidate_lateral),
            ("trigger_lateral", self.trigger_lateral),
            ("ahead_tolerance", self.ahead_tolerance),
            ("window_before", self.window_before),
            ("window_after", self.window_after),
            ("min_window", self.min_window),
            ("lane_change_duration", self.lane_change_duration),
            ("intensity_k", self.intensity_k),
            ("intensity_min_contrast", self.intensity_min_contrast),
            ("min_road_points", self.min_road_points as f64),
            ("curb_d2_threshold", self.curb_d2_threshold),
            ("curb_d1_threshold", self.curb_d1_threshold),
            ("ref_line_spacing", self.ref_line_spacing),
            ("min_path_length", self.min_path_length),
            ("frenet_lateral_bound", self.frenet_lateral_bound),
            ("history_rate_hz", self.history_rate_hz),
            ("min_track_duration", self.min_track_duration),
            ("max_interp_gap", self.max_interp_gap),
            ("dt", self.dt),
            ("replay_timeout", self.replay_timeout),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::Invalid {
                    key,
                    requirement: "finite and > 0",
                    value,
                });
            }
        }
        if !(self.replay_tail.is_finite() && self.replay_tail >= 0.0) {
            return Err(ConfigError::Invalid {
                key: "replay_tail",
                requirement: "finite and >= 0",
                value: self.replay_tail,
            });
        }
        if self.samples < 2 {
            return Err(ConfigError::Invalid {
                key: "samples",
                requirement: ">= 2",
                value: self.samples as f64,
            });
        }
        if let Some(v) = self.intensity_absolute {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid {
                    key: "intensity_absolute",
                    requirement: "within [0, 1]",
                    value: v,
                });
            }
        }
        if self.trigger_lateral >= self.candidate_lateral {
            return Err(ConfigError::Invalid {
                key: "trigger_lateral",
                requirement: "smaller than candidate_lateral",
                value: self.trigger_lateral,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn every_key_is_settable() {
        for key in PipelineConfig::KEYS {
            let mut cfg = PipelineConfig::default();
            cfg.set(key, 0.75).unwrap();
            assert_ne!(cfg, PipelineConfig::default(), "{key}");
        }
    }

    #[test]
    fn rejects_non_positive_and_small_m() {
        let mut cfg = PipelineConfig::default();
        cfg.set("merge_distance", 0.0).unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = PipelineConfig::default();
        cfg.samples = 1;
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid { key: "samples", .. })));
        assert!(PipelineConfig::default().set("nope", 1.0).is_err());
    }
}
