//! The per-drive extraction report.

use scenex_core::pipeline::Extraction;
use scenex_core::scenario_detect::{ScenarioKind, ScenarioMark, ScenarioParameters};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub cut_in: usize,
    pub cut_out: usize,
    /// Events whose parameters or scenario could not be produced.
    pub failed: usize,
    pub dropped_tracks: usize,
    pub dropped_samples: usize,
    pub degenerate_sections: usize,
    pub clipped_windows: usize,
    /// Cut-ins by vehicles first seen outside the mapped lanes.
    pub junction_flags: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub name: String,
    #[serde(flatten)]
    pub mark: ScenarioMark,
    pub file: Option<String>,
    pub parameters: Option<ScenarioParameters>,
    pub error: Option<EventError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub extract_ms: f64,
    pub write_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub log: String,
    pub opendrive: String,
    pub sections: usize,
    pub counts: Counts,
    pub events: Vec<EventReport>,
    /// Wall-clock figures; the only field that varies between identical runs.
    pub timing: Timing,
}

impl ExtractionReport {
    pub fn new(log: &str, ex: &Extraction, timing: Timing) -> Self {
        let events = ex
            .scenarios
            .iter()
            .map(|o| match &o.result {
                Ok((params, _)) => EventReport {
                    name: o.name.clone(),
                    mark: o.mark,
                    file: Some(format!("{}.xosc", o.name)),
                    parameters: Some(params.clone()),
                    error: None,
                },
                Err(e) => EventReport {
                    name: o.name.clone(),
                    mark: o.mark,
                    file: None,
                    parameters: None,
                    error: Some(EventError { stage: e.stage().as_str().into(), message: e.to_string() }),
                },
            })
            .collect::<Vec<_>>();
        Self {
            log: log.to_string(),
            opendrive: ex.opendrive_file.clone(),
            sections: ex.road.sections.len(),
            counts: Counts {
                cut_in: ex.count(ScenarioKind::CutIn),
                cut_out: ex.count(ScenarioKind::CutOut),
                failed: events.iter().filter(|e| e.error.is_some()).count(),
                dropped_tracks: ex.histories.dropped_tracks,
                dropped_samples: ex.histories.dropped_samples,
                degenerate_sections: ex.road.degenerate_sections().len(),
                clipped_windows: ex.clipped_count(),
                junction_flags: ex.junction_count(),
            },
            events,
            timing,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
