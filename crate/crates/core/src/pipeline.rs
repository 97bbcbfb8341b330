//! The end-to-end extraction over one drive log, and replay-based comparison
//! of an extracted scenario against its source.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::config::{ConfigError, PipelineConfig};
use crate::ingest::DriveLog;
use crate::lane_geometry::{build_lanelet_map, construct_lanes, LaneConstruction, LaneletMapModel, LaneletParams};
use crate::openx::{build_opendrive, build_openscenario, OdrDocument, OpenXError, OscDocument, ADVERSARY, EGO};
use crate::replay::{compare, interpret, real_trace, ReplayError, ReplayParams, SimTrace, SimilarityReport, TraceSample};
use crate::road_model::{build_reference_line, sectionize, RoadModel, RoadModelError};
use crate::scenario_detect::{
    build_histories, detect_events, extract_parameters, DetectError, DetectParams, Histories, HistoryParams,
    ScenarioKind, ScenarioMark, ScenarioParameters,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    LaneGeometry,
    RoadModel,
    ScenarioDetect,
    OpenX,
    Replay,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::LaneGeometry => "lane_geometry",
            Stage::RoadModel => "road_model",
            Stage::ScenarioDetect => "scenario_detect",
            Stage::OpenX => "openx",
            Stage::Replay => "replay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no lane markings were recovered from the drive")]
    NoLanes,
    #[error(transparent)]
    Road(#[from] RoadModelError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    OpenX(#[from] OpenXError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Config(_) => Stage::Config,
            PipelineError::NoLanes => Stage::LaneGeometry,
            PipelineError::Road(_) => Stage::RoadModel,
            PipelineError::Detect(_) => Stage::ScenarioDetect,
            PipelineError::OpenX(_) => Stage::OpenX,
            PipelineError::Replay(_) => Stage::Replay,
        }
    }
}

/// One detected event and what became of it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub mark: ScenarioMark,
    /// `<stem>_scenario<k>`, numbered from 1 in detection order.
    pub name: String,
    pub result: Result<(ScenarioParameters, OscDocument), PipelineError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub lanes: LaneConstruction,
    pub lanelet_map: LaneletMapModel,
    pub road: RoadModel,
    pub histories: Histories,
    pub scenarios: Vec<ScenarioOutcome>,
    pub opendrive: OdrDocument,
    /// File name the scenarios reference for their road network.
    pub opendrive_file: String,
}

impl Extraction {
    pub fn count(&self, kind: ScenarioKind) -> usize {
        self.scenarios.iter().filter(|s| s.mark.kind == kind).count()
    }

    pub fn junction_count(&self) -> usize {
        self.scenarios.iter().filter(|s| s.mark.junction).count()
    }

    pub fn clipped_count(&self) -> usize {
        self.scenarios
            .iter()
            .filter(|s| s.mark.clipped_start || s.mark.clipped_end)
            .count()
    }
}

/// Runs lane construction, road modelling, detection, parameter extraction
/// and OpenX generation over one drive. Events whose parameters cannot be
/// extracted are kept with their error instead of failing the drive.
pub fn extract(log: &DriveLog, cfg: &PipelineConfig, stem: &str) -> Result<Extraction, PipelineError> {
    cfg.validate()?;
    let lanes = construct_lanes(log, cfg);
    if lanes.lanes.is_empty() {
        return Err(PipelineError::NoLanes);
    }
    let ref_line = build_reference_line(&log.ego_poses(), cfg.ref_line_spacing, cfg.min_path_length)?;
    let lanelet_map = build_lanelet_map(&lanes.lanes, &ref_line, &LaneletParams::from(cfg));
    let road = sectionize(&lanelet_map, &ref_line)?;
    let opendrive = build_opendrive(&road, stem)?;
    let opendrive_file = format!("{stem}.xodr");

    let histories = build_histories(log, &road, &HistoryParams::from(cfg));
    let marks = detect_events(&histories, &road, &DetectParams::from(cfg));
    let scenarios = marks
        .into_iter()
        .enumerate()
        .map(|(k, mark)| {
            let name = format!("{stem}_scenario{}", k + 1);
            let result = extract_parameters(&mark, &histories, &road, cfg)
                .map_err(PipelineError::from)
                .and_then(|p| {
                    let doc = build_openscenario(&p, &opendrive_file, &name)?;
                    Ok((p, doc))
                });
            ScenarioOutcome { mark, name, result }
        })
        .collect();

    Ok(Extraction {
        lanes,
        lanelet_map,
        road,
        histories,
        scenarios,
        opendrive,
        opendrive_file,
    })
}

/// Recorded and simulated trajectories of one actor with their metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorComparison {
    pub entity: String,
    pub report: SimilarityReport,
    pub real: Vec<TraceSample>,
    pub sim: Vec<TraceSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison {
    pub adversary: ActorComparison,
    pub ego: ActorComparison,
    pub trace: SimTrace,
}

/// Replays `osc` on `odr` and compares both actors with the recording over
/// the scenario window stored in the document's parameters.
pub fn compare_scenario(
    osc: &OscDocument,
    odr: &OdrDocument,
    histories: &Histories,
    road: &RoadModel,
    cfg: &PipelineConfig,
) -> Result<ScenarioComparison, PipelineError> {
    let number = |name: &str| -> Result<f64, PipelineError> {
        osc.parameter(name)
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or(PipelineError::OpenX(OpenXError::Missing("scenario window parameters")))
    };
    let start = number("WindowStart")?;
    let end = number("WindowEnd")?;
    let track_id = number("SourceTrack")? as u32;
    let trace = interpret(osc, odr, &ReplayParams::from(cfg))?;
    let min_overlap = cfg.min_window;
    let one = |entity: &str, history| -> Result<ActorComparison, PipelineError> {
        let real = real_trace(history, road, start, end, cfg.dt);
        let sim: Vec<TraceSample> = trace.entity(entity).map(|s| s.to_vec()).unwrap_or_default();
        let report = compare(&real, &sim, min_overlap)?;
        Ok(ActorComparison {
            entity: String::from(entity),
            report,
            real,
            sim,
        })
    };
    let adversary_history = histories
        .track(track_id)
        .ok_or(PipelineError::Detect(DetectError::UnknownTrack(track_id)))?;
    let adversary = one(ADVERSARY, adversary_history)?;
    let ego = one(EGO, &histories.ego)?;
    Ok(ScenarioComparison { adversary, ego, trace })
}
