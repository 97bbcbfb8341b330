//! The subcommands behind the `scenex` binary.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use scenex_core::openx::OpenXError;
use scenex_core::pipeline::{compare_scenario, extract, Extraction, PipelineError, ScenarioComparison, Stage};
use scenex_core::PipelineConfig;

use crate::compare_io::{write_comparison, ComparisonSummary};
use crate::config::{load_config, ConfigFileError};
use crate::debug::write_debug;
use crate::drive_log::{drive_log_bytes, load_drive_log, LogError};
use crate::fsutil::write_atomic;
use crate::report::{ExtractionReport, Timing};
use crate::synth::{fixture, synthesize_drive, DriveSpec, SynthError, FIXTURES};
use crate::xml::{parse_opendrive, parse_openscenario, serialize_opendrive, serialize_openscenario, Diagnostic, XmlError};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("[config] {0}")]
    Config(#[from] ConfigFileError),
    #[error("[ingest] {path}: {source}")]
    Log { path: String, source: LogError },
    #[error("[{}] {}", .0.stage().as_str(), .0)]
    Pipeline(#[from] PipelineError),
    #[error("[synth] {0}")]
    Synth(#[from] SynthError),
    #[error("[synth] {path}: {message}")]
    Spec { path: String, message: String },
    #[error("[openx] {path}: {source}")]
    Xml { path: String, source: XmlError },
    #[error("[io] {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("[validate] {path}: {message}")]
    NotCanonical { path: String, message: String },
}

impl CommandError {
    /// 1 for bad input, 2 when an internal invariant did not hold.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Pipeline(PipelineError::OpenX(OpenXError::Discontinuity { .. } | OpenXError::Invalid(_))) => 2,
            _ => 1,
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            CommandError::Config(_) => Stage::Config.as_str(),
            CommandError::Log { .. } => "ingest",
            CommandError::Pipeline(e) => e.stage().as_str(),
            CommandError::Synth(_) | CommandError::Spec { .. } => "synth",
            CommandError::Xml { .. } | CommandError::NotCanonical { .. } => Stage::OpenX.as_str(),
            CommandError::Io { .. } => "io",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CommandError + '_ {
    move |source| CommandError::Io { path: path.display().to_string(), source }
}

pub fn config_from(path: Option<&Path>, overrides: &[String]) -> Result<PipelineConfig, CommandError> {
    Ok(load_config(path, overrides)?)
}

/// File stem used to name every artifact of a drive.
pub fn log_stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "drive".into());
    name.split('.').next().filter(|s| !s.is_empty()).unwrap_or("drive").to_string()
}

/// Serialized artifacts of one extraction: the road, then one scenario per
/// successfully parameterized event.
pub fn render_artifacts(ex: &Extraction) -> Result<Vec<(String, String)>, CommandError> {
    let mut files = vec![(ex.opendrive_file.clone(), serialize_opendrive(&ex.opendrive).map_err(PipelineError::from)?)];
    for o in &ex.scenarios {
        if let Ok((_, doc)) = &o.result {
            files.push((format!("{}.xosc", o.name), serialize_openscenario(doc).map_err(PipelineError::from)?));
        }
    }
    Ok(files)
}

/// Runs the pipeline over one drive log and writes its artifacts and report
/// into `out`.
pub fn cmd_extract(log_path: &Path, cfg: &PipelineConfig, out: &Path, debug_dump: bool) -> Result<ExtractionReport, CommandError> {
    let started = Instant::now();
    let log = load_drive_log(log_path).map_err(|source| CommandError::Log { path: log_path.display().to_string(), source })?;
    let stem = log_stem(log_path);
    let ex = extract(&log, cfg, &stem)?;
    let extract_ms = started.elapsed().as_secs_f64() * 1e3;
    let written = Instant::now();
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    for (name, text) in render_artifacts(&ex)? {
        let path = out.join(name);
        write_atomic(&path, text.as_bytes()).map_err(io_err(&path))?;
    }
    if debug_dump {
        write_debug(out, &stem, &ex).map_err(io_err(out))?;
    }
    let mut report = ExtractionReport::new(&log_path.display().to_string(), &ex, Timing { extract_ms, write_ms: 0.0 });
    report.timing.write_ms = written.elapsed().as_secs_f64() * 1e3;
    let path = out.join(format!("{stem}_report.json"));
    write_atomic(&path, report.to_json().as_bytes()).map_err(io_err(&path))?;
    Ok(report)
}

/// Extracts several drives on up to `jobs` threads. Results keep input order.
pub fn cmd_extract_many(
    logs: &[PathBuf],
    cfg: &PipelineConfig,
    out: &Path,
    debug_dump: bool,
    jobs: usize,
) -> Vec<Result<ExtractionReport, CommandError>> {
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<ExtractionReport, CommandError>>>> = logs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, logs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = logs.get(i) else { break };
                let r = cmd_extract(path, cfg, out, debug_dump);
                *results[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    results.into_iter().map(|m| m.into_inner().expect("result slot").expect("every log processed")).collect()
}

/// Resolves a drive spec from a TOML file or, failing that, a fixture name.
pub fn load_spec(spec: &str) -> Result<DriveSpec, CommandError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        return toml::from_str(&text).map_err(|e| CommandError::Spec { path: spec.to_string(), message: e.to_string() });
    }
    if FIXTURES.contains(&spec) || spec.starts_with("corpus_") {
        return Ok(fixture(spec)?);
    }
    Err(CommandError::Spec { path: spec.to_string(), message: format!("no such file or fixture; fixtures: {}", FIXTURES.join(", ")) })
}

/// Path of the ground-truth file written next to a synthetic log.
pub fn truth_path(log_path: &Path) -> PathBuf {
    log_path.with_file_name(format!("{}.truth.json", log_stem(log_path)))
}

/// Writes a synthetic drive log to `out` and its ground truth alongside.
pub fn cmd_synth(spec: &str, seed: u64, out: &Path) -> Result<(PathBuf, PathBuf), CommandError> {
    let spec = load_spec(spec)?;
    let (log, truth) = synthesize_drive(&spec, seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    write_atomic(out, &drive_log_bytes(&log)).map_err(io_err(out))?;
    let truth_file = truth_path(out);
    let mut text = serde_json::to_string_pretty(&truth).expect("truth serializes");
    text.push('\n');
    write_atomic(&truth_file, text.as_bytes()).map_err(io_err(&truth_file))?;
    Ok((out.to_path_buf(), truth_file))
}

fn read_text(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

/// Replays a generated scenario and compares it with the drive it came from.
pub fn cmd_compare(
    log_path: &Path,
    xosc: &Path,
    xodr: &Path,
    cfg: &PipelineConfig,
    out: &Path,
) -> Result<(ComparisonSummary, ScenarioComparison), CommandError> {
    let log = load_drive_log(log_path).map_err(|source| CommandError::Log { path: log_path.display().to_string(), source })?;
    let osc = parse_openscenario(&read_text(xosc)?).map_err(|source| CommandError::Xml { path: xosc.display().to_string(), source })?;
    let odr = parse_opendrive(&read_text(xodr)?).map_err(|source| CommandError::Xml { path: xodr.display().to_string(), source })?;
    let ex = extract(&log, cfg, &log_stem(log_path))?;
    let cmp = compare_scenario(&osc.document, &odr.document, &ex.histories, &ex.road, cfg)?;
    let scenario = log_stem(xosc);
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    write_comparison(out, &scenario, &cmp).map_err(io_err(out))?;
    let summary = ComparisonSummary { scenario, adversary: cmp.adversary.report, ego: cmp.ego.report };
    Ok((summary, cmp))
}

/// Re-parses an emitted OpenX file, checks its invariants and that it is in
/// canonical form. Returns the parse diagnostics.
pub fn cmd_validate(path: &Path) -> Result<Vec<Diagnostic>, CommandError> {
    let text = read_text(path)?;
    let name = path.display().to_string();
    let xml = |source| CommandError::Xml { path: name.clone(), source };
    let (diagnostics, canonical) = match path.extension().and_then(|e| e.to_str()) {
        Some("xodr") => {
            let r = parse_opendrive(&text).map_err(xml)?;
            (r.diagnostics, serialize_opendrive(&r.document).map_err(|e| xml(e.into()))?)
        }
        Some("xosc") => {
            let r = parse_openscenario(&text).map_err(xml)?;
            (r.diagnostics, serialize_openscenario(&r.document).map_err(|e| xml(e.into()))?)
        }
        _ => return Err(CommandError::NotCanonical { path: name, message: "expected a .xodr or .xosc file".into() }),
    };
    if diagnostics.is_empty() && canonical != text {
        let at = canonical.bytes().zip(text.bytes()).position(|(a, b)| a != b).unwrap_or(canonical.len().min(text.len()));
        return Err(CommandError::NotCanonical { path: name, message: format!("differs from canonical form at byte {at}") });
    }
    Ok(diagnostics)
}
