//! Comparison output: one CSV of paired samples and a JSON summary per actor.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use scenex_core::pipeline::{ActorComparison, ScenarioComparison};
use scenex_core::replay::{common_samples, SimilarityReport};
use serde::{Deserialize, Serialize};

use crate::fsutil::write_atomic;

pub const CSV_HEADER: &str = "time,s_real,s_sim,t_real,t_sim,v_real,v_sim";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub scenario: String,
    pub adversary: SimilarityReport,
    pub ego: SimilarityReport,
}

/// CSV of the samples both traces share.
pub fn comparison_csv(actor: &ActorComparison) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (r, s) in common_samples(&actor.real, &actor.sim) {
        let _ = writeln!(out, "{},{},{},{},{},{},{}", r.time, r.s, s.s, r.t, s.t, r.speed, s.speed);
    }
    out
}

/// Writes `<scenario>_compare.csv` for the adversary, `<scenario>_ego_compare.csv`
/// for the ego and `<scenario>_compare.json` with both reports.
pub fn write_comparison(dir: &Path, scenario: &str, cmp: &ScenarioComparison) -> std::io::Result<Vec<PathBuf>> {
    let csv = dir.join(format!("{scenario}_compare.csv"));
    let ego_csv = dir.join(format!("{scenario}_ego_compare.csv"));
    let json = dir.join(format!("{scenario}_compare.json"));
    let summary = ComparisonSummary { scenario: scenario.to_string(), adversary: cmp.adversary.report, ego: cmp.ego.report };
    write_atomic(&csv, comparison_csv(&cmp.adversary).as_bytes())?;
    write_atomic(&ego_csv, comparison_csv(&cmp.ego).as_bytes())?;
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    write_atomic(&json, text.as_bytes())?;
    Ok(vec![csv, ego_csv, json])
}
