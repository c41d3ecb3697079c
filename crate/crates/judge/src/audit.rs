//! Self-audit: render the synthetic catalog, judge it, and compare with the
//! verdicts the renderer guarantees.

use std::fs;
use std::path::{Path, PathBuf};

use diagram_judge_core::synth::{audit_cases, render, AuditCase, CatalogEntry, Mutation};
use diagram_judge_core::{ConstraintSpec, ThresholdConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::harness::{run_eval, DataDirs};
use crate::io::{save_png, write_json};
use crate::manifest::{write_manifest, ProblemRecord};
use crate::report::{emit_report, Report, ReportFormat};
use crate::{JudgeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Pass,
    Fail,
}

/// One line of `expectations.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    /// Relative to the suite directory.
    pub image: PathBuf,
    pub spec: ConstraintSpec,
    pub expected: Expected,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub rows: Vec<AuditRow>,
    pub report: Report,
    /// Problem ids whose verdict differs from the expectation.
    pub disagreements: Vec<String>,
}

impl AuditOutcome {
    pub fn agreement(&self) -> usize {
        self.rows.len() - self.disagreements.len()
    }
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|source| JudgeError::Io { path: p.into(), source })
}

fn write_case(case: &AuditCase, out: &Path) -> Result<ProblemRecord> {
    let rendered = render(&case.recipe)?;
    let file = format!("{}.png", case.id);
    save_png(&out.join("images").join(&file), &rendered.image)?;
    write_json(&out.join("specs").join(format!("{}.json", case.id)), &case.spec)?;
    let detections = match &rendered.detections {
        Some(d) => {
            let name = PathBuf::from(format!("{}.json", case.id));
            let mut d = d.clone();
            d.image = file.clone();
            write_json(&out.join("detections").join(&name), &d)?;
            Some(name)
        }
        None => None,
    };
    Ok(ProblemRecord {
        problem_id: case.id.clone(),
        domain: case.spec.domain,
        prompt_text: serde_json::to_string(&case.recipe.scene).expect("serializable"),
        spec: case.spec.clone(),
        image: file.into(),
        detections,
    })
}

/// Writes `images/`, `specs/`, `detections/`, `manifest.jsonl`,
/// `expectations.jsonl` and `report.json` under `out`, then judges the
/// suite with `cfg` on `workers` threads.
pub fn generate_audit_suite(
    catalog: &[CatalogEntry],
    cfg: &ThresholdConfig,
    out: &Path,
    workers: usize,
) -> Result<AuditOutcome> {
    let cases = audit_cases(catalog)?;
    for dir in ["images", "specs", "detections"] {
        mkdir(&out.join(dir))?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let records = pool.install(|| cases.par_iter().map(|c| write_case(c, out)).collect::<Result<Vec<_>>>())?;
    write_manifest(&out.join("manifest.jsonl"), &records)?;

    let rows: Vec<AuditRow> = cases
        .iter()
        .map(|c| AuditRow {
            image: PathBuf::from("images").join(format!("{}.png", c.id)),
            spec: c.spec.clone(),
            expected: if c.expected_pass { Expected::Pass } else { Expected::Fail },
            mutation: c.mutation.clone(),
        })
        .collect();
    let mut text = String::new();
    for r in &rows {
        text.push_str(&serde_json::to_string(r).expect("serializable"));
        text.push('\n');
    }
    let path = out.join("expectations.jsonl");
    fs::write(&path, text).map_err(|source| JudgeError::Io { path, source })?;

    let dirs = DataDirs { images: out.join("images"), detections: Some(out.join("detections")) };
    let report = run_eval(&records, &dirs, cfg, workers);
    let path = out.join("report.json");
    fs::write(&path, emit_report(&report, ReportFormat::Json)).map_err(|source| JudgeError::Io { path, source })?;

    let disagreements = report
        .verdicts
        .iter()
        .zip(&cases)
        .filter(|(v, c)| v.passed != c.expected_pass)
        .map(|(v, _)| v.problem_id.clone())
        .collect();
    Ok(AuditOutcome { rows, report, disagreements })
}
