//! Parallel batch evaluation.

use std::path::{Path, PathBuf};

use diagram_judge_core::verify::{CriterionResult, DetectionSet, Verdict};
use diagram_judge_core::{evaluate, ThresholdConfig};
use rayon::prelude::*;

use crate::config::config_fingerprint;
use crate::io::{load_detections, load_image};
use crate::manifest::ProblemRecord;
use crate::report::Report;

/// Where relative paths in a manifest resolve.
#[derive(Debug, Clone, Default)]
pub struct DataDirs {
    pub images: PathBuf,
    /// Falls back to the images directory.
    pub detections: Option<PathBuf>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// A failed verdict carrying `why` on every criterion.
fn failed(record: &ProblemRecord, why: &str) -> Verdict {
    Verdict {
        problem_id: record.problem_id.clone(),
        passed: false,
        criterion_results: record.spec.criteria.iter().map(|c| CriterionResult::fail(c, why)).collect(),
    }
}

fn detections_for(record: &ProblemRecord, dirs: &DataDirs) -> Result<Option<DetectionSet>, String> {
    let base = dirs.detections.as_deref().unwrap_or(&dirs.images);
    let path = match &record.detections {
        Some(p) => resolve(base, p),
        None if record.spec.needs_detections() && dirs.detections.is_some() => {
            base.join(format!("{}.json", record.problem_id))
        }
        None => return Ok(None),
    };
    if !path.exists() && record.detections.is_none() {
        return Ok(None);
    }
    let set = load_detections(&path).map_err(|e| format!("unreadable detections: {e}"))?;
    set.validate(None).map_err(|e| format!("invalid detections: {e}"))?;
    Ok(Some(set))
}

/// Judges one record. Never fails: unreadable inputs and invalid specs give
/// a failed verdict with the reason as diagnostic.
pub fn eval_record(record: &ProblemRecord, dirs: &DataDirs, cfg: &ThresholdConfig) -> Verdict {
    let img = match load_image(&resolve(&dirs.images, &record.image), cfg.eval_resolution) {
        Ok(img) => img,
        Err(e) => return failed(record, &format!("unreadable image: {e}")),
    };
    let det = match detections_for(record, dirs) {
        Ok(d) => d,
        Err(e) => return failed(record, &e),
    };
    let mut spec = record.spec.clone();
    spec.problem_id = record.problem_id.clone();
    match evaluate(&img, &spec, cfg, det.as_ref()) {
        Ok(v) => v,
        Err(e) => failed(record, &e.to_string()),
    }
}

/// Evaluates every record on a pool of `workers` threads. Verdicts keep
/// manifest order, so the report does not depend on scheduling.
pub fn run_eval(records: &[ProblemRecord], dirs: &DataDirs, cfg: &ThresholdConfig, workers: usize) -> Report {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let verdicts: Vec<Verdict> = pool.install(|| records.par_iter().map(|r| eval_record(r, dirs, cfg)).collect());
    Report::new(config_fingerprint(cfg), records.iter().map(|r| r.domain).zip(verdicts).collect())
}
