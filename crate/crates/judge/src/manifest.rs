//! JSON-lines problem manifests.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use diagram_judge_core::verify::Domain;
use diagram_judge_core::ConstraintSpec;
use serde::{Deserialize, Serialize};

/// One benchmark problem: the image to judge and the spec to judge it by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRecord {
    pub problem_id: String,
    pub domain: Domain,
    #[serde(default)]
    pub prompt_text: String,
    pub spec: ConstraintSpec,
    /// Relative to the images directory unless absolute.
    pub image: PathBuf,
    /// Relative to the detections directory unless absolute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detections: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifestError {
    #[error("manifest line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("manifest line {line}: problem id {id:?} already used")]
    DuplicateId { line: usize, id: String },
    #[error("manifest line {line}: unknown domain {domain:?}")]
    UnknownDomain { line: usize, domain: String },
}

/// Parses a manifest; blank lines are skipped and line numbers are 1-based.
pub fn parse_manifest(text: &str) -> Result<Vec<ProblemRecord>, ManifestError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| ManifestError::ParseError { line, msg: e.to_string() })?;
        // report a bad domain name as such, before serde folds it into a
        // generic variant error
        for domain in [value.get("domain"), value.get("spec").and_then(|s| s.get("domain"))].into_iter().flatten() {
            if let Some(d) = domain.as_str().filter(|d| Domain::parse(d).is_none()) {
                return Err(ManifestError::UnknownDomain { line, domain: d.to_string() });
            }
        }
        let record: ProblemRecord =
            serde_json::from_value(value).map_err(|e| ManifestError::ParseError { line, msg: e.to_string() })?;
        if record.domain != record.spec.domain {
            return Err(ManifestError::ParseError {
                line,
                msg: format!("record domain {} differs from spec domain {}", record.domain.name(), record.spec.domain.name()),
            });
        }
        if !seen.insert(record.problem_id.clone()) {
            return Err(ManifestError::DuplicateId { line, id: record.problem_id });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn load_manifest(path: &Path) -> crate::Result<Vec<ProblemRecord>> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::JudgeError::Io { path: path.into(), source })?;
    Ok(parse_manifest(&text)?)
}

pub fn write_manifest(path: &Path, records: &[ProblemRecord]) -> crate::Result<()> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r).expect("serializable"));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| crate::JudgeError::Io { path: path.into(), source })
}
