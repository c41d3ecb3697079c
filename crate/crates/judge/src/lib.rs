//! File formats, batch evaluation and the command-line front end for
//! `diagram-judge-core`.

pub mod audit;
pub mod config;
pub mod harness;
pub mod io;
pub mod manifest;
pub mod report;

use std::path::PathBuf;

pub use audit::{generate_audit_suite, AuditOutcome, AuditRow};
pub use config::{config_fingerprint, load_config, parse_config};
pub use harness::run_eval;
pub use manifest::{load_manifest, parse_manifest, ManifestError, ProblemRecord};
pub use report::{emit_report, DomainStats, Report, ReportFormat};

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: cannot decode image: {msg}")]
    Decode { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("synth: {0}")]
    Synth(#[from] diagram_judge_core::synth::SynthError),
}

pub type Result<T, E = JudgeError> = std::result::Result<T, E>;
