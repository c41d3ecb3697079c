//! Flat `key = value` overrides on top of the default thresholds.

use std::fs;
use std::path::Path;

use diagram_judge_core::ThresholdConfig;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{JudgeError, Result};

/// Parses an override document. Blank lines and `#` comments are skipped;
/// every other line must be `key = value` naming a known field. Keys not
/// mentioned keep their defaults.
pub fn parse_config(text: &str) -> Result<ThresholdConfig> {
    let Value::Object(mut fields) = serde_json::to_value(ThresholdConfig::default()).expect("serializable") else {
        unreachable!("config serializes as a map")
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| JudgeError::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        let slot = fields
            .get_mut(key)
            .ok_or_else(|| JudgeError::Config(format!("line {}: unknown key {key:?}", i + 1)))?;
        let value = value.trim();
        *slot = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    }
    let cfg: ThresholdConfig =
        serde_json::from_value(Value::Object(fields)).map_err(|e| JudgeError::Config(e.to_string()))?;
    cfg.validate().map_err(JudgeError::Config)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ThresholdConfig> {
    let text = fs::read_to_string(path).map_err(|source| JudgeError::Io { path: path.into(), source })?;
    parse_config(&text)
}

/// SHA-256 over the config's canonical JSON (sorted keys), hex encoded.
pub fn config_fingerprint(cfg: &ThresholdConfig) -> String {
    let canonical = serde_json::to_vec(&serde_json::to_value(cfg).expect("serializable")).expect("serializable");
    hex::encode(Sha256::digest(&canonical))
}
