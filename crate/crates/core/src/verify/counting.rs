use alloc::format;

use super::{Criterion, CriterionResult, DetectionSet, ThresholdConfig};

/// Counts detections of `category` at or above the confidence gate and
/// compares with the target under `count_tolerance`.
pub fn eval_counting(det: &DetectionSet, criterion: &Criterion, cfg: &ThresholdConfig) -> CriterionResult {
    let Criterion::CountExact { category, n } = criterion else {
        return CriterionResult::fail(criterion, "not a counting criterion");
    };
    let count = det
        .detections
        .iter()
        .filter(|d| d.category == *category && d.confidence >= cfg.count_conf_thresh)
        .count() as i64;
    let passed = (count - *n as i64).unsigned_abs() <= cfg.count_tolerance as u64;
    CriterionResult::new(
        criterion,
        passed,
        Some(count as f64),
        format!("{count} {category} at confidence >= {}, want {n}", cfg.count_conf_thresh),
    )
}
