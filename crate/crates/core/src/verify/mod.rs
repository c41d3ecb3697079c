//! Constraint evaluation: per-domain checks over one raster and their
//! conjunction into a verdict.

mod angle;
mod common;
mod config;
mod counting;
mod fraction;
pub mod function;
mod plane;
mod set;
mod spec;
mod verdict;

use alloc::string::String;
use alloc::vec::Vec;

pub use angle::AngleReading;
pub use config::ThresholdConfig;
pub use counting::eval_counting;
pub use fraction::ShapeReading;
pub use spec::{
    AsymptoteAxis, Calibration, ColorName, ConstraintSpec, Criterion, CriterionKind, Detection, DetectionSet, Domain,
    Ratio,
};
pub use verdict::{aggregate, CriterionResult, Verdict};

use crate::imgcore::RasterImage;
use common::Context;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("spec has no criteria")]
    EmptyCriteria,
    #[error("spec counts objects but no detections were supplied")]
    MissingDetections,
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid threshold config: {0}")]
    InvalidConfig(String),
}

/// Evaluates every criterion of `spec` against `img` and returns their
/// conjunction. Criteria never short-circuit: each one gets a result and a
/// diagnostic. Structural failures (no shape, no axes) make the affected
/// criteria false rather than aborting.
pub fn evaluate(
    img: &RasterImage,
    spec: &ConstraintSpec,
    cfg: &ThresholdConfig,
    det: Option<&DetectionSet>,
) -> Result<Verdict, VerifyError> {
    if spec.criteria.is_empty() {
        return Err(VerifyError::EmptyCriteria);
    }
    spec.validate().map_err(VerifyError::InvalidSpec)?;
    cfg.validate().map_err(VerifyError::InvalidConfig)?;
    if spec.needs_detections() && det.is_none() {
        return Err(VerifyError::MissingDetections);
    }
    let ctx = Context::new(img, cfg, spec.calibration);
    let results: Vec<CriterionResult> = spec.criteria.iter().map(|c| judge(&ctx, spec.domain, c, det)).collect();
    aggregate(&spec.problem_id, results)
}

fn judge(ctx: &Context, domain: Domain, c: &Criterion, det: Option<&DetectionSet>) -> CriterionResult {
    match c {
        Criterion::BackgroundWhite => {
            let ok = ctx.background_white();
            CriterionResult::new(
                c,
                ok,
                None,
                if ok { "border band is white" } else { "border band has non-white pixels" },
            )
        }
        Criterion::CountExact { .. } => match det {
            Some(d) => eval_counting(d, c, ctx.cfg),
            None => CriterionResult::fail(c, "no detections"),
        },
        _ => match domain {
            Domain::Angle => angle::judge(ctx, c),
            Domain::Fraction => fraction::judge(ctx, c),
            Domain::Function => function::judge(ctx, c),
            Domain::Set => set::judge(ctx, c),
            Domain::Plane => plane::judge(ctx, c, false),
            Domain::Solid => plane::judge(ctx, c, true),
            Domain::Counting => CriterionResult::fail(c, "not a counting criterion"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn blank() -> RasterImage {
        RasterImage::filled_rgb(256, 256, [255, 255, 255]).unwrap()
    }

    #[test]
    fn count_needs_detections() {
        let spec = ConstraintSpec::new("c", Domain::Counting, vec![Criterion::CountExact { category: "apple".into(), n: 1 }]);
        let cfg = ThresholdConfig::default();
        assert_eq!(evaluate(&blank(), &spec, &cfg, None), Err(VerifyError::MissingDetections));
        let empty = ConstraintSpec::new("c", Domain::Counting, vec![]);
        assert_eq!(evaluate(&blank(), &empty, &cfg, None), Err(VerifyError::EmptyCriteria));
    }

    #[test]
    fn blank_canvas_is_total() {
        let cfg = ThresholdConfig::default();
        let cases = [
            (Domain::Fraction, Criterion::FractionShaded { target: Ratio(0.5), tol: 0.015, color: None }),
            (Domain::Angle, Criterion::SectorEquals { target_deg: 70.0, relaxed: false }),
            (Domain::Solid, Criterion::PolygonSides { n: 6 }),
            (Domain::Function, Criterion::CurveMatches { relation: "x".into(), domain: [-5.0, 5.0] }),
            (Domain::Set, Criterion::VennRegions { expect_on: vec![], expect_off: vec![], n_circles: 2 }),
        ];
        for (domain, c) in cases {
            let spec = ConstraintSpec::new("b", domain, vec![c, Criterion::BackgroundWhite]);
            let v = evaluate(&blank(), &spec, &cfg, None).unwrap();
            assert!(!v.passed);
            assert!(!v.criterion_results[0].passed);
            assert!(v.criterion_results[1].passed);
        }
    }
}
