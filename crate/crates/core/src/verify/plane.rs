use alloc::format;

use super::common::Context;
use super::fraction::{shape, silhouette, ShapeReading};
use super::{Criterion, CriterionResult};
use crate::geom::{count_crossings, merge_collinear};
use crate::imgcore::{detect_filled_dots, hough_circles_gray};

fn crossings(ctx: &Context, extend: f64) -> usize {
    let cfg = ctx.cfg;
    let merged = merge_collinear(
        ctx.segments(),
        cfg.collinear_angle_tol_deg,
        cfg.collinear_dist_px,
        cfg.line_max_gap as f64,
    );
    count_crossings(&merged, extend, cfg.intersection_merge_px).len()
}

fn sides(criterion: &Criterion, s: &Result<ShapeReading, &'static str>, n: u32) -> CriterionResult {
    match s {
        Ok(s) => CriterionResult::new(
            criterion,
            s.sides == n as usize,
            Some(s.sides as f64),
            format!("outline simplifies to {} vertices, want {n}", s.sides),
        ),
        Err(e) => CriterionResult::fail(criterion, *e),
    }
}

/// Plane-figure criteria. Solid drawings reuse the same checks on their
/// silhouette, with segments lengthened so corner junctions register.
pub(crate) fn judge(ctx: &Context, criterion: &Criterion, solid: bool) -> CriterionResult {
    let cfg = ctx.cfg;
    match criterion {
        Criterion::PolygonSides { n } => sides(criterion, if solid { silhouette(ctx) } else { shape(ctx) }, *n),
        Criterion::SegmentsIntersect { n_intersections } => {
            if solid {
                if let Err(e) = silhouette(ctx) {
                    return CriterionResult::fail(criterion, *e);
                }
            }
            let extend = if solid { cfg.junction_extend_px } else { 0.0 };
            let k = crossings(ctx, extend);
            CriterionResult::new(
                criterion,
                k == *n_intersections as usize,
                Some(k as f64),
                format!("{k} distinct intersection(s), want {n_intersections}"),
            )
        }
        Criterion::DotsOnCircle { n } => {
            let Some(circle) = hough_circles_gray(ctx.gray(), &cfg.venn_circle()).into_iter().next() else {
                return CriterionResult::fail(criterion, "no circle found");
            };
            let tol = cfg.rim_tol_frac * ctx.min_side() as f64;
            let on_rim = detect_filled_dots(ctx.gray(), &cfg.dot_params())
                .iter()
                .filter(|d| libm::fabs(d.center.distance(circle.center) - circle.radius) <= tol)
                .count();
            CriterionResult::new(
                criterion,
                on_rim == *n as usize,
                Some(on_rim as f64),
                format!("{on_rim} dot(s) on the circle of radius {:.1}, want {n}", circle.radius),
            )
        }
        Criterion::ShapeIsCircle => match shape(ctx) {
            Ok(s) => {
                let c = s.metrics.circularity;
                CriterionResult::new(
                    criterion,
                    c >= cfg.circularity_min,
                    Some(c),
                    format!("circularity {c:.3}, need {}", cfg.circularity_min),
                )
            }
            Err(e) => CriterionResult::fail(criterion, *e),
        },
        Criterion::ShapeIsRectangle => match shape(ctx) {
            Ok(s) => {
                let r = s.metrics.rectangularity;
                CriterionResult::new(
                    criterion,
                    s.sides == 4 && r >= cfg.rectangularity_min,
                    Some(r),
                    format!("{} vertices, rectangularity {r:.3}, need 4 and {}", s.sides, cfg.rectangularity_min),
                )
            }
            Err(e) => CriterionResult::fail(criterion, *e),
        },
        _ => CriterionResult::fail(criterion, "not a plane criterion"),
    }
}
