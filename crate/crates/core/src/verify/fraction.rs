use alloc::format;

use super::common::Context;
use super::{Criterion, CriterionResult};
use crate::geom::{area_ratio, shape_metrics, simplify_closed, ShapeMetrics};
use crate::imgcore::{find_contours, hough_circles_gray, morph, BinaryMask, ContourPoly, MorphOp};

/// The dominant closed figure of an image.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReading {
    pub contour: ContourPoly,
    pub metrics: ShapeMetrics,
    /// Interior of the outer contour, holes included.
    pub fill: BinaryMask,
    /// Vertex count after simplification at `polygon_eps_frac` of the
    /// perimeter.
    pub sides: usize,
}

fn largest_shape(mask: &BinaryMask, kernel: u32, min_area: f64, eps_frac: f64) -> Result<ShapeReading, &'static str> {
    let closed = morph(mask, MorphOp::Close, (kernel, kernel)).map_err(|_| "bad morphology kernel")?;
    let contour = find_contours(&closed, min_area).into_iter().next().ok_or("no shape found")?;
    let metrics = shape_metrics(&contour).map_err(|_| "no shape found")?;
    let sides = simplify_closed(&contour.vertices, eps_frac * metrics.perimeter).len();
    let fill = contour.fill_mask(mask.width(), mask.height());
    Ok(ShapeReading { contour, metrics, fill, sides })
}

/// Largest figure in the dark mask, after closing with the medium kernel.
pub(crate) fn shape<'c>(ctx: &'c Context) -> &'c Result<ShapeReading, &'static str> {
    ctx.shape.get_or_init(|| {
        let cfg = ctx.cfg;
        largest_shape(ctx.dark(), cfg.morph_kernel_medium, cfg.min_contour_area, cfg.polygon_eps_frac)
    })
}

/// Outline of a line drawing: light strokes included, gaps bridged with the
/// large kernel, and only figures above the large area cutoff.
pub(crate) fn silhouette<'c>(ctx: &'c Context) -> &'c Result<ShapeReading, &'static str> {
    ctx.silhouette.get_or_init(|| {
        let cfg = ctx.cfg;
        let mask = crate::imgcore::threshold_foreground(ctx.gray(), cfg.fg_gray_thresh_alt, true);
        largest_shape(&mask, cfg.morph_kernel_large, cfg.min_contour_area_large, cfg.polygon_eps_frac)
    })
}

fn saturation_spread(ctx: &Context, part: &BinaryMask) -> f64 {
    let hsv = ctx.hsv();
    let w = ctx.width();
    let (mut n, mut sum, mut sq) = (0.0, 0.0, 0.0);
    for (x, y) in part.foreground() {
        let s = hsv[(y * w + x) as usize].saturation;
        n += 1.0;
        sum += s;
        sq += s * s;
    }
    if n == 0.0 {
        return 0.0;
    }
    let mean = sum / n;
    libm::sqrt((sq / n - mean * mean).max(0.0))
}

pub(crate) fn judge(ctx: &Context, criterion: &Criterion) -> CriterionResult {
    let cfg = ctx.cfg;
    match criterion {
        Criterion::FractionShaded { target, tol, color } => {
            let s = match shape(ctx) {
                Ok(s) => s,
                Err(e) => return CriterionResult::fail(criterion, *e),
            };
            let whole = s.fill.and_not(ctx.ink());
            let part = match color {
                Some(c) => ctx.color_mask(*c),
                None => ctx.dark().and_not(ctx.ink()),
            }
            .and(&whole);
            let ratio = match area_ratio(&part, &whole) {
                Ok(r) => r,
                Err(e) => return CriterionResult::fail(criterion, format!("{e}")),
            };
            if cfg.purity_check && color.is_some() {
                let spread = saturation_spread(ctx, &part);
                if spread > cfg.purity_max_sat_std {
                    return CriterionResult::new(
                        criterion,
                        false,
                        Some(ratio),
                        format!("shading is impure: saturation spread {spread:.3}"),
                    );
                }
            }
            let passed = libm::fabs(ratio - target.0) <= *tol;
            CriterionResult::new(criterion, passed, Some(ratio), format!("shaded {ratio:.4}, want {:.4} ± {tol}", target.0))
        }
        Criterion::AspectRatio { target, tol } => match shape(ctx) {
            Ok(s) => {
                let a = s.metrics.aspect_ratio;
                CriterionResult::new(
                    criterion,
                    libm::fabs(a - target) <= *tol,
                    Some(a),
                    format!("aspect {a:.3}, want {target} ± {tol}"),
                )
            }
            Err(e) => CriterionResult::fail(criterion, *e),
        },
        Criterion::RadiusRatio { target, tol } => {
            let circles = hough_circles_gray(ctx.gray(), &cfg.venn_circle());
            if circles.len() < 2 {
                return CriterionResult::fail(criterion, format!("{} circle(s) found, need 2", circles.len()));
            }
            let (a, b) = (circles[0].radius, circles[1].radius);
            let ratio = a.max(b) / a.min(b);
            CriterionResult::new(
                criterion,
                libm::fabs(ratio - target) <= *tol,
                Some(ratio),
                format!("radii {a:.1} and {b:.1}, ratio {ratio:.3}, want {target} ± {tol}"),
            )
        }
        _ => CriterionResult::fail(criterion, "not a fraction criterion"),
    }
}
