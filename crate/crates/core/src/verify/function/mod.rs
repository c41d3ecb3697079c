//! Function plots: axis recovery, curve extraction and relation checks.

mod lsq;
mod ransac;
mod relation;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use lsq::solve_least_squares;
pub use ransac::{box_residual, ransac_fit, CurveFit, CurveModel, RansacParams};
pub use relation::{classify, parse_relation, Expr, Family, Relation, RelationError};

use super::common::Context;
use super::{AsymptoteAxis, Calibration, Criterion, CriterionResult, ThresholdConfig};
use crate::imgcore::{
    canny, dilate, hough_lines, label_components, BinaryMask, HoughLineParams, LineSegment, Point, RasterImage,
};

/// Largest deviation from horizontal or vertical for an axis candidate.
const AXIS_SLANT_DEG: f64 = 5.0;
/// Background gaps tolerated when following an axis stroke.
const AXIS_GAP_PX: u32 = 3;

/// Affine map between pixel coordinates and math coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotFrame {
    pub origin: Point,
    pub units_per_px_x: f64,
    pub units_per_px_y: f64,
}

impl PlotFrame {
    pub fn to_math(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.origin.x) * self.units_per_px_x,
            (self.origin.y - p.y) * self.units_per_px_y,
        )
    }

    pub fn to_px(&self, x: f64, y: f64) -> Point {
        Point::new(self.origin.x + x / self.units_per_px_x, self.origin.y - y / self.units_per_px_y)
    }
}

impl From<Calibration> for PlotFrame {
    fn from(c: Calibration) -> Self {
        PlotFrame { origin: c.origin_px, units_per_px_x: c.units_per_px_x, units_per_px_y: c.units_per_px_y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotReading {
    pub frame: PlotFrame,
    /// Curve edge pixels in math coordinates.
    pub points: Vec<(f64, f64)>,
    /// Despeckled dark pixels off the axes, inside the plot box.
    pub curve_mask: BinaryMask,
}

/// An axis stroke: its center line and the pixel span it covers.
struct Axis {
    center: f64,
    lo: u32,
    hi: u32,
}

impl Axis {
    fn len(&self) -> f64 {
        (self.hi - self.lo + 1) as f64
    }
}

/// Refines a Hough segment to the dark stroke under it. `horizontal`
/// selects rows; otherwise the same is done on columns via `get`.
fn refine_axis(dark: &BinaryMask, seg: &LineSegment, horizontal: bool, width: u32) -> Option<Axis> {
    let (w, h) = (dark.width(), dark.height());
    let get = |along: u32, across: u32| if horizontal { dark.get(along, across) } else { dark.get(across, along) };
    let (along_len, across_len) = if horizontal { (w, h) } else { (h, w) };
    let (a0, a1, c) = if horizontal {
        (seg.p0.x.min(seg.p1.x), seg.p0.x.max(seg.p1.x), seg.midpoint().y)
    } else {
        (seg.p0.y.min(seg.p1.y), seg.p0.y.max(seg.p1.y), seg.midpoint().x)
    };
    let a0 = (a0.max(0.0) as u32).min(along_len - 1);
    let a1 = (a1.max(0.0) as u32).min(along_len - 1);
    let c = c.max(0.0) as i64;
    let lo = (c - width as i64).max(0) as u32;
    let hi = ((c + width as i64) as u32).min(across_len - 1);
    let counts: Vec<u32> = (lo..=hi).map(|r| (a0..=a1).filter(|&a| get(a, r)).count() as u32).collect();
    let (peak_i, &peak) = counts.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
    if peak == 0 {
        return None;
    }
    let mut first = peak_i;
    while first > 0 && counts[first - 1] * 2 >= peak {
        first -= 1;
    }
    let mut last = peak_i;
    while last + 1 < counts.len() && counts[last + 1] * 2 >= peak {
        last += 1;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in first..=last {
        num += (lo as usize + i) as f64 * counts[i] as f64 + 0.5 * counts[i] as f64;
        den += counts[i] as f64;
    }
    let row = lo + peak_i as u32;
    // follow the stroke both ways from the dark pixel nearest the middle
    let mid = (a0 + a1) / 2;
    let start = (0..=AXIS_GAP_PX)
        .flat_map(|d| [mid.saturating_sub(d), (mid + d).min(along_len - 1)])
        .find(|&a| get(a, row))?;
    let mut s_lo = start;
    let mut gap = 0;
    let mut a = start;
    while a > 0 && gap <= AXIS_GAP_PX {
        a -= 1;
        if get(a, row) {
            s_lo = a;
            gap = 0;
        } else {
            gap += 1;
        }
    }
    let mut s_hi = start;
    gap = 0;
    a = start;
    while a + 1 < along_len && gap <= AXIS_GAP_PX {
        a += 1;
        if get(a, row) {
            s_hi = a;
            gap = 0;
        } else {
            gap += 1;
        }
    }
    Some(Axis { center: num / den, lo: s_lo, hi: s_hi })
}

fn despeckle(dark: &BinaryMask, max_px: u32) -> BinaryMask {
    let (labels, n) = label_components(dark);
    let mut sizes = vec![0u32; n as usize + 1];
    for l in &labels {
        sizes[*l as usize] += 1;
    }
    let w = dark.width();
    BinaryMask::from_fn(w, dark.height(), |x, y| {
        let l = labels[(y * w + x) as usize];
        l != 0 && sizes[l as usize] > max_px
    })
}

/// Locates the axes, sets up the math frame and extracts curve pixels.
pub fn read_plot(
    gray: &RasterImage,
    dark: &BinaryMask,
    cfg: &ThresholdConfig,
    calibration: Option<Calibration>,
) -> Result<PlotReading, &'static str> {
    let (w, h) = (gray.width(), gray.height());
    let edges = canny(gray, cfg.fn_edge_low, cfg.fn_edge_high);
    let params = HoughLineParams {
        vote_threshold: cfg.fn_line_vote,
        min_len: cfg.line_min_len(gray.min_side()),
        max_gap: cfg.fn_line_max_gap,
        seed: cfg.hough_seed,
    };
    let segments = hough_lines(&edges, &params);
    let longest = |pred: &dyn Fn(f64) -> bool| {
        segments
            .iter()
            .filter(|s| pred(s.angle))
            .max_by(|a, b| a.length.total_cmp(&b.length))
            .copied()
    };
    let hseg = longest(&|a| a <= AXIS_SLANT_DEG || a >= 180.0 - AXIS_SLANT_DEG).ok_or("axes not found")?;
    let vseg = longest(&|a| libm::fabs(a - 90.0) <= AXIS_SLANT_DEG).ok_or("axes not found")?;
    let xaxis = refine_axis(dark, &hseg, true, cfg.fn_axis_width_px).ok_or("axes not found")?;
    let yaxis = refine_axis(dark, &vseg, false, cfg.fn_axis_width_px).ok_or("axes not found")?;

    let frame = match calibration {
        Some(c) => PlotFrame::from(c),
        None => PlotFrame {
            origin: Point::new(yaxis.center, xaxis.center),
            units_per_px_x: cfg.fn_axis_units / xaxis.len(),
            units_per_px_y: cfg.fn_axis_units / yaxis.len(),
        },
    };

    let band = cfg.fn_axis_width_px as f64 / 2.0;
    let keep = |x: u32, y: u32| {
        let c = Point::pixel_center(x, y);
        x >= xaxis.lo
            && x <= xaxis.hi
            && y >= yaxis.lo
            && y <= yaxis.hi
            && libm::fabs(c.y - xaxis.center) > band
            && libm::fabs(c.x - yaxis.center) > band
    };
    let strokes = despeckle(dark, cfg.fn_speck_max_px);
    let support = dilate(&strokes, 3, 3).map_err(|_| "bad morphology kernel")?;
    let curve_mask = BinaryMask::from_fn(w, h, |x, y| strokes.get(x, y) && keep(x, y));
    let points = edges
        .foreground()
        .filter(|&(x, y)| support.get(x, y) && keep(x, y))
        .map(|(x, y)| frame.to_math(Point::pixel_center(x, y)))
        .collect();
    Ok(PlotReading { frame, points, curve_mask })
}

fn reading<'c>(ctx: &'c Context) -> &'c Result<PlotReading, &'static str> {
    ctx.plot.get_or_init(|| read_plot(ctx.gray(), ctx.dark(), ctx.cfg, ctx.calibration))
}

/// Longest run of set pixels in each column (`vertical`) or row.
fn longest_runs(mask: &BinaryMask, vertical: bool) -> Vec<u32> {
    let (w, h) = (mask.width(), mask.height());
    let (outer, inner) = if vertical { (w, h) } else { (h, w) };
    (0..outer)
        .map(|o| {
            let (mut best, mut cur) = (0, 0);
            for i in 0..inner {
                let on = if vertical { mask.get(o, i) } else { mask.get(i, o) };
                cur = if on { cur + 1 } else { 0 };
                best = best.max(cur);
            }
            best
        })
        .collect()
}

/// Pixel coordinate (column or row center) of the strongest run cluster, if
/// a long enough run supports it.
pub fn locate_asymptote(mask: &BinaryMask, vertical: bool, cfg: &ThresholdConfig) -> Option<f64> {
    let runs = longest_runs(mask, vertical);
    let n = runs.len();
    let half = (cfg.fn_smooth_kernel / 2) as usize;
    let smoothed: Vec<u32> = (0..n)
        .map(|i| runs[i.saturating_sub(half)..(i + half + 1).min(n)].iter().sum())
        .collect();
    let peak = (0..n).max_by(|&a, &b| smoothed[a].cmp(&smoothed[b]).then(b.cmp(&a)))?;
    let win = (cfg.fn_window_px / 2) as usize;
    let (lo, hi) = (peak.saturating_sub(win), (peak + win + 1).min(n));
    if !runs[lo..hi].iter().any(|r| *r >= cfg.fn_min_run_px) {
        return None;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, r) in runs.iter().enumerate().take(hi).skip(lo) {
        num += (i as f64 + 0.5) * *r as f64;
        den += *r as f64;
    }
    Some(num / den)
}

fn residual_of(rel: &Relation, family: &Family, fit: &CurveFit, pts: &[(f64, f64)], tol_x: f64) -> f64 {
    if fit.inliers.is_empty() {
        return f64::INFINITY;
    }
    let jumps: Vec<f64> = match family {
        Family::Reciprocal { pole } => vec![*pole],
        Family::Piecewise { breaks } => breaks.clone(),
        _ => Vec::new(),
    };
    let f = |x: f64| rel.eval(x);
    let total: f64 = fit.inliers.iter().map(|&i| box_residual(&f, &jumps, pts[i].0, pts[i].1, tol_x)).sum();
    total / fit.inliers.len() as f64
}

pub(crate) fn judge(ctx: &Context, criterion: &Criterion) -> CriterionResult {
    let cfg = ctx.cfg;
    let r = match reading(ctx) {
        Ok(r) => r,
        Err(e) => return CriterionResult::fail(criterion, *e),
    };
    match criterion {
        Criterion::CurveMatches { relation, domain } => {
            let rel = match parse_relation(relation) {
                Ok(rel) => rel,
                Err(e) => return CriterionResult::fail(criterion, format!("{e}")),
            };
            let family = match classify(&rel) {
                Ok(f) => f,
                Err(e) => return CriterionResult::fail(criterion, format!("{e}")),
            };
            let pts: Vec<(f64, f64)> =
                r.points.iter().copied().filter(|p| p.0 >= domain[0] && p.0 <= domain[1]).collect();
            let params = RansacParams {
                iterations: cfg.fn_ransac_iters,
                tol_x: cfg.fn_inlier_tol_x,
                tol_y: cfg.fn_inlier_tol_y,
                seed: cfg.hough_seed,
            };
            let Some(fit) = ransac_fit(&pts, &family, &params) else {
                return CriterionResult::fail(criterion, "no curve pixels in the domain");
            };
            let mean = residual_of(&rel, &family, &fit, &pts, cfg.fn_inlier_tol_x);
            let passed = fit.inlier_fraction >= cfg.fn_min_inlier_frac && mean <= cfg.fn_final_tol;
            CriterionResult::new(
                criterion,
                passed,
                Some(mean),
                format!(
                    "{} curve points, inliers {:.2}, mean residual {mean:.3} (tol {})",
                    pts.len(),
                    fit.inlier_fraction,
                    cfg.fn_final_tol
                ),
            )
        }
        Criterion::AsymptoteAt { axis, value, tol } => {
            let vertical = *axis == AsymptoteAxis::Vertical;
            let Some(px) = locate_asymptote(&r.curve_mask, vertical, cfg) else {
                return CriterionResult::fail(criterion, "no asymptote-like run found");
            };
            let at = if vertical {
                r.frame.to_math(Point::new(px, r.frame.origin.y)).0
            } else {
                r.frame.to_math(Point::new(r.frame.origin.x, px)).1
            };
            CriterionResult::new(
                criterion,
                libm::fabs(at - value) <= *tol,
                Some(at),
                format!("asymptote near {at:.3}, want {value} ± {tol}"),
            )
        }
        _ => CriterionResult::fail(criterion, "not a function criterion"),
    }
}
