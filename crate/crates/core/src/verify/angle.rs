use alloc::format;
use alloc::vec::Vec;

use super::common::Context;
use super::{Criterion, CriterionResult};
use crate::geom::{angular_distance, is_opposite_pair, sector_angles};
use crate::imgcore::{detect_filled_dots, detect_radial_peaks, radial_profile, LineSegment, Point, RadialPeak};

/// Minimum angle between two Hough segments for their crossing to be
/// considered as a vertex.
const MIN_VERTEX_SPREAD_DEG: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AngleReading {
    pub vertex: Point,
    pub peaks: Vec<RadialPeak>,
    /// Consecutive sectors in degrees; empty with fewer than two rays.
    pub sectors: Vec<f64>,
}

/// Vertex from pairwise crossings of Hough segments that both end near the
/// crossing; the largest cluster wins.
fn vertex_from_segments(segments: &[LineSegment], reach: f64) -> Option<Point> {
    let mut clusters: Vec<(Point, usize)> = Vec::new();
    for (i, a) in segments.iter().enumerate() {
        for b in &segments[i + 1..] {
            let spread = angular_distance(a.angle, b.angle);
            if spread.min(180.0 - spread) < MIN_VERTEX_SPREAD_DEG {
                continue;
            }
            let (r, s) = (a.p1.sub(a.p0), b.p1.sub(b.p0));
            let denom = r.cross(s);
            if denom == 0.0 {
                continue;
            }
            let t = b.p0.sub(a.p0).cross(s) / denom;
            let p = a.p0.add(r.scale(t));
            let near = |seg: &LineSegment| p.distance(seg.p0).min(p.distance(seg.p1)) <= reach;
            if !(near(a) && near(b)) {
                continue;
            }
            match clusters.iter_mut().find(|(c, n)| c.scale(1.0 / *n as f64).distance(p) <= reach) {
                Some((sum, n)) => {
                    *sum = sum.add(p);
                    *n += 1;
                }
                None => clusters.push((p, 1)),
            }
        }
    }
    clusters
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.1.cmp(&b.1).then(j.cmp(i)))
        .map(|(_, (sum, n))| sum.scale(1.0 / *n as f64))
}

pub(crate) fn reading<'c>(ctx: &'c Context) -> &'c Result<AngleReading, &'static str> {
    ctx.angle.get_or_init(|| {
        let cfg = ctx.cfg;
        let vertex = vertex_from_segments(ctx.segments(), cfg.vertex_endpoint_px)
            .or_else(|| {
                detect_filled_dots(ctx.gray(), &cfg.dot_params())
                    .into_iter()
                    .max_by(|a, b| a.radius.total_cmp(&b.radius))
                    .map(|d| d.center)
            })
            .ok_or("no vertex found")?;
        let probe = cfg.probe_radius_frac * ctx.min_side() as f64;
        let profile = radial_profile(ctx.dark(), vertex, probe).map_err(|_| "probe does not fit the image")?;
        let peaks = detect_radial_peaks(&profile, probe, &cfg.peak_params()).map_err(|_| "bad radial response")?;
        let sectors = sector_angles(&peaks).map(|s| s.into_iter().map(f64::from).collect()).unwrap_or_default();
        Ok(AngleReading { vertex, peaks, sectors })
    })
}

fn best_opposite(peaks: &[RadialPeak]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in peaks.iter().enumerate() {
        for b in &peaks[i + 1..] {
            let dev = libm::fabs(angular_distance(a.direction, b.direction) - 180.0);
            best = Some(best.map_or(dev, |v: f64| v.min(dev)));
        }
    }
    best
}

pub(crate) fn judge(ctx: &Context, criterion: &Criterion) -> CriterionResult {
    let r = match reading(ctx) {
        Ok(r) => r,
        Err(e) => return CriterionResult::fail(criterion, *e),
    };
    let cfg = ctx.cfg;
    match criterion {
        Criterion::SectorEquals { target_deg, relaxed } => {
            let tol = if *relaxed { cfg.angle_tol_relaxed_deg() } else { cfg.angle_tol_deg };
            let closest = r
                .sectors
                .iter()
                .copied()
                .min_by(|a, b| libm::fabs(a - target_deg).total_cmp(&libm::fabs(b - target_deg)));
            let Some(closest) = closest else {
                return CriterionResult::fail(criterion, format!("{} ray(s) found, no sector", r.peaks.len()));
            };
            if libm::fabs(closest - target_deg) <= tol {
                return CriterionResult::new(
                    criterion,
                    true,
                    Some(closest),
                    format!("sector {closest:.1} within {tol} of {target_deg}"),
                );
            }
            let straight = libm::fabs(target_deg - 180.0) < 1e-9
                && r.peaks.iter().enumerate().any(|(i, a)| {
                    r.peaks[i + 1..].iter().any(|b| is_opposite_pair(a.direction, b.direction, cfg.opposite_tol_deg))
                });
            let diag = if straight {
                format!("opposite rays form a straight angle (closest sector {closest:.1})")
            } else {
                format!("closest sector {closest:.1} is more than {tol} from {target_deg}")
            };
            CriterionResult::new(criterion, straight, Some(closest), diag)
        }
        Criterion::RayCount { n } => {
            let k = r.peaks.len();
            CriterionResult::new(criterion, k == *n as usize, Some(k as f64), format!("{k} ray(s), want {n}"))
        }
        Criterion::OppositeRays => match best_opposite(&r.peaks) {
            Some(dev) => CriterionResult::new(
                criterion,
                dev <= cfg.opposite_tol_deg,
                Some(dev),
                format!("best ray pair is {dev:.1} from opposite (tol {})", cfg.opposite_tol_deg),
            ),
            None => CriterionResult::fail(criterion, "fewer than two rays"),
        },
        _ => CriterionResult::fail(criterion, "not an angle criterion"),
    }
}
