use alloc::vec;
use alloc::vec::Vec;

use super::edges::{canny_field, gaussian_blur, luma_field, sobel};
use super::{BinaryMask, CircleShape, Point, RasterImage};

/// Gradient-Hough circle settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughCircleParams {
    /// Inverse accumulator resolution: one accumulator cell spans `dp` pixels.
    pub dp: f64,
    /// Minimum distance between accepted centers.
    pub min_dist: f64,
    /// Upper Canny threshold; the lower one is half of it.
    pub param1: f64,
    /// Minimum accumulator votes (and radial support) for a center.
    pub param2: f64,
    pub min_radius: f64,
    /// Largest radius searched; `0` means half the shorter image side.
    pub max_radius: f64,
}

impl HoughCircleParams {
    pub fn is_valid(&self) -> bool {
        self.dp > 0.0
            && self.min_dist > 0.0
            && self.param1 > 0.0
            && self.param2 > 0.0
            && self.min_radius > 0.0
            && self.max_radius >= 0.0
    }
}

/// Fraction of the circumference that must carry edge pixels.
const MIN_ARC_COVERAGE: f64 = 0.6;
/// Radial band (px) around a candidate radius used for refinement and coverage.
const RADIAL_BAND: f64 = 3.0;

/// Circle detection on a binary mask (foreground rendered dark on light).
pub fn hough_circles(mask: &BinaryMask, params: &HoughCircleParams) -> Vec<CircleShape> {
    let field: Vec<f32> = mask.bits().iter().map(|b| if *b { 0.0 } else { 255.0 }).collect();
    detect(&field, mask.width(), mask.height(), params)
        .into_iter()
        .map(|c| c.circle)
        .collect()
}

/// Circle detection directly on image intensities, strongest first.
pub fn hough_circles_gray(gray: &RasterImage, params: &HoughCircleParams) -> Vec<CircleShape> {
    detect(&luma_field(gray), gray.width(), gray.height(), params)
        .into_iter()
        .map(|c| c.circle)
        .collect()
}

pub(crate) struct Candidate {
    pub circle: CircleShape,
}

pub(crate) fn detect(field: &[f32], width: u32, height: u32, params: &HoughCircleParams) -> Vec<Candidate> {
    if !params.is_valid() {
        return Vec::new();
    }
    let edges = canny_field(field, width, height, (params.param1 / 2.0) as f32, params.param1 as f32);
    let smooth = gaussian_blur(field, width, height, 2.0);
    let (gx, gy) = sobel(&smooth, width, height);

    let edge_pts: Vec<(Point, f64, f64)> = edges
        .foreground()
        .filter_map(|(x, y)| {
            let i = y as usize * width as usize + x as usize;
            let (dx, dy) = (gx[i] as f64, gy[i] as f64);
            let m = libm::hypot(dx, dy);
            (m > 1e-3).then(|| (Point::pixel_center(x, y), dx / m, dy / m))
        })
        .collect();
    if edge_pts.is_empty() {
        return Vec::new();
    }

    let max_radius = if params.max_radius > 0.0 {
        params.max_radius
    } else {
        width.min(height) as f64 / 2.0
    };
    let r_lo = libm::floor(params.min_radius).max(1.0) as i64;
    let r_hi = libm::ceil(max_radius) as i64;
    if r_hi < r_lo {
        return Vec::new();
    }

    let aw = libm::ceil(width as f64 / params.dp) as usize;
    let ah = libm::ceil(height as f64 / params.dp) as usize;
    let mut acc = vec![0u32; aw * ah];
    for &(p, nx, ny) in &edge_pts {
        for sign in [-1.0, 1.0] {
            for r in r_lo..=r_hi {
                let cx = (p.x + sign * r as f64 * nx) / params.dp;
                let cy = (p.y + sign * r as f64 * ny) / params.dp;
                if cx < 0.0 || cy < 0.0 {
                    break;
                }
                let (ix, iy) = (cx as usize, cy as usize);
                if ix >= aw || iy >= ah {
                    break;
                }
                acc[iy * aw + ix] += 1;
            }
        }
    }

    let mut peaks: Vec<(u32, usize)> = Vec::new();
    for y in 1..ah.saturating_sub(1) {
        for x in 1..aw.saturating_sub(1) {
            let i = y * aw + x;
            let v = acc[i];
            if (v as f64) < params.param2 {
                continue;
            }
            if v > acc[i - 1] && v >= acc[i + 1] && v > acc[i - aw] && v >= acc[i + aw] {
                peaks.push((v, i));
            }
        }
    }
    peaks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut accepted: Vec<Candidate> = Vec::new();
    for (_, idx) in peaks {
        let (ax, ay) = (idx % aw, idx / aw);
        // vote-weighted centroid of the 3x3 neighbourhood
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for dy in 0..3 {
            for dx in 0..3 {
                let (qx, qy) = (ax + dx - 1, ay + dy - 1);
                let v = acc[qy * aw + qx] as f64;
                sx += v * (qx as f64 + 0.5);
                sy += v * (qy as f64 + 0.5);
                sw += v;
            }
        }
        let center = Point::new(sx / sw * params.dp, sy / sw * params.dp);
        if accepted.iter().any(|c| c.circle.center.distance(center) < params.min_dist) {
            continue;
        }
        let Some(circle) = estimate_radius(&edge_pts, center, params.min_radius, max_radius, params.param2) else {
            continue;
        };
        if circle.radius < params.min_radius || circle.radius > max_radius {
            continue;
        }
        if accepted.iter().any(|c| c.circle.center.distance(circle.center) < params.min_dist) {
            continue;
        }
        if arc_coverage(&edge_pts, &circle) < MIN_ARC_COVERAGE {
            continue;
        }
        accepted.push(Candidate { circle });
    }
    accepted
}

/// Picks the best-supported radius around `center`, then refines center and
/// radius with an algebraic least-squares fit over the edge pixels near it.
fn estimate_radius(
    edge_pts: &[(Point, f64, f64)],
    center: Point,
    min_r: f64,
    max_r: f64,
    min_support: f64,
) -> Option<CircleShape> {
    let lo = libm::floor(min_r - RADIAL_BAND).max(0.0) as usize;
    let hi = libm::ceil(max_r + RADIAL_BAND) as usize;
    let mut hist = vec![0u32; hi - lo + 1];
    for (p, _, _) in edge_pts {
        let d = p.distance(center);
        if d >= lo as f64 && d <= hi as f64 {
            hist[libm::floor(d) as usize - lo] += 1;
        }
    }
    let support = |i: usize| -> u32 {
        let a = i.saturating_sub(3);
        let b = (i + 3).min(hist.len() - 1);
        hist[a..=b].iter().sum()
    };
    let first = libm::floor(min_r) as usize - lo;
    let last = (libm::floor(max_r) as usize - lo).min(hist.len() - 1);
    let (best_i, best) = (first..=last).map(|i| (i, support(i))).max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))?;
    if (best as f64) < min_support {
        return None;
    }
    let mut circle = CircleShape {
        center,
        radius: (best_i + lo) as f64 + 0.5,
    };
    for _ in 0..3 {
        let near: Vec<Point> = edge_pts
            .iter()
            .map(|e| e.0)
            .filter(|p| libm::fabs(p.distance(circle.center) - circle.radius) <= RADIAL_BAND + 0.5)
            .collect();
        match fit_circle(&near) {
            Some(c) if c.center.distance(center) < 5.0 + 0.05 * circle.radius => circle = c,
            _ => break,
        }
    }
    Some(circle)
}

/// Kåsa fit: least squares on `x² + y² + D x + E y + F = 0`.
fn fit_circle(pts: &[Point]) -> Option<CircleShape> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.x / n, a.1 + p.y / n));
    let (mut suu, mut svv, mut suv, mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in pts {
        let (u, v) = (p.x - mx, p.y - my);
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let det = suu * svv - suv * suv;
    if libm::fabs(det) < 1e-9 {
        return None;
    }
    let b1 = 0.5 * (suuu + suvv);
    let b2 = 0.5 * (svvv + svuu);
    let uc = (b1 * svv - b2 * suv) / det;
    let vc = (suu * b2 - suv * b1) / det;
    let radius = libm::sqrt(uc * uc + vc * vc + (suu + svv) / n);
    radius.is_finite().then_some(CircleShape {
        center: Point::new(mx + uc, my + vc),
        radius,
    })
}

fn arc_coverage(edge_pts: &[(Point, f64, f64)], circle: &CircleShape) -> f64 {
    let bins = (libm::round(core::f64::consts::TAU * circle.radius) as usize).clamp(8, 180);
    let mut hit = vec![false; bins];
    for (p, _, _) in edge_pts {
        let d = p.sub(circle.center);
        if libm::fabs(d.norm() - circle.radius) <= RADIAL_BAND {
            let a = libm::atan2(d.y, d.x) + core::f64::consts::PI;
            let b = ((a / core::f64::consts::TAU) * bins as f64) as usize;
            hit[b.min(bins - 1)] = true;
        }
    }
    hit.iter().filter(|h| **h).count() as f64 / bins as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(size: u32, cx: f64, cy: f64, r: f64, stroke: f64) -> BinaryMask {
        BinaryMask::from_fn(size, size, |x, y| {
            let d = Point::pixel_center(x, y).distance(Point::new(cx, cy));
            libm::fabs(d - r) <= stroke / 2.0
        })
    }

    fn venn_params() -> HoughCircleParams {
        HoughCircleParams {
            dp: 1.2,
            min_dist: 100.0,
            param1: 50.0,
            param2: 30.0,
            min_radius: 80.0,
            max_radius: 0.0,
        }
    }

    #[test]
    fn empty_mask() {
        assert!(hough_circles(&BinaryMask::new(128, 128), &venn_params()).is_empty());
    }

    #[test]
    fn recovers_single_ring() {
        let circles = hough_circles(&ring(1024, 512.0, 512.0, 150.0, 3.0), &venn_params());
        assert_eq!(circles.len(), 1, "{circles:?}");
        let c = circles[0];
        assert!(c.center.distance(Point::new(512.0, 512.0)) <= 3.0, "{c:?}");
        assert!((c.radius - 150.0).abs() <= 3.0, "{c:?}");
    }

    #[test]
    fn radius_gate() {
        assert!(hough_circles(&ring(1024, 512.0, 512.0, 60.0, 3.0), &venn_params()).is_empty());
    }

    #[test]
    fn two_overlapping_rings() {
        let m = ring(1024, 400.0, 500.0, 200.0, 3.0).or(&ring(1024, 620.0, 520.0, 200.0, 3.0));
        let circles = hough_circles(&m, &venn_params());
        assert_eq!(circles.len(), 2, "{circles:?}");
    }

    #[test]
    fn kasa_fit_is_exact_on_circle() {
        let pts: Vec<Point> = (0..36)
            .map(|i| {
                let t = (i as f64 * 10.0).to_radians();
                Point::new(50.0 + 20.0 * libm::cos(t), 40.0 + 20.0 * libm::sin(t))
            })
            .collect();
        let c = fit_circle(&pts).unwrap();
        assert!(c.center.distance(Point::new(50.0, 40.0)) < 1e-9);
        assert!((c.radius - 20.0).abs() < 1e-9);
    }
}
