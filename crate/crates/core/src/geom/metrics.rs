use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{simplify_closed, GeomError};
use crate::imgcore::{BinaryMask, ContourPoly, Point};

/// Fraction of `whole` covered by `part`.
pub fn area_ratio(part: &BinaryMask, whole: &BinaryMask) -> Result<f64, GeomError> {
    if !part.same_dims(whole) {
        return Err(GeomError::DimensionMismatch);
    }
    let w = whole.count();
    if w == 0 {
        return Err(GeomError::EmptyWhole);
    }
    Ok(part.and(whole).count() as f64 / w as f64)
}

/// Rotated bounding rectangle. `width` is the long side; `angle` is the
/// direction of the long side in degrees, in [0, 180).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    pub angle: f64,
}

impl OrientedRect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeMetrics {
    /// Long side over short side of the minimum-area rectangle.
    pub aspect_ratio: f64,
    pub bbox: OrientedRect,
    /// 4πA/P², at most 1.
    pub circularity: f64,
    /// Polygon area over bounding-rectangle area.
    pub rectangularity: f64,
    pub area: f64,
    pub perimeter: f64,
}

/// Convex hull by monotone chain, counter-clockwise in the y-up sense,
/// without collinear points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| a.sub(o).cross(b.sub(o));
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Minimum-area enclosing rectangle of a convex hull (rotating edges).
pub fn min_area_rect(hull: &[Point]) -> Option<OrientedRect> {
    if hull.len() < 3 {
        return None;
    }
    let mut best: Option<OrientedRect> = None;
    for i in 0..hull.len() {
        let e = hull[(i + 1) % hull.len()].sub(hull[i]);
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        let u = e.scale(1.0 / len);
        let v = Point::new(-u.y, u.x);
        let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in hull {
            let (a, b) = (p.dot(u), p.dot(v));
            umin = umin.min(a);
            umax = umax.max(a);
            vmin = vmin.min(b);
            vmax = vmax.max(b);
        }
        let (du, dv) = (umax - umin, vmax - vmin);
        if best.is_some_and(|b| b.area() <= du * dv) {
            continue;
        }
        let center = u.scale((umin + umax) / 2.0).add(v.scale((vmin + vmax) / 2.0));
        let (long_dir, width, height) = if du >= dv { (u, du, dv) } else { (v, dv, du) };
        let mut angle = libm::atan2(-long_dir.y, long_dir.x).to_degrees();
        angle = libm::fmod(angle + 360.0, 180.0);
        best = Some(OrientedRect { center, width, height, angle });
    }
    best
}

/// Aspect, circularity and rectangularity of a traced contour. The perimeter
/// is taken from the contour simplified at 1 px so that pixel staircase
/// edges do not inflate it.
pub fn shape_metrics(poly: &ContourPoly) -> Result<ShapeMetrics, GeomError> {
    if poly.vertices.len() < 3 || poly.area <= 0.0 {
        return Err(GeomError::DegeneratePolygon);
    }
    let smooth = simplify_closed(&poly.vertices, 1.0);
    let perimeter = crate::imgcore::contour::polygon_perimeter(&smooth);
    let hull = convex_hull(&poly.vertices);
    let bbox = min_area_rect(&hull).ok_or(GeomError::DegeneratePolygon)?;
    if bbox.height <= 0.0 || perimeter <= 0.0 {
        return Err(GeomError::DegeneratePolygon);
    }
    Ok(ShapeMetrics {
        aspect_ratio: bbox.width / bbox.height,
        bbox,
        circularity: (4.0 * PI * poly.area / (perimeter * perimeter)).min(1.0),
        rectangularity: poly.area / bbox.area(),
        area: poly.area,
        perimeter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::find_contours;

    #[test]
    fn ratio_of_half() {
        let whole = BinaryMask::from_fn(10, 10, |_, _| true);
        let part = BinaryMask::from_fn(10, 10, |x, _| x < 5);
        assert_eq!(area_ratio(&part, &whole), Ok(0.5));
        assert_eq!(area_ratio(&part, &BinaryMask::new(10, 10)), Err(GeomError::EmptyWhole));
        assert_eq!(area_ratio(&part, &BinaryMask::new(9, 10)), Err(GeomError::DimensionMismatch));
    }

    #[test]
    fn rectangle_metrics() {
        let m = BinaryMask::from_fn(400, 300, |x, y| (50..350).contains(&x) && (100..200).contains(&y));
        let c = &find_contours(&m, 10.0)[0];
        let s = shape_metrics(c).unwrap();
        assert!((s.aspect_ratio - 3.0).abs() < 1e-9);
        assert!(s.rectangularity > 0.999);
        assert!(s.circularity < 0.65);
    }

    #[test]
    fn disk_is_circular() {
        let m = BinaryMask::from_fn(400, 400, |x, y| {
            let (dx, dy) = (x as f64 + 0.5 - 200.0, y as f64 + 0.5 - 200.0);
            dx * dx + dy * dy < 120.0 * 120.0
        });
        let s = shape_metrics(&find_contours(&m, 10.0)[0]).unwrap();
        assert!(s.circularity > 0.95, "{}", s.circularity);
        assert!((s.aspect_ratio - 1.0).abs() < 0.02);
    }

    #[test]
    fn rotated_rect_angle() {
        let hull = convex_hull(&[
            Point::new(0.0, 0.0),
            Point::new(100.0, -100.0),
            Point::new(110.0, -90.0),
            Point::new(10.0, 10.0),
        ]);
        let r = min_area_rect(&hull).unwrap();
        assert!((r.angle - 45.0).abs() < 1e-9);
        assert!((r.width / r.height - 10.0).abs() < 1e-9);
    }
}
