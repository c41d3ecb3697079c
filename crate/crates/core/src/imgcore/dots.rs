use alloc::vec::Vec;

use super::edges::luma_field;
use super::hough_circles::{detect, HoughCircleParams};
use super::{DetectedDot, Point, RasterImage};

/// Filled point-marker detection settings. Radii and spacing scale with
/// `min(H, W)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotParams {
    pub dp: f64,
    pub param1: f64,
    pub param2: f64,
    pub radius_frac: (f64, f64),
    pub spacing_frac: f64,
    pub min_fill_ratio: f64,
    /// Pixels darker than this count as ink when measuring the fill.
    pub fg_thresh: u8,
}

impl Default for DotParams {
    fn default() -> Self {
        Self {
            dp: 1.2,
            param1: 100.0,
            param2: 12.0,
            radius_frac: (0.0025, 0.014),
            spacing_frac: 0.03,
            min_fill_ratio: 0.68,
            fg_thresh: 200,
        }
    }
}

/// Small filled disks, strongest first.
///
/// Candidates come from a gradient Hough pass restricted to the radius band;
/// each is kept only if at least `min_fill_ratio` of its interior is dark and
/// no stronger accepted dot lies within the spacing distance.
pub fn detect_filled_dots(gray: &RasterImage, params: &DotParams) -> Vec<DetectedDot> {
    let side = gray.min_side() as f64;
    let (r_min, r_max) = (params.radius_frac.0 * side, params.radius_frac.1 * side);
    let spacing = params.spacing_frac * side;
    let hough = HoughCircleParams {
        dp: params.dp,
        min_dist: 1.0,
        param1: params.param1,
        param2: params.param2,
        min_radius: r_min,
        max_radius: r_max,
    };
    let candidates = detect(&luma_field(gray), gray.width(), gray.height(), &hough);

    let mut dots: Vec<DetectedDot> = Vec::new();
    for c in candidates {
        let circle = c.circle;
        if circle.radius < r_min || circle.radius > r_max {
            continue;
        }
        let fill = measure_fill(gray, circle.center, circle.radius, params.fg_thresh);
        if fill < params.min_fill_ratio {
            continue;
        }
        if dots.iter().any(|d| d.center.distance(circle.center) < spacing) {
            continue;
        }
        dots.push(DetectedDot {
            center: circle.center,
            radius: circle.radius,
            fill_ratio: fill,
        });
    }
    dots
}

/// Fraction of pixels with centers inside the disk that are darker than `thresh`.
fn measure_fill(gray: &RasterImage, center: Point, radius: f64, thresh: u8) -> f64 {
    let x0 = libm::floor(center.x - radius).max(0.0) as u32;
    let y0 = libm::floor(center.y - radius).max(0.0) as u32;
    let x1 = (libm::ceil(center.x + radius).max(0.0) as u32).min(gray.width());
    let y1 = (libm::ceil(center.y + radius).max(0.0) as u32).min(gray.height());
    let (mut inside, mut dark) = (0u32, 0u32);
    for y in y0..y1 {
        for x in x0..x1 {
            if Point::pixel_center(x, y).distance(center) <= radius {
                inside += 1;
                dark += (gray.luma(x, y) < thresh) as u32;
            }
        }
    }
    if inside == 0 {
        0.0
    } else {
        dark as f64 / inside as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canvas_with(disks: &[(f64, f64, f64)], ring: bool) -> RasterImage {
        let mut img = RasterImage::filled_gray(1024, 1024, 255).unwrap();
        for y in 0..1024 {
            for x in 0..1024 {
                let p = Point::pixel_center(x, y);
                for &(cx, cy, r) in disks {
                    let d = p.distance(Point::new(cx, cy));
                    let on = if ring { libm::fabs(d - r) <= 1.5 } else { d <= r };
                    if on {
                        img.set_gray(x, y, 0);
                    }
                }
            }
        }
        img
    }

    #[test]
    fn blank_has_no_dots() {
        let img = RasterImage::filled_gray(1024, 1024, 255).unwrap();
        assert!(detect_filled_dots(&img, &DotParams::default()).is_empty());
    }

    #[test]
    fn finds_filled_dots() {
        let truth = [(200.0, 300.0, 8.0), (600.0, 300.0, 8.0), (400.0, 700.0, 8.0)];
        let dots = detect_filled_dots(&canvas_with(&truth, false), &DotParams::default());
        assert_eq!(dots.len(), 3, "{dots:?}");
        for (cx, cy, _) in truth {
            assert!(dots.iter().any(|d| d.center.distance(Point::new(cx, cy)) <= 2.0));
        }
    }

    #[test]
    fn outline_is_not_a_dot() {
        let dots = detect_filled_dots(&canvas_with(&[(500.0, 500.0, 8.0)], true), &DotParams::default());
        assert!(dots.is_empty(), "{dots:?}");
    }
}
