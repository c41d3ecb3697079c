use alloc::vec;
use alloc::vec::Vec;

use crate::imgcore::{Point, RasterImage};

/// Subsamples per pixel side.
pub const SUPERSAMPLE: u32 = 4;

/// A supersampled coverage mask. Shapes are OR-ed in, then the layer is
/// composited onto a canvas in one colour, so overlapping strokes of the
/// same layer never double-blend.
pub struct Layer {
    width: u32,
    height: u32,
    bits: Vec<u64>,
    /// Touched pixel bounds, inclusive.
    bounds: Option<(u32, u32, u32, u32)>,
}

impl Layer {
    pub fn new(width: u32, height: u32) -> Self {
        let n = (width * SUPERSAMPLE) as usize * (height * SUPERSAMPLE) as usize;
        Self { width, height, bits: vec![0; n.div_ceil(64)], bounds: None }
    }

    fn set(&mut self, sx: u32, sy: u32) {
        let i = sy as usize * (self.width * SUPERSAMPLE) as usize + sx as usize;
        self.bits[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, sx: u32, sy: u32) -> bool {
        let i = sy as usize * (self.width * SUPERSAMPLE) as usize + sx as usize;
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    /// Sets every subsample inside `[x0, x1] × [y0, y1]` (pixel units) for
    /// which `inside` holds.
    pub fn fill_where(&mut self, (x0, y0, x1, y1): (f64, f64, f64, f64), inside: impl Fn(Point) -> bool) {
        let clamp = |v: f64, hi: u32| (libm::floor(v).max(0.0) as u32).min(hi - 1);
        let (px0, px1) = (clamp(x0, self.width), clamp(x1, self.width));
        let (py0, py1) = (clamp(y0, self.height), clamp(y1, self.height));
        if x1 < 0.0 || y1 < 0.0 || x0 >= self.width as f64 || y0 >= self.height as f64 {
            return;
        }
        let s = SUPERSAMPLE as f64;
        let mut touched = false;
        for sy in py0 * SUPERSAMPLE..(py1 + 1) * SUPERSAMPLE {
            for sx in px0 * SUPERSAMPLE..(px1 + 1) * SUPERSAMPLE {
                if inside(Point::new((sx as f64 + 0.5) / s, (sy as f64 + 0.5) / s)) {
                    self.set(sx, sy);
                    touched = true;
                }
            }
        }
        if touched {
            self.bounds = Some(match self.bounds {
                None => (px0, py0, px1, py1),
                Some((a, b, c, d)) => (a.min(px0), b.min(py0), c.max(px1), d.max(py1)),
            });
        }
    }

    /// Segment with round caps.
    pub fn capsule(&mut self, p0: Point, p1: Point, width: f64) {
        let r = width / 2.0;
        let bbox = (p0.x.min(p1.x) - r, p0.y.min(p1.y) - r, p0.x.max(p1.x) + r, p0.y.max(p1.y) + r);
        let d = p1.sub(p0);
        let dd = d.dot(d);
        self.fill_where(bbox, |p| {
            let t = if dd == 0.0 { 0.0 } else { (p.sub(p0).dot(d) / dd).clamp(0.0, 1.0) };
            p.distance(p0.add(d.scale(t))) <= r
        });
    }

    pub fn polyline(&mut self, pts: &[Point], width: f64, closed: bool) {
        for w in pts.windows(2) {
            self.capsule(w[0], w[1], width);
        }
        if closed && pts.len() > 2 {
            self.capsule(pts[pts.len() - 1], pts[0], width);
        }
    }

    pub fn disk(&mut self, c: Point, r: f64) {
        self.fill_where((c.x - r, c.y - r, c.x + r, c.y + r), |p| p.distance(c) <= r);
    }

    /// Circle outline of the given stroke width, centred on radius `r`.
    pub fn ring(&mut self, c: Point, r: f64, width: f64) {
        let o = r + width / 2.0;
        self.fill_where((c.x - o, c.y - o, c.x + o, c.y + o), |p| libm::fabs(p.distance(c) - r) <= width / 2.0);
    }

    /// Ellipse outline with semi-axes `a` (x) and `b` (y); stroke measured
    /// along the normal to first order.
    pub fn ellipse_ring(&mut self, c: Point, a: f64, b: f64, width: f64) {
        let o = a.max(b) + width;
        self.fill_where((c.x - o, c.y - o, c.x + o, c.y + o), |p| {
            let (u, v) = ((p.x - c.x) / a, (p.y - c.y) / b);
            let f = libm::sqrt(u * u + v * v) - 1.0;
            let (gx, gy) = (u / a, v / b);
            let grad = libm::sqrt(gx * gx + gy * gy) / libm::sqrt(u * u + v * v).max(1e-12);
            libm::fabs(f) / grad.max(1e-12) <= width / 2.0
        });
    }

    /// Filled polygon, even-odd rule.
    pub fn polygon(&mut self, verts: &[Point]) {
        if verts.len() < 3 {
            return;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for v in verts {
            x0 = x0.min(v.x);
            y0 = y0.min(v.y);
            x1 = x1.max(v.x);
            y1 = y1.max(v.y);
        }
        self.fill_where((x0, y0, x1, y1), |p| {
            let mut inside = false;
            let n = verts.len();
            for i in 0..n {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
                    inside = !inside;
                }
            }
            inside
        });
    }

    /// Axis-aligned rectangle `[x0, x1) × [y0, y1)`.
    pub fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) {
        self.fill_where((x0, y0, x1, y1), |p| p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1);
    }

    /// Fraction of subsamples set in pixel `(x, y)`.
    pub fn coverage(&self, x: u32, y: u32) -> f64 {
        let mut n = 0;
        for sy in y * SUPERSAMPLE..(y + 1) * SUPERSAMPLE {
            for sx in x * SUPERSAMPLE..(x + 1) * SUPERSAMPLE {
                n += self.get(sx, sy) as u32;
            }
        }
        n as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64
    }

    pub fn bounds(&self) -> Option<(u32, u32, u32, u32)> {
        self.bounds
    }
}

/// Blends `layer` onto an RGB image by box-filtered coverage.
pub fn composite(img: &mut RasterImage, layer: &Layer, rgb: [u8; 3]) {
    let Some((x0, y0, x1, y1)) = layer.bounds() else { return };
    for y in y0..=y1 {
        for x in x0..=x1 {
            let a = layer.coverage(x, y);
            if a == 0.0 {
                continue;
            }
            let bg = img.rgb(x, y);
            let mut out = [0u8; 3];
            for k in 0..3 {
                out[k] = libm::round(bg[k] as f64 * (1.0 - a) + rgb[k] as f64 * a) as u8;
            }
            img.set_rgb(x, y, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_rect_is_crisp() {
        let mut img = RasterImage::filled_rgb(20, 20, [255; 3]).unwrap();
        let mut l = Layer::new(20, 20);
        l.rect(5.0, 5.0, 10.0, 8.0);
        composite(&mut img, &l, [0, 0, 0]);
        let dark = (0..20).flat_map(|y| (0..20).map(move |x| (x, y))).filter(|&(x, y)| img.luma(x, y) == 0).count();
        let grey = (0..20).flat_map(|y| (0..20).map(move |x| (x, y))).filter(|&(x, y)| {
            let l = img.luma(x, y);
            l != 0 && l != 255
        });
        assert_eq!(dark, 15);
        assert_eq!(grey.count(), 0);
    }

    #[test]
    fn disk_area_matches() {
        let mut l = Layer::new(100, 100);
        l.disk(Point::new(50.0, 50.0), 20.0);
        let total: f64 = (0..100).flat_map(|y| (0..100).map(move |x| (x, y))).map(|(x, y)| l.coverage(x, y)).sum();
        assert!((total - core::f64::consts::PI * 400.0).abs() < 10.0, "{total}");
    }
}
