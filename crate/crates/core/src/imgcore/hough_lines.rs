use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BinaryMask, LineSegment, Point};

/// Probabilistic Hough settings. Angular resolution is 1°, radial 1 px.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughLineParams {
    pub vote_threshold: u32,
    pub min_len: f64,
    pub max_gap: u32,
    pub seed: u64,
}

const ANGLE_BINS: usize = 180;
/// Half-width of the band retired around an accepted segment, so a thick
/// stroke is reported once rather than once per pixel row.
const CORRIDOR_HALF_WIDTH: i64 = 3;

struct Accumulator {
    trig: Vec<(f64, f64)>,
    offset: i64,
    nrho: usize,
    votes: Vec<u32>,
}

impl Accumulator {
    fn new(width: u32, height: u32) -> Self {
        let diag = libm::ceil(libm::hypot(width as f64, height as f64)) as i64;
        let trig = (0..ANGLE_BINS)
            .map(|k| {
                let t = (k as f64).to_radians();
                (libm::cos(t), libm::sin(t))
            })
            .collect();
        let nrho = 2 * diag as usize + 1;
        Self {
            trig,
            offset: diag,
            nrho,
            votes: vec![0; ANGLE_BINS * nrho],
        }
    }

    fn rho_bin(&self, k: usize, x: i64, y: i64) -> usize {
        let (c, s) = self.trig[k];
        (libm::round(x as f64 * c + y as f64 * s) as i64 + self.offset) as usize
    }

    /// Adds the votes of `(x, y)` and returns the strongest bin `(votes, angle index)`.
    fn vote(&mut self, x: i64, y: i64) -> (u32, usize) {
        let mut best = (0, 0);
        for k in 0..ANGLE_BINS {
            let idx = k * self.nrho + self.rho_bin(k, x, y);
            self.votes[idx] += 1;
            if self.votes[idx] > best.0 {
                best = (self.votes[idx], k);
            }
        }
        best
    }

    fn unvote(&mut self, x: i64, y: i64) {
        for k in 0..ANGLE_BINS {
            let idx = k * self.nrho + self.rho_bin(k, x, y);
            self.votes[idx] = self.votes[idx].saturating_sub(1);
        }
    }
}

struct Walk {
    /// Signed step counts of the furthest hits in the negative and positive direction.
    extent: (i64, i64),
    hits: Vec<(i64, i64)>,
}

/// Steps from `(x0, y0)` along `dir` in both directions, accepting a hit when
/// the pixel on the line or one of its minor-axis neighbours is foreground.
fn walk(mask: &BinaryMask, x0: i64, y0: i64, step: (f64, f64), minor: (i64, i64), max_gap: u32) -> Walk {
    let mut hits = vec![(x0, y0)];
    let mut extent = (0, 0);
    for sign in [-1i64, 1] {
        let mut gap = 0;
        let mut t = 0i64;
        loop {
            t += sign;
            let px = libm::round(x0 as f64 + t as f64 * step.0) as i64;
            let py = libm::round(y0 as f64 + t as f64 * step.1) as i64;
            if px < 0 || py < 0 || px >= mask.width() as i64 || py >= mask.height() as i64 {
                break;
            }
            let hit = [0i64, -1, 1]
                .iter()
                .map(|o| (px + o * minor.0, py + o * minor.1))
                .find(|&(hx, hy)| mask.get_signed(hx, hy));
            match hit {
                Some(p) => {
                    gap = 0;
                    hits.push(p);
                    if sign < 0 {
                        extent.0 = t;
                    } else {
                        extent.1 = t;
                    }
                }
                None => {
                    gap += 1;
                    if gap > max_gap {
                        break;
                    }
                }
            }
        }
    }
    Walk { extent, hits }
}

/// Total-least-squares line through `pts`: `(centroid, unit direction)`.
fn fit_line(pts: &[(i64, i64)], fallback: (f64, f64)) -> (Point, Point) {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 as f64, b + p.1 as f64));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p.0 as f64 - mx, p.1 as f64 - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let theta = 0.5 * libm::atan2(2.0 * sxy, sxx - syy);
    let mut dir = Point::new(libm::cos(theta), libm::sin(theta));
    if pts.len() < 2 || (sxx + syy) == 0.0 {
        dir = Point::new(fallback.0, fallback.1);
    }
    (Point::new(mx, my), dir)
}

/// Progressive probabilistic Hough transform.
///
/// Foreground pixels are visited in a seeded random order. Each casts votes;
/// when its strongest bin reaches `vote_threshold` the line is walked in
/// both directions (tolerating gaps up to `max_gap`). Walks of at least
/// `min_len` become segments, refined by a least-squares fit over the walked
/// pixels, and retire their pixels and votes.
pub fn hough_lines(mask: &BinaryMask, params: &HoughLineParams) -> Vec<LineSegment> {
    let (w, h) = (mask.width(), mask.height());
    let mut points: Vec<(u32, u32)> = mask.foreground().collect();
    if points.is_empty() || params.vote_threshold == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    points.shuffle(&mut rng);

    let mut acc = Accumulator::new(w, h);
    let mut available = mask.clone();
    let mut voted = BinaryMask::new(w, h);
    let mut segments = Vec::new();

    for (px, py) in points {
        if !available.get(px, py) {
            continue;
        }
        let (x0, y0) = (px as i64, py as i64);
        let (votes, k) = acc.vote(x0, y0);
        voted.set(px, py, true);
        if votes < params.vote_threshold {
            continue;
        }

        // normal at k degrees, so the line runs along (-sin, cos)
        let (c, s) = acc.trig[k];
        let dir = (-s, c);
        let (step, minor) = if dir.0.abs() >= dir.1.abs() {
            ((dir.0.signum(), dir.1 / dir.0.abs()), (0, 1))
        } else {
            ((dir.0 / dir.1.abs(), dir.1.signum()), (1, 0))
        };
        let Walk { extent, hits } = walk(mask, x0, y0, step, minor, params.max_gap);
        let end_a = (x0 as f64 + extent.0 as f64 * step.0, y0 as f64 + extent.0 as f64 * step.1);
        let end_b = (x0 as f64 + extent.1 as f64 * step.0, y0 as f64 + extent.1 as f64 * step.1);
        let length = libm::hypot(end_b.0 - end_a.0, end_b.1 - end_a.1);
        let good = length >= params.min_len;

        if !good {
            for &(qx, qy) in &hits {
                available.set(qx as u32, qy as u32, false);
            }
            available.set(px, py, false);
            continue;
        }

        // refit on the whole stroke cross-section, not just the walked
        // pixels, which can run diagonally through a thick stroke
        let mut band = Vec::new();
        for t in extent.0..=extent.1 {
            let cx = libm::round(x0 as f64 + t as f64 * step.0) as i64;
            let cy = libm::round(y0 as f64 + t as f64 * step.1) as i64;
            for o in -CORRIDOR_HALF_WIDTH..=CORRIDOR_HALF_WIDTH {
                let q = (cx + o * minor.0, cy + o * minor.1);
                if mask.get_signed(q.0, q.1) {
                    band.push(q);
                }
            }
        }
        let (centroid, d) = fit_line(&band, dir);
        let project = |e: (f64, f64)| {
            let t = (e.0 - centroid.x) * d.x + (e.1 - centroid.y) * d.y;
            Point::new(centroid.x + t * d.x, centroid.y + t * d.y)
        };
        let (a, b) = (project(end_a), project(end_b));

        let mut retire = |qx: i64, qy: i64| {
            if !available.get_signed(qx, qy) {
                return;
            }
            let (ux, uy) = (qx as u32, qy as u32);
            if voted.get(ux, uy) {
                acc.unvote(qx, qy);
                voted.set(ux, uy, false);
            }
            available.set(ux, uy, false);
        };
        for &(qx, qy) in &band {
            retire(qx, qy);
        }
        let len = a.distance(b).max(1.0);
        let (rstep, rminor) = if d.x.abs() >= d.y.abs() { (1.0 / d.x.abs(), (0, 1)) } else { (1.0 / d.y.abs(), (1, 0)) };
        let steps = libm::ceil(len / rstep) as i64;
        for t in 0..=steps {
            let f = (t as f64 * rstep / len).min(1.0);
            let cx = libm::round(a.x + (b.x - a.x) * f) as i64;
            let cy = libm::round(a.y + (b.y - a.y) * f) as i64;
            for o in -CORRIDOR_HALF_WIDTH..=CORRIDOR_HALF_WIDTH {
                retire(cx + o * rminor.0, cy + o * rminor.1);
            }
        }
        segments.push(LineSegment::new(a.add(Point::new(0.5, 0.5)), b.add(Point::new(0.5, 0.5))));
    }
    segments
}
