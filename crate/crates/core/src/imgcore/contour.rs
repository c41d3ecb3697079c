use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryMask, Point};

/// Outer boundary of one connected foreground component.
///
/// Vertices lie on pixel corners (integer coordinates), so the polygon
/// encloses exactly the pixels of the component plus any holes in it.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPoly {
    pub vertices: Vec<Point>,
    pub area: f64,
    pub is_closed: bool,
    /// Top-left-most pixel of the component, used for stable ordering.
    pub start: (u32, u32),
}

impl ContourPoly {
    pub fn from_vertices(vertices: Vec<Point>) -> Self {
        let area = shoelace_area(&vertices);
        let start = vertices
            .iter()
            .map(|p| (libm::floor(p.y).max(0.0) as u32, libm::floor(p.x).max(0.0) as u32))
            .min()
            .map(|(y, x)| (x, y))
            .unwrap_or((0, 0));
        Self {
            is_closed: vertices.len() >= 3,
            vertices,
            area,
            start,
        }
    }

    pub fn perimeter(&self) -> f64 {
        polygon_perimeter(&self.vertices)
    }

    /// Pixels whose centers lie inside the polygon (even-odd rule).
    pub fn fill_mask(&self, width: u32, height: u32) -> BinaryMask {
        fill_polygon(&self.vertices, width, height)
    }
}

pub(crate) fn shoelace_area(vertices: &[Point]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        let b = vertices[(i + 1) % vertices.len()];
        twice += a.x * b.y - b.x * a.y;
    }
    libm::fabs(twice) / 2.0
}

pub(crate) fn polygon_perimeter(vertices: &[Point]) -> f64 {
    if vertices.len() < 2 {
        return 0.0;
    }
    (0..vertices.len())
        .map(|i| vertices[i].distance(vertices[(i + 1) % vertices.len()]))
        .sum()
}

/// Scanline fill of an arbitrary polygon, sampling pixel centers.
pub(crate) fn fill_polygon(vertices: &[Point], width: u32, height: u32) -> BinaryMask {
    let mut mask = BinaryMask::new(width, height);
    if vertices.len() < 3 {
        return mask;
    }
    let mut crossings: Vec<f64> = Vec::new();
    for y in 0..height {
        let yc = y as f64 + 0.5;
        crossings.clear();
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            if (a.y <= yc) != (b.y <= yc) {
                crossings.push(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for pair in crossings.chunks_exact(2) {
            // pixel centers x + 0.5 in [pair[0], pair[1])
            let lo = libm::ceil(pair[0] - 0.5).max(0.0);
            let hi = libm::ceil(pair[1] - 0.5).min(width as f64);
            let mut x = lo;
            while x < hi {
                mask.set(x as u32, y, true);
                x += 1.0;
            }
        }
    }
    mask
}

/// 8-connected component labelling. Background is 0, components are `1..=count`
/// numbered in raster order of their first pixel.
pub fn label_components(mask: &BinaryMask) -> (Vec<u32>, u32) {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if mask.bits()[j] && labels[j] == 0 {
                        labels[j] = next;
                        stack.push(j);
                    }
                }
            }
        }
    }
    (labels, next)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Heading {
    East,
    South,
    West,
    North,
}

impl Heading {
    fn step(self) -> (i64, i64) {
        match self {
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
            Heading::North => (0, -1),
        }
    }

    fn left(self) -> Self {
        match self {
            Heading::East => Heading::North,
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
        }
    }

    fn right(self) -> Self {
        match self {
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
            Heading::North => Heading::East,
        }
    }

    /// Pixels ahead-left and ahead-right of corner `(cx, cy)`.
    fn ahead(self, cx: i64, cy: i64) -> ((i64, i64), (i64, i64)) {
        match self {
            Heading::East => ((cx, cy - 1), (cx, cy)),
            Heading::South => ((cx, cy), (cx - 1, cy)),
            Heading::West => ((cx - 1, cy), (cx - 1, cy - 1)),
            Heading::North => ((cx - 1, cy - 1), (cx, cy - 1)),
        }
    }
}

/// Crack-following trace of the outer boundary of component `label`, keeping
/// the component on the right. Diagonal contacts are followed (8-connectivity).
fn trace_outer(labels: &[u32], w: usize, h: usize, label: u32, start: (usize, usize)) -> Vec<Point> {
    let inside = |(x, y): (i64, i64)| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && labels[y as usize * w + x as usize] == label
    };
    let origin = (start.0 as i64, start.1 as i64);
    let mut corner = origin;
    let mut heading = Heading::East;
    let mut vertices = vec![Point::new(origin.0 as f64, origin.1 as f64)];
    loop {
        let (dx, dy) = heading.step();
        corner = (corner.0 + dx, corner.1 + dy);
        if corner == origin {
            break;
        }
        let (fl, fr) = heading.ahead(corner.0, corner.1);
        let next = if inside(fl) {
            heading.left()
        } else if inside(fr) {
            heading
        } else {
            heading.right()
        };
        if next != heading {
            vertices.push(Point::new(corner.0 as f64, corner.1 as f64));
            heading = next;
        }
    }
    vertices
}

/// Outer contours of 8-connected components with `area >= min_area`, largest
/// first; ties go to the component whose first pixel comes first in raster order.
pub fn find_contours(mask: &BinaryMask, min_area: f64) -> Vec<ContourPoly> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let (labels, count) = label_components(mask);
    let mut starts = vec![None; count as usize + 1];
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 && starts[l as usize].is_none() {
            starts[l as usize] = Some((i % w, i / w));
        }
    }
    let mut contours: Vec<ContourPoly> = starts
        .iter()
        .enumerate()
        .filter_map(|(label, s)| s.map(|s| (label as u32, s)))
        .map(|(label, s)| {
            let vertices = trace_outer(&labels, w, h, label, s);
            ContourPoly {
                area: shoelace_area(&vertices),
                is_closed: vertices.len() >= 3,
                vertices,
                start: (s.0 as u32, s.1 as u32),
            }
        })
        .filter(|c| c.area >= min_area)
        .collect();
    contours.sort_by(|a, b| {
        b.area
            .total_cmp(&a.area)
            .then((a.start.1, a.start.0).cmp(&(b.start.1, b.start.0)))
    });
    contours
}
