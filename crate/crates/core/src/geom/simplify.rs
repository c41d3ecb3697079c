use alloc::vec;
use alloc::vec::Vec;

use crate::imgcore::Point;

fn point_line_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    let n = d.norm();
    if n == 0.0 {
        p.distance(a)
    } else {
        libm::fabs(d.cross(p.sub(a))) / n
    }
}

/// Douglas–Peucker simplification of an open polyline. Endpoints are kept.
pub fn simplify_open(points: &[Point], epsilon: f64) -> Vec<Point> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (mut best, mut best_d) = (lo, -1.0);
        for (i, p) in points.iter().enumerate().take(hi).skip(lo + 1) {
            let d = point_line_distance(*p, points[lo], points[hi]);
            if d > best_d {
                best = i;
                best_d = d;
            }
        }
        if best_d > epsilon {
            keep[best] = true;
            stack.push((lo, best));
            stack.push((best, hi));
        }
    }
    points.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
}

/// Douglas–Peucker simplification of a closed ring (no repeated first
/// vertex). The ring is split at the vertex farthest from the centroid and
/// the vertex farthest from that one; afterwards any vertex lying within
/// `epsilon` of the chord through its neighbours is dropped.
pub fn simplify_closed(points: &[Point], epsilon: f64) -> Vec<Point> {
    let n = points.len();
    if n <= 3 {
        return points.to_vec();
    }
    let c = points.iter().fold(Point::default(), |acc, p| acc.add(*p)).scale(1.0 / n as f64);
    let far = |from: Point| {
        (0..n)
            .max_by(|&i, &j| from.distance(points[i]).total_cmp(&from.distance(points[j])).then(j.cmp(&i)))
            .unwrap_or(0)
    };
    let a = far(c);
    let b = far(points[a]);
    let chain = |from: usize, to: usize| {
        let mut v = Vec::new();
        let mut i = from;
        loop {
            v.push(points[i]);
            if i == to {
                break;
            }
            i = (i + 1) % n;
        }
        v
    };
    let mut ring = simplify_open(&chain(a, b), epsilon);
    let back = simplify_open(&chain(b, a), epsilon);
    ring.pop();
    ring.extend_from_slice(&back[..back.len() - 1]);

    loop {
        let m = ring.len();
        if m <= 3 {
            return ring;
        }
        let victim = (0..m)
            .map(|i| (i, point_line_distance(ring[i], ring[(i + m - 1) % m], ring[(i + 1) % m])))
            .filter(|(_, d)| *d < epsilon)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match victim {
            Some((i, _)) => {
                ring.remove(i);
            }
            None => return ring,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_run_collapses() {
        let pts: Vec<Point> = (0..=10).map(|i| Point::new(i as f64, 0.0)).collect();
        assert_eq!(simplify_open(&pts, 0.5), vec![pts[0], pts[10]]);
    }

    #[test]
    fn square_ring_keeps_corners() {
        let mut ring = Vec::new();
        for i in 0..10 {
            ring.push(Point::new(i as f64, 0.0));
        }
        for i in 0..10 {
            ring.push(Point::new(10.0, i as f64));
        }
        for i in 0..10 {
            ring.push(Point::new(10.0 - i as f64, 10.0));
        }
        for i in 0..10 {
            ring.push(Point::new(0.0, 10.0 - i as f64));
        }
        let s = simplify_closed(&ring, 0.5);
        assert_eq!(s.len(), 4);
        for corner in [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)] {
            assert!(s.contains(&Point::new(corner.0, corner.1)));
        }
    }
}
