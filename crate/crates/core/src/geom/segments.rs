use alloc::vec::Vec;

use super::{angular_distance, GeomError};
use crate::imgcore::{LineSegment, Point};

const PARALLEL_EPS: f64 = 1e-9;

/// Intersection of two closed segments.
///
/// Returns the crossing point when the segments meet in exactly one point,
/// `None` when they are parallel or disjoint, and
/// [`GeomError::CollinearOverlap`] when they lie on one line and share a
/// stretch (or an endpoint).
pub fn segment_intersection(s1: &LineSegment, s2: &LineSegment) -> Result<Option<Point>, GeomError> {
    let r = s1.p1.sub(s1.p0);
    let s = s2.p1.sub(s2.p0);
    let (rn, sn) = (r.norm(), s.norm());
    if rn == 0.0 || sn == 0.0 {
        return Err(GeomError::DegenerateSegment);
    }
    let qp = s2.p0.sub(s1.p0);
    let denom = r.cross(s);
    if libm::fabs(denom) <= PARALLEL_EPS * rn * sn {
        if libm::fabs(qp.cross(r)) > PARALLEL_EPS * rn * (rn + qp.norm()) {
            return Ok(None);
        }
        let rr = r.dot(r);
        let t0 = qp.dot(r) / rr;
        let t1 = t0 + s.dot(r) / rr;
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        return if hi < 0.0 || lo > 1.0 {
            Ok(None)
        } else {
            Err(GeomError::CollinearOverlap)
        };
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Ok(Some(s1.p0.add(r.scale(t))))
    } else {
        Ok(None)
    }
}

/// Merges near-duplicate detections of the same stroke: segments whose
/// orientations differ by at most `angle_tol` degrees, whose endpoints lie
/// within `dist_tol` of each other's line, and whose extents overlap or are
/// separated by at most `gap_tol` pixels.
pub fn merge_collinear(segments: &[LineSegment], angle_tol: f64, dist_tol: f64, gap_tol: f64) -> Vec<LineSegment> {
    let mut out: Vec<LineSegment> = segments.iter().copied().filter(|s| s.length > 0.0).collect();
    'outer: loop {
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                if let Some(m) = try_merge(&out[i], &out[j], angle_tol, dist_tol, gap_tol) {
                    out[i] = m;
                    out.remove(j);
                    continue 'outer;
                }
            }
        }
        return out;
    }
}

fn try_merge(a: &LineSegment, b: &LineSegment, angle_tol: f64, dist_tol: f64, gap_tol: f64) -> Option<LineSegment> {
    let da = libm::fmod(libm::fabs(a.angle - b.angle), 180.0);
    if da.min(180.0 - da) > angle_tol {
        return None;
    }
    if a.line_distance(b.p0) > dist_tol
        || a.line_distance(b.p1) > dist_tol
        || b.line_distance(a.p0) > dist_tol
        || b.line_distance(a.p1) > dist_tol
    {
        return None;
    }
    let (base, other) = if a.length >= b.length { (a, b) } else { (b, a) };
    let u = base.p1.sub(base.p0).scale(1.0 / base.length);
    let proj = |p: Point| p.sub(base.p0).dot(u);
    let (o0, o1) = (proj(other.p0), proj(other.p1));
    let (olo, ohi) = (o0.min(o1), o0.max(o1));
    if olo > base.length + gap_tol || ohi < -gap_tol {
        return None;
    }
    let lo = olo.min(0.0);
    let hi = ohi.max(base.length);
    Some(LineSegment::new(base.p0.add(u.scale(lo)), base.p0.add(u.scale(hi))))
}

/// Distinct crossing points among `segments`.
///
/// Each segment is lengthened by `extend` pixels at both ends so strokes that
/// merely meet at a corner still register; points closer than `merge_radius`
/// to an existing cluster are folded into it. Returns cluster centroids in
/// discovery order.
pub fn count_crossings(segments: &[LineSegment], extend: f64, merge_radius: f64) -> Vec<Point> {
    let grown: Vec<LineSegment> = segments.iter().map(|s| s.extended(extend)).collect();
    let mut clusters: Vec<(Point, usize)> = Vec::new();
    for i in 0..grown.len() {
        for j in i + 1..grown.len() {
            let da = angular_distance(grown[i].angle, grown[j].angle);
            if da.min(180.0 - da) < 1.0 {
                continue;
            }
            if let Ok(Some(p)) = segment_intersection(&grown[i], &grown[j]) {
                match clusters
                    .iter_mut()
                    .find(|(c, n)| c.scale(1.0 / *n as f64).distance(p) < merge_radius)
                {
                    Some((sum, n)) => {
                        *sum = sum.add(p);
                        *n += 1;
                    }
                    None => clusters.push((p, 1)),
                }
            }
        }
    }
    clusters.into_iter().map(|(s, n)| s.scale(1.0 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seg(x0: f64, y0: f64, x1: f64, y1: f64) -> LineSegment {
        LineSegment::new(Point::new(x0, y0), Point::new(x1, y1))
    }

    #[test]
    fn crossing_x() {
        let p = segment_intersection(&seg(0.0, 0.0, 10.0, 10.0), &seg(0.0, 10.0, 10.0, 0.0)).unwrap();
        assert_eq!(p, Some(Point::new(5.0, 5.0)));
    }

    #[test]
    fn parallel_and_collinear() {
        assert_eq!(segment_intersection(&seg(0.0, 0.0, 10.0, 0.0), &seg(0.0, 3.0, 10.0, 3.0)), Ok(None));
        assert_eq!(segment_intersection(&seg(0.0, 0.0, 4.0, 0.0), &seg(6.0, 0.0, 9.0, 0.0)), Ok(None));
        assert_eq!(
            segment_intersection(&seg(0.0, 0.0, 4.0, 0.0), &seg(3.0, 0.0, 9.0, 0.0)),
            Err(GeomError::CollinearOverlap)
        );
        assert_eq!(
            segment_intersection(&seg(1.0, 1.0, 1.0, 1.0), &seg(3.0, 0.0, 9.0, 0.0)),
            Err(GeomError::DegenerateSegment)
        );
    }

    #[test]
    fn merges_duplicate_strokes() {
        let segs = vec![seg(100.0, 100.0, 400.0, 101.0), seg(120.0, 102.0, 500.0, 103.0), seg(100.0, 300.0, 400.0, 300.0)];
        let merged = merge_collinear(&segs, 3.0, 4.0, 10.0);
        assert_eq!(merged.len(), 2);
        assert!(merged[0].length > 399.0);
    }

    #[test]
    fn crossing_clusters() {
        // three lines through one point, plus one separate crossing
        let segs = vec![
            seg(0.0, 100.0, 200.0, 100.0),
            seg(100.0, 0.0, 100.0, 200.0),
            seg(0.0, 0.0, 200.0, 200.0),
            seg(150.0, 0.0, 190.0, 40.0),
        ];
        let pts = count_crossings(&segs, 0.0, 5.0);
        assert_eq!(pts.len(), 1);
        let with_short = count_crossings(&[segs[0], seg(180.0, 90.0, 180.0, 40.0)], 0.0, 5.0);
        assert!(with_short.is_empty());
        assert_eq!(count_crossings(&[segs[0], seg(180.0, 90.0, 180.0, 40.0)], 12.0, 5.0).len(), 1);
    }

    /// Distance from `p` to the closed segment `s`.
    fn point_segment_distance(p: Point, s: &LineSegment) -> f64 {
        let d = s.p1.sub(s.p0);
        let t = (p.sub(s.p0).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        p.distance(s.p0.add(d.scale(t)))
    }

    /// Dense sampling oracle: 10^4 samples along each segment, measured
    /// against the other segment.
    fn sampled_min_distance(a: &LineSegment, b: &LineSegment) -> f64 {
        let mut best = f64::MAX;
        for (s, other) in [(a, b), (b, a)] {
            for i in 0..10_000 {
                let t = i as f64 / 9_999.0;
                let p = s.p0.add(s.p1.sub(s.p0).scale(t));
                best = best.min(point_segment_distance(p, other));
            }
        }
        best
    }

    #[test]
    fn agrees_with_sampling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let mut r = || rng.random_range(0.0..100.0);
            let a = seg(r(), r(), r(), r());
            let b = seg(r(), r(), r(), r());
            let reported = segment_intersection(&a, &b).unwrap().is_some();
            let oracle_d = sampled_min_distance(&a, &b);
            // near misses closer than the oracle's resolution are ambiguous
            if !reported && oracle_d < 0.5 {
                continue;
            }
            assert_eq!(reported, oracle_d < 0.5, "{a:?} {b:?} d={oracle_d}");
            checked += 1;
        }
    }
}
