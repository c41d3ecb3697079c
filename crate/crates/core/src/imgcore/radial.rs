use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryMask, ImageError, Point, RadialPeak};

/// One bin per integer degree.
pub const PROFILE_BINS: usize = 360;
/// Circular moving-average half-width, in degrees.
const SMOOTH_HALF_WIDTH: usize = 2;

/// Acceptance rules for [`detect_radial_peaks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    /// Absolute floor on the smoothed response.
    pub floor: f64,
    /// Relative floor as a fraction of the strongest smoothed response.
    pub relative: f64,
    pub min_len_ratio: f64,
    pub min_sep_deg: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self {
            floor: 8.0,
            relative: 0.10,
            min_len_ratio: 0.10,
            min_sep_deg: 10.0,
        }
    }
}

/// Circular moving average over `±SMOOTH_HALF_WIDTH` bins.
pub fn smooth_circular(raw: &[f64]) -> Vec<f64> {
    let n = raw.len();
    let taps = (2 * SMOOTH_HALF_WIDTH + 1) as f64;
    (0..n)
        .map(|i| {
            (0..=2 * SMOOTH_HALF_WIDTH)
                .map(|k| raw[(i + n + k - SMOOTH_HALF_WIDTH) % n])
                .sum::<f64>()
                / taps
        })
        .collect()
}

/// Counts foreground pixels along the ray at every integer degree, sampling
/// unit steps `1..=probe_radius` from `vertex`, then smooths circularly.
pub fn radial_profile(mask: &BinaryMask, vertex: Point, probe_radius: f64) -> Result<Vec<f64>, ImageError> {
    if !(vertex.x >= 0.0 && vertex.y >= 0.0 && vertex.x < mask.width() as f64 && vertex.y < mask.height() as f64) {
        return Err(ImageError::VertexOutOfBounds {
            x: vertex.x,
            y: vertex.y,
            width: mask.width(),
            height: mask.height(),
        });
    }
    if !(probe_radius >= 8.0) {
        return Err(ImageError::ProbeTooShort(probe_radius));
    }
    let steps = libm::floor(probe_radius) as u32;
    let mut raw = vec![0.0; PROFILE_BINS];
    for (deg, slot) in raw.iter_mut().enumerate() {
        let dir = Point::direction(deg as f64);
        let mut count = 0u32;
        for s in 1..=steps {
            let p = vertex.add(dir.scale(s as f64));
            if mask.get_signed(libm::floor(p.x) as i64, libm::floor(p.y) as i64) {
                count += 1;
            }
        }
        *slot = count as f64;
    }
    Ok(smooth_circular(&raw))
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = libm::fmod(libm::fabs(a - b), 360.0);
    d.min(360.0 - d)
}

/// Local maxima of a smoothed radial response that clear
/// `max(floor, relative · max(response))`, cover at least `min_len_ratio` of
/// the probe, and sit at least `min_sep_deg` from any stronger peak.
/// Directions are refined by a parabolic fit and returned in ascending order.
pub fn detect_radial_peaks(
    response: &[f64],
    probe_radius: f64,
    params: &PeakParams,
) -> Result<Vec<RadialPeak>, ImageError> {
    if response.len() != PROFILE_BINS || response.iter().any(|v| !(*v >= 0.0)) {
        return Err(ImageError::BadResponse);
    }
    let n = PROFILE_BINS;
    let max = response.iter().copied().fold(0.0, f64::max);
    let tau = params.floor.max(params.relative * max);

    let mut candidates = Vec::new();
    for i in 0..n {
        let (prev, cur, next) = (response[(i + n - 1) % n], response[i], response[(i + 1) % n]);
        // strict on the left so a flat top yields one peak
        if !(cur > prev && cur >= next) || cur < tau {
            continue;
        }
        let ratio = (cur / probe_radius).clamp(0.0, 1.0);
        if ratio < params.min_len_ratio {
            continue;
        }
        let curvature = prev - 2.0 * cur + next;
        let offset = if curvature < 0.0 {
            (0.5 * (prev - next) / curvature).clamp(-0.5, 0.5)
        } else {
            0.5
        };
        let direction = libm::fmod(i as f64 + offset + 360.0, 360.0);
        candidates.push(RadialPeak {
            direction,
            strength: cur,
            run_length_ratio: ratio,
        });
    }

    candidates.sort_by(|a, b| b.strength.total_cmp(&a.strength).then(a.direction.total_cmp(&b.direction)));
    let mut kept: Vec<RadialPeak> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| circular_gap(k.direction, c.direction) >= params.min_sep_deg) {
            kept.push(c);
        }
    }
    kept.sort_by(|a, b| a.direction.total_cmp(&b.direction));
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rays(dirs: &[f64], len: f64) -> BinaryMask {
        let v = Point::new(512.0, 512.0);
        BinaryMask::from_fn(1024, 1024, |x, y| {
            let p = Point::pixel_center(x, y).sub(v);
            dirs.iter().any(|d| {
                let u = Point::direction(*d);
                let along = p.dot(u);
                along >= 0.0 && along <= len && libm::fabs(u.cross(p)) <= 1.5
            })
        })
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = BinaryMask::new(10, 10);
        assert!(matches!(radial_profile(&m, Point::new(10.0, 3.0), 20.0), Err(ImageError::VertexOutOfBounds { .. })));
        assert_eq!(radial_profile(&m, Point::new(5.0, 5.0), 4.0), Err(ImageError::ProbeTooShort(4.0)));
        assert_eq!(detect_radial_peaks(&[1.0; 10], 20.0, &PeakParams::default()), Err(ImageError::BadResponse));
    }

    #[test]
    fn empty_mask_is_flat_zero() {
        let r = radial_profile(&BinaryMask::new(64, 64), Point::new(32.0, 32.0), 20.0).unwrap();
        assert!(r.iter().all(|v| *v == 0.0));
        assert!(detect_radial_peaks(&r, 20.0, &PeakParams::default()).unwrap().is_empty());
    }

    #[test]
    fn single_ray_peaks_at_its_direction() {
        let r = radial_profile(&rays(&[90.0], 300.0), Point::new(512.0, 512.0), 200.0).unwrap();
        let argmax = (0..360).max_by(|a, b| r[*a].total_cmp(&r[*b])).unwrap();
        assert!((argmax as i32 - 90).abs() <= 1, "argmax {argmax}");
    }

    #[test]
    fn disk_is_uniform() {
        let v = Point::new(100.0, 100.0);
        let disk = BinaryMask::from_fn(200, 200, |x, y| Point::pixel_center(x, y).distance(v) < 60.0);
        let r = radial_profile(&disk, v, 50.0).unwrap();
        let max = r.iter().copied().fold(f64::MIN, f64::max);
        let min = r.iter().copied().fold(f64::MAX, f64::min);
        assert!(max / min <= 1.2);
    }

    #[test]
    fn separated_and_merged_rays() {
        let p = PeakParams::default();
        let r = radial_profile(&rays(&[0.0, 70.0], 300.0), Point::new(512.0, 512.0), 358.0).unwrap();
        let peaks = detect_radial_peaks(&r, 358.0, &p).unwrap();
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        assert!(circular_gap(peaks[0].direction, 0.0) <= 1.0);
        assert!(circular_gap(peaks[1].direction, 70.0) <= 1.0);

        let r = radial_profile(&rays(&[0.0, 5.0], 300.0), Point::new(512.0, 512.0), 358.0).unwrap();
        assert_eq!(detect_radial_peaks(&r, 358.0, &p).unwrap().len(), 1);
    }

    #[test]
    fn weak_responses_are_ignored() {
        let mut r = vec![0.0; 360];
        r[40] = 7.9;
        assert!(detect_radial_peaks(&r, 100.0, &PeakParams::default()).unwrap().is_empty());
        r[40] = 9.0;
        // clears the floor but covers only 9% of a 100 px probe
        assert!(detect_radial_peaks(&r, 100.0, &PeakParams::default()).unwrap().is_empty());
        assert_eq!(detect_radial_peaks(&r, 50.0, &PeakParams::default()).unwrap().len(), 1);
    }
}
