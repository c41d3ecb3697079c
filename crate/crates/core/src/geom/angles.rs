use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::imgcore::RadialPeak;

/// An angle strictly between 0° and 360°.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AngleMeasure(f64);

impl AngleMeasure {
    pub fn new(degrees: f64) -> Result<Self, GeomError> {
        if degrees > 0.0 && degrees < 360.0 {
            Ok(Self(degrees))
        } else {
            Err(GeomError::InvalidAngle(degrees))
        }
    }

    pub fn degrees(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AngleMeasure {
    type Error = GeomError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<AngleMeasure> for f64 {
    fn from(a: AngleMeasure) -> f64 {
        a.0
    }
}

/// Smallest absolute difference between two directions, in `[0, 180]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = libm::fmod(libm::fabs(a - b), 360.0);
    d.min(360.0 - d)
}

/// Sectors between consecutive rays going counter-clockwise, starting with
/// the sector after the smallest direction. They always sum to 360°.
pub fn sector_angles(peaks: &[RadialPeak]) -> Result<Vec<AngleMeasure>, GeomError> {
    if peaks.len() < 2 {
        return Err(GeomError::TooFewRays(peaks.len()));
    }
    let mut dirs: Vec<f64> = peaks.iter().map(|p| libm::fmod(libm::fmod(p.direction, 360.0) + 360.0, 360.0)).collect();
    dirs.sort_by(f64::total_cmp);
    let n = dirs.len();
    (0..n)
        .map(|i| {
            let next = if i + 1 < n { dirs[i + 1] } else { dirs[0] + 360.0 };
            AngleMeasure::new(next - dirs[i])
        })
        .collect()
}

/// True iff the directions differ by 180° within `tol`.
pub fn is_opposite_pair(a: f64, b: f64, tol: f64) -> bool {
    let d = libm::fmod(libm::fabs(a - b), 360.0);
    libm::fabs(d - 180.0) <= tol
}
