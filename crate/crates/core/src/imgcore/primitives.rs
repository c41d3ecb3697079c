use libm::{atan2, hypot};
use serde::{Deserialize, Serialize};

/// A sub-pixel position in continuous image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Center of pixel `(x, y)`.
    pub fn pixel_center(x: u32, y: u32) -> Self {
        Self::new(x as f64 + 0.5, y as f64 + 0.5)
    }

    pub fn distance(self, other: Point) -> f64 {
        hypot(self.x - other.x, self.y - other.y)
    }

    /// Unit vector pointing at `deg` degrees, counter-clockwise on screen.
    pub fn direction(deg: f64) -> Self {
        let r = deg.to_radians();
        Self::new(libm::cos(r), -libm::sin(r))
    }

    pub fn add(self, other: Point) -> Self {
        Self::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Point) -> Self {
        Self::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }
}

/// Screen angle of the vector `v`, in `[0, 360)`.
pub(crate) fn heading_deg(v: Point) -> f64 {
    let deg = atan2(-v.y, v.x).to_degrees();
    if deg < 0.0 {
        deg + 360.0
    } else if deg >= 360.0 {
        deg - 360.0
    } else {
        deg
    }
}

/// A straight stroke recovered from pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub p0: Point,
    pub p1: Point,
    /// Undirected orientation in `[0, 180)`.
    pub angle: f64,
    pub length: f64,
}

impl LineSegment {
    pub fn new(p0: Point, p1: Point) -> Self {
        let mut angle = heading_deg(p1.sub(p0));
        if angle >= 180.0 {
            angle -= 180.0;
        }
        if angle >= 180.0 {
            angle = 0.0;
        }
        Self {
            p0,
            p1,
            angle,
            length: p0.distance(p1),
        }
    }

    pub fn midpoint(&self) -> Point {
        self.p0.add(self.p1).scale(0.5)
    }

    /// Perpendicular distance from `p` to the infinite line through the segment.
    pub fn line_distance(&self, p: Point) -> f64 {
        let d = self.p1.sub(self.p0);
        let len = d.norm();
        if len == 0.0 {
            return p.distance(self.p0);
        }
        libm::fabs(d.cross(p.sub(self.p0))) / len
    }

    /// Copy lengthened by `by` pixels at both ends.
    pub fn extended(&self, by: f64) -> Self {
        if self.length == 0.0 || by == 0.0 {
            return *self;
        }
        let u = self.p1.sub(self.p0).scale(1.0 / self.length);
        Self::new(self.p0.sub(u.scale(by)), self.p1.add(u.scale(by)))
    }
}

/// A circle, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleShape {
    pub center: Point,
    pub radius: f64,
}

impl CircleShape {
    pub fn contains(&self, p: Point) -> bool {
        self.center.distance(p) < self.radius
    }
}

/// A ray direction found in a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPeak {
    /// Degrees in `[0, 360)`, counter-clockwise on screen.
    pub direction: f64,
    /// Smoothed response at the peak, in pixel counts.
    pub strength: f64,
    /// `strength / probe_radius`, clamped to `[0, 1]`.
    pub run_length_ratio: f64,
}

/// A small filled disk used as a point marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectedDot {
    pub center: Point,
    pub radius: f64,
    pub fill_ratio: f64,
}
