//! Image preprocessing and structural detection.
//!
//! Coordinates are continuous: pixel `(x, y)` covers `[x, x+1) × [y, y+1)`
//! with `y` growing downwards, so its center sits at `(x + 0.5, y + 0.5)`.
//! Directions and line angles are measured counter-clockwise from `+x` as a
//! viewer sees them (i.e. with `y` flipped to point up).

pub(crate) mod contour;
mod dots;
pub(crate) mod edges;
pub(crate) mod hough_circles;
mod hough_lines;
mod morph;
mod primitives;
mod radial;
mod raster;

pub use contour::{find_contours, label_components, ContourPoly};
pub use dots::{detect_filled_dots, DotParams};
pub use edges::{canny, gaussian_blur, sobel};
pub use hough_circles::{hough_circles, hough_circles_gray, HoughCircleParams};
pub use hough_lines::{hough_lines, HoughLineParams};
pub use morph::{dilate, erode, morph, MorphOp};
pub use primitives::{CircleShape, DetectedDot, LineSegment, Point, RadialPeak};
pub use radial::{detect_radial_peaks, radial_profile, smooth_circular, PeakParams, PROFILE_BINS};
pub use raster::{
    border_band_width, check_white_background, threshold_foreground, to_grayscale, to_hsv,
    BinaryMask, Channels, Hsv, RasterImage,
};

/// Errors raised by the pixel-level stages.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("morphology kernel ({0}, {1}) must have odd, positive sides")]
    InvalidKernel(u32, u32),
    #[error("vertex ({x:.1}, {y:.1}) lies outside the {width}x{height} mask")]
    VertexOutOfBounds { x: f64, y: f64, width: u32, height: u32 },
    #[error("probe radius {0} is shorter than 8 px")]
    ProbeTooShort(f64),
    #[error("radial response must have {PROFILE_BINS} non-negative entries")]
    BadResponse,
}
