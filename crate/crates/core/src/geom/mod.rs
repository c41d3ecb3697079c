//! Geometric predicates and region analysis over recovered primitives.

mod angles;
mod metrics;
mod segments;
mod simplify;
mod venn;

pub use angles::{angular_distance, is_opposite_pair, sector_angles, AngleMeasure};
pub use metrics::{area_ratio, convex_hull, min_area_rect, shape_metrics, OrientedRect, ShapeMetrics};
pub use segments::{count_crossings, merge_collinear, segment_intersection};
pub use simplify::{simplify_closed, simplify_open};
pub use venn::{region_occupancy, venn_layout, OccupancyReading, Region, VennLayout};

/// Errors raised by geometric predicates.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("need at least two rays, found {0}")]
    TooFewRays(usize),
    #[error("angle {0} is outside (0, 360)")]
    InvalidAngle(f64),
    #[error("segment has zero length")]
    DegenerateSegment,
    #[error("segments are collinear and overlap")]
    CollinearOverlap,
    #[error("circles do not form a Venn diagram: {0}")]
    BadTopology(&'static str),
    #[error("reference region is empty")]
    EmptyWhole,
    #[error("polygon needs at least 3 vertices and positive area")]
    DegeneratePolygon,
    #[error("mask dimensions do not match")]
    DimensionMismatch,
}
