//! Deterministic verification of rendered mathematical diagrams.
//!
//! The crate is split along the stages of a judging pipeline:
//!
//! * [`imgcore`] turns pixels into masks and geometric primitives
//!   (lines, circles, contours, radial peaks, filled dots).
//! * [`geom`] holds pure predicates over those primitives: sector angles,
//!   segment crossings, Venn region tiling, shape metrics.
//! * [`verify`] evaluates a [`verify::ConstraintSpec`] against an image and
//!   folds the per-criterion results into a [`verify::Verdict`] by conjunction.
//! * [`synth`] renders positive diagrams with known ground truth and mutated
//!   negatives, and is used to audit the verifiers.
//!
//! Everything here is `no_std` + `alloc`; file IO lives in the companion
//! `diagram-judge` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod geom;
pub mod imgcore;
pub mod synth;
pub mod verify;

pub use verify::{evaluate, ConstraintSpec, Criterion, Domain, ThresholdConfig, Verdict};
pub use imgcore::{
    BinaryMask, Channels, CircleShape, ContourPoly, DetectedDot, LineSegment, Point, RadialPeak,
    RasterImage,
};

