//! Ground-truth diagram rendering and mutated negatives for auditing the
//! verifiers.
//!
//! A [`SceneRecipe`] fully determines an image: [`render`] draws it with 4×
//! supersampled coverage and derives the spec it satisfies by construction.
//! [`mutate`] edits a recipe so it misses that spec by a clear margin.

mod catalog;
mod mutate;
mod raster;
mod render;
mod scene;

pub use catalog::{audit_cases, default_catalog, AuditCase, CatalogEntry};
pub use mutate::{default_mutations, mutate, severity, Mutation, MUTATION_MARGIN};
pub use raster::{composite, Layer, SUPERSAMPLE};
pub use render::{
    color_rgb, region_interior, region_size, regular, render, GridGeometry, Rendered, BLUE, CURVE, DOT_RADIUS, GREEN,
    INK, RED, SHADE, WHITE,
};
pub use scene::{Figure, FigureClaim, PlotCheck, Scene, SceneRecipe, SolidClaim, SolidKind, PLOT_SCALE, VENN_RADIUS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("inapplicable mutation: {0}")]
    InapplicableMutation(String),
}

use alloc::string::String;
