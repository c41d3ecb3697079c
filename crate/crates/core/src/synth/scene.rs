use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::geom::Region;
use crate::imgcore::{CircleShape, Point};
use crate::verify::{
    function::{classify, parse_relation},
    AsymptoteAxis, ColorName, ConstraintSpec, Criterion, Domain, Ratio,
};

/// Radius of the Venn circles, in pixels at 1024².
pub const VENN_RADIUS: f64 = 180.0;
/// Pixels per math unit in function plots at 1024².
pub const PLOT_SCALE: f64 = 40.0;

/// A closed plane figure drawn as an outline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "figure", rename_all = "snake_case")]
pub enum Figure {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Pixel-aligned rectangle, outer size in pixels.
    Rectangle { width: u32, height: u32 },
    Regular { sides: u32, radius: f64, rotation_deg: f64 },
}

impl Figure {
    /// Circularity 4πA/P² of the ideal outline.
    pub fn circularity(&self) -> f64 {
        use core::f64::consts::PI;
        match *self {
            Figure::Circle { .. } => 1.0,
            Figure::Ellipse { a, b } => {
                let h = ((a - b) / (a + b)) * ((a - b) / (a + b));
                let p = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + libm::sqrt(4.0 - 3.0 * h)));
                4.0 * PI * PI * a * b / (p * p)
            }
            Figure::Rectangle { width, height } => {
                let (w, h) = (width as f64, height as f64);
                4.0 * PI * w * h / ((2.0 * (w + h)) * (2.0 * (w + h)))
            }
            Figure::Regular { sides, .. } => {
                let n = sides as f64;
                PI / (n * libm::tan(PI / n))
            }
        }
    }

    /// Area over the minimum bounding rectangle of the ideal outline.
    pub fn rectangularity(&self) -> f64 {
        use core::f64::consts::PI;
        match *self {
            Figure::Circle { .. } | Figure::Ellipse { .. } => PI / 4.0,
            Figure::Rectangle { .. } => 1.0,
            Figure::Regular { sides: 4, .. } => 1.0,
            Figure::Regular { sides: 3, .. } => 0.5,
            // regular n-gons with n ≥ 5 fill well under 90 % of their box
            Figure::Regular { sides, .. } => {
                let n = sides as f64;
                let area = 0.5 * n * libm::sin(2.0 * PI / n);
                area / 4.0
            }
        }
    }

    /// Vertex count of the ideal outline; smooth curves have none.
    pub fn sides(&self) -> Option<u32> {
        match *self {
            Figure::Circle { .. } | Figure::Ellipse { .. } => None,
            Figure::Rectangle { .. } => Some(4),
            Figure::Regular { sides, .. } => Some(sides),
        }
    }
}

/// What a figure scene claims about its figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureClaim {
    Sides,
    Circle,
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solid", rename_all = "snake_case")]
pub enum SolidKind {
    /// Isometric view: hexagonal silhouette, three visible inner edges.
    Cube,
    /// Triangular silhouette with an interior apex.
    Tetrahedron,
    /// Regular `sides`-gon base seen from above, apex in the middle.
    Pyramid { sides: u32 },
}

impl SolidKind {
    pub fn silhouette_sides(self) -> u32 {
        match self {
            SolidKind::Cube => 6,
            SolidKind::Tetrahedron => 3,
            SolidKind::Pyramid { sides } => sides,
        }
    }

    /// Visible corners: silhouette vertices plus the interior junction when
    /// inner edges are drawn.
    pub fn junctions(self, inner_edges: bool) -> u32 {
        self.silhouette_sides() + inner_edges as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolidClaim {
    Sides,
    Junctions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum PlotCheck {
    Curve,
    Asymptote { axis: AsymptoteAxis, value: f64, tol: f64 },
}

/// Generation parameters for one diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scene", rename_all = "snake_case")]
pub enum Scene {
    /// `n` red disks with a matching mock detection set.
    Count { category: String, n: u32 },
    /// Two rays from a marked vertex.
    Angle { base_deg: f64, opening_deg: f64, relaxed: bool },
    /// Rays at the given directions from a marked vertex.
    RayFan { directions: Vec<f64> },
    /// A `cols × rows` grid with `ratio` of its interior shaded.
    FractionGrid { cols: u32, rows: u32, ratio: f64, tol: f64, color: Option<ColorName> },
    /// Rectangle outline claimed to have aspect `target`.
    Rectangle { width: u32, height: u32, target: f64, tol: f64 },
    /// Two separate circles claimed to have radius ratio `target`.
    CirclePair { r_small: f64, r_large: f64, target: f64, tol: f64 },
    /// Venn outlines with red fills; each fill covers a fraction of its
    /// region.
    Venn { n_circles: u8, fills: Vec<(Region, f64)> },
    FunctionPlot { relation: String, domain: [f64; 2], noise: f64, check: PlotCheck },
    DotsOnCircle { n: u32, phase_deg: f64, center_dot: bool },
    /// A base segment crossed by `n` parallel segments.
    Crossing { n: u32 },
    Figure { figure: Figure, claim: FigureClaim },
    Solid { kind: SolidKind, inner_edges: bool, claim: SolidClaim },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRecipe {
    pub id: String,
    pub canvas: (u32, u32),
    pub seed: u64,
    pub stroke_width: f64,
    #[serde(flatten)]
    pub scene: Scene,
    /// Grey blot in the border band, the one defect a clean render never has.
    #[serde(default)]
    pub stain: bool,
}

impl SceneRecipe {
    pub fn new(id: impl Into<String>, seed: u64, scene: Scene) -> Self {
        Self { id: id.into(), canvas: (1024, 1024), seed, stroke_width: 4.0, scene, stain: false }
    }

    pub fn domain(&self) -> Domain {
        match &self.scene {
            Scene::Count { .. } => Domain::Counting,
            Scene::Angle { .. } | Scene::RayFan { .. } => Domain::Angle,
            Scene::FractionGrid { .. } | Scene::Rectangle { .. } | Scene::CirclePair { .. } => Domain::Fraction,
            Scene::Venn { .. } => Domain::Set,
            Scene::FunctionPlot { .. } => Domain::Function,
            Scene::DotsOnCircle { .. } | Scene::Crossing { .. } | Scene::Figure { .. } => Domain::Plane,
            Scene::Solid { .. } => Domain::Solid,
        }
    }

    /// Scale from the 1024² reference layout to this canvas.
    pub fn scale(&self) -> f64 {
        self.canvas.0.min(self.canvas.1) as f64 / 1024.0
    }

    pub fn center(&self) -> Point {
        Point::new(self.canvas.0 as f64 / 2.0, self.canvas.1 as f64 / 2.0)
    }

    /// Venn circles in label order: sorted by centre x, as the region
    /// labeller assigns A, B, C.
    pub fn venn_circles(&self, n: u8) -> Vec<CircleShape> {
        let s = self.scale();
        let c = self.center();
        let r = VENN_RADIUS * s;
        let at = |dx: f64, dy: f64| CircleShape { center: Point::new(c.x + dx * s, c.y + dy * s), radius: r };
        if n == 2 {
            vec![at(-100.0, 0.0), at(100.0, 0.0)]
        } else {
            vec![at(-100.0, -72.0), at(0.0, 101.0), at(100.0, -72.0)]
        }
    }

    /// Checks that the parameters describe a drawable scene that satisfies
    /// the criteria [`SceneRecipe::spec`] derives from it.
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidRecipe(msg));
        if self.stroke_width < 3.0 {
            return bad(format!("stroke width {} is below 3", self.stroke_width));
        }
        if self.canvas.0 < 256 || self.canvas.1 < 256 {
            return bad("canvas must be at least 256 px".into());
        }
        match &self.scene {
            Scene::Count { n, category } => {
                if *n > 12 || category.is_empty() {
                    return bad("count scenes hold 0 to 12 objects of a named category".into());
                }
            }
            Scene::Angle { opening_deg, .. } => {
                if !(*opening_deg >= 15.0 && *opening_deg <= 345.0) {
                    return bad(format!("opening {opening_deg} outside [15, 345]"));
                }
            }
            Scene::RayFan { directions } => {
                for (i, a) in directions.iter().enumerate() {
                    for b in &directions[i + 1..] {
                        if crate::geom::angular_distance(*a, *b) < 20.0 {
                            return bad("rays closer than 20 degrees".into());
                        }
                    }
                }
            }
            Scene::FractionGrid { cols, rows, ratio, tol, .. } => {
                if *cols == 0 || *rows == 0 || cols * rows > 48 || !(*ratio >= 0.0 && *ratio <= 1.0) || !(*tol > 0.0) {
                    return bad("grid needs 1 to 48 cells, a ratio in [0, 1] and a positive tolerance".into());
                }
            }
            Scene::Rectangle { width, height, tol, target } => {
                if *width < 40 || *height < 40 || *width > 800 || *height > 800 || !(*tol > 0.0) || !(*target > 0.0) {
                    return bad("rectangle sides must be 40..=800 px".into());
                }
            }
            Scene::CirclePair { r_small, r_large, tol, .. } => {
                if !(*r_small >= 80.0 && *r_large >= *r_small && r_small + r_large <= 380.0 && *tol > 0.0) {
                    return bad("circle pair radii must satisfy 80 <= small <= large, small + large <= 380".into());
                }
            }
            Scene::Venn { n_circles, fills } => {
                if !(2..=3).contains(n_circles) {
                    return bad("Venn scenes have 2 or 3 circles".into());
                }
                for (r, f) in fills {
                    if r.circles_needed() > *n_circles as usize || r.bits() == 0 || !(0.0..=1.0).contains(f) {
                        return bad(format!("bad fill {r} at {f}"));
                    }
                }
            }
            Scene::FunctionPlot { relation, domain, noise, .. } => {
                let rel = parse_relation(relation).map_err(|e| SynthError::InvalidRecipe(format!("{e}")))?;
                classify(&rel).map_err(|e| SynthError::InvalidRecipe(format!("{e}")))?;
                if !(domain[0] < domain[1] && domain[0] >= -10.0 && domain[1] <= 10.0) {
                    return bad("plot domain must lie in [-10, 10]".into());
                }
                if !(0.0..=1.0).contains(noise) {
                    return bad("noise fraction must lie in [0, 1]".into());
                }
            }
            Scene::DotsOnCircle { n, .. } => {
                if *n > 16 {
                    return bad("at most 16 dots".into());
                }
            }
            Scene::Crossing { n } => {
                if *n > 5 {
                    return bad("at most 5 crossing segments".into());
                }
            }
            Scene::Figure { figure, .. } => {
                if let Figure::Regular { sides, .. } = figure {
                    if !(3..=12).contains(sides) {
                        return bad("regular polygons need 3 to 12 sides".into());
                    }
                }
            }
            Scene::Solid { kind, .. } => {
                if let SolidKind::Pyramid { sides } = kind {
                    if !(3..=8).contains(sides) {
                        return bad("pyramid bases need 3 to 8 sides".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// The criteria this scene satisfies by construction.
    pub fn spec(&self) -> ConstraintSpec {
        let mut criteria = match &self.scene {
            Scene::Count { category, n } => vec![Criterion::CountExact { category: category.clone(), n: *n }],
            Scene::Angle { opening_deg, relaxed, .. } => {
                let mut c = vec![
                    Criterion::SectorEquals { target_deg: *opening_deg, relaxed: *relaxed },
                    Criterion::RayCount { n: 2 },
                ];
                if libm::fabs(opening_deg - 180.0) < 1e-9 {
                    c.push(Criterion::OppositeRays);
                }
                c
            }
            Scene::RayFan { directions } => {
                let mut c = vec![Criterion::RayCount { n: directions.len() as u32 }];
                let opposite = directions.iter().enumerate().any(|(i, a)| {
                    directions[i + 1..].iter().any(|b| libm::fabs(crate::geom::angular_distance(*a, *b) - 180.0) < 1e-9)
                });
                if opposite {
                    c.push(Criterion::OppositeRays);
                }
                c
            }
            Scene::FractionGrid { ratio, tol, color, .. } => {
                vec![Criterion::FractionShaded { target: Ratio(*ratio), tol: *tol, color: *color }]
            }
            Scene::Rectangle { target, tol, .. } => vec![Criterion::AspectRatio { target: *target, tol: *tol }],
            Scene::CirclePair { target, tol, .. } => vec![Criterion::RadiusRatio { target: *target, tol: *tol }],
            Scene::Venn { n_circles, fills } => {
                let filled = |r: Region| fills.iter().find(|f| f.0 == r).map_or(0.0, |f| f.1);
                let regions = (1..1u8 << n_circles).filter_map(Region::from_bits);
                let (mut on, mut off) = (Vec::new(), Vec::new());
                for r in regions {
                    let f = filled(r);
                    if f >= 0.5 {
                        on.push(r);
                    } else if f == 0.0 {
                        off.push(r);
                    }
                }
                vec![Criterion::VennRegions { expect_on: on, expect_off: off, n_circles: *n_circles }]
            }
            Scene::FunctionPlot { relation, domain, check, .. } => match check {
                PlotCheck::Curve => vec![Criterion::CurveMatches { relation: relation.clone(), domain: *domain }],
                PlotCheck::Asymptote { axis, value, tol } => {
                    vec![Criterion::AsymptoteAt { axis: *axis, value: *value, tol: *tol }]
                }
            },
            Scene::DotsOnCircle { n, .. } => vec![Criterion::DotsOnCircle { n: *n }],
            Scene::Crossing { n } => vec![Criterion::SegmentsIntersect { n_intersections: *n }],
            Scene::Figure { figure, claim } => match claim {
                FigureClaim::Sides => vec![Criterion::PolygonSides { n: figure.sides().unwrap_or(0) }],
                FigureClaim::Circle => vec![Criterion::ShapeIsCircle],
                FigureClaim::Rectangle => vec![Criterion::ShapeIsRectangle],
            },
            Scene::Solid { kind, inner_edges, claim } => match claim {
                SolidClaim::Sides => vec![Criterion::PolygonSides { n: kind.silhouette_sides() }],
                SolidClaim::Junctions => {
                    vec![Criterion::SegmentsIntersect { n_intersections: kind.junctions(*inner_edges) }]
                }
            },
        };
        criteria.push(Criterion::BackgroundWhite);
        ConstraintSpec::new(self.id.clone(), self.domain(), criteria)
    }
}
