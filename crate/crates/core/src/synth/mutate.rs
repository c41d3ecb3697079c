use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::render::GridGeometry;
use super::scene::{Figure, Scene, SceneRecipe, SolidClaim};
use super::SynthError;
use crate::geom::{angular_distance, Region};
use crate::verify::{
    function::{classify, parse_relation},
    AsymptoteAxis, Criterion, ThresholdConfig,
};

/// A negative must miss its criterion by this multiple of the tolerance.
pub const MUTATION_MARGIN: f64 = 1.5;

/// An edit that turns a positive recipe into one violating its own spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mutation", rename_all = "snake_case")]
pub enum Mutation {
    /// Widen or narrow the drawn angle.
    PerturbAngle { delta_deg: f64 },
    /// Add or remove objects, dots, crossers, polygon sides.
    ChangeCount { delta: i32 },
    /// Shade a different fraction of the grid, or refill every filled Venn
    /// region at the given fraction.
    ReshadeFraction { new_ratio: f64 },
    /// Move the first filled Venn region's fill to the first empty one.
    SwapRegion,
    /// Draw a different relation.
    ReshapeCurve { relation: String },
    /// Remove one drawn primitive: a ray, a Venn circle, the inner edges of
    /// a solid.
    DropPrimitive,
    /// Draw a different outline, or scale the long side of a rectangle or the
    /// larger of two circles by `factor`.
    ReshapeFigure { figure: Option<Figure>, factor: Option<f64> },
    /// Blot the border band.
    StainBackground,
}

impl Mutation {
    pub fn name(&self) -> &'static str {
        match self {
            Mutation::PerturbAngle { .. } => "perturb_angle",
            Mutation::ChangeCount { .. } => "change_count",
            Mutation::ReshadeFraction { .. } => "reshade_fraction",
            Mutation::SwapRegion => "swap_region",
            Mutation::ReshapeCurve { .. } => "reshape_curve",
            Mutation::DropPrimitive => "drop_primitive",
            Mutation::ReshapeFigure { .. } => "reshape_figure",
            Mutation::StainBackground => "stain_background",
        }
    }
}

/// Applies `m` and checks that the result misses at least one criterion of
/// the original spec by more than [`MUTATION_MARGIN`] tolerances.
pub fn mutate(recipe: &SceneRecipe, m: &Mutation) -> Result<SceneRecipe, SynthError> {
    let na = || SynthError::InapplicableMutation(format!("{} does not apply to {}", m.name(), recipe.id));
    let shift = |n: u32, d: i32| u32::try_from(n as i64 + d as i64).ok().filter(|_| d != 0);
    let mut out = recipe.clone();
    out.id = format!("{}~{}", recipe.id, m.name());
    match (m, &mut out.scene) {
        (Mutation::StainBackground, _) => out.stain = true,
        (Mutation::PerturbAngle { delta_deg }, Scene::Angle { opening_deg, .. }) => *opening_deg += delta_deg,
        (Mutation::ChangeCount { delta }, Scene::Count { n, .. })
        | (Mutation::ChangeCount { delta }, Scene::DotsOnCircle { n, .. })
        | (Mutation::ChangeCount { delta }, Scene::Crossing { n }) => *n = shift(*n, *delta).ok_or_else(na)?,
        (Mutation::ChangeCount { delta }, Scene::Figure { figure: Figure::Regular { sides, .. }, .. }) => {
            *sides = shift(*sides, *delta).ok_or_else(na)?;
        }
        (Mutation::ChangeCount { delta }, Scene::Solid { kind: super::SolidKind::Pyramid { sides }, .. }) => {
            *sides = shift(*sides, *delta).ok_or_else(na)?;
        }
        (Mutation::ReshadeFraction { new_ratio }, Scene::FractionGrid { ratio, .. }) => *ratio = *new_ratio,
        (Mutation::ReshadeFraction { new_ratio }, Scene::Venn { fills, .. }) => {
            for f in fills.iter_mut().filter(|f| f.1 >= 0.5) {
                f.1 = *new_ratio;
            }
        }
        (Mutation::SwapRegion, Scene::Venn { n_circles, fills }) => {
            let filled = fills.iter().position(|f| f.1 >= 0.5).ok_or_else(na)?;
            let empty = (1..1u8 << *n_circles)
                .filter_map(Region::from_bits)
                .find(|r| !fills.iter().any(|f| f.0 == *r && f.1 > 0.0))
                .ok_or_else(na)?;
            fills[filled].0 = empty;
        }
        (Mutation::ReshapeCurve { relation: new }, Scene::FunctionPlot { relation, .. }) => *relation = new.clone(),
        (Mutation::DropPrimitive, Scene::Angle { base_deg, .. }) => {
            out.scene = Scene::RayFan { directions: vec![*base_deg] };
        }
        (Mutation::DropPrimitive, Scene::RayFan { directions }) => {
            directions.pop().ok_or_else(na)?;
        }
        (Mutation::DropPrimitive, Scene::Venn { n_circles: 3, fills }) => {
            fills.retain(|f| f.0.bits() & 0b100 == 0);
            out.scene = Scene::Venn { n_circles: 2, fills: core::mem::take(fills) };
        }
        (Mutation::DropPrimitive, Scene::Solid { inner_edges, .. }) if *inner_edges => *inner_edges = false,
        (Mutation::ReshapeFigure { figure: Some(f), .. }, Scene::Figure { figure, .. }) => *figure = f.clone(),
        (Mutation::ReshapeFigure { factor: Some(k), .. }, Scene::Rectangle { width, height, .. }) => {
            let long = if width >= height { width } else { height };
            *long = libm::round(*long as f64 * k) as u32;
        }
        (Mutation::ReshapeFigure { factor: Some(k), .. }, Scene::CirclePair { r_large, .. }) => *r_large *= k,
        _ => return Err(na()),
    }
    out.validate()?;
    let cfg = ThresholdConfig::default();
    let worst = recipe.spec().criteria.iter().map(|c| severity(&out, c, &cfg)).fold(0.0, f64::max);
    if worst <= MUTATION_MARGIN {
        return Err(SynthError::InapplicableMutation(format!(
            "{} on {} misses by only {worst:.2} tolerances",
            m.name(),
            recipe.id
        )));
    }
    Ok(out)
}

/// Ray directions drawn by angle scenes.
fn rays(recipe: &SceneRecipe) -> Option<Vec<f64>> {
    match &recipe.scene {
        Scene::Angle { base_deg, opening_deg, .. } => Some(vec![*base_deg, base_deg + opening_deg]),
        Scene::RayFan { directions } => Some(directions.clone()),
        _ => None,
    }
}

/// Angles between circularly adjacent rays.
fn sectors(dirs: &[f64]) -> Vec<f64> {
    let mut d: Vec<f64> = dirs.iter().map(|a| libm::fmod(libm::fmod(*a, 360.0) + 360.0, 360.0)).collect();
    d.sort_by(f64::total_cmp);
    if d.len() < 2 {
        return Vec::new();
    }
    (0..d.len()).map(|i| if i + 1 < d.len() { d[i + 1] - d[i] } else { d[0] + 360.0 - d[i] }).collect()
}

fn discrete(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        f64::INFINITY
    }
}

/// How far a gate is missed, scaled so a miss by `unit` scores 2.
fn gate(miss: f64, unit: f64) -> f64 {
    if miss < 0.0 {
        0.0
    } else {
        1.0 + miss / unit
    }
}

/// Deviation of the recipe's analytic ground truth from `c`, in units of
/// the criterion's tolerance: at most 1 when the criterion holds, above
/// [`MUTATION_MARGIN`] for a robust violation. Criteria the scene has no
/// ground truth for score infinity.
pub fn severity(recipe: &SceneRecipe, c: &Criterion, cfg: &ThresholdConfig) -> f64 {
    let scene = &recipe.scene;
    match c {
        Criterion::BackgroundWhite => discrete(!recipe.stain),
        Criterion::CountExact { category, n } => match scene {
            Scene::Count { category: k, n: m } => discrete(k == category && m == n),
            _ => f64::INFINITY,
        },
        Criterion::SectorEquals { target_deg, relaxed } => {
            let tol = if *relaxed { cfg.angle_tol_relaxed_deg() } else { cfg.angle_tol_deg };
            let s = rays(recipe).map(|r| sectors(&r)).unwrap_or_default();
            s.iter().map(|a| libm::fabs(a - target_deg) / tol).fold(f64::INFINITY, f64::min)
        }
        Criterion::RayCount { n } => discrete(rays(recipe).is_some_and(|r| r.len() == *n as usize)),
        Criterion::OppositeRays => {
            let r = rays(recipe).unwrap_or_default();
            let mut best = f64::INFINITY;
            for (i, a) in r.iter().enumerate() {
                for b in &r[i + 1..] {
                    best = best.min(libm::fabs(angular_distance(*a, *b) - 180.0) / cfg.opposite_tol_deg);
                }
            }
            best
        }
        Criterion::FractionShaded { target, tol, .. } => match scene {
            Scene::FractionGrid { cols, rows, ratio, .. } => {
                let g = GridGeometry::new(recipe, *cols, *rows);
                let exact = g.shaded_pixels(*ratio) as f64 / g.interior_total() as f64;
                libm::fabs(exact - target.0) / tol
            }
            _ => f64::INFINITY,
        },
        Criterion::AspectRatio { target, tol } => match scene {
            Scene::Rectangle { width, height, .. } => {
                let (a, b) = (*width.max(height) as f64, *width.min(height) as f64);
                libm::fabs(a / b - target) / tol
            }
            _ => f64::INFINITY,
        },
        Criterion::RadiusRatio { target, tol } => match scene {
            Scene::CirclePair { r_small, r_large, .. } => {
                libm::fabs(r_large.max(*r_small) / r_small.min(*r_large) - target) / tol
            }
            _ => f64::INFINITY,
        },
        Criterion::VennRegions { expect_on, expect_off, n_circles } => match scene {
            Scene::Venn { n_circles: k, fills } if k == n_circles => {
                let fill = |r: &Region| fills.iter().find(|f| f.0 == *r).map_or(0.0, |f| f.1);
                let on = expect_on.iter().map(|r| gate(cfg.occupancy_on - fill(r), 0.05));
                let off = expect_off.iter().map(|r| gate(fill(r) - cfg.occupancy_off, 0.05));
                on.chain(off).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        },
        Criterion::CurveMatches { relation, domain } => match scene {
            Scene::FunctionPlot { relation: drawn, .. } => {
                let (Ok(claim), Ok(drawn)) = (parse_relation(relation), parse_relation(drawn)) else {
                    return f64::INFINITY;
                };
                let clip = |y: f64| y.clamp(-10.0, 10.0);
                let (mut sum, mut n) = (0.0, 0usize);
                for i in 0..=400 {
                    let x = domain[0] + (domain[1] - domain[0]) * i as f64 / 400.0;
                    let (a, b) = (claim.eval(x), drawn.eval(x));
                    if a.is_finite() && b.is_finite() {
                        sum += libm::fabs(clip(a) - clip(b));
                        n += 1;
                    }
                }
                if n == 0 {
                    f64::INFINITY
                } else {
                    sum / n as f64 / cfg.fn_final_tol
                }
            }
            _ => f64::INFINITY,
        },
        Criterion::AsymptoteAt { axis, value, tol } => match scene {
            Scene::FunctionPlot { relation, .. } => {
                let Ok(rel) = parse_relation(relation) else { return f64::INFINITY };
                let at = match axis {
                    AsymptoteAxis::Vertical => classify(&rel).ok().and_then(|f| f.pole()),
                    AsymptoteAxis::Horizontal => {
                        classify(&rel).ok().and_then(|f| f.pole()).map(|_| rel.eval(1e9))
                    }
                };
                at.map_or(f64::INFINITY, |a| libm::fabs(a - value) / tol)
            }
            _ => f64::INFINITY,
        },
        Criterion::SegmentsIntersect { n_intersections } => match scene {
            Scene::Crossing { n } => discrete(n == n_intersections),
            Scene::Solid { kind, inner_edges, .. } => discrete(kind.junctions(*inner_edges) == *n_intersections),
            _ => f64::INFINITY,
        },
        Criterion::PolygonSides { n } => match scene {
            Scene::Figure { figure, .. } => discrete(figure.sides() == Some(*n)),
            Scene::Solid { kind, .. } => discrete(kind.silhouette_sides() == *n),
            _ => f64::INFINITY,
        },
        Criterion::DotsOnCircle { n: k } => match scene {
            Scene::DotsOnCircle { n, .. } => discrete(n == k),
            _ => f64::INFINITY,
        },
        Criterion::ShapeIsCircle => match scene {
            Scene::Figure { figure, .. } => gate(cfg.circularity_min - figure.circularity(), 0.05),
            _ => f64::INFINITY,
        },
        Criterion::ShapeIsRectangle => match scene {
            Scene::Figure { figure, .. } if figure.sides() == Some(4) => {
                gate(cfg.rectangularity_min - figure.rectangularity(), 0.05)
            }
            _ => f64::INFINITY,
        },
    }
}

impl SceneRecipe {
    /// Checks that the recipe's ground truth satisfies every criterion of
    /// its own spec.
    pub fn check_claims(&self) -> Result<(), SynthError> {
        self.validate()?;
        let cfg = ThresholdConfig::default();
        for c in &self.spec().criteria {
            let v = severity(self, c, &cfg);
            if v > 1.0 {
                return Err(SynthError::InvalidRecipe(format!(
                    "{} does not satisfy {} ({v:.2} tolerances off)",
                    self.id,
                    c.kind().name()
                )));
            }
        }
        Ok(())
    }
}

/// Mutations the audit applies to a recipe, one per applicable kind.
pub fn default_mutations(recipe: &SceneRecipe) -> Vec<Mutation> {
    let mut out = Vec::new();
    match &recipe.scene {
        Scene::Count { n, .. } => {
            out.push(Mutation::ChangeCount { delta: 1 });
            if *n > 0 {
                out.push(Mutation::ChangeCount { delta: -1 });
            }
        }
        Scene::Angle { opening_deg, relaxed, .. } => {
            let d = if *relaxed { 35.0 } else { 20.0 };
            let d = if *opening_deg + d > 345.0 { -d } else { d };
            out.push(Mutation::PerturbAngle { delta_deg: d });
            out.push(Mutation::DropPrimitive);
        }
        Scene::RayFan { .. } => out.push(Mutation::DropPrimitive),
        Scene::FractionGrid { ratio, tol, .. } => {
            let d = (2.0 * tol).max(0.08);
            let r = if ratio + d <= 1.0 { ratio + d } else { ratio - d };
            out.push(Mutation::ReshadeFraction { new_ratio: r });
        }
        Scene::Rectangle { .. } | Scene::CirclePair { .. } => {
            out.push(Mutation::ReshapeFigure { figure: None, factor: Some(1.25) });
        }
        Scene::Venn { n_circles, .. } => {
            out.push(Mutation::SwapRegion);
            out.push(Mutation::ReshadeFraction { new_ratio: 0.10 });
            if *n_circles == 3 {
                out.push(Mutation::DropPrimitive);
            }
        }
        Scene::FunctionPlot { relation, .. } => {
            let alt = if relation.contains('/') { "1/(x-3)" } else if relation.contains("x^2") { "2x+1" } else { "x^2 - 4" };
            out.push(Mutation::ReshapeCurve { relation: alt.into() });
        }
        Scene::DotsOnCircle { .. } | Scene::Crossing { .. } => {
            out.push(Mutation::ChangeCount { delta: 1 });
            out.push(Mutation::ChangeCount { delta: -1 });
        }
        Scene::Figure { claim, figure } => match claim {
            super::FigureClaim::Sides => out.push(Mutation::ChangeCount { delta: 1 }),
            super::FigureClaim::Circle => {
                let alt = match figure {
                    Figure::Circle { radius } => Figure::Regular { sides: 4, radius: *radius, rotation_deg: 45.0 },
                    _ => Figure::Regular { sides: 3, radius: 250.0, rotation_deg: 90.0 },
                };
                out.push(Mutation::ReshapeFigure { figure: Some(alt), factor: None });
                out.push(Mutation::ReshapeFigure { figure: Some(Figure::Ellipse { a: 300.0, b: 100.0 }), factor: None });
            }
            super::FigureClaim::Rectangle => {
                out.push(Mutation::ReshapeFigure { figure: Some(Figure::Ellipse { a: 280.0, b: 160.0 }), factor: None });
                let pent = Figure::Regular { sides: 5, radius: 250.0, rotation_deg: 90.0 };
                out.push(Mutation::ReshapeFigure { figure: Some(pent), factor: None });
            }
        },
        Scene::Solid { claim, kind, .. } => match claim {
            SolidClaim::Junctions => out.push(Mutation::DropPrimitive),
            SolidClaim::Sides => {
                if matches!(kind, super::SolidKind::Pyramid { .. }) {
                    out.push(Mutation::ChangeCount { delta: 1 });
                }
            }
        },
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{default_catalog, PlotCheck};
    use proptest::prelude::*;

    fn angle(opening: f64) -> SceneRecipe {
        SceneRecipe::new("a", 1, Scene::Angle { base_deg: 10.0, opening_deg: opening, relaxed: false })
    }

    #[test]
    fn catalog_positives_hold_and_negatives_miss_by_the_margin() {
        let cfg = ThresholdConfig::default();
        for e in default_catalog() {
            e.recipe.check_claims().unwrap();
            for m in &e.mutations {
                let neg = mutate(&e.recipe, m).unwrap();
                let worst = e.recipe.spec().criteria.iter().map(|c| severity(&neg, c, &cfg)).fold(0.0, f64::max);
                assert!(worst > MUTATION_MARGIN, "{} {}", e.recipe.id, m.name());
            }
        }
    }

    #[test]
    fn angle_perturbation_arithmetic() {
        let m = mutate(&angle(70.0), &Mutation::PerturbAngle { delta_deg: 20.0 }).unwrap();
        assert!(matches!(m.scene, Scene::Angle { opening_deg, .. } if opening_deg == 90.0));
        // 16 degrees is over the tolerance but inside the margin
        assert!(matches!(
            mutate(&angle(70.0), &Mutation::PerturbAngle { delta_deg: 16.0 }),
            Err(SynthError::InapplicableMutation(_))
        ));
    }

    #[test]
    fn count_change_is_exact() {
        let r = SceneRecipe::new("c", 1, Scene::Count { category: "apple".into(), n: 3 });
        let m = mutate(&r, &Mutation::ChangeCount { delta: -1 }).unwrap();
        assert!(matches!(m.scene, Scene::Count { n: 2, .. }));
        let zero = SceneRecipe::new("c", 1, Scene::Count { category: "apple".into(), n: 0 });
        assert!(mutate(&zero, &Mutation::ChangeCount { delta: -1 }).is_err());
    }

    #[test]
    fn swap_moves_the_fill_to_an_empty_region() {
        let ab: Region = "A∩B".parse().unwrap();
        let r = SceneRecipe::new("v", 1, Scene::Venn { n_circles: 2, fills: vec![(ab, 1.0)] });
        let m = mutate(&r, &Mutation::SwapRegion).unwrap();
        let Scene::Venn { fills, .. } = &m.scene else { panic!() };
        assert_eq!(fills, &vec![("A_only".parse().unwrap(), 1.0)]);
    }

    #[test]
    fn mismatched_mutations_are_inapplicable() {
        let r = SceneRecipe::new("p", 1, Scene::Crossing { n: 2 });
        for m in [Mutation::SwapRegion, Mutation::PerturbAngle { delta_deg: 30.0 }, Mutation::DropPrimitive] {
            assert!(matches!(mutate(&r, &m), Err(SynthError::InapplicableMutation(_))));
        }
        let plot = SceneRecipe::new(
            "f",
            1,
            Scene::FunctionPlot { relation: "2x+1".into(), domain: [-4.0, 4.0], noise: 0.0, check: PlotCheck::Curve },
        );
        // same line written differently draws the same curve
        assert!(mutate(&plot, &Mutation::ReshapeCurve { relation: "1 + 2*x".into() }).is_err());
    }

    proptest! {
        #[test]
        fn accepted_angle_negatives_clear_the_margin(opening in 20.0f64..300.0, delta in -60.0f64..60.0) {
            let r = angle(opening);
            if let Ok(m) = mutate(&r, &Mutation::PerturbAngle { delta_deg: delta }) {
                let Scene::Angle { opening_deg, .. } = m.scene else { unreachable!() };
                let off = (opening_deg - opening).abs().min((360.0 - opening_deg - opening).abs());
                prop_assert!(off > MUTATION_MARGIN * 12.0);
            }
        }
    }
}
