use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::mutate::{default_mutations, mutate, Mutation};
use super::scene::{Figure, FigureClaim, PlotCheck, Scene, SceneRecipe, SolidClaim, SolidKind};
use super::SynthError;
use crate::geom::Region;
use crate::verify::{AsymptoteAxis, ColorName, ConstraintSpec, Ratio};

/// A positive recipe and the mutations that produce its negatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub recipe: SceneRecipe,
    pub mutations: Vec<Mutation>,
}

impl CatalogEntry {
    /// Entry with the default mutations for its scene.
    pub fn new(recipe: SceneRecipe) -> Self {
        let mutations = default_mutations(&recipe);
        Self { recipe, mutations }
    }
}

/// One image of the audit suite: what to draw, what to check, and the
/// verdict a correct judge returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCase {
    pub id: String,
    pub recipe: SceneRecipe,
    pub spec: ConstraintSpec,
    pub expected_pass: bool,
    pub mutation: Option<Mutation>,
}

/// Expands a catalog into positives and their mutated negatives. Every
/// negative is checked against the positive's spec with the tolerance
/// margin.
pub fn audit_cases(catalog: &[CatalogEntry]) -> Result<Vec<AuditCase>, SynthError> {
    let mut out = Vec::new();
    for entry in catalog {
        let r = &entry.recipe;
        r.check_claims()?;
        let spec = r.spec();
        out.push(AuditCase { id: r.id.clone(), recipe: r.clone(), spec: spec.clone(), expected_pass: true, mutation: None });
        for (j, m) in entry.mutations.iter().enumerate() {
            let mut neg = mutate(r, m)?;
            if entry.mutations[..j].iter().any(|p| p.name() == m.name()) {
                neg.id = format!("{}-{}", neg.id, j + 1);
            }
            let mut spec = spec.clone();
            spec.problem_id = neg.id.clone();
            out.push(AuditCase { id: neg.id.clone(), recipe: neg, spec, expected_pass: false, mutation: Some(m.clone()) });
        }
    }
    Ok(out)
}

/// Reciprocal with its pole three units from `pole`, written in the
/// relation grammar.
fn shifted_reciprocal(pole: f64) -> String {
    let q = if pole + 3.0 <= 7.0 { pole + 3.0 } else { pole - 3.0 };
    if q < 0.0 {
        format!("1/(x+{})", -q)
    } else {
        format!("1/(x-{q})")
    }
}

/// The built-in audit catalog covering every criterion kind.
pub fn default_catalog() -> Vec<CatalogEntry> {
    let mut seed = 1000u64;
    let mut next = || {
        seed += 1;
        seed
    };
    let mut out = Vec::new();
    let mut push = |id: String, seed: u64, scene: Scene| out.push(CatalogEntry::new(SceneRecipe::new(id, seed, scene)));

    for (category, n) in [("apple", 1), ("star", 2), ("apple", 3), ("cup", 4), ("pencil", 5), ("coin", 7)] {
        push(format!("count-{category}-{n}"), next(), Scene::Count { category: category.to_string(), n });
    }

    let angles = [
        (0.0, 40.0, false),
        (15.0, 70.0, false),
        (30.0, 110.0, false),
        (0.0, 180.0, false),
        (100.0, 40.0, true),
        (200.0, 70.0, false),
        (60.0, 110.0, true),
        (90.0, 180.0, false),
    ];
    for (base, opening, relaxed) in angles {
        let id = format!("angle-{opening:03}-b{base:03}{}", if relaxed { "-relaxed" } else { "" });
        push(id, next(), Scene::Angle { base_deg: base, opening_deg: opening, relaxed });
    }
    let fans: [&[f64]; 4] = [&[0.0, 90.0, 180.0, 270.0], &[10.0, 130.0, 250.0], &[30.0, 100.0, 200.0], &[45.0, 225.0, 300.0]];
    for (i, dirs) in fans.into_iter().enumerate() {
        push(format!("rays-{}-{i}", dirs.len()), next(), Scene::RayFan { directions: dirs.to_vec() });
    }

    let grids = [
        (4, 2, Ratio::new(5, 8).0, 0.015, None),
        (7, 1, Ratio::new(1, 7).0, 0.015, None),
        (3, 3, Ratio::new(2, 9).0, 0.015, None),
        (2, 1, 0.5, 0.015, Some(ColorName::Red)),
        (3, 2, Ratio::new(5, 6).0, 0.015, Some(ColorName::Blue)),
        (4, 3, 0.25, 0.02, Some(ColorName::Green)),
        (5, 2, 0.3, 0.05, None),
        (6, 2, 0.5, 0.1, None),
    ];
    for (i, (cols, rows, ratio, tol, color)) in grids.into_iter().enumerate() {
        push(format!("grid-{cols}x{rows}-{i}"), next(), Scene::FractionGrid { cols, rows, ratio, tol, color });
    }
    for (w, h, target) in [(300, 100, 3.0), (400, 200, 2.0), (250, 250, 1.0)] {
        push(format!("aspect-{w}x{h}"), next(), Scene::Rectangle { width: w, height: h, target, tol: 0.05 });
    }
    for (rs, rl, target, tol) in [(100.0, 200.0, 2.0, 0.1), (90.0, 135.0, 1.5, 0.1), (80.0, 240.0, 3.0, 0.15)] {
        push(format!("radii-{rs}-{rl}"), next(), Scene::CirclePair { r_small: rs, r_large: rl, target, tol });
    }

    let region = |s: &str| s.parse::<Region>().expect("region name");
    let venns: [(u8, Vec<(Region, f64)>); 6] = [
        (2, vec![(region("A∩B"), 1.0)]),
        (2, vec![(region("A_only"), 0.6), (region("B_only"), 0.6)]),
        (2, vec![(region("B_only"), 0.9)]),
        (3, vec![(region("A∩B∩C"), 1.0)]),
        (3, vec![(region("A_only"), 0.8), (region("B_only"), 0.8), (region("C_only"), 0.8)]),
        (3, vec![(region("A∩B"), 0.7), (region("C_only"), 0.5)]),
    ];
    for (i, (n_circles, fills)) in venns.into_iter().enumerate() {
        push(format!("venn{n_circles}-{i}"), next(), Scene::Venn { n_circles, fills });
    }

    let curves = [
        ("2x+1", [-4.0, 4.0], 0.2),
        ("x^2 - 4", [-3.0, 3.0], 0.0),
        ("-0.5x + 3", [-8.0, 8.0], 0.05),
        ("|x-1| - 2", [-6.0, 6.0], 0.0),
        ("0.1x^3 - x", [-5.0, 5.0], 0.0),
        ("piecewise(x < 1: x + 2; else: 5 - 2x)", [-5.0, 5.0], 0.0),
    ];
    for (i, (relation, domain, noise)) in curves.into_iter().enumerate() {
        let scene = Scene::FunctionPlot { relation: relation.to_string(), domain, noise, check: PlotCheck::Curve };
        push(format!("curve-{i}"), next(), scene);
    }
    let asymptotes = [
        ("1/x", AsymptoteAxis::Vertical, 0.0),
        ("2/(x-3)", AsymptoteAxis::Vertical, 3.0),
        ("1/(x+2) + 1", AsymptoteAxis::Horizontal, 1.0),
    ];
    for (i, (relation, axis, value)) in asymptotes.into_iter().enumerate() {
        let check = PlotCheck::Asymptote { axis, value, tol: 0.3 };
        let scene = Scene::FunctionPlot { relation: relation.to_string(), domain: [-10.0, 10.0], noise: 0.0, check };
        push(format!("asymptote-{i}"), next(), scene);
    }

    for (n, phase, center_dot) in [(4, 0.0, false), (6, 15.0, false), (3, 90.0, true), (8, 10.0, false)] {
        push(format!("dots-{n}"), next(), Scene::DotsOnCircle { n, phase_deg: phase, center_dot });
    }
    for n in 1..=3 {
        push(format!("cross-{n}"), next(), Scene::Crossing { n });
    }
    for sides in [3, 5, 6, 7] {
        let figure = Figure::Regular { sides, radius: 250.0, rotation_deg: 90.0 };
        push(format!("polygon-{sides}"), next(), Scene::Figure { figure, claim: FigureClaim::Sides });
    }
    for radius in [150.0, 200.0, 280.0] {
        push(format!("circle-{radius}"), next(), Scene::Figure { figure: Figure::Circle { radius }, claim: FigureClaim::Circle });
    }
    for (width, height) in [(400, 250), (300, 300), (500, 200)] {
        let figure = Figure::Rectangle { width, height };
        push(format!("rect-{width}x{height}"), next(), Scene::Figure { figure, claim: FigureClaim::Rectangle });
    }

    let solids = [
        (SolidKind::Cube, SolidClaim::Sides),
        (SolidKind::Cube, SolidClaim::Junctions),
        (SolidKind::Tetrahedron, SolidClaim::Sides),
        (SolidKind::Tetrahedron, SolidClaim::Junctions),
        (SolidKind::Pyramid { sides: 4 }, SolidClaim::Sides),
        (SolidKind::Pyramid { sides: 5 }, SolidClaim::Junctions),
        (SolidKind::Pyramid { sides: 6 }, SolidClaim::Sides),
    ];
    for (i, (kind, claim)) in solids.into_iter().enumerate() {
        push(format!("solid-{i}"), next(), Scene::Solid { kind, inner_edges: true, claim });
    }

    // reciprocal negatives move the pole rather than swapping families
    for e in out.iter_mut() {
        if let Scene::FunctionPlot { relation, check: PlotCheck::Asymptote { .. }, .. } = &e.recipe.scene {
            let pole = crate::verify::function::parse_relation(relation)
                .ok()
                .and_then(|r| crate::verify::function::classify(&r).ok())
                .and_then(|f| f.pole())
                .unwrap_or(0.0);
            e.mutations = vec![Mutation::ReshapeCurve { relation: shifted_reciprocal(pole) }];
        }
    }
    for id in ["count-apple-3", "angle-070-b015", "venn2-0", "solid-0"] {
        if let Some(e) = out.iter_mut().find(|e| e.recipe.id == id) {
            e.mutations.push(Mutation::StainBackground);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::CriterionKind;
    use alloc::collections::BTreeSet;

    #[test]
    fn catalog_covers_every_kind_both_ways() {
        let cases = audit_cases(&default_catalog()).unwrap();
        assert!(cases.len() >= 150, "{} cases", cases.len());
        let ids: BTreeSet<&str> = cases.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids.len(), cases.len());
        for kind in CriterionKind::ALL {
            let with = |pass: bool| {
                cases.iter().filter(|c| c.expected_pass == pass && c.spec.criteria.iter().any(|k| k.kind() == kind)).count()
            };
            assert!(with(true) >= 3 && with(false) >= 3, "{kind}: {} positives, {} negatives", with(true), with(false));
        }
    }

    #[test]
    fn empty_catalog_gives_no_cases() {
        assert!(audit_cases(&[]).unwrap().is_empty());
    }

    #[test]
    fn ten_recipes_with_two_mutations_give_thirty_cases() {
        let catalog: Vec<CatalogEntry> = (1..=10)
            .map(|n| {
                let recipe = SceneRecipe::new(format!("dots-{n}"), n as u64, Scene::DotsOnCircle { n, phase_deg: 0.0, center_dot: false });
                CatalogEntry { recipe, mutations: vec![Mutation::ChangeCount { delta: 1 }, Mutation::StainBackground] }
            })
            .collect();
        assert_eq!(audit_cases(&catalog).unwrap().len(), 30);
    }
}
