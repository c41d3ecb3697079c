use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::raster::{composite, Layer};
use super::scene::{Figure, Scene, SceneRecipe, SolidKind, PLOT_SCALE};
use super::SynthError;
use crate::geom::Region;
use crate::imgcore::{CircleShape, Point, RasterImage};
use crate::verify::{function::parse_relation, ColorName, ConstraintSpec, Detection, DetectionSet};

pub const WHITE: [u8; 3] = [255, 255, 255];
pub const INK: [u8; 3] = [0, 0, 0];
pub const RED: [u8; 3] = [220, 30, 30];
pub const GREEN: [u8; 3] = [30, 170, 30];
pub const BLUE: [u8; 3] = [40, 40, 220];
/// Neutral shading: dark enough to count as foreground, too light for ink.
pub const SHADE: [u8; 3] = [150, 150, 150];
pub const CURVE: [u8; 3] = [30, 60, 200];
pub const STAIN: [u8; 3] = [120, 120, 120];

/// Radius of vertex and rim markers at 1024².
pub const DOT_RADIUS: f64 = 9.0;

pub fn color_rgb(c: ColorName) -> [u8; 3] {
    match c {
        ColorName::Red => RED,
        ColorName::Green => GREEN,
        ColorName::Blue => BLUE,
    }
}

/// A rendered scene with the spec it satisfies by construction.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub image: RasterImage,
    pub spec: ConstraintSpec,
    /// Mock detector output; only counting scenes have one.
    pub detections: Option<DetectionSet>,
}

pub fn render(recipe: &SceneRecipe) -> Result<Rendered, SynthError> {
    recipe.validate()?;
    let (w, h) = recipe.canvas;
    let mut img = RasterImage::filled_rgb(w, h, WHITE).map_err(|e| SynthError::InvalidRecipe(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let s = recipe.scale();
    let c = recipe.center();
    let sw = recipe.stroke_width;
    let mut detections = None;

    let mut ink = Layer::new(w, h);
    match &recipe.scene {
        Scene::Count { category, n } => {
            detections = Some(draw_count(&mut img, &mut rng, recipe, category, *n));
        }
        Scene::Angle { base_deg, opening_deg, .. } => {
            let jitter = Point::new(rng.random_range(-30.0..30.0) * s, rng.random_range(-30.0..30.0) * s);
            draw_fan(&mut ink, c.add(jitter), &[*base_deg, base_deg + opening_deg], s, sw);
        }
        Scene::RayFan { directions } => draw_fan(&mut ink, c, directions, s, sw),
        Scene::FractionGrid { cols, rows, ratio, color, .. } => {
            let shade = color.map_or(SHADE, color_rgb);
            draw_grid(&mut img, &mut ink, recipe, *cols, *rows, *ratio, shade);
        }
        Scene::Rectangle { width, height, .. } => {
            frame(&mut ink, recipe, *width, *height);
        }
        Scene::CirclePair { r_small, r_large, .. } => {
            let (rs, rl) = (r_small * s, r_large * s);
            let x0 = c.x - (rs + rl + 20.0 * s);
            ink.ring(Point::new(x0 + rs, c.y), rs, sw);
            ink.ring(Point::new(x0 + 2.0 * rs + 40.0 * s + rl, c.y), rl, sw);
        }
        Scene::Venn { n_circles, fills } => {
            let circles = recipe.venn_circles(*n_circles);
            for (region, f) in fills {
                fill_region(&mut img, &circles, *region, *f, sw);
            }
            for k in &circles {
                ink.ring(k.center, k.radius, sw);
            }
        }
        Scene::FunctionPlot { relation, domain, noise, .. } => {
            draw_plot(&mut img, &mut ink, &mut rng, recipe, relation, *domain, *noise);
        }
        Scene::DotsOnCircle { n, phase_deg, center_dot } => {
            let r = 300.0 * s;
            ink.ring(c, r, sw);
            for k in 0..*n {
                let p = c.add(Point::direction(phase_deg + 360.0 * k as f64 / *n as f64).scale(r));
                ink.disk(p, DOT_RADIUS * s);
            }
            if *center_dot {
                ink.disk(c, DOT_RADIUS * s);
            }
        }
        Scene::Crossing { n } => {
            ink.capsule(Point::new(c.x - 300.0 * s, c.y), Point::new(c.x + 300.0 * s, c.y), sw);
            let dir = Point::direction(70.0).scale(150.0 * s);
            for i in 0..*n {
                let x = c.x + (i as f64 - (*n as f64 - 1.0) / 2.0) * 120.0 * s;
                let m = Point::new(x, c.y);
                ink.capsule(m.sub(dir), m.add(dir), sw);
            }
        }
        Scene::Figure { figure, .. } => match *figure {
            Figure::Circle { radius } => ink.ring(c, radius * s, sw),
            Figure::Ellipse { a, b } => ink.ellipse_ring(c, a * s, b * s, sw),
            Figure::Rectangle { width, height } => frame(&mut ink, recipe, width, height),
            Figure::Regular { sides, radius, rotation_deg } => {
                ink.polyline(&regular(c, sides, radius * s, rotation_deg), sw, true);
            }
        },
        Scene::Solid { kind, inner_edges, .. } => {
            let r = 250.0 * s;
            let (outline, apex, spokes): (Vec<Point>, Point, Vec<usize>) = match *kind {
                SolidKind::Cube => (regular(c, 6, r, 90.0), c, vec![0, 2, 4]),
                SolidKind::Tetrahedron => {
                    let tri = regular(c, 3, r, 90.0);
                    (tri, c.add(Point::new(25.0 * s, 40.0 * s)), vec![0, 1, 2])
                }
                SolidKind::Pyramid { sides } => (regular(c, sides, r, 90.0), c, (0..sides as usize).collect()),
            };
            ink.polyline(&outline, sw, true);
            if *inner_edges {
                for i in spokes {
                    ink.capsule(apex, outline[i], sw);
                }
            }
        }
    }
    composite(&mut img, &ink, INK);

    if recipe.stain {
        let mut blot = Layer::new(w, h);
        blot.disk(Point::new(40.0 * s, 40.0 * s), 14.0 * s);
        composite(&mut img, &blot, STAIN);
    }

    Ok(Rendered { image: img, spec: recipe.spec(), detections })
}

/// Vertices of a regular polygon, the first at `rotation_deg`.
pub fn regular(c: Point, sides: u32, r: f64, rotation_deg: f64) -> Vec<Point> {
    (0..sides).map(|k| c.add(Point::direction(rotation_deg + 360.0 * k as f64 / sides as f64).scale(r))).collect()
}

/// Rays of length 300 from `vertex` plus a vertex marker.
fn draw_fan(ink: &mut Layer, vertex: Point, directions: &[f64], s: f64, sw: f64) {
    for d in directions {
        ink.capsule(vertex, vertex.add(Point::direction(*d).scale(300.0 * s)), sw);
    }
    ink.disk(vertex, DOT_RADIUS * s);
}

/// Pixel-aligned rectangle outline whose outer size is exactly
/// `width × height`, centred on the canvas.
fn frame(ink: &mut Layer, recipe: &SceneRecipe, width: u32, height: u32) {
    let lw = libm::round(recipe.stroke_width);
    let (w, h) = (libm::round(width as f64 * recipe.scale()), libm::round(height as f64 * recipe.scale()));
    let x0 = libm::floor((recipe.canvas.0 as f64 - w) / 2.0);
    let y0 = libm::floor((recipe.canvas.1 as f64 - h) / 2.0);
    ink.rect(x0, y0, x0 + w, y0 + lw);
    ink.rect(x0, y0 + h - lw, x0 + w, y0 + h);
    ink.rect(x0, y0, x0 + lw, y0 + h);
    ink.rect(x0 + w - lw, y0, x0 + w, y0 + h);
}

/// Geometry of a pixel-aligned grid of square cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub x0: u32,
    pub y0: u32,
    pub cell: u32,
    pub line: u32,
    pub cols: u32,
    pub rows: u32,
}

impl GridGeometry {
    pub fn new(recipe: &SceneRecipe, cols: u32, rows: u32) -> Self {
        let cell = libm::floor(600.0 * recipe.scale() / cols.max(rows) as f64) as u32;
        let line = libm::round(recipe.stroke_width) as u32;
        let x0 = (recipe.canvas.0 - (cols * cell + line)) / 2;
        let y0 = (recipe.canvas.1 - (rows * cell + line)) / 2;
        Self { x0, y0, cell, line, cols, rows }
    }

    /// Unshaded interior pixels per cell.
    pub fn cell_interior(&self) -> u32 {
        (self.cell - self.line) * (self.cell - self.line)
    }

    pub fn interior_total(&self) -> u32 {
        self.cols * self.rows * self.cell_interior()
    }

    /// Number of interior pixels shaded for `ratio`.
    pub fn shaded_pixels(&self, ratio: f64) -> u32 {
        libm::round(ratio * self.interior_total() as f64) as u32
    }

    /// Shading order: cells row-major, pixels column-major inside a cell, so
    /// whole cells are shaded before the next one starts.
    pub fn nth_interior(&self, k: u32) -> (u32, u32) {
        let per = self.cell_interior();
        let (cell_idx, off) = (k / per, k % per);
        let (i, j) = (cell_idx % self.cols, cell_idx / self.cols);
        let side = self.cell - self.line;
        (self.x0 + i * self.cell + self.line + off / side, self.y0 + j * self.cell + self.line + off % side)
    }
}

fn draw_grid(img: &mut RasterImage, ink: &mut Layer, recipe: &SceneRecipe, cols: u32, rows: u32, ratio: f64, shade: [u8; 3]) {
    let g = GridGeometry::new(recipe, cols, rows);
    for k in 0..g.shaded_pixels(ratio) {
        let (x, y) = g.nth_interior(k);
        img.set_rgb(x, y, shade);
    }
    let (x0, y0, l) = (g.x0 as f64, g.y0 as f64, g.line as f64);
    let (gw, gh) = ((cols * g.cell) as f64 + l, (rows * g.cell) as f64 + l);
    for i in 0..=cols {
        let x = x0 + (i * g.cell) as f64;
        ink.rect(x, y0, x + l, y0 + gh);
    }
    for j in 0..=rows {
        let y = y0 + (j * g.cell) as f64;
        ink.rect(x0, y, x0 + gw, y + l);
    }
}

/// Pixels whose centre lies in `region` and more than `margin` from every
/// circle outline, in scan order.
pub fn region_interior(circles: &[CircleShape], region: Region, margin: f64, width: u32, height: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for y in 0..height {
        for x in 0..width {
            let p = Point::pixel_center(x, y);
            let mut bits = 0u8;
            let mut clear = true;
            for (i, k) in circles.iter().enumerate() {
                let d = p.distance(k.center);
                if d <= k.radius {
                    bits |= 1 << i;
                }
                if libm::fabs(d - k.radius) <= margin {
                    clear = false;
                }
            }
            if clear && bits == region.bits() {
                out.push((x, y));
            }
        }
    }
    out
}

/// Pixel count of `region` in the ideal layout (membership at pixel centres).
pub fn region_size(circles: &[CircleShape], region: Region, width: u32, height: u32) -> usize {
    region_interior(circles, region, -1.0, width, height).len()
}

fn fill_region(img: &mut RasterImage, circles: &[CircleShape], region: Region, f: f64, sw: f64) {
    let (w, h) = (img.width(), img.height());
    let interior = region_interior(circles, region, sw / 2.0 + 2.0, w, h);
    let want = libm::round(f * region_size(circles, region, w, h) as f64) as usize;
    for &(x, y) in interior.iter().take(want) {
        img.set_rgb(x, y, RED);
    }
}

/// Plot frame at 40 px per unit around the canvas centre: axes span ±10
/// units.
pub fn plot_origin(recipe: &SceneRecipe) -> Point {
    recipe.center()
}

fn draw_plot(
    img: &mut RasterImage,
    ink: &mut Layer,
    rng: &mut ChaCha8Rng,
    recipe: &SceneRecipe,
    relation: &str,
    domain: [f64; 2],
    noise: f64,
) {
    let s = recipe.scale();
    let o = plot_origin(recipe);
    let unit = PLOT_SCALE * s;
    let half = 10.0 * unit;
    let aw = 3.0_f64.max(libm::round(recipe.stroke_width - 1.0));
    ink.rect(o.x - half, o.y - aw / 2.0, o.x + half, o.y + aw / 2.0);
    ink.rect(o.x - aw / 2.0, o.y - half, o.x + aw / 2.0, o.y + half);

    let rel = parse_relation(relation).expect("validated");
    let mut curve = Layer::new(recipe.canvas.0, recipe.canvas.1);
    let mut run: Vec<Point> = Vec::new();
    let mut prev: Option<f64> = None;
    let steps = libm::round((domain[1] - domain[0]) / 0.01) as usize;
    for i in 0..=steps {
        let x = domain[0] + (domain[1] - domain[0]) * i as f64 / steps as f64;
        let y = rel.eval(x);
        let ok = y.is_finite() && libm::fabs(y) <= 10.0;
        let jump = prev.is_some_and(|py| libm::fabs(y - py) > 2.0);
        if !ok || jump {
            if run.len() > 1 {
                curve.polyline(&run, 3.0, false);
            }
            run.clear();
        }
        if ok {
            run.push(Point::new(o.x + x * unit, o.y - y * unit));
        }
        prev = ok.then_some(y);
    }
    if run.len() > 1 {
        curve.polyline(&run, 3.0, false);
    }
    composite(img, &curve, CURVE);

    if noise > 0.0 {
        let (w, h) = (recipe.canvas.0, recipe.canvas.1);
        let mut on = 0usize;
        for y in 0..h {
            for x in 0..w {
                on += (curve.coverage(x, y) >= 0.5) as usize;
            }
        }
        let k = libm::round(noise * on as f64) as usize;
        let (lo, hi) = ((o.x - half) as u32, (o.x + half) as u32);
        let (tlo, thi) = ((o.y - half) as u32, (o.y + half) as u32);
        for _ in 0..k {
            let (x, y) = (rng.random_range(lo..hi), rng.random_range(tlo..thi));
            img.set_rgb(x, y, INK);
        }
    }
}

/// Red disks of radius 30 on a jittered 4 × 3 slot grid, with detections
/// for each disk plus two the counter must ignore.
fn draw_count(img: &mut RasterImage, rng: &mut ChaCha8Rng, recipe: &SceneRecipe, category: &str, n: u32) -> DetectionSet {
    let s = recipe.scale();
    let r = 30.0 * s;
    let slots = rand::seq::index::sample(rng, 12, n as usize).into_vec();
    let mut layer = Layer::new(recipe.canvas.0, recipe.canvas.1);
    let mut detections = Vec::new();
    for slot in slots {
        let (i, j) = ((slot % 4) as f64, (slot / 4) as f64);
        let cx = (212.0 + i * 200.0 + rng.random_range(-40.0..40.0)) * s;
        let cy = (312.0 + j * 200.0 + rng.random_range(-40.0..40.0)) * s;
        layer.disk(Point::new(cx, cy), r);
        let confidence = libm::round(rng.random_range(0.6..0.99) * 1000.0) / 1000.0;
        detections.push(Detection { category: category.to_string(), confidence, bbox: [cx - r, cy - r, 2.0 * r, 2.0 * r] });
    }
    composite(img, &layer, RED);
    let decoy = [150.0 * s, 150.0 * s, 40.0 * s, 40.0 * s];
    detections.push(Detection { category: category.to_string(), confidence: 0.3, bbox: decoy });
    detections.push(Detection { category: "distractor".to_string(), confidence: 0.9, bbox: decoy });
    DetectionSet { image: recipe.id.clone(), detections }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{FigureClaim, PlotCheck};
    use crate::verify::Ratio;
    use proptest::prelude::*;

    fn grid(cols: u32, rows: u32, ratio: f64) -> SceneRecipe {
        SceneRecipe::new("g", 7, Scene::FractionGrid { cols, rows, ratio, tol: 0.015, color: None })
    }

    #[test]
    fn same_seed_same_bytes() {
        let r = SceneRecipe::new("c", 99, Scene::Count { category: "apple".into(), n: 5 });
        let (a, b) = (render(&r).unwrap(), render(&r).unwrap());
        assert_eq!(a.image.data(), b.image.data());
        assert_eq!(a.detections, b.detections);
        let mut other = r.clone();
        other.seed = 100;
        assert_ne!(render(&other).unwrap().image.data(), a.image.data());
    }

    #[test]
    fn grid_shading_matches_cell_arithmetic() {
        for (cols, rows, ratio) in [(4, 2, Ratio::new(5, 8).0), (7, 1, Ratio::new(1, 7).0), (3, 2, Ratio::new(5, 6).0)] {
            let r = grid(cols, rows, ratio);
            let g = GridGeometry::new(&r, cols, rows);
            let img = render(&r).unwrap().image;
            let shaded = (0..img.height())
                .flat_map(|y| (0..img.width()).map(move |x| (x, y)))
                .filter(|&(x, y)| img.rgb(x, y) == SHADE)
                .count();
            assert_eq!(shaded as u32, g.shaded_pixels(ratio));
            // whole cells: every shaded cell is fully shaded
            let per = g.cell_interior() as f64;
            assert!((shaded as f64 / per - ratio * (cols * rows) as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn angle_rays_leave_the_vertex_at_the_drawn_directions() {
        let r = SceneRecipe::new("a", 3, Scene::RayFan { directions: vec![20.0, 90.0] });
        let img = render(&r).unwrap().image;
        let c = r.center();
        for (deg, inked) in [(20.0, true), (90.0, true), (55.0, false), (200.0, false)] {
            let p = c.add(Point::direction(deg).scale(200.0));
            assert_eq!(img.luma(p.x as u32, p.y as u32) < 100, inked, "direction {deg}");
        }
    }

    #[test]
    fn curve_pixels_sit_on_the_relation() {
        let scene = Scene::FunctionPlot { relation: "2x+1".into(), domain: [-4.0, 4.0], noise: 0.0, check: PlotCheck::Curve };
        let r = SceneRecipe::new("f", 1, scene);
        let img = render(&r).unwrap().image;
        let o = plot_origin(&r);
        let mut n = 0;
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.rgb(x, y) == CURVE {
                    let (mx, my) = ((x as f64 + 0.5 - o.x) / PLOT_SCALE, (o.y - y as f64 - 0.5) / PLOT_SCALE);
                    // vertical distance to a line of slope 2 through a 3 px stroke
                    assert!((my - (2.0 * mx + 1.0)).abs() <= 0.1, "({mx}, {my})");
                    n += 1;
                }
            }
        }
        assert!(n > 300);
    }

    #[test]
    fn venn_fill_matches_requested_fraction() {
        let region: Region = "A∩B".parse().unwrap();
        let r = SceneRecipe::new("v", 1, Scene::Venn { n_circles: 2, fills: vec![(region, 0.25)] });
        let img = render(&r).unwrap().image;
        let circles = r.venn_circles(2);
        let size = region_size(&circles, region, 1024, 1024) as f64;
        let red = region_interior(&circles, region, -1.0, 1024, 1024).iter().filter(|&&(x, y)| img.rgb(x, y) == RED).count();
        assert!((red as f64 / size - 0.25).abs() < 1.0 / size);
    }

    #[test]
    fn border_band_stays_white_unless_stained() {
        let mut r = SceneRecipe::new("s", 1, Scene::Figure { figure: Figure::Circle { radius: 280.0 }, claim: FigureClaim::Circle });
        let band = 82;
        let clean = |img: &RasterImage| {
            (0..1024u32).all(|y| (0..1024u32).all(|x| !(x < band || y < band || x >= 1024 - band || y >= 1024 - band) || img.luma(x, y) == 255))
        };
        assert!(clean(&render(&r).unwrap().image));
        r.stain = true;
        assert!(!clean(&render(&r).unwrap().image));
    }

    #[test]
    fn invalid_recipes_are_rejected() {
        let mut r = grid(4, 2, 0.5);
        r.stroke_width = 2.0;
        assert!(matches!(render(&r), Err(SynthError::InvalidRecipe(_))));
        let r = SceneRecipe::new("f", 1, Scene::FunctionPlot { relation: "sin(x)".into(), domain: [0.0, 1.0], noise: 0.0, check: PlotCheck::Curve });
        assert!(matches!(render(&r), Err(SynthError::InvalidRecipe(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn small_canvas_grids_stay_exact(cols in 1u32..6, rows in 1u32..4, k in 0u32..24) {
            let total = cols * rows;
            let ratio = (k % (total + 1)) as f64 / total as f64;
            let mut r = grid(cols, rows, ratio);
            r.canvas = (512, 512);
            let g = GridGeometry::new(&r, cols, rows);
            let img = render(&r).unwrap().image;
            let shaded = img.data().chunks(3).filter(|p| p == &SHADE).count() as u32;
            prop_assert_eq!(shaded, g.shaded_pixels(ratio));
        }
    }
}
