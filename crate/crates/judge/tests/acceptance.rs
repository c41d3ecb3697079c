//! Acceptance gate: one line per headline criterion, each run at its stated
//! tolerance. The whole gate fails if any line fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use diagram_judge::harness::DataDirs;
use diagram_judge::{emit_report, generate_audit_suite, load_manifest, run_eval, ReportFormat};
use diagram_judge_core::geom::{angular_distance, venn_layout, Region};
use diagram_judge_core::imgcore::{
    detect_radial_peaks, hough_circles_gray, hough_lines, radial_profile, threshold_foreground, to_grayscale,
    HoughLineParams,
};
use diagram_judge_core::synth::{composite, default_catalog, render, Layer, PlotCheck, Scene, SceneRecipe, INK, WHITE};
use diagram_judge_core::verify::function::{ransac_fit, read_plot, CurveModel, Family, RansacParams};
use diagram_judge_core::verify::{
    AsymptoteAxis, ConstraintSpec, Criterion, CriterionKind, CriterionResult, Detection, DetectionSet, Domain, Ratio,
};
use diagram_judge_core::{evaluate, Point, RasterImage, ThresholdConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn judge(img: &RasterImage, domain: Domain, c: Criterion, det: Option<&DetectionSet>) -> CriterionResult {
    let spec = ConstraintSpec::new("acceptance", domain, vec![c]);
    evaluate(img, &spec, &ThresholdConfig::default(), det).unwrap().criterion_results.remove(0)
}

fn draw(scene: Scene) -> RasterImage {
    render(&SceneRecipe::new("acceptance", 5, scene)).unwrap().image
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get())
}

fn audit_suite(dir: &std::path::Path) -> (Outcome, Duration) {
    let started = Instant::now();
    let audit = generate_audit_suite(&default_catalog(), &ThresholdConfig::default(), dir, workers()).unwrap();
    let took = started.elapsed();

    let rows = &audit.rows;
    let domains: BTreeSet<Domain> = rows.iter().map(|r| r.spec.domain).collect();
    let mut thin = Vec::new();
    for kind in CriterionKind::ALL {
        let count = |pass| {
            rows.iter()
                .filter(|r| (r.expected == diagram_judge::audit::Expected::Pass) == pass)
                .filter(|r| r.spec.criteria.iter().any(|c| c.kind() == kind))
                .count()
        };
        if count(true) < 3 || count(false) < 3 {
            thin.push(kind.name());
        }
    }
    let ok = rows.len() >= 150
        && domains.len() == 7
        && thin.is_empty()
        && audit.disagreements.is_empty()
        && took < Duration::from_secs(60);
    let detail = format!(
        "{} images, {} domains, agreement {}/{}, {:.1}s{}{}",
        rows.len(),
        domains.len(),
        audit.agreement(),
        rows.len(),
        took.as_secs_f64(),
        if thin.is_empty() { String::new() } else { format!(", under-covered: {thin:?}") },
        if audit.disagreements.is_empty() { String::new() } else { format!(", wrong: {:?}", audit.disagreements) },
    );
    (outcome(ok, detail), took)
}

fn angle_boundary() -> Outcome {
    let mut right = 0;
    let mut misses = Vec::new();
    for target in [40.0, 70.0, 110.0, 180.0] {
        for (delta, should_pass) in [(-15.0, false), (-10.0, true), (10.0, true), (15.0, false)] {
            let img = draw(Scene::Angle { base_deg: 20.0, opening_deg: target + delta, relaxed: false });
            let r = judge(&img, Domain::Angle, Criterion::SectorEquals { target_deg: target, relaxed: false }, None);
            if r.passed == should_pass {
                right += 1;
            } else {
                misses.push(format!("{target}{delta:+}: {}", r.diagnostic));
            }
        }
    }
    outcome(right == 16, format!("{right}/16 correct{}", if misses.is_empty() { String::new() } else { format!(" {misses:?}") }))
}

fn occupancy_gates() -> Outcome {
    let mut right = 0;
    let mut total = 0;
    let mut notes = Vec::new();
    for n in [2u8, 3] {
        for region in ["A∩B", "A_only"] {
            let region: Region = region.parse().unwrap();
            for (fill, on_ok, off_ok) in [(0.03, false, true), (0.10, false, false), (0.25, true, false)] {
                let img = draw(Scene::Venn { n_circles: n, fills: vec![(region, fill)] });
                let on = judge(&img, Domain::Set, Criterion::VennRegions { expect_on: vec![region], expect_off: vec![], n_circles: n }, None);
                let off = judge(&img, Domain::Set, Criterion::VennRegions { expect_on: vec![], expect_off: vec![region], n_circles: n }, None);
                total += 1;
                if on.passed == on_ok && off.passed == off_ok {
                    right += 1;
                } else {
                    notes.push(format!("{n} circles {region} at {fill}: on {} off {}", on.passed, off.passed));
                }
            }
        }
    }

    let recipe = SceneRecipe::new("tiling", 1, Scene::Venn { n_circles: 3, fills: vec![] });
    let (w, h) = recipe.canvas;
    let layout = venn_layout(&recipe.venn_circles(3), w, h).unwrap();
    let regions = layout.regions();
    let sum: usize = regions.iter().map(|r| layout.pixel_count(*r)).sum();
    let tiles = regions.len() == 8 && sum == (w * h) as usize;
    outcome(
        right == total && tiles,
        format!("{right}/{total} fills classified; 3-circle layout {} regions, pixel sum {sum} of {}{}", regions.len(), w * h, if notes.is_empty() { String::new() } else { format!(" {notes:?}") }),
    )
}

fn fraction_accuracy() -> Outcome {
    let targets = [Ratio::new(1, 7), Ratio::new(2, 9), Ratio::new(1, 2), Ratio::new(5, 8), Ratio::new(5, 6)];
    let grids = [(7, 1), (3, 3), (2, 1), (4, 2), (3, 2)];
    let mut worst: f64 = 0.0;
    let mut right = 0;
    let mut total = 0;
    for (t, (cols, rows)) in targets.iter().zip(grids) {
        let crit = Criterion::FractionShaded { target: *t, tol: 0.015, color: None };
        let exact = draw(Scene::FractionGrid { cols, rows, ratio: t.0, tol: 0.015, color: None });
        let r = judge(&exact, Domain::Fraction, crit.clone(), None);
        worst = worst.max((r.measured.unwrap_or(f64::NAN) - t.0).abs());
        total += 1;
        right += r.passed as usize;
        for off in [-0.05, 0.05] {
            let ratio = t.0 + off;
            if !(0.0..=1.0).contains(&ratio) {
                continue;
            }
            let img = draw(Scene::FractionGrid { cols, rows, ratio, tol: 0.015, color: None });
            total += 1;
            right += !judge(&img, Domain::Fraction, crit.clone(), None).passed as usize;
        }
    }
    outcome(worst <= 0.01 && right == total, format!("max |measured - target| {worst:.5}; {right}/{total} pass/fail decisions correct"))
}

fn function_recovery() -> Outcome {
    let cfg = ThresholdConfig::default();
    let scene = Scene::FunctionPlot { relation: "2x+1".into(), domain: [-4.0, 4.0], noise: 0.2, check: PlotCheck::Curve };
    let img = draw(scene);
    let gray = to_grayscale(&img);
    let dark = threshold_foreground(&gray, cfg.fg_gray_thresh, true);
    let plot = read_plot(&gray, &dark, &cfg, None).unwrap();

    // clutter at the point level too: uniform outliers make up 20 % of the set
    let mut points = plot.points.clone();
    let extra = points.len() / 4;
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..extra {
        points.push((-4.0 + 8.0 * next(), -10.0 + 20.0 * next()));
    }
    let params = RansacParams { iterations: cfg.fn_ransac_iters, tol_x: cfg.fn_inlier_tol_x, tol_y: cfg.fn_inlier_tol_y, seed: cfg.hough_seed };
    let fit = ransac_fit(&points, &Family::Polynomial { degree: 1 }, &params).unwrap();
    let CurveModel::Polynomial(c) = &fit.model else { unreachable!() };
    let (intercept, slope) = (c[0], c[1]);
    let line_ok = (slope - 2.0).abs() <= 0.05 && (intercept - 1.0).abs() <= 0.1;

    let domain = [-4.0, 4.0];
    let truth = judge(&img, Domain::Function, Criterion::CurveMatches { relation: "2x+1".into(), domain }, None);
    let square = judge(&img, Domain::Function, Criterion::CurveMatches { relation: "x^2".into(), domain }, None);

    let hyperbola = draw(Scene::FunctionPlot { relation: "1/x".into(), domain: [-10.0, 10.0], noise: 0.0, check: PlotCheck::Curve });
    let asym = judge(&hyperbola, Domain::Function, Criterion::AsymptoteAt { axis: AsymptoteAxis::Vertical, value: 0.0, tol: 0.3 }, None);
    let at = asym.measured.unwrap_or(f64::NAN);

    outcome(
        line_ok && truth.passed && !square.passed && asym.passed && at.abs() <= 0.3,
        format!(
            "slope {slope:.4}, intercept {intercept:.4} ({} points, {extra} injected); 2x+1 {}, x^2 {}; asymptote at {at:.3}",
            points.len(),
            if truth.passed { "passes" } else { "fails" },
            if square.passed { "passes" } else { "fails" },
        ),
    )
}

fn counting_rule() -> Outcome {
    let img = RasterImage::filled_rgb(1024, 1024, WHITE).unwrap();
    let det = |confs: &[f64]| DetectionSet {
        image: "fixture.png".into(),
        detections: confs
            .iter()
            .enumerate()
            .map(|(i, &c)| Detection { category: "apple".into(), confidence: c, bbox: [40.0 * i as f64, 10.0, 30.0, 30.0] })
            .chain([Detection { category: "pear".into(), confidence: 0.95, bbox: [500.0, 500.0, 40.0, 40.0] }])
            .collect(),
    };
    let mut right = 0;
    for n in [1usize, 3, 5] {
        let cases = [
            (vec![0.9; n], true),
            (vec![0.9; n - 1], false),
            (vec![0.9; n + 1], false),
            ([vec![0.9; n - 1], vec![0.44]].concat(), false),
        ];
        for (confs, expect) in cases {
            let r = judge(&img, Domain::Counting, Criterion::CountExact { category: "apple".into(), n: n as u32 }, Some(&det(&confs)));
            right += (r.passed == expect) as usize;
        }
    }
    outcome(right == 12, format!("{right}/12 fixture cases correct"))
}

fn determinism(dir: &std::path::Path) -> Outcome {
    let records = load_manifest(&dir.join("manifest.jsonl")).unwrap();
    let dirs = DataDirs { images: dir.join("images"), detections: Some(dir.join("detections")) };
    let cfg = ThresholdConfig::default();
    let one = emit_report(&run_eval(&records, &dirs, &cfg, 1), ReportFormat::Json);
    let eight = emit_report(&run_eval(&records, &dirs, &cfg, 8), ReportFormat::Json);
    let again = emit_report(&run_eval(&records, &dirs, &cfg, 8), ReportFormat::Json);
    let on_disk = std::fs::read_to_string(dir.join("report.json")).unwrap();
    outcome(
        one == eight && eight == again && one == on_disk,
        format!("{} problems, report of {} bytes identical across 1/8 workers, a repeat run and the audit's own report", records.len(), one.len()),
    )
}

fn canvas_with(paint: impl FnOnce(&mut Layer)) -> RasterImage {
    let mut img = RasterImage::filled_rgb(1024, 1024, WHITE).unwrap();
    let mut layer = Layer::new(1024, 1024);
    paint(&mut layer);
    composite(&mut img, &layer, INK);
    img
}

fn primitive_recovery() -> Outcome {
    let cfg = ThresholdConfig::default();
    let c = Point::new(512.0, 512.0);
    let dark = |img: &RasterImage| threshold_foreground(&to_grayscale(img), cfg.fg_gray_thresh, true);

    let mut line_err: f64 = 0.0;
    for k in 0..12 {
        let theta = k as f64 * 15.0 + 7.0;
        let d = Point::direction(theta).scale(200.0);
        let img = canvas_with(|l| l.capsule(c.sub(d), c.add(d), 3.0));
        let params = HoughLineParams { vote_threshold: cfg.line_vote_threshold, min_len: cfg.line_min_len(1024), max_gap: cfg.line_max_gap, seed: cfg.hough_seed };
        let segs = hough_lines(&dark(&img), &params);
        let best = segs.iter().max_by(|a, b| a.length.total_cmp(&b.length));
        let err = best.map_or(f64::INFINITY, |s| {
            let e = (s.angle - theta % 180.0).abs();
            e.min(180.0 - e)
        });
        line_err = line_err.max(err);
    }

    let mut circle_err: f64 = 0.0;
    for r in [100.0, 150.0, 250.0] {
        let centre = Point::new(500.0, 530.0);
        let img = canvas_with(|l| l.ring(centre, r, 3.0));
        let found = hough_circles_gray(&to_grayscale(&img), &cfg.venn_circle());
        let err = found.first().map_or(f64::INFINITY, |k| k.center.distance(centre).max((k.radius - r).abs()));
        circle_err = circle_err.max(err);
    }

    let mut peak_err: f64 = 0.0;
    let mut counts_ok = true;
    let fans: [&[f64]; 3] = [&[0.0, 70.0], &[30.0, 150.0, 260.0], &[10.0, 100.0, 190.0, 280.0]];
    for fan in fans {
        let img = canvas_with(|l| {
            for a in fan {
                l.capsule(c, c.add(Point::direction(*a).scale(300.0)), 3.0);
            }
        });
        let profile = radial_profile(&dark(&img), c, 200.0).unwrap();
        let peaks = detect_radial_peaks(&profile, 200.0, &cfg.peak_params()).unwrap();
        counts_ok &= peaks.len() == fan.len();
        for a in fan {
            let e = peaks.iter().map(|p| angular_distance(p.direction, *a)).fold(f64::INFINITY, f64::min);
            peak_err = peak_err.max(e);
        }
    }
    outcome(
        line_err <= 2.0 && circle_err <= 3.0 && peak_err <= 1.0 && counts_ok,
        format!("line angle err {line_err:.2} deg (12 orientations), circle err {circle_err:.2} px (3 radii), radial peak err {peak_err:.2} deg (2/3/4-ray fans)"),
    )
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let (audit, _) = audit_suite(dir.path());
    let results = [
        ("audit suite perfection", audit),
        ("angle tolerance boundary", angle_boundary()),
        ("occupancy gates", occupancy_gates()),
        ("fraction accuracy", fraction_accuracy()),
        ("function recovery", function_recovery()),
        ("exact counting rule", counting_rule()),
        ("determinism and parallel equivalence", determinism(dir.path())),
        ("primitive recovery", primitive_recovery()),
    ];
    for (name, o) in &results {
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
