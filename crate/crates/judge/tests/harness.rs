mod common;

use diagram_judge::harness::{eval_record, DataDirs};
use diagram_judge::io::{load_detections, load_image};
use diagram_judge::{emit_report, run_eval, ReportFormat};
use diagram_judge_core::synth::{Figure, FigureClaim, Scene};
use diagram_judge_core::verify::{ConstraintSpec, Criterion, Domain};
use diagram_judge_core::{evaluate, ThresholdConfig};

fn dirs(dir: &std::path::Path) -> DataDirs {
    DataDirs { images: dir.to_path_buf(), detections: None }
}

#[test]
fn unreadable_inputs_fail_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    let good = common::record(dir.path(), "good", Scene::Crossing { n: 1 }, None);
    let mut missing = good.clone();
    missing.problem_id = "missing".into();
    missing.image = "nope.png".into();
    let mut corrupt = good.clone();
    corrupt.problem_id = "corrupt".into();
    corrupt.image = "corrupt.png".into();
    std::fs::write(dir.path().join("corrupt.png"), b"not a png").unwrap();

    let report = run_eval(&[missing, good, corrupt], &dirs(dir.path()), &ThresholdConfig::default(), 2);
    let v = &report.verdicts;
    assert_eq!(v.len(), 3);
    assert_eq!([v[0].passed, v[1].passed, v[2].passed], [false, true, false]);
    assert!(v[0].criterion_results[0].diagnostic.starts_with("unreadable image"));
    assert!(v[2].criterion_results[0].diagnostic.starts_with("unreadable image"));
}

#[test]
fn counting_without_detections_fails_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = common::record(dir.path(), "apples", Scene::Count { category: "apple".into(), n: 3 }, None);
    assert!(eval_record(&r, &dirs(dir.path()), &ThresholdConfig::default()).passed);
    r.detections = None;
    let v = eval_record(&r, &dirs(dir.path()), &ThresholdConfig::default());
    assert!(!v.passed);
    assert!(v.criterion_results[0].diagnostic.contains("detection"), "{}", v.criterion_results[0].diagnostic);
}

#[test]
fn mixed_batch_is_half_right_and_order_free() {
    let dir = tempfile::tempdir().unwrap();
    let mut records = Vec::new();
    for n in 1..=3 {
        let scene = Scene::Crossing { n };
        records.push(common::record(dir.path(), &format!("pos{n}"), scene.clone(), None));
        records.push(common::record(dir.path(), &format!("neg{n}"), Scene::Crossing { n: n + 1 }, Some(scene)));
    }
    let cfg = ThresholdConfig::default();
    let report = run_eval(&records, &dirs(dir.path()), &cfg, 3);
    assert_eq!(report.overall.accuracy, Some(50.0));
    assert_eq!(report.domains[&Domain::Plane].n_problems, 6);
    for v in &report.verdicts {
        assert_eq!(v.passed, v.problem_id.starts_with("pos"), "{}", v.problem_id);
    }

    let mut shuffled = records.clone();
    shuffled.reverse();
    shuffled.swap(0, 3);
    let again = run_eval(&shuffled, &dirs(dir.path()), &cfg, 1);
    assert_eq!(again.overall, report.overall);
    assert_eq!(again.domains, report.domains);
    for v in &again.verdicts {
        let same = report.verdicts.iter().find(|w| w.problem_id == v.problem_id).unwrap();
        assert_eq!(v, same);
    }
    let table = emit_report(&report, ReportFormat::Table);
    assert!(table.lines().nth(1).unwrap().trim_end().ends_with("50.0"), "{table}");
}

#[test]
fn resized_inputs_are_judged_at_eval_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let r = common::record(
        dir.path(),
        "circle",
        Scene::Figure { figure: Figure::Circle { radius: 250.0 }, claim: FigureClaim::Circle },
        None,
    );
    let img = image::open(dir.path().join("circle.png")).unwrap();
    img.resize(512, 512, image::imageops::FilterType::Triangle).save(dir.path().join("small.png")).unwrap();
    let loaded = load_image(&dir.path().join("small.png"), 1024).unwrap();
    assert_eq!((loaded.width(), loaded.height()), (1024, 1024));
    let v = evaluate(&loaded, &r.spec, &ThresholdConfig::default(), None).unwrap();
    assert!(v.passed, "{v:?}");
}

#[test]
fn sidecar_files_parse() {
    let dir = common::fixtures().join("detections");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let set = load_detections(&path).unwrap_or_else(|e| panic!("{e}"));
        set.validate(None).unwrap();
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn annotated_fixture_counts_three_apples() {
    let set = load_detections(&common::fixtures().join("detections/three_apples.json")).unwrap();
    let img = diagram_judge_core::RasterImage::filled_rgb(1024, 1024, [255, 255, 255]).unwrap();
    let spec = |n| ConstraintSpec::new("apples", Domain::Counting, vec![Criterion::CountExact { category: "apple".into(), n }]);
    let cfg = ThresholdConfig::default();
    assert!(evaluate(&img, &spec(3), &cfg, Some(&set)).unwrap().passed);
    assert!(!evaluate(&img, &spec(4), &cfg, Some(&set)).unwrap().passed);
}
