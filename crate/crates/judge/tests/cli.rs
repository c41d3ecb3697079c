mod common;

use std::process::Command;

use diagram_judge::io::write_json;
use diagram_judge::manifest::write_manifest;
use diagram_judge_core::synth::Scene;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diagram-judge"))
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bin().output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["run", "--images", "x"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn bad_manifest_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.jsonl");
    std::fs::write(&path, "{\"problem_id\": 1}\n").unwrap();
    let out = bin().arg("run").arg("--manifest").arg(&path).arg("--images").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn run_and_verify_one() {
    let dir = tempfile::tempdir().unwrap();
    let records = vec![
        common::record(dir.path(), "crossing", Scene::Crossing { n: 2 }, None),
        common::record(dir.path(), "wrong", Scene::Crossing { n: 3 }, Some(Scene::Crossing { n: 1 })),
    ];
    let manifest = dir.path().join("m.jsonl");
    write_manifest(&manifest, &records).unwrap();
    let cfg = dir.path().join("cfg.txt");
    std::fs::write(&cfg, "# defaults except the seed\nhough_seed = 42\n").unwrap();
    let report = dir.path().join("report.json");
    let status = bin()
        .args(["run", "--workers", "2", "--format", "json"])
        .arg("--manifest")
        .arg(&manifest)
        .arg("--images")
        .arg(dir.path())
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["overall"]["accuracy"], 50.0);

    let table = bin()
        .args(["run", "--format", "table"])
        .arg("--manifest")
        .arg(&manifest)
        .arg("--images")
        .arg(dir.path())
        .output()
        .unwrap();
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.starts_with(&format!("{:<10}{:>10}{:>10}", "", "Plane", "Overall")), "{text}");

    let spec = dir.path().join("spec.json");
    write_json(&spec, &records[0].spec).unwrap();
    let out = bin().arg("verify-one").arg("--image").arg(dir.path().join("crossing.png")).arg("--spec").arg(&spec).output().unwrap();
    assert!(out.status.success());
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["passed"], true);
}
