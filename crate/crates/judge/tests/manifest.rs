mod common;

use diagram_judge::manifest::write_manifest;
use diagram_judge::{load_manifest, parse_manifest, JudgeError, ManifestError};
use diagram_judge_core::synth::Scene;

fn row(id: &str, domain: &str) -> String {
    format!(
        r#"{{"problem_id":"{id}","domain":"{domain}","prompt_text":"draw","spec":{{"problem_id":"{id}","domain":"{domain}","criteria":[{{"kind":"background_white"}}]}},"image":"{id}.png"}}"#
    )
}

#[test]
fn three_hundred_rows() {
    let text: Vec<String> = (0..300).map(|i| row(&format!("p{i:03}"), "plane")).collect();
    let records = parse_manifest(&text.join("\n")).unwrap();
    assert_eq!(records.len(), 300);
    assert_eq!(records[299].problem_id, "p299");
}

#[test]
fn empty_manifest() {
    assert!(parse_manifest("").unwrap().is_empty());
    assert!(parse_manifest("\n  \n").unwrap().is_empty());
}

#[test]
fn duplicate_ids_are_rejected() {
    let text = [row("a", "angle"), row("b", "angle"), row("a", "set")].join("\n");
    assert_eq!(parse_manifest(&text), Err(ManifestError::DuplicateId { line: 3, id: "a".into() }));
}

#[test]
fn unknown_domain_is_named() {
    let text = [row("a", "angle"), row("b", "topology")].join("\n");
    assert_eq!(parse_manifest(&text), Err(ManifestError::UnknownDomain { line: 2, domain: "topology".into() }));
}

#[test]
fn parse_errors_carry_the_line() {
    let text = [row("a", "angle"), "{not json".to_string()].join("\n");
    assert!(matches!(parse_manifest(&text), Err(ManifestError::ParseError { line: 2, .. })));
    let mismatched = row("a", "angle").replacen(r#""domain":"angle","prompt"#, r#""domain":"set","prompt"#, 1);
    assert!(matches!(parse_manifest(&mismatched), Err(ManifestError::ParseError { line: 1, .. })));
    let bad_kind = row("a", "angle").replace("background_white", "looks_nice");
    assert!(matches!(parse_manifest(&bad_kind), Err(ManifestError::ParseError { line: 1, .. })));
}

#[test]
fn written_manifests_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let records = vec![
        common::record(dir.path(), "cross", Scene::Crossing { n: 2 }, None),
        common::record(dir.path(), "count", Scene::Count { category: "apple".into(), n: 2 }, None),
    ];
    let path = dir.path().join("manifest.jsonl");
    write_manifest(&path, &records).unwrap();
    assert_eq!(load_manifest(&path).unwrap(), records);
    assert!(matches!(load_manifest(&dir.path().join("missing.jsonl")), Err(JudgeError::Io { .. })));
}
