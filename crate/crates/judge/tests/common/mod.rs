#![allow(dead_code)]

use std::path::{Path, PathBuf};

use diagram_judge::io::{save_png, write_json};
use diagram_judge::ProblemRecord;
use diagram_judge_core::synth::{render, Scene, SceneRecipe};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Renders `scene` into `dir` and returns a record for it; `claim` replaces
/// the derived spec when given.
pub fn record(dir: &Path, id: &str, scene: Scene, claim: Option<Scene>) -> ProblemRecord {
    let recipe = SceneRecipe::new(id, 11, scene);
    let rendered = render(&recipe).unwrap();
    save_png(&dir.join(format!("{id}.png")), &rendered.image).unwrap();
    let detections = rendered.detections.map(|d| {
        let name = PathBuf::from(format!("{id}.json"));
        write_json(&dir.join(&name), &d).unwrap();
        name
    });
    let spec = match claim {
        Some(s) => SceneRecipe::new(id, 11, s).spec(),
        None => rendered.spec,
    };
    ProblemRecord {
        problem_id: id.into(),
        domain: spec.domain,
        prompt_text: String::new(),
        spec,
        image: format!("{id}.png").into(),
        detections,
    }
}
