mod common;

use std::fs;

use common::*;
use serde_json::Value;

fn polyline_points(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.lines()
        .filter_map(|l| l.strip_prefix("<polyline points=\""))
        .map(|l| {
            l.trim_end_matches("\"/>")
                .split(' ')
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect()
        })
        .collect()
}

#[test]
fn vectorize_square_sketch() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("square.png"), png(&square_plan(false))).unwrap();
    let out = sketchopt(&["vectorize", "square.png", "--out", "scene.json", "--threshold", "0.0005"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let bytes = fs::read(dir.path().join("scene.json")).unwrap();
    assert_valid(sketchopt::docs::SCENE_SCHEMA, &bytes);
    let scene = json(&bytes);
    assert_eq!(scene["segments"].as_array().unwrap().len(), 4);
    assert_eq!(scene["provenance"]["detector"]["threshold_fraction"], 0.0005);
}

#[test]
fn vectorize_missing_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = sketchopt(&["vectorize", "nope.png"], dir.path());
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("vectorize") && err.contains("IoError"), "{err}");
}

#[test]
fn parametrize_square_with_one_mark() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.png"), png(&square_plan(true))).unwrap();
    assert!(sketchopt(&["vectorize", "s.png", "--out", "scene.json"], dir.path()).status.success());
    let out = sketchopt(&["parametrize", "scene.json", "--out", "model.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let bytes = fs::read(dir.path().join("model.json")).unwrap();
    assert_valid(sketchopt::docs::MODEL_SCHEMA, &bytes);
    let model = json(&bytes);
    assert_eq!(model["axes"].as_array().unwrap().len(), 4);
    let vars = model["variables"].as_array().unwrap();
    assert_eq!(vars.len(), 1);
    let axis = &model["axes"][vars[0]["axis_id"].as_u64().unwrap() as usize];
    assert!((axis["anchor"][0].as_f64().unwrap() - 300.0).abs() < 1.0, "bound to the right wall");
    let width = vars[0]["hi"].as_f64().unwrap() - vars[0]["lo"].as_f64().unwrap();
    assert_eq!(width, vars[0]["mark"]["length"].as_f64().unwrap());
}

#[test]
fn parametrize_without_marks_warns() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("scene.json"), unit_square_scene()).unwrap();
    let out = sketchopt(&["parametrize", "scene.json", "--out", "model.json"], dir.path());
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning: no design variables"));
    let model = json(&fs::read(dir.path().join("model.json")).unwrap());
    assert_eq!(model["variables"].as_array().unwrap().len(), 0);

    let out = sketchopt(&["optimize", "model.json"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ConfigError"), "{}", stderr(&out));
}

#[test]
fn parametrize_rejects_malformed_scene() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("scene.json"), b"{\"segments\": 3}").unwrap();
    let out = sketchopt(&["parametrize", "scene.json"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("SchemaError"), "{}", stderr(&out));
}

/// Unit square model with a variable on its right wall; returns the dir.
fn unit_square_model(lo: f64, hi: f64) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("scene.json"), unit_square_scene()).unwrap();
    assert!(sketchopt(&["parametrize", "scene.json", "--out", "plain.json"], dir.path()).status.success());
    let plain = json(&fs::read(dir.path().join("plain.json")).unwrap());
    let right = plain["axes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["direction"] == serde_json::json!([0.0, 1.0]) && a["anchor"][0] == 10.0)
        .expect("right wall axis")["id"]
        .as_u64()
        .unwrap();
    let spec = format!("axis={right},lo={lo},hi={hi}");
    let out = sketchopt(&["parametrize", "scene.json", "--var", &spec, "--out", "model.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    dir
}

#[test]
fn render_identity_and_translation() {
    let dir = unit_square_model(-10.0, 5.0);
    let model = json(&fs::read(dir.path().join("model.json")).unwrap());
    assert!(model["variables"][0]["mark"].is_null());

    let out = sketchopt(&["render", "model.json"], dir.path());
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains("stroke-width=\"2\"") && svg.contains("<circle") && svg.contains("stroke-dasharray"));
    let lines = polyline_points(&svg);
    let nodes: Vec<(f64, f64)> = model["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| (n["x"].as_f64().unwrap(), n["y"].as_f64().unwrap()))
        .collect();
    for (axis, line) in model["axes"].as_array().unwrap().iter().zip(&lines) {
        let want: Vec<(f64, f64)> = axis["nodes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|i| nodes[i.as_u64().unwrap() as usize])
            .map(|(x, y)| (x, 20.0 - y))
            .collect();
        assert_eq!(line, &want);
    }

    let out = sketchopt(&["render", "model.json", "--vars", "2"], dir.path());
    let svg = String::from_utf8(out.stdout).unwrap();
    let xs: Vec<f64> = polyline_points(&svg).concat().iter().map(|p| p.0).collect();
    assert!(xs.contains(&12.0) && !xs.contains(&10.0), "{xs:?}");
}

#[test]
fn render_errors() {
    let dir = unit_square_model(-10.0, 5.0);
    let out = sketchopt(&["render", "model.json", "--vars", "-10"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("DegenerateLayoutError"), "{}", stderr(&out));
    let out = sketchopt(&["render", "model.json", "--vars", "6"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("RangeError"), "{}", stderr(&out));
}

#[test]
fn var_override_must_contain_zero() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("scene.json"), unit_square_scene()).unwrap();
    let out = sketchopt(&["parametrize", "scene.json", "--var", "axis=0,lo=1,hi=3"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ConfigError"));
    let out = sketchopt(&["parametrize", "scene.json", "--var", "axis=99,lo=-1,hi=3"], dir.path());
    assert!(stderr(&out).contains("ConfigError"));
}

#[test]
fn optimize_is_deterministic_and_streams_progress() {
    let dir = unit_square_model(-5.0, 5.0);
    fs::write(dir.path().join("opt.json"), br#"{"population_size": 8, "generations": 4}"#).unwrap();
    let args = ["optimize", "model.json", "--config", "opt.json", "--seed", "11", "--out"];
    let a = sketchopt(&[&args[..], &["a.json"]].concat(), dir.path());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stderr(&a).lines().filter(|l| l.starts_with("generation ")).count(), 5);
    assert!(sketchopt(&[&args[..], &["b.json"]].concat(), dir.path()).status.success());
    let (a, b) = (fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
    assert_eq!(a, b);
    assert_valid(sketchopt::docs::SESSION_SCHEMA, &a);
    assert_eq!(json(&a)["provenance"]["seed"], 11);
}

#[test]
fn run_on_blank_sketch_is_empty_scene() {
    let dir = tempfile::tempdir().unwrap();
    let blank = sketchopt::synth::Plan { width: 64, height: 64, walls: vec![], marks: vec![] };
    fs::write(dir.path().join("blank.png"), png(&blank)).unwrap();
    let out = sketchopt(&["run", "blank.png", "--out", "o"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("parametrize: EmptySceneError"), "{}", stderr(&out));
}

#[test]
fn run_equals_chained_stages() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/case_study.png");
    fs::write(dir.path().join("opt.json"), br#"{"population_size": 12, "generations": 6, "seed": 5}"#).unwrap();
    let p = dir.path();
    let ok = |args: &[&str]| {
        let o = sketchopt(args, p);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        o
    };
    ok(&["run", fixture, "--config", "opt.json", "--out", "run", "--quiet"]);
    ok(&["vectorize", fixture, "--out", "scene.json"]);
    ok(&["parametrize", "scene.json", "--out", "model.json"]);
    ok(&["optimize", "model.json", "--config", "opt.json", "--out", "session.json", "--quiet"]);
    for name in ["scene.json", "model.json", "session.json"] {
        assert_eq!(fs::read(p.join("run").join(name)).unwrap(), fs::read(p.join(name)).unwrap(), "{name}");
    }
    let session = json(&fs::read(p.join("session.json")).unwrap());
    assert_eq!(session["variables"].as_array().unwrap().len(), 3);
    let members = session["front"]["members"].as_array().unwrap();
    assert!(!members.is_empty());
    for (i, m) in members.iter().enumerate() {
        let vars: Vec<String> = m["genome"].as_array().unwrap().iter().map(Value::to_string).collect();
        let out = ok(&["render", "model.json", "--vars", &vars.join(",")]);
        let gallery = fs::read(p.join("run").join(sketchopt::pipeline::member_file(i))).unwrap();
        assert_eq!(out.stdout, gallery, "member {i}");
    }
    assert!(p.join("run/front/index.html").exists() && p.join("run/zero.svg").exists());
}
