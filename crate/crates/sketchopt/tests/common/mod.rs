#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sketchopt::docs::{self, SceneDoc};
use sketchopt::io::encode_png16;
use sketchopt::synth::{render, Ink, Mark, Plan, Wall};
use sketchopt_core::vectorizer::{LineSegment, VectorScene};
use sketchopt_core::Point;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sketchopt"))
}

pub fn sketchopt(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BASE: &str = "https://sketchopt.invalid/schemas/";

pub fn validator(schema: &str) -> jsonschema::Validator {
    let parse = |s: &str| serde_json::from_str::<Value>(s).unwrap();
    let mut opts = jsonschema::options();
    for (name, text) in [("model.schema.json", docs::MODEL_SCHEMA), ("opt.schema.json", docs::OPT_SCHEMA)] {
        opts = opts.with_resource(format!("{BASE}{name}"), jsonschema::Resource::from_contents(parse(text)).unwrap());
    }
    opts.build(&parse(schema)).expect("schema compiles")
}

pub fn assert_valid(schema: &str, bytes: &[u8]) {
    let v = validator(schema);
    let doc: Value = serde_json::from_slice(bytes).unwrap();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

/// A 400 x 400 sketch of the square 100..300 with 3-px walls.
pub fn square_plan(with_mark: bool) -> Plan {
    let wall = |x0, y0, x1, y1| Wall { p0: Point::new(x0, y0), p1: Point::new(x1, y1), width: 3 };
    let walls = vec![
        wall(100.0, 100.0, 300.0, 100.0),
        wall(300.0, 100.0, 300.0, 300.0),
        wall(100.0, 300.0, 300.0, 300.0),
        wall(100.0, 100.0, 100.0, 300.0),
    ];
    let marks = if with_mark {
        vec![Mark { center: Point::new(300.0, 200.0), horizontal_stem: true, length: 60.0, cap: 20.0 }]
    } else {
        Vec::new()
    };
    Plan { width: 400, height: 400, walls, marks }
}

pub fn png(plan: &Plan) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    encode_png16(&render(plan, Ink::default(), &mut rng)).unwrap()
}

/// Scene document of the 10 x 10 square at the origin.
pub fn unit_square_scene() -> Vec<u8> {
    let p = Point::new;
    let segs = [
        (p(0.0, 0.0), p(10.0, 0.0)),
        (p(10.0, 0.0), p(10.0, 10.0)),
        (p(10.0, 10.0), p(0.0, 10.0)),
        (p(0.0, 10.0), p(0.0, 0.0)),
    ];
    let scene = VectorScene::new(20, 20, segs.iter().map(|&(a, b)| LineSegment::new(a, b)).collect());
    docs::to_bytes(&SceneDoc::new(&scene, docs::sha256_hex(b"unit square"), 8))
}

pub fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}
