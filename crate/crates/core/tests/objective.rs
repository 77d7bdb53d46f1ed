use sketchopt_core::annotation::DesignVariable;
use sketchopt_core::objective::{
    build_structural_model, evaluate_objectives, stress_proxy, torsion_proxy, BeamLevel, BuiltinOptions,
    ObjectiveRegistry, StructuralModel,
};
use sketchopt_core::parametrizer::{
    build_graph, merge_collinear, Assignment, FloorplanLayout, ParametricGraph, DEFAULT_ANGLE_TOL,
    DEFAULT_COLLINEAR_TOL,
};
use sketchopt_core::vectorizer::{LineSegment, VectorScene};
use sketchopt_core::{Error, Point};

type Seg = ((f64, f64), (f64, f64));

const SQUARE: [Seg; 4] = [
    ((0.0, 0.0), (10.0, 0.0)),
    ((10.0, 0.0), (10.0, 10.0)),
    ((10.0, 10.0), (0.0, 10.0)),
    ((0.0, 10.0), (0.0, 0.0)),
];

fn graph(segs: &[Seg]) -> ParametricGraph {
    let scene = VectorScene::new(
        64,
        64,
        segs.iter()
            .map(|&((a, b), (c, d))| LineSegment::new(Point::new(a, b), Point::new(c, d)))
            .collect(),
    );
    merge_collinear(&build_graph(&scene, 1.0).unwrap(), DEFAULT_ANGLE_TOL, DEFAULT_COLLINEAR_TOL).unwrap()
}

fn model(segs: &[Seg]) -> StructuralModel {
    build_structural_model(&FloorplanLayout::from_graph(&graph(segs)))
}

fn transform(segs: &[Seg], f: impl Fn(f64, f64) -> (f64, f64)) -> Vec<Seg> {
    segs.iter().map(|&(a, b)| (f(a.0, a.1), f(b.0, b.1))).collect()
}

#[test]
fn square_counts_and_stress() {
    let m = model(&SQUARE);
    assert_eq!(m.columns.len(), 4);
    assert_eq!(m.beams.len(), 8);
    assert_eq!(m.wall_panels.len(), 4);
    assert_eq!(m.beams.iter().filter(|b| b.level == BeamLevel::Top).count(), 4);
    assert_eq!(stress_proxy(&m), 800.0);
    assert_eq!(torsion_proxy(&m, 3.0), 0.0);
}

#[test]
fn cross_wall_counts() {
    let mut segs = SQUARE.to_vec();
    segs.push(((5.0, 0.0), (5.0, 10.0)));
    let m = model(&segs);
    // Both T-junctions split their side wall, so 7 edges carry 14 beams.
    assert_eq!(m.columns.len(), 6);
    assert_eq!(m.wall_panels.len(), 7);
    assert_eq!(m.beams.len(), 14);
}

#[test]
fn extra_support_lowers_stress() {
    let mut segs = SQUARE.to_vec();
    segs.push(((4.0, 0.0), (4.0, 3.0)));
    let m = model(&segs);
    let top: f64 = m
        .beams
        .iter()
        .filter(|b| b.p0.y == 0.0 && b.p1.y == 0.0)
        .map(|b| b.p0.distance(b.p1).powi(2))
        .sum();
    assert_eq!(top, 104.0);
    assert!(stress_proxy(&m) - 2.0 * 9.0 < 800.0);
}

#[test]
fn torsion_of_off_center_wall() {
    // Hand evaluation: panels (length, midpoint) are left (10, (0,5)),
    // right (10, (10,5)), inner (10, (2,5)), top (2, (1,0)), (8, (6,0)) and
    // bottom mirrored at y = 10. Center of mass (220/50, 250/50) = (4.4, 5).
    // Vertical panels share k = 1000, so CR_x = (0 + 10 + 2)/3 = 4; the
    // horizontal panels are symmetric about y = 5, so CR_y = 5.
    let mut segs = SQUARE.to_vec();
    segs.push(((2.0, 0.0), (2.0, 10.0)));
    let t = torsion_proxy(&model(&segs), 3.0);
    assert!((t - 0.4).abs() < 1e-9, "{t}");
}

#[test]
fn moved_wall_breaks_symmetry() {
    let segs = transform(&SQUARE, |x, y| (if x == 10.0 { 12.0 } else { x }, y));
    assert_eq!(torsion_proxy(&model(&segs), 3.0), 0.0);
    let mut segs = SQUARE.to_vec();
    segs.push(((5.0, 0.0), (5.0, 10.0)));
    let shifted = transform(&segs, |x, y| (if x == 10.0 { 12.0 } else { x }, y));
    assert!(torsion_proxy(&model(&shifted), 3.0) > 0.0);
}

#[test]
fn homogeneity_and_translation_invariance() {
    let mut segs = SQUARE.to_vec();
    segs.push(((3.0, 0.0), (3.0, 10.0)));
    segs.push(((3.0, 6.0), (10.0, 6.0)));
    let base = model(&segs);
    for s in [0.5, 2.0, 3.7] {
        let scaled = model(&transform(&segs, |x, y| (s * x, s * y)));
        let (a, b) = (stress_proxy(&scaled), s * s * stress_proxy(&base));
        assert!((a - b).abs() <= 1e-9 * b);
    }
    for (tx, ty) in [(5.0, -3.0), (100.25, 40.5)] {
        let moved = model(&transform(&segs, |x, y| (x + tx, y + ty)));
        assert!((torsion_proxy(&moved, 3.0) - torsion_proxy(&base, 3.0)).abs() < 1e-9);
    }
    let sym = transform(&SQUARE, |x, y| (3.0 * x, y));
    assert!(torsion_proxy(&model(&sym), 3.0).abs() < 1e-9);
}

#[test]
fn registry_evaluation() {
    let g = graph(&SQUARE);
    let right = g.axes.iter().find(|a| a.node_ids.iter().all(|&n| g.node(n).x == 10.0)).unwrap().id;
    let vars = [DesignVariable { id: 0, axis_id: right, lo: -10.0, hi: 10.0, source_mark: None }];
    let reg = ObjectiveRegistry::from_names(&["stress", "torsion"], &BuiltinOptions::default()).unwrap();
    let v = evaluate_objectives(&g, &vars, &Assignment::new(), &reg).unwrap();
    assert_eq!(v.values, Some(vec![800.0, 0.0]));
    assert_eq!(v.labels, vec!["stress", "torsion"]);
    let collapsed = evaluate_objectives(&g, &vars, &Assignment::from([(0, -10.0)]), &reg).unwrap();
    assert!(!collapsed.is_feasible());
    let single = ObjectiveRegistry::from_names(&["stress"], &BuiltinOptions::default()).unwrap();
    assert_eq!(evaluate_objectives(&g, &vars, &Assignment::new(), &single).unwrap().values.unwrap().len(), 1);
    let area = BuiltinOptions { area_target: Some(90.0), ..Default::default() };
    let reg = ObjectiveRegistry::from_names(&["area_deviation"], &area).unwrap();
    assert_eq!(evaluate_objectives(&g, &vars, &Assignment::new(), &reg).unwrap().values, Some(vec![10.0]));
    assert!(ObjectiveRegistry::from_names(&["area_deviation"], &BuiltinOptions::default()).is_err());
    assert!(ObjectiveRegistry::from_names(&["mass"], &BuiltinOptions::default()).is_err());
}

struct Failing;

impl sketchopt_core::objective::Objective for Failing {
    fn label(&self) -> &str {
        "daylight"
    }
    fn evaluate(&self, _: &StructuralModel, _: &FloorplanLayout) -> Result<f64, String> {
        Err("simulator unavailable".into())
    }
}

#[test]
fn plugin_failure_carries_label() {
    let g = graph(&SQUARE);
    let mut reg = ObjectiveRegistry::new();
    reg.register(Box::new(Failing));
    let err = evaluate_objectives(&g, &[], &Assignment::new(), &reg).unwrap_err();
    assert!(matches!(err, Error::Objective { ref label, .. } if label == "daylight"));
}
