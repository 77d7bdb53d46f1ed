//! Structural proxy objectives over instantiated layouts.
//!
//! Columns stand at every node, each wall edge carries a top and a bottom
//! beam, and wall panels mirror the edges. Stress is the sum of squared
//! beam spans; torsion is the distance between the center of mass of the
//! panels and their center of rigidity.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::annotation::DesignVariable;
use crate::error::{param, Error, Result};
use crate::geom::{convex_hull_area, Point};
use crate::math;
use crate::parametrizer::{instantiate, Assignment, FloorplanLayout, ParametricGraph};

pub const DEFAULT_STIFFNESS_EXPONENT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamLevel {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    pub p0: Point,
    pub p1: Point,
    pub level: BeamLevel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallPanel {
    pub p0: Point,
    pub p1: Point,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralModel {
    pub columns: Vec<Point>,
    pub beams: Vec<Beam>,
    pub wall_panels: Vec<WallPanel>,
}

pub fn build_structural_model(layout: &FloorplanLayout) -> StructuralModel {
    let mut beams = Vec::with_capacity(2 * layout.edges.len());
    let mut wall_panels = Vec::with_capacity(layout.edges.len());
    for &(a, b) in &layout.edges {
        let (p0, p1) = (layout.node_positions[a.0 as usize], layout.node_positions[b.0 as usize]);
        beams.push(Beam { p0, p1, level: BeamLevel::Top });
        beams.push(Beam { p0, p1, level: BeamLevel::Bottom });
        wall_panels.push(WallPanel { p0, p1, length: p0.distance(p1) });
    }
    StructuralModel { columns: layout.node_positions.clone(), beams, wall_panels }
}

/// Sum of squared beam lengths.
pub fn stress_proxy(model: &StructuralModel) -> f64 {
    model
        .beams
        .iter()
        .map(|b| {
            let d = b.p1 - b.p0;
            d.dot(d)
        })
        .sum()
}

/// Eccentricity between the center of mass and the center of rigidity.
///
/// Panel stiffness is `L^exponent`. A panel resists loads along x by the
/// share `sin^2` of its direction angle and along y by `cos^2`, so an
/// axis-aligned panel resists exactly one direction. A direction with no
/// resisting panel falls back to the center-of-mass coordinate.
pub fn torsion_proxy(model: &StructuralModel, exponent: f64) -> f64 {
    let mut mass = 0.0;
    let mut cm = Point::default();
    let (mut kx, mut kx_x) = (0.0, 0.0);
    let (mut ky, mut ky_y) = (0.0, 0.0);
    for p in &model.wall_panels {
        if p.length == 0.0 {
            continue;
        }
        let mid = p.p0.midpoint(p.p1);
        mass += p.length;
        cm = cm + mid * p.length;
        let d = (p.p1 - p.p0) * (1.0 / p.length);
        let k = math::powf(p.length, exponent);
        let (resist_x, resist_y) = (k * d.y * d.y, k * d.x * d.x);
        kx += resist_x;
        kx_x += resist_x * mid.x;
        ky += resist_y;
        ky_y += resist_y * mid.y;
    }
    if mass == 0.0 {
        return 0.0;
    }
    let cm = cm * (1.0 / mass);
    let cr = Point::new(
        if kx > 0.0 { kx_x / kx } else { cm.x },
        if ky > 0.0 { ky_y / ky } else { cm.y },
    );
    cr.distance(cm)
}

/// One entry of the objective registry. Values are minimized.
pub trait Objective: Send + Sync {
    fn label(&self) -> &str;
    /// Returns the objective value or a failure message.
    fn evaluate(&self, model: &StructuralModel, layout: &FloorplanLayout) -> core::result::Result<f64, String>;
}

pub struct Stress;

impl Objective for Stress {
    fn label(&self) -> &str {
        "stress"
    }
    fn evaluate(&self, model: &StructuralModel, _: &FloorplanLayout) -> core::result::Result<f64, String> {
        Ok(stress_proxy(model))
    }
}

pub struct Torsion {
    pub exponent: f64,
}

impl Default for Torsion {
    fn default() -> Self {
        Self { exponent: DEFAULT_STIFFNESS_EXPONENT }
    }
}

impl Objective for Torsion {
    fn label(&self) -> &str {
        "torsion"
    }
    fn evaluate(&self, model: &StructuralModel, _: &FloorplanLayout) -> core::result::Result<f64, String> {
        Ok(torsion_proxy(model, self.exponent))
    }
}

/// `|hull area - target|` over the node positions.
pub struct AreaDeviation {
    pub target: f64,
}

impl Objective for AreaDeviation {
    fn label(&self) -> &str {
        "area_deviation"
    }
    fn evaluate(&self, _: &StructuralModel, layout: &FloorplanLayout) -> core::result::Result<f64, String> {
        Ok(math::abs(convex_hull_area(&layout.node_positions) - self.target))
    }
}

/// A built-in objective by name: `stress`, `torsion` or `area_deviation`
/// (which needs an area target).
pub fn builtin(name: &str, opts: &BuiltinOptions) -> Result<Box<dyn Objective>> {
    match name {
        "stress" => Ok(Box::new(Stress)),
        "torsion" => Ok(Box::new(Torsion { exponent: opts.stiffness_exponent })),
        "area_deviation" => {
            let target = opts.area_target.ok_or_else(|| param("area_deviation needs an area target"))?;
            Ok(Box::new(AreaDeviation { target }))
        }
        other => Err(param(format!("unknown objective '{other}'"))),
    }
}

#[derive(Default)]
pub struct ObjectiveRegistry {
    entries: Vec<Box<dyn Objective>>,
}

/// Options for the built-in objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinOptions {
    pub stiffness_exponent: f64,
    pub area_target: Option<f64>,
}

impl Default for BuiltinOptions {
    fn default() -> Self {
        Self { stiffness_exponent: DEFAULT_STIFFNESS_EXPONENT, area_target: None }
    }
}

impl ObjectiveRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, objective: Box<dyn Objective>) {
        self.entries.push(objective);
    }

    /// Builds a registry from built-in names (see [`builtin`]).
    pub fn from_names<S: AsRef<str>>(names: &[S], opts: &BuiltinOptions) -> Result<Self> {
        let mut reg = Self::new();
        for name in names {
            reg.register(builtin(name.as_ref(), opts)?);
        }
        if reg.is_empty() {
            return Err(param("objective registry is empty"));
        }
        Ok(reg)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|o| o.label().to_string()).collect()
    }

    /// Evaluates every objective on one layout, in registration order.
    pub fn evaluate_layout(&self, layout: &FloorplanLayout) -> Result<Vec<f64>> {
        let model = build_structural_model(layout);
        self.entries
            .iter()
            .map(|o| match o.evaluate(&model, layout) {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(v) => Err(Error::Objective { label: o.label().to_string(), message: format!("non-finite value {v}") }),
                Err(message) => Err(Error::Objective { label: o.label().to_string(), message }),
            })
            .collect()
    }
}

/// Objective values of one design, or `None` for an infeasible design.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    pub labels: Vec<String>,
    pub values: Option<Vec<f64>>,
}

impl ObjectiveVector {
    pub fn is_feasible(&self) -> bool {
        self.values.is_some()
    }
}

/// Instantiates `assignment` and evaluates the registry on it. Degenerate
/// layouts come back infeasible rather than as errors.
pub fn evaluate_objectives(
    graph: &ParametricGraph,
    variables: &[DesignVariable],
    assignment: &Assignment,
    registry: &ObjectiveRegistry,
) -> Result<ObjectiveVector> {
    if registry.is_empty() {
        return Err(param("objective registry is empty"));
    }
    let labels = registry.labels();
    match instantiate(graph, assignment, variables) {
        Ok(layout) => Ok(ObjectiveVector { labels, values: Some(registry.evaluate_layout(&layout)?) }),
        Err(Error::DegenerateLayout(_)) => Ok(ObjectiveVector { labels, values: None }),
        Err(e) => Err(e),
    }
}
