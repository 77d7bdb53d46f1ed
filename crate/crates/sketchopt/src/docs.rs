//! JSON documents exchanged between pipeline stages.
//!
//! Every document carries `format` and `version` fields. Coordinates are
//! sketch pixels, y down. Floats are written with round-trip precision,
//! so loading a document and writing it again gives the same bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sketchopt_core::annotation::{AnnotationMark, AnnotationParams, DesignVariable};
use sketchopt_core::nsga2::{Individual, OptConfig};
use sketchopt_core::objective::BuiltinOptions;
use sketchopt_core::parametrizer::{AxisId, Edge, ElementKind, EdgeId, Group, NodeId, ParametricGraph, WallAxis};
use sketchopt_core::vectorizer::{DetectorParams, LineSegment, TracerParams, VectorScene};
use sketchopt_core::Point;

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DOC_VERSION: u32 = 1;

pub const SCENE_FORMAT: &str = "sketchopt.scene";
pub const MODEL_FORMAT: &str = "sketchopt.model";
pub const SESSION_FORMAT: &str = "sketchopt.session";

pub const SCENE_SCHEMA: &str = include_str!("../schemas/scene.schema.json");
pub const MODEL_SCHEMA: &str = include_str!("../schemas/model.schema.json");
pub const OPT_SCHEMA: &str = include_str!("../schemas/opt.schema.json");
pub const SESSION_SCHEMA: &str = include_str!("../schemas/session.schema.json");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty JSON followed by a newline.
pub fn to_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("documents serialize");
    out.push(b'\n');
    out
}

pub fn from_bytes<'a, T: Deserialize<'a>>(bytes: &'a [u8], what: &str) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Schema(format!("{what}: {e}")))
}

fn check_header(format: &str, version: u32, expected: &str) -> Result<()> {
    if format != expected {
        return Err(Error::Schema(format!("expected a {expected} document, found '{format}'")));
    }
    if version != DOC_VERSION {
        return Err(Error::Schema(format!("unsupported {expected} version {version}")));
    }
    Ok(())
}

fn pt(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

fn unpt(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

// ---------------------------------------------------------------- scene

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub format: String,
    pub version: u32,
    /// `[width, height]` in pixels.
    pub image_size: [usize; 2],
    pub luminosity_range: f64,
    pub segments: Vec<SegmentDoc>,
    pub provenance: SceneProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub gain: f64,
    pub width_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneProvenance {
    pub tool_version: String,
    pub source_sha256: String,
    pub source_depth: u8,
    pub detector: DetectorDoc,
    pub tracer: TracerDoc,
    pub snap_tol_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorDoc {
    pub levels: usize,
    pub orientations: usize,
    pub strip_length: usize,
    pub flank_offset: usize,
    pub flank_weight: f64,
    pub threshold_fraction: f64,
    pub noise_factor: f64,
}

impl From<&DetectorParams> for DetectorDoc {
    fn from(p: &DetectorParams) -> Self {
        Self {
            levels: p.levels,
            orientations: p.orientations,
            strip_length: p.strip_length,
            flank_offset: p.flank_offset,
            flank_weight: p.flank_weight,
            threshold_fraction: p.threshold_fraction,
            noise_factor: p.noise_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TracerDoc {
    pub angle_tol_deg: f64,
    pub offset_tol: f64,
    pub min_length: f64,
    pub max_gap: usize,
    pub trim_ratio: f64,
    pub join_gap: f64,
    pub junction_reach: f64,
}

impl From<&TracerParams> for TracerDoc {
    fn from(p: &TracerParams) -> Self {
        Self {
            angle_tol_deg: p.angle_tol.to_degrees(),
            offset_tol: p.offset_tol,
            min_length: p.min_length,
            max_gap: p.max_gap,
            trim_ratio: p.trim_ratio,
            join_gap: p.join_gap,
            junction_reach: p.junction_reach,
        }
    }
}

impl SceneDoc {
    pub fn new(scene: &VectorScene, source_sha256: String, source_depth: u8) -> Self {
        Self {
            format: SCENE_FORMAT.into(),
            version: DOC_VERSION,
            image_size: [scene.width, scene.height],
            luminosity_range: scene.luminosity_range,
            segments: scene
                .segments
                .iter()
                .map(|s| SegmentDoc { p0: pt(s.p0), p1: pt(s.p1), gain: s.gain, width_estimate: s.width_estimate })
                .collect(),
            provenance: SceneProvenance {
                tool_version: TOOL_VERSION.into(),
                source_sha256,
                source_depth,
                detector: (&scene.provenance.detector).into(),
                tracer: (&scene.provenance.tracer).into(),
                snap_tol_deg: scene.provenance.snap_tol_deg,
            },
        }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let doc: Self = from_bytes(bytes, "scene")?;
        check_header(&doc.format, doc.version, SCENE_FORMAT)?;
        let finite = doc.segments.iter().all(|s| {
            s.p0.iter().chain(&s.p1).all(|v| v.is_finite()) && s.gain.is_finite() && s.width_estimate.is_finite()
        });
        if !finite {
            return Err(Error::Schema("scene: non-finite segment value".into()));
        }
        Ok(doc)
    }

    pub fn to_scene(&self) -> VectorScene {
        let segments = self
            .segments
            .iter()
            .map(|s| LineSegment { p0: unpt(s.p0), p1: unpt(s.p1), gain: s.gain, width_estimate: s.width_estimate })
            .collect();
        let mut scene = VectorScene::new(self.image_size[0], self.image_size[1], segments);
        scene.luminosity_range = self.luminosity_range;
        scene
    }
}

// ---------------------------------------------------------------- model

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub format: String,
    pub version: u32,
    pub image_size: [usize; 2],
    /// Closest distance two distinct nodes may come in a valid layout.
    pub snap_tol: f64,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    pub axes: Vec<AxisDoc>,
    pub groups: Vec<GroupDoc>,
    pub variables: Vec<VariableDoc>,
    pub warnings: Vec<String>,
    pub provenance: ModelProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: u32,
    pub a: u32,
    pub b: u32,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisDoc {
    pub id: u32,
    pub direction: [f64; 2],
    pub normal: [f64; 2],
    pub anchor: [f64; 2],
    /// Member nodes in order along `direction`.
    pub nodes: Vec<u32>,
    pub edges: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub id: u32,
    pub criterion: String,
    pub nodes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub id: u32,
    pub axis_id: u32,
    pub lo: f64,
    pub hi: f64,
    /// The drawn I-mark, absent for variables declared on the command line.
    pub mark: Option<MarkDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkDoc {
    pub stem: [[f64; 2]; 2],
    pub caps: [[[f64; 2]; 2]; 2],
    pub length: f64,
    pub center: [f64; 2],
    pub direction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelProvenance {
    pub tool_version: String,
    /// Hash of the raster the scene came from.
    pub source_sha256: String,
    pub scene_sha256: String,
    pub params: ParametrizeDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametrizeDoc {
    pub snap_tol: f64,
    pub angle_tol_deg: f64,
    pub collinear_tol: f64,
    pub grouping: String,
    pub annotation: AnnotationDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationDoc {
    pub perpendicular_tol_deg: f64,
    pub attach_tol: f64,
    pub cap_ratio: f64,
    pub parallel_tol_deg: f64,
    pub search_radius: f64,
}

impl From<&AnnotationParams> for AnnotationDoc {
    fn from(p: &AnnotationParams) -> Self {
        Self {
            perpendicular_tol_deg: p.perpendicular_tol.to_degrees(),
            attach_tol: p.attach_tol,
            cap_ratio: p.cap_ratio,
            parallel_tol_deg: p.parallel_tol.to_degrees(),
            search_radius: p.search_radius,
        }
    }
}

impl From<&AnnotationMark> for MarkDoc {
    fn from(m: &AnnotationMark) -> Self {
        Self {
            stem: [pt(m.stem_p0), pt(m.stem_p1)],
            caps: m.caps.map(|(a, b)| [pt(a), pt(b)]),
            length: m.length,
            center: pt(m.center),
            direction: pt(m.direction),
        }
    }
}

impl From<&MarkDoc> for AnnotationMark {
    fn from(m: &MarkDoc) -> Self {
        Self {
            stem_p0: unpt(m.stem[0]),
            stem_p1: unpt(m.stem[1]),
            caps: m.caps.map(|[a, b]| (unpt(a), unpt(b))),
            length: m.length,
            center: unpt(m.center),
            direction: unpt(m.direction),
        }
    }
}

impl From<&DesignVariable> for VariableDoc {
    fn from(v: &DesignVariable) -> Self {
        Self { id: v.id, axis_id: v.axis_id.0, lo: v.lo, hi: v.hi, mark: v.source_mark.as_ref().map(Into::into) }
    }
}

impl From<&VariableDoc> for DesignVariable {
    fn from(v: &VariableDoc) -> Self {
        Self { id: v.id, axis_id: AxisId(v.axis_id), lo: v.lo, hi: v.hi, source_mark: v.mark.as_ref().map(Into::into) }
    }
}

impl ModelDoc {
    pub fn new(
        graph: &ParametricGraph,
        variables: &[DesignVariable],
        warnings: Vec<String>,
        image_size: [usize; 2],
        provenance: ModelProvenance,
    ) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: DOC_VERSION,
            image_size,
            snap_tol: graph.snap_tol,
            nodes: graph.nodes.iter().enumerate().map(|(i, p)| NodeDoc { id: i as u32, x: p.x, y: p.y }).collect(),
            edges: graph
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeDoc { id: i as u32, a: e.a.0, b: e.b.0, kind: "wall".into() })
                .collect(),
            axes: graph
                .axes
                .iter()
                .map(|a| AxisDoc {
                    id: a.id.0,
                    direction: pt(a.direction),
                    normal: pt(a.normal()),
                    anchor: pt(a.anchor),
                    nodes: a.node_ids.iter().map(|n| n.0).collect(),
                    edges: a.edge_ids.iter().map(|e| e.0).collect(),
                })
                .collect(),
            groups: graph
                .groups
                .iter()
                .map(|g| GroupDoc { id: g.id, criterion: g.criterion.clone(), nodes: g.node_ids.iter().map(|n| n.0).collect() })
                .collect(),
            variables: variables.iter().map(Into::into).collect(),
            warnings,
            provenance,
        }
    }

    /// Parses and checks a model: dense ids, graph invariants, variables on
    /// existing axes with `lo <= 0 <= hi`.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let doc: Self = from_bytes(bytes, "model")?;
        check_header(&doc.format, doc.version, MODEL_FORMAT)?;
        doc.to_graph()?;
        doc.design_variables()?;
        Ok(doc)
    }

    pub fn to_graph(&self) -> Result<ParametricGraph> {
        let schema = |msg: String| Error::Schema(format!("model: {msg}"));
        let dense = |ids: &mut dyn Iterator<Item = u32>, what: &str| -> Result<()> {
            for (i, id) in ids.enumerate() {
                if id as usize != i {
                    return Err(schema(format!("{what} ids must be 0, 1, 2, ... in order")));
                }
            }
            Ok(())
        };
        dense(&mut self.nodes.iter().map(|n| n.id), "node")?;
        dense(&mut self.edges.iter().map(|e| e.id), "edge")?;
        dense(&mut self.axes.iter().map(|a| a.id), "axis")?;
        let n = self.nodes.len() as u32;
        let ne = self.edges.len() as u32;
        if let Some(e) = self.edges.iter().find(|e| e.a >= n || e.b >= n || e.kind != "wall") {
            return Err(schema(format!("edge {} is malformed", e.id)));
        }
        let bad_axis = self
            .axes
            .iter()
            .find(|a| a.nodes.iter().any(|&i| i >= n) || a.edges.iter().any(|&i| i >= ne));
        if let Some(a) = bad_axis {
            return Err(schema(format!("axis {} references a missing node or edge", a.id)));
        }
        if let Some(g) = self.groups.iter().find(|g| g.nodes.iter().any(|&i| i >= n)) {
            return Err(schema(format!("group {} references a missing node", g.id)));
        }
        let graph = ParametricGraph {
            nodes: self.nodes.iter().map(|p| Point::new(p.x, p.y)).collect(),
            edges: self.edges.iter().map(|e| Edge { a: NodeId(e.a), b: NodeId(e.b), kind: ElementKind::Wall }).collect(),
            axes: self
                .axes
                .iter()
                .map(|a| WallAxis {
                    id: AxisId(a.id),
                    direction: unpt(a.direction),
                    node_ids: a.nodes.iter().map(|&i| NodeId(i)).collect(),
                    edge_ids: a.edges.iter().map(|&i| EdgeId(i)).collect(),
                    anchor: unpt(a.anchor),
                })
                .collect(),
            groups: self
                .groups
                .iter()
                .map(|g| Group { id: g.id, criterion: g.criterion.clone(), node_ids: g.nodes.iter().map(|&i| NodeId(i)).collect() })
                .collect(),
            snap_tol: self.snap_tol,
        };
        graph.check_invariants().map_err(|e| schema(e.to_string()))?;
        Ok(graph)
    }

    pub fn design_variables(&self) -> Result<Vec<DesignVariable>> {
        let mut seen_ids = std::collections::BTreeSet::new();
        let mut seen_axes = std::collections::BTreeSet::new();
        for v in &self.variables {
            if !seen_ids.insert(v.id) || !seen_axes.insert(v.axis_id) {
                return Err(Error::Schema(format!("model: variable {} repeats an id or axis", v.id)));
            }
            if v.axis_id as usize >= self.axes.len() {
                return Err(Error::Schema(format!("model: variable {} is bound to a missing axis", v.id)));
            }
            if !(v.lo.is_finite() && v.hi.is_finite() && v.lo <= 0.0 && 0.0 <= v.hi) {
                return Err(Error::Schema(format!("model: variable {} range must satisfy lo <= 0 <= hi", v.id)));
            }
        }
        let mut vars: Vec<DesignVariable> = self.variables.iter().map(Into::into).collect();
        vars.sort_by_key(|v| v.id);
        Ok(vars)
    }
}

// ---------------------------------------------------------------- opt

/// Optimization settings; every field is optional in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptDoc {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// `null` means one over the number of variables.
    pub mutation_prob: Option<f64>,
    pub eta_c: f64,
    pub eta_m: f64,
    pub seed: u64,
    pub objectives: Vec<String>,
    /// Wall stiffness is `length ^ stiffness_exponent` in the torsion proxy.
    pub stiffness_exponent: f64,
    /// Target area for the `area_deviation` objective.
    pub area_target: Option<f64>,
}

impl Default for OptDoc {
    fn default() -> Self {
        let c = OptConfig::default();
        let b = BuiltinOptions::default();
        Self {
            population_size: c.population_size,
            generations: c.generations,
            crossover_prob: c.crossover_prob,
            mutation_prob: c.mutation_prob,
            eta_c: c.eta_c,
            eta_m: c.eta_m,
            seed: c.seed,
            objectives: c.objectives,
            stiffness_exponent: b.stiffness_exponent,
            area_target: b.area_target,
        }
    }
}

impl OptDoc {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let doc: Self = serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("opt config: {e}")))?;
        doc.config().validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(doc)
    }

    pub fn config(&self) -> OptConfig {
        OptConfig {
            population_size: self.population_size,
            generations: self.generations,
            crossover_prob: self.crossover_prob,
            mutation_prob: self.mutation_prob,
            eta_c: self.eta_c,
            eta_m: self.eta_m,
            seed: self.seed,
            objectives: self.objectives.clone(),
        }
    }

    pub fn builtin_options(&self) -> BuiltinOptions {
        BuiltinOptions { stiffness_exponent: self.stiffness_exponent, area_target: self.area_target }
    }
}

// ---------------------------------------------------------------- session

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionDoc {
    pub format: String,
    pub version: u32,
    pub provenance: SessionProvenance,
    pub config: OptDoc,
    pub objectives: Vec<String>,
    pub variables: Vec<VariableDoc>,
    /// The design as drawn (every variable at zero).
    pub zero_design: DesignDoc,
    pub generations: Vec<GenerationDoc>,
    pub front: FrontDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionProvenance {
    pub tool_version: String,
    pub source_sha256: String,
    pub model_sha256: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignDoc {
    pub genome: Vec<f64>,
    /// `null` for an infeasible design.
    pub objectives: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationDoc {
    pub generation: usize,
    pub front_hypervolume: f64,
    pub individuals: Vec<IndividualDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndividualDoc {
    pub genome: Vec<f64>,
    /// `null` for an infeasible individual.
    pub objectives: Option<Vec<f64>>,
    pub rank: usize,
    /// `null` stands for an infinite crowding distance.
    pub crowding: Option<f64>,
}

impl From<&Individual> for IndividualDoc {
    fn from(i: &Individual) -> Self {
        Self {
            genome: i.genome.clone(),
            objectives: i.objectives.clone(),
            rank: i.rank.unwrap_or(usize::MAX),
            crowding: i.crowding.filter(|c| c.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontDoc {
    pub members: Vec<IndividualDoc>,
    pub reference_point: Vec<f64>,
    pub hypervolume_history: Vec<f64>,
}

impl SessionDoc {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let doc: Self = from_bytes(bytes, "session")?;
        check_header(&doc.format, doc.version, SESSION_FORMAT)?;
        let n = doc.variables.len();
        let in_bounds = |g: &[f64]| {
            g.len() == n && g.iter().zip(&doc.variables).all(|(&x, v)| v.lo <= x && x <= v.hi)
        };
        let all = doc.generations.iter().flat_map(|g| &g.individuals).chain(&doc.front.members);
        for ind in all {
            if !in_bounds(&ind.genome) {
                return Err(Error::Schema("session: genome outside the recorded variable bounds".into()));
            }
        }
        Ok(doc)
    }
}
