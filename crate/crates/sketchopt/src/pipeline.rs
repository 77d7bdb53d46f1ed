//! The pipeline stages over in-memory document bytes.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use rayon::prelude::*;
use sketchopt_core::annotation::{
    bind_annotations, detect_annotations, split_annotation_strokes, AnnotationParams, DesignVariable,
};
use sketchopt_core::nsga2::{evolve_with, GenerationSnapshot, LayoutProblem, Problem};
use sketchopt_core::objective::{builtin, BuiltinOptions, Objective, ObjectiveRegistry, StructuralModel};
use sketchopt_core::parametrizer::{
    build_graph, group_elements, instantiate, merge_collinear, AxisId, FloorplanLayout, GroupCriterion, ParametricGraph,
    DEFAULT_ANGLE_TOL, DEFAULT_COLLINEAR_TOL, DEFAULT_SNAP_TOL,
};
use sketchopt_core::vectorizer::{snap_orthogonal, vectorize, DetectorParams, TracerParams};

use crate::docs::*;
use crate::error::{Error, PipelineError, Result, Stage, StageExt};
use crate::io::decode_raster;
use crate::svg::layout_svg;

#[derive(Debug, Clone, Default)]
pub struct VectorizeOptions {
    pub detector: DetectorParams,
    pub tracer: TracerParams,
    /// Snap near-orthogonal segments to exact orthogonality (degrees).
    pub snap_tol_deg: Option<f64>,
}

pub fn vectorize_bytes(image: &[u8], opts: &VectorizeOptions) -> Result<SceneDoc> {
    let img = decode_raster(image)?;
    let mut scene = vectorize(&img, &opts.detector, &opts.tracer)?;
    if let Some(tol) = opts.snap_tol_deg {
        scene = snap_orthogonal(&scene, tol)?;
    }
    Ok(SceneDoc::new(&scene, sha256_hex(image), img.source_depth()))
}

/// A hand-declared variable: `axis=<id>,lo=<v>,hi=<v>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarOverride {
    pub axis: u32,
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for VarOverride {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected axis=<id>,lo=<v>,hi=<v>, got '{s}'"));
        let mut fields = BTreeMap::new();
        for part in s.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return Err(bad());
            }
        }
        if fields.len() != 3 {
            return Err(bad());
        }
        let num = |k: &str| -> Result<f64> {
            let v: f64 = fields.get(k).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        let axis = fields.get("axis").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let (lo, hi) = (num("lo")?, num("hi")?);
        if !(lo <= 0.0 && 0.0 <= hi) {
            return Err(Error::Config(format!("range [{lo}, {hi}] must contain 0 (the drawn position)")));
        }
        Ok(Self { axis, lo, hi })
    }
}

#[derive(Debug, Clone)]
pub struct ParametrizeOptions {
    pub snap_tol: f64,
    pub angle_tol_deg: f64,
    pub collinear_tol: f64,
    pub grouping: GroupCriterion,
    pub annotation: AnnotationParams,
    pub overrides: Vec<VarOverride>,
}

impl Default for ParametrizeOptions {
    fn default() -> Self {
        Self {
            snap_tol: DEFAULT_SNAP_TOL,
            angle_tol_deg: DEFAULT_ANGLE_TOL.to_degrees(),
            collinear_tol: DEFAULT_COLLINEAR_TOL,
            grouping: GroupCriterion::ByAxis,
            annotation: AnnotationParams::default(),
            overrides: Vec::new(),
        }
    }
}

fn grouping_name(g: &GroupCriterion) -> String {
    match g {
        GroupCriterion::ByAdjacentNodes { radius } => format!("{}:{radius}", g.tag()),
        other => other.tag().to_string(),
    }
}

pub fn parametrize_bytes(scene_bytes: &[u8], opts: &ParametrizeOptions) -> Result<ModelDoc> {
    let doc = SceneDoc::parse(scene_bytes)?;
    let scene = doc.to_scene();
    let (layout, raw) = split_annotation_strokes(&scene, &opts.annotation);
    let (marks, mut warnings) = detect_annotations(&raw, &opts.annotation);
    let graph = build_graph(&layout, opts.snap_tol)?;
    let graph = merge_collinear(&graph, opts.angle_tol_deg.to_radians(), opts.collinear_tol)?;
    let graph = group_elements(&graph, opts.grouping)?;
    let (mut vars, bind_warnings) = bind_annotations(&graph, &marks, &opts.annotation)?;
    warnings.extend(bind_warnings);
    apply_overrides(&graph, &mut vars, &opts.overrides)?;
    if vars.is_empty() {
        warnings.push("no design variables were bound; the model has nothing to optimize".into());
    }
    let provenance = ModelProvenance {
        tool_version: TOOL_VERSION.into(),
        source_sha256: doc.provenance.source_sha256.clone(),
        scene_sha256: sha256_hex(scene_bytes),
        params: ParametrizeDoc {
            snap_tol: opts.snap_tol,
            angle_tol_deg: opts.angle_tol_deg,
            collinear_tol: opts.collinear_tol,
            grouping: grouping_name(&opts.grouping),
            annotation: (&opts.annotation).into(),
        },
    };
    Ok(ModelDoc::new(&graph, &vars, warnings, doc.image_size, provenance))
}

/// Replaces (or adds) the variable on each overridden axis, then renumbers
/// all variables by ascending axis id. A replaced variable keeps its mark.
fn apply_overrides(graph: &ParametricGraph, vars: &mut Vec<DesignVariable>, overrides: &[VarOverride]) -> Result<()> {
    for o in overrides {
        if graph.axis(AxisId(o.axis)).is_err() {
            return Err(Error::Config(format!("--var names axis {} but the model has {} axes", o.axis, graph.axes.len())));
        }
        match vars.iter_mut().find(|v| v.axis_id.0 == o.axis) {
            Some(v) => {
                v.lo = o.lo;
                v.hi = o.hi;
            }
            None => vars.push(DesignVariable { id: 0, axis_id: AxisId(o.axis), lo: o.lo, hi: o.hi, source_mark: None }),
        }
    }
    vars.sort_by_key(|v| v.axis_id);
    for (i, v) in vars.iter_mut().enumerate() {
        v.id = i as u32;
    }
    Ok(())
}

/// Turns a panic inside an objective into an ordinary failure.
struct Guarded(Box<dyn Objective>);

impl Objective for Guarded {
    fn label(&self) -> &str {
        self.0.label()
    }

    fn evaluate(&self, model: &StructuralModel, layout: &FloorplanLayout) -> std::result::Result<f64, String> {
        catch_unwind(AssertUnwindSafe(|| self.0.evaluate(model, layout))).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Err(format!("panicked: {msg}"))
        })
    }
}

pub fn guard(objective: Box<dyn Objective>) -> Box<dyn Objective> {
    Box::new(Guarded(objective))
}

/// Built-in objectives by name, each wrapped by [`guard`].
pub fn objective_registry(names: &[String], opts: &BuiltinOptions) -> Result<ObjectiveRegistry> {
    if names.is_empty() {
        return Err(Error::Config("no objectives configured".into()));
    }
    let mut reg = ObjectiveRegistry::new();
    for name in names {
        reg.register(guard(builtin(name, opts).map_err(|e| Error::Config(e.to_string()))?));
    }
    Ok(reg)
}

/// Evaluates batches on the rayon pool. Results come back in input order,
/// so scheduling cannot change them.
pub struct Parallel<P>(pub P);

impl<P: Problem + Sync> Problem for Parallel<P> {
    fn bounds(&self) -> &[(f64, f64)] {
        self.0.bounds()
    }
    fn num_objectives(&self) -> usize {
        self.0.num_objectives()
    }
    fn evaluate(&self, genome: &[f64]) -> sketchopt_core::Result<Option<Vec<f64>>> {
        self.0.evaluate(genome)
    }
    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> sketchopt_core::Result<Vec<Option<Vec<f64>>>> {
        genomes.par_iter().map(|g| self.0.evaluate(g)).collect()
    }
}

/// One line of optimizer progress.
pub fn progress_line(snap: &GenerationSnapshot, labels: &[String]) -> String {
    let front: Vec<&Vec<f64>> = snap
        .population
        .iter()
        .filter(|i| i.rank == Some(0))
        .filter_map(|i| i.objectives.as_ref())
        .collect();
    let best: Vec<String> = labels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let b = front.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
            format!("{l}={b:.6e}")
        })
        .collect();
    format!("generation {}: front {} best {} hv {:.6e}", snap.generation, front.len(), best.join(" "), snap.front_hypervolume)
}

pub fn optimize_bytes(
    model_bytes: &[u8],
    opt: &OptDoc,
    mut progress: impl FnMut(&GenerationSnapshot, &[String]),
) -> Result<SessionDoc> {
    let model = ModelDoc::parse(model_bytes)?;
    let graph = model.to_graph()?;
    let vars = model.design_variables()?;
    if vars.is_empty() {
        return Err(Error::Config("the model has no design variables; nothing to optimize".into()));
    }
    let config = opt.config();
    config.validate().map_err(|e| Error::Config(e.to_string()))?;
    let registry = objective_registry(&opt.objectives, &opt.builtin_options())?;
    let labels = registry.labels();
    let problem = Parallel(LayoutProblem::new(&graph, &vars, &registry));
    let result = evolve_with(&problem, &config, |s| progress(s, &labels))?;
    let zeros = vec![0.0; vars.len()];
    let zero_design = DesignDoc { objectives: problem.evaluate(&zeros)?, genome: zeros };
    Ok(SessionDoc {
        format: SESSION_FORMAT.into(),
        version: DOC_VERSION,
        provenance: SessionProvenance {
            tool_version: TOOL_VERSION.into(),
            source_sha256: model.provenance.source_sha256.clone(),
            model_sha256: sha256_hex(model_bytes),
            seed: config.seed,
        },
        config: opt.clone(),
        objectives: labels,
        variables: model.variables.clone(),
        zero_design,
        generations: result
            .history
            .iter()
            .map(|g| GenerationDoc {
                generation: g.generation,
                front_hypervolume: g.front_hypervolume,
                individuals: g.population.iter().map(Into::into).collect(),
            })
            .collect(),
        front: FrontDoc {
            members: result.front.members.iter().map(Into::into).collect(),
            reference_point: result.front.reference_point.clone(),
            hypervolume_history: result.front.hypervolume_history.clone(),
        },
    })
}

/// Assignment from a genome ordered by ascending variable id.
pub fn assignment(vars: &[DesignVariable], genome: &[f64]) -> Result<BTreeMap<u32, f64>> {
    if genome.len() != vars.len() {
        return Err(Error::Config(format!("expected {} variable values, got {}", vars.len(), genome.len())));
    }
    Ok(vars.iter().zip(genome).map(|(v, &x)| (v.id, x)).collect())
}

pub fn instantiate_model(model: &ModelDoc, genome: &[f64]) -> Result<(ParametricGraph, Vec<DesignVariable>, FloorplanLayout)> {
    let graph = model.to_graph()?;
    let vars = model.design_variables()?;
    let layout = instantiate(&graph, &assignment(&vars, genome)?, &vars)?;
    Ok((graph, vars, layout))
}

pub fn render_model(model: &ModelDoc, genome: &[f64]) -> Result<String> {
    let (graph, vars, layout) = instantiate_model(model, genome)?;
    Ok(layout_svg(&layout, &graph, &vars, model.image_size))
}

/// Everything `run` produces, as file name and bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub scene: Vec<u8>,
    pub model: Vec<u8>,
    pub session: Vec<u8>,
    /// Relative path and SVG text of every gallery page.
    pub gallery: Vec<(String, String)>,
}

pub fn member_file(i: usize) -> String {
    format!("front/member_{i:03}.svg")
}

pub fn run_bytes(
    image: &[u8],
    vopts: &VectorizeOptions,
    popts: &ParametrizeOptions,
    opt: &OptDoc,
    progress: impl FnMut(&GenerationSnapshot, &[String]),
) -> Result<RunOutput, PipelineError> {
    let scene = to_bytes(&vectorize_bytes(image, vopts).stage(Stage::Vectorize)?);
    let model_doc = parametrize_bytes(&scene, popts).stage(Stage::Parametrize)?;
    let model = to_bytes(&model_doc);
    let session_doc = optimize_bytes(&model, opt, progress).stage(Stage::Optimize)?;
    let session = to_bytes(&session_doc);
    let mut gallery = Vec::new();
    gallery.push(("zero.svg".to_string(), render_model(&model_doc, &session_doc.zero_design.genome).stage(Stage::Render)?));
    for (i, m) in session_doc.front.members.iter().enumerate() {
        gallery.push((member_file(i), render_model(&model_doc, &m.genome).stage(Stage::Render)?));
    }
    gallery.push(("front/index.html".to_string(), gallery_page(&session_doc)));
    Ok(RunOutput { scene, model, session, gallery })
}

fn gallery_page(session: &SessionDoc) -> String {
    let mut rows = String::new();
    for (i, m) in session.front.members.iter().enumerate() {
        let objs = m.objectives.as_deref().unwrap_or_default();
        let cells: Vec<String> = objs.iter().map(|v| format!("<td>{v:.6}</td>")).collect();
        let genome: Vec<String> = m.genome.iter().map(|v| format!("{v:.3}")).collect();
        rows.push_str(&format!(
            "<tr><td><img src=\"member_{i:03}.svg\" width=\"240\"></td><td>{}</td>{}</tr>\n",
            genome.join(", "),
            cells.concat()
        ));
    }
    let heads: Vec<String> = session.objectives.iter().map(|l| format!("<th>{l}</th>")).collect();
    format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Pareto front</title></head><body>\n\
         <h1>Pareto front ({} members)</h1>\n<table>\n<tr><th>layout</th><th>variables</th>{}</tr>\n{}</table>\n</body></html>\n",
        session.front.members.len(),
        heads.concat(),
        rows
    )
}
