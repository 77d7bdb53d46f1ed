//! Axis translation, layout validation and instantiation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::axes::centroid;
use super::{AxisId, FloorplanLayout, ParametricGraph};
use crate::annotation::DesignVariable;
use crate::error::{param, Error, Result};
use crate::geom::{point_segment_distance, segment_intersection, Point};

/// Design-variable values by variable id. Missing variables are zero.
pub type Assignment = BTreeMap<u32, f64>;

fn translate_axis(graph: &mut ParametricGraph, axis: AxisId, delta: f64) -> Result<()> {
    let a = graph.axis(axis)?;
    let shift = a.normal() * delta;
    let members = a.node_ids.clone();
    for n in members {
        let p = &mut graph.nodes[n.0 as usize];
        *p = *p + shift;
    }
    Ok(())
}

fn refit_anchors(graph: &mut ParametricGraph) {
    for i in 0..graph.axes.len() {
        let anchor = centroid(graph.axes[i].node_ids.iter().map(|&n| graph.nodes[n.0 as usize]));
        graph.axes[i].anchor = anchor;
    }
}

fn segment_distance(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    if segment_intersection(a0, a1, b0, b1).is_some() {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Checks a moved graph against the base it was derived from.
///
/// Rejects node pairs closer than the snap tolerance, edges that shrank to
/// nothing or flipped direction, and edges without a shared node that came
/// within the snap tolerance of each other (collapsed parallel walls, new
/// crossings) when they were not that close in `base`.
pub fn validate_layout(moved: &ParametricGraph, base: &ParametricGraph) -> Result<()> {
    if moved.nodes.len() != base.nodes.len() || moved.edges != base.edges {
        return Err(param("layout topology differs from its base graph"));
    }
    let tol = base.snap_tol;
    if moved.nodes.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateLayout("non-finite node position".into()));
    }
    for i in 0..moved.nodes.len() {
        for j in i + 1..moved.nodes.len() {
            if moved.nodes[i].distance(moved.nodes[j]) < tol {
                return Err(Error::DegenerateLayout(format!("nodes {i} and {j} collapse")));
            }
        }
    }
    for (i, e) in moved.edges.iter().enumerate() {
        let (a, b) = moved.edge_endpoints(e);
        let (a0, b0) = base.edge_endpoints(e);
        if (b - a).dot(b0 - a0) <= 0.0 {
            return Err(Error::DegenerateLayout(format!("edge {i} flipped")));
        }
    }
    for i in 0..moved.edges.len() {
        let ei = &moved.edges[i];
        for j in i + 1..moved.edges.len() {
            let ej = &moved.edges[j];
            if ei.a == ej.a || ei.a == ej.b || ei.b == ej.a || ei.b == ej.b {
                continue;
            }
            let (p0, p1) = moved.edge_endpoints(ei);
            let (q0, q1) = moved.edge_endpoints(ej);
            if segment_distance(p0, p1, q0, q1) >= tol {
                continue;
            }
            let (r0, r1) = base.edge_endpoints(ei);
            let (s0, s1) = base.edge_endpoints(ej);
            if segment_distance(r0, r1, s0, s1) >= tol {
                return Err(Error::DegenerateLayout(format!("edges {i} and {j} collide")));
            }
        }
    }
    Ok(())
}

/// Slides every node of `axis` by `delta` along the axis normal. Incident
/// walls stretch to follow; topology is unchanged.
pub fn apply_translation(graph: &ParametricGraph, axis: AxisId, delta: f64) -> Result<ParametricGraph> {
    if !delta.is_finite() {
        return Err(param("translation must be finite"));
    }
    graph.axis(axis)?;
    if delta == 0.0 {
        return Ok(graph.clone());
    }
    let mut out = graph.clone();
    translate_axis(&mut out, axis, delta)?;
    refit_anchors(&mut out);
    validate_layout(&out, graph)?;
    Ok(out)
}

/// Applies every variable in ascending id order and checks the result once.
pub fn instantiate_graph(
    graph: &ParametricGraph,
    assignment: &Assignment,
    variables: &[DesignVariable],
) -> Result<ParametricGraph> {
    for (&id, &v) in assignment {
        let var = variables
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::NotFound(format!("variable {id}")))?;
        if !var.contains(v) {
            return Err(Error::Range { variable: id, value: v, lo: var.lo, hi: var.hi });
        }
    }
    let mut vars: Vec<&DesignVariable> = variables.iter().collect();
    vars.sort_by_key(|d| d.id);
    let mut out = graph.clone();
    let mut moved = false;
    for var in vars {
        let v = assignment.get(&var.id).copied().unwrap_or(0.0);
        if v != 0.0 {
            translate_axis(&mut out, var.axis_id, v)?;
            moved = true;
        } else {
            graph.axis(var.axis_id)?;
        }
    }
    if moved {
        refit_anchors(&mut out);
        validate_layout(&out, graph)?;
    }
    Ok(out)
}

/// Instantiates `assignment` into wall polylines and node positions.
pub fn instantiate(
    graph: &ParametricGraph,
    assignment: &Assignment,
    variables: &[DesignVariable],
) -> Result<FloorplanLayout> {
    Ok(FloorplanLayout::from_graph(&instantiate_graph(graph, assignment, variables)?))
}

impl FloorplanLayout {
    pub fn from_graph(graph: &ParametricGraph) -> Self {
        Self {
            polylines: graph
                .axes
                .iter()
                .map(|a| a.node_ids.iter().map(|&n| graph.node(n)).collect())
                .collect(),
            node_positions: graph.nodes.clone(),
            edges: graph.edges.iter().map(|e| (e.a, e.b)).collect(),
        }
    }
}
