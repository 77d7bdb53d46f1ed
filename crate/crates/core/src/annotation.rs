//! I-shaped annotation marks and their binding to wall axes.
//!
//! A mark is a long stem with a short perpendicular cap across each end.
//! Bound to the nearest wall axis whose normal runs along the stem, it
//! becomes a design variable: a translation of that axis along its normal
//! within `[-L/2, L/2]`, `L` being the stem length.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::geom::{point_segment_distance, project_param, Point};
use crate::math;
use crate::parametrizer::{AxisId, ParametricGraph};
use crate::vectorizer::{LineSegment, VectorScene};

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationParams {
    /// Cap-to-stem perpendicularity tolerance, radians.
    pub perpendicular_tol: f64,
    /// Maximum distance from a stem end to its cap, pixels.
    pub attach_tol: f64,
    /// Caps must be shorter than this fraction of the stem.
    pub cap_ratio: f64,
    /// Axis-normal to stem parallelism tolerance, radians.
    pub parallel_tol: f64,
    pub search_radius: f64,
}

impl Default for AnnotationParams {
    fn default() -> Self {
        Self {
            perpendicular_tol: 15f64.to_radians(),
            attach_tol: 3.0,
            cap_ratio: 0.5,
            parallel_tol: 15f64.to_radians(),
            search_radius: 40.0,
        }
    }
}

impl AnnotationParams {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..core::f64::consts::FRAC_PI_2).contains(&self.perpendicular_tol)
            && (0.0..core::f64::consts::FRAC_PI_2).contains(&self.parallel_tol)
            && self.attach_tol >= 0.0
            && self.cap_ratio > 0.0
            && self.search_radius > 0.0
            && self.search_radius.is_finite();
        if ok {
            Ok(())
        } else {
            Err(param("annotation tolerances out of range"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationMark {
    pub stem_p0: Point,
    pub stem_p1: Point,
    /// Caps at `stem_p0` and `stem_p1` respectively.
    pub caps: [(Point, Point); 2],
    pub length: f64,
    pub center: Point,
    /// Canonical unit direction of the stem.
    pub direction: Point,
}

impl AnnotationMark {
    fn from_triple(stem: &LineSegment, c0: &LineSegment, c1: &LineSegment) -> Self {
        let d = stem.p1 - stem.p0;
        Self {
            stem_p0: stem.p0,
            stem_p1: stem.p1,
            caps: [(c0.p0, c0.p1), (c1.p0, c1.p1)],
            length: d.norm(),
            center: stem.p0.midpoint(stem.p1),
            direction: d.normalized().unwrap_or(Point::new(1.0, 0.0)).canonical_direction(),
        }
    }
}

/// A bounded translation of one wall axis along its normal.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignVariable {
    pub id: u32,
    pub axis_id: AxisId,
    pub lo: f64,
    pub hi: f64,
    /// `None` for variables declared by hand rather than drawn.
    pub source_mark: Option<AnnotationMark>,
}

impl DesignVariable {
    pub fn contains(&self, v: f64) -> bool {
        v.is_finite() && self.lo <= v && v <= self.hi
    }
}

fn angle_between(a: Point, b: Point) -> f64 {
    math::line_angle_diff(a.orientation(), b.orientation())
}

/// Finds a cap for the stem end `end` among unused segments.
fn find_cap(
    segs: &[LineSegment],
    used: &[bool],
    stem: usize,
    end: Point,
    p: &AnnotationParams,
) -> Option<usize> {
    let s = &segs[stem];
    let stem_dir = s.p1 - s.p0;
    let mut best: Option<(f64, usize)> = None;
    for (i, c) in segs.iter().enumerate() {
        if i == stem || used[i] || !(c.length() < p.cap_ratio * s.length()) || c.length() == 0.0 {
            continue;
        }
        let perp = core::f64::consts::FRAC_PI_2 - angle_between(stem_dir, c.p1 - c.p0);
        if perp > p.perpendicular_tol {
            continue;
        }
        // The stem must meet the cap near its middle; this tells a cap from
        // a wall corner.
        let t = project_param(end, c.p0, c.p1);
        if !(0.25..=0.75).contains(&t) {
            continue;
        }
        let d = point_segment_distance(end, c.p0, c.p1);
        if d <= p.attach_tol && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i)
}

/// Greedy I-pattern matching by descending stem length.
fn find_triples(segs: &[LineSegment], p: &AnnotationParams) -> Vec<[usize; 3]> {
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&a, &b| segs[b].length().total_cmp(&segs[a].length()).then(a.cmp(&b)));
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    for s in order {
        if used[s] || segs[s].length() == 0.0 {
            continue;
        }
        let Some(c0) = find_cap(segs, &used, s, segs[s].p0, p) else { continue };
        used[c0] = true;
        match find_cap(segs, &used, s, segs[s].p1, p) {
            Some(c1) => {
                used[s] = true;
                used[c1] = true;
                out.push([s, c0, c1]);
            }
            None => used[c0] = false,
        }
    }
    out
}

/// Moves every I-pattern triple out of the layout strokes.
pub fn split_annotation_strokes(scene: &VectorScene, params: &AnnotationParams) -> (VectorScene, VectorScene) {
    let triples = find_triples(&scene.segments, params);
    let mut in_mark = vec![false; scene.segments.len()];
    let mut marks = Vec::with_capacity(3 * triples.len());
    for t in &triples {
        for &i in t {
            in_mark[i] = true;
            marks.push(scene.segments[i].clone());
        }
    }
    let layout = scene
        .segments
        .iter()
        .zip(&in_mark)
        .filter(|(_, &m)| !m)
        .map(|(s, _)| s.clone())
        .collect();
    (scene.with_segments(layout), scene.with_segments(marks))
}

/// Groups mark strokes into marks. Strokes that do not form a valid mark
/// are dropped and reported in the returned warnings.
pub fn detect_annotations(marks_raw: &VectorScene, params: &AnnotationParams) -> (Vec<AnnotationMark>, Vec<String>) {
    let segs = &marks_raw.segments;
    let triples = find_triples(segs, params);
    let mut used = vec![false; segs.len()];
    let mut marks = Vec::with_capacity(triples.len());
    for &[s, c0, c1] in &triples {
        used[s] = true;
        used[c0] = true;
        used[c1] = true;
        marks.push(AnnotationMark::from_triple(&segs[s], &segs[c0], &segs[c1]));
    }
    let warnings = used
        .iter()
        .enumerate()
        .filter(|(_, &u)| !u)
        .map(|(i, _)| {
            let s = &segs[i];
            format!(
                "discarded stroke ({:.1},{:.1})-({:.1},{:.1}): not part of a complete I-mark",
                s.p0.x, s.p0.y, s.p1.x, s.p1.y
            )
        })
        .collect();
    (marks, warnings)
}

fn axis_distance(graph: &ParametricGraph, axis: usize, p: Point) -> f64 {
    graph.axes[axis]
        .edge_ids
        .iter()
        .map(|e| {
            let (a, b) = graph.edge_endpoints(&graph.edges[e.0 as usize]);
            point_segment_distance(p, a, b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Binds each mark to its nearest eligible axis. When several marks pick
/// the same axis the closest keeps it; the others stay unbound. Variable
/// ids follow ascending axis id.
pub fn bind_annotations(
    graph: &ParametricGraph,
    marks: &[AnnotationMark],
    params: &AnnotationParams,
) -> Result<(Vec<DesignVariable>, Vec<String>)> {
    params.validate()?;
    let mut warnings = Vec::new();
    // (distance, mark, axis index)
    let mut picks: Vec<(f64, usize, usize)> = Vec::new();
    for (m, mark) in marks.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for (a, axis) in graph.axes.iter().enumerate() {
            if angle_between(axis.normal(), mark.direction) > params.parallel_tol {
                continue;
            }
            let d = axis_distance(graph, a, mark.center);
            if d <= params.search_radius && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, a));
            }
        }
        match best {
            Some((d, a)) => picks.push((d, m, a)),
            None => warnings.push(format!(
                "mark at ({:.1},{:.1}) has no eligible wall axis within {} px",
                mark.center.x, mark.center.y, params.search_radius
            )),
        }
    }
    picks.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut taken: Vec<(usize, usize)> = Vec::new();
    for (_, m, a) in picks {
        if taken.iter().any(|&(_, ta)| ta == a) {
            let c = marks[m].center;
            warnings.push(format!(
                "mark at ({:.1},{:.1}) lost {} to a closer mark",
                c.x, c.y, graph.axes[a].id
            ));
        } else {
            taken.push((m, a));
        }
    }
    taken.sort_by_key(|&(_, a)| graph.axes[a].id);
    let vars = taken
        .into_iter()
        .enumerate()
        .map(|(i, (m, a))| {
            let half = marks[m].length / 2.0;
            DesignVariable {
                id: i as u32,
                axis_id: graph.axes[a].id,
                lo: -half,
                hi: half,
                source_mark: Some(marks[m].clone()),
            }
        })
        .collect();
    Ok((vars, warnings))
}
