//! Collinear chaining and element grouping.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::build::UnionFind;
use super::{AxisId, EdgeId, Group, GroupCriterion, NodeId, ParametricGraph, WallAxis};
use crate::error::{param, Result};
use crate::geom::Point;
use crate::math;

/// Recomputes the wall axes: edges meeting at a node and continuing in the
/// same line (direction within `angle_tol` radians, far endpoint within
/// `collinear_tol` of the other edge's line) are chained into one axis.
///
/// Only the axes change, so the function is idempotent. Axis ids follow
/// the smallest member edge id.
pub fn merge_collinear(graph: &ParametricGraph, angle_tol: f64, collinear_tol: f64) -> Result<ParametricGraph> {
    if !(angle_tol >= 0.0) || !(collinear_tol >= 0.0) {
        return Err(param("collinearity tolerances must be non-negative"));
    }
    let n_edges = graph.edges.len();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes.len()];
    for (i, e) in graph.edges.iter().enumerate() {
        incident[e.a.0 as usize].push(i);
        incident[e.b.0 as usize].push(i);
    }
    let other = |e: usize, v: usize| {
        let edge = &graph.edges[e];
        if edge.a.0 as usize == v { edge.b } else { edge.a }
    };

    let mut uf = UnionFind::new(n_edges);
    for (v, inc) in incident.iter().enumerate() {
        let pv = graph.nodes[v];
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for (k, &e1) in inc.iter().enumerate() {
            for &e2 in &inc[k + 1..] {
                let p1 = graph.node(other(e1, v));
                let p2 = graph.node(other(e2, v));
                let (Some(d1), Some(d2)) = ((p1 - pv).normalized(), (p2 - pv).normalized()) else {
                    continue;
                };
                // Continuing edges leave the node in opposite directions.
                let bend = math::atan2(d1.cross(-d2), d1.dot(-d2)).abs();
                if bend > angle_tol {
                    continue;
                }
                let off1 = math::abs((p2 - pv).cross(d1));
                let off2 = math::abs((p1 - pv).cross(d2));
                if off1 > collinear_tol || off2 > collinear_tol {
                    continue;
                }
                candidates.push((bend, e1, e2));
            }
        }
        // Each edge continues through a node at most once; best aligned first.
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let mut paired: Vec<usize> = Vec::new();
        for (_, e1, e2) in candidates {
            if paired.contains(&e1) || paired.contains(&e2) {
                continue;
            }
            paired.push(e1);
            paired.push(e2);
            uf.union(e1, e2);
        }
    }

    let (labels, k) = uf.labels();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (e, &l) in labels.iter().enumerate() {
        members[l].push(e);
    }
    let mut out = graph.clone();
    out.axes = members
        .into_iter()
        .enumerate()
        .map(|(i, edges)| make_axis(graph, AxisId(i as u32), edges))
        .collect();
    Ok(out)
}

fn make_axis(graph: &ParametricGraph, id: AxisId, edges: Vec<usize>) -> WallAxis {
    let mut nodes: Vec<NodeId> = edges
        .iter()
        .flat_map(|&e| [graph.edges[e].a, graph.edges[e].b])
        .collect();
    nodes.sort();
    nodes.dedup();
    // Direction of the farthest pair of members, canonicalized.
    let mut best = (Point::new(1.0, 0.0), -1.0);
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            let d = graph.node(b) - graph.node(a);
            let len = d.norm();
            if len > best.1 {
                best = (d, len);
            }
        }
    }
    let direction = best.0.normalized().unwrap_or(Point::new(1.0, 0.0)).canonical_direction();
    nodes.sort_by(|&a, &b| {
        graph.node(a).dot(direction).total_cmp(&graph.node(b).dot(direction)).then(a.cmp(&b))
    });
    let anchor = centroid(nodes.iter().map(|&n| graph.node(n)));
    WallAxis { id, direction, node_ids: nodes, edge_ids: edges.into_iter().map(|e| EdgeId(e as u32)).collect(), anchor }
}

pub(crate) fn centroid(points: impl Iterator<Item = Point>) -> Point {
    let (sum, n) = points.fold((Point::default(), 0usize), |(s, n), p| (s + p, n + 1));
    if n == 0 { sum } else { sum * (1.0 / n as f64) }
}

/// Replaces the graph's groups with those induced by `criterion`.
pub fn group_elements(graph: &ParametricGraph, criterion: GroupCriterion) -> Result<ParametricGraph> {
    let sets: Vec<Vec<NodeId>> = match criterion {
        GroupCriterion::ByAxis => graph.axes.iter().map(|a| sorted(a.node_ids.clone())).collect(),
        GroupCriterion::ByConnectivity => {
            let mut uf = UnionFind::new(graph.nodes.len());
            for e in &graph.edges {
                uf.union(e.a.0 as usize, e.b.0 as usize);
            }
            components(&mut uf)
        }
        GroupCriterion::ByAdjacentNodes { radius } => {
            if !(radius > 0.0) {
                return Err(param("adjacent-node radius must be positive"));
            }
            let mut uf = UnionFind::new(graph.nodes.len());
            for i in 0..graph.nodes.len() {
                for j in i + 1..graph.nodes.len() {
                    if graph.nodes[i].distance(graph.nodes[j]) <= radius {
                        uf.union(i, j);
                    }
                }
            }
            components(&mut uf)
        }
    };
    let tag = criterion.tag().to_string();
    let mut out = graph.clone();
    out.groups = sets
        .into_iter()
        .enumerate()
        .map(|(i, node_ids)| Group { id: i as u32, criterion: tag.clone(), node_ids })
        .collect();
    Ok(out)
}

fn sorted(mut v: Vec<NodeId>) -> Vec<NodeId> {
    v.sort();
    v
}

fn components(uf: &mut UnionFind) -> Vec<Vec<NodeId>> {
    let (labels, k) = uf.labels();
    let mut sets = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        sets[l].push(NodeId(i as u32));
    }
    sets
}

/// Node ids of one axis in axis order.
pub fn collect_axis_nodes(graph: &ParametricGraph, axis: AxisId) -> Result<Vec<NodeId>> {
    Ok(graph.axis(axis)?.node_ids.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametrizer::{build_graph, DEFAULT_ANGLE_TOL, DEFAULT_COLLINEAR_TOL};
    use crate::vectorizer::{LineSegment, VectorScene};

    fn graph(segs: &[((f64, f64), (f64, f64))]) -> ParametricGraph {
        let scene = VectorScene::new(
            100,
            100,
            segs.iter()
                .map(|&((a, b), (c, d))| LineSegment::new(Point::new(a, b), Point::new(c, d)))
                .collect(),
        );
        let g = build_graph(&scene, 1.0).unwrap();
        merge_collinear(&g, DEFAULT_ANGLE_TOL, DEFAULT_COLLINEAR_TOL).unwrap()
    }

    #[test]
    fn t_junction_bar_is_one_axis() {
        let g = graph(&[((0.0, 0.0), (20.0, 0.0)), ((10.0, 0.0), (10.0, 10.0))]);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(g.axes.len(), 2);
        let bar = g.axes.iter().find(|a| a.edge_ids.len() == 2).unwrap();
        assert_eq!(bar.node_ids.len(), 3);
        assert_eq!(bar.direction, Point::new(1.0, 0.0));
        let xs: Vec<f64> = bar.node_ids.iter().map(|&n| g.node(n).x).collect();
        assert_eq!(xs, vec![0.0, 10.0, 20.0]);
    }

    #[test]
    fn crossing_gives_two_axes() {
        let g = graph(&[((0.0, 5.0), (10.0, 5.0)), ((5.0, 0.0), (5.0, 10.0))]);
        assert_eq!(g.axes.len(), 2);
        assert!(g.axes.iter().all(|a| a.node_ids.len() == 3));
    }

    #[test]
    fn merge_is_idempotent() {
        let g = graph(&[((0.0, 0.0), (20.0, 0.0)), ((10.0, 0.0), (10.0, 10.0)), ((20.0, 0.0), (20.0, 10.0))]);
        let again = merge_collinear(&g, DEFAULT_ANGLE_TOL, DEFAULT_COLLINEAR_TOL).unwrap();
        assert_eq!(g, again);
        g.check_invariants().unwrap();
    }

    #[test]
    fn corners_do_not_merge() {
        let g = graph(&[((0.0, 0.0), (10.0, 0.0)), ((10.0, 0.0), (10.0, 10.0))]);
        assert_eq!(g.axes.len(), 2);
    }

    #[test]
    fn grouping() {
        let g = graph(&[((0.0, 0.0), (10.0, 0.0)), ((50.0, 0.0), (60.0, 0.0)), ((10.0, 0.0), (10.0, 10.0))]);
        let by_conn = group_elements(&g, GroupCriterion::ByConnectivity).unwrap();
        assert_eq!(by_conn.groups.len(), 2);
        assert_eq!(by_conn.groups[0].criterion, "by_connectivity");
        let by_axis = group_elements(&g, GroupCriterion::ByAxis).unwrap();
        assert_eq!(by_axis.groups.len(), g.axes.len());
        let near = group_elements(&g, GroupCriterion::ByAdjacentNodes { radius: 10.5 }).unwrap();
        assert_eq!(near.groups.len(), 2);
        assert!(collect_axis_nodes(&g, AxisId(99)).is_err());
    }
}
