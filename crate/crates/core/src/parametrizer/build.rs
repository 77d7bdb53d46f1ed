//! Segment soup to node/edge graph.

use alloc::vec;
use alloc::vec::Vec;

use super::{AxisId, Edge, EdgeId, ElementKind, NodeId, ParametricGraph, WallAxis};
use crate::error::{param, Error, Result};
use crate::geom::{point_segment_distance, project_param, segment_intersection, Point};
use crate::vectorizer::VectorScene;

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Joins two sets; the smaller root index survives.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Dense labels `0..k` in order of first appearance.
    pub(crate) fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut map = vec![usize::MAX; n];
        let mut labels = vec![0; n];
        let mut next = 0;
        for i in 0..n {
            let r = self.find(i);
            if map[r] == usize::MAX {
                map[r] = next;
                next += 1;
            }
            labels[i] = map[r];
        }
        (labels, next)
    }
}

/// Clusters points closer than `tol` (single linkage) and returns each
/// point's cluster label plus the cluster centroids.
fn cluster(points: &[Point], tol: f64) -> (Vec<usize>, Vec<Point>) {
    let mut uf = UnionFind::new(points.len());
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].distance(points[j]) <= tol {
                uf.union(i, j);
            }
        }
    }
    let (labels, k) = uf.labels();
    let mut sums = vec![(Point::default(), 0usize); k];
    for (p, &l) in points.iter().zip(&labels) {
        sums[l].0 = sums[l].0 + *p;
        sums[l].1 += 1;
    }
    let centroids = sums.into_iter().map(|(s, n)| s * (1.0 / n as f64)).collect();
    (labels, centroids)
}

/// Builds the wall graph of a scene.
///
/// Endpoints within `snap_tol` merge into one node at their centroid. An
/// endpoint within `snap_tol` of another segment's interior is projected
/// onto it and splits it (T-junction). Proper crossings split both
/// segments at a new node. Each edge starts out as its own axis.
pub fn build_graph(scene: &VectorScene, snap_tol: f64) -> Result<ParametricGraph> {
    if !(snap_tol > 0.0) || !snap_tol.is_finite() {
        return Err(param("snap tolerance must be positive"));
    }
    let segs: Vec<(Point, Point)> = scene
        .segments
        .iter()
        .filter(|s| s.p0.is_finite() && s.p1.is_finite() && s.length() > 0.0)
        .map(|s| (s.p0, s.p1))
        .collect();
    if segs.is_empty() {
        return Err(Error::EmptyScene);
    }

    let endpoints: Vec<Point> = segs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let (labels, mut nodes) = cluster(&endpoints, snap_tol);
    let mut lines: Vec<(usize, usize)> = (0..segs.len())
        .map(|i| (labels[2 * i], labels[2 * i + 1]))
        .filter(|(a, b)| a != b)
        .collect();
    lines.sort();
    lines.dedup_by(|x, y| (x.0 == y.0 && x.1 == y.1) || (x.0 == y.1 && x.1 == y.0));
    if lines.is_empty() {
        return Err(Error::EmptyScene);
    }

    // Interior split points per line, as node indices.
    let mut splits: Vec<Vec<usize>> = vec![Vec::new(); lines.len()];

    // T-junctions: pull near-miss nodes onto the closest line interior.
    for v in 0..nodes.len() {
        let p = nodes[v];
        let mut best: Option<(f64, usize)> = None;
        for (j, &(a, b)) in lines.iter().enumerate() {
            if a == v || b == v || splits[j].contains(&v) {
                continue;
            }
            let (pa, pb) = (nodes[a], nodes[b]);
            let d = point_segment_distance(p, pa, pb);
            if d > snap_tol {
                continue;
            }
            let t = project_param(p, pa, pb);
            let q = pa + (pb - pa) * t;
            if q.distance(pa) <= snap_tol || q.distance(pb) <= snap_tol {
                continue;
            }
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        if let Some((_, j)) = best {
            let (pa, pb) = (nodes[lines[j].0], nodes[lines[j].1]);
            nodes[v] = pa + (pb - pa) * project_param(p, pa, pb);
            splits[j].push(v);
        }
    }

    // Proper crossings away from existing nodes.
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a0, a1) = lines[i];
            let (b0, b1) = lines[j];
            if a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 {
                continue;
            }
            if let Some((_, _, x)) = segment_intersection(nodes[a0], nodes[a1], nodes[b0], nodes[b1]) {
                let near_existing = [a0, a1, b0, b1]
                    .iter()
                    .chain(splits[i].iter())
                    .chain(splits[j].iter())
                    .any(|&n| nodes[n].distance(x) <= snap_tol);
                if near_existing {
                    continue;
                }
                nodes.push(x);
                let id = nodes.len() - 1;
                splits[i].push(id);
                splits[j].push(id);
            }
        }
    }

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (j, &(a, b)) in lines.iter().enumerate() {
        let (pa, pb) = (nodes[a], nodes[b]);
        let mut chain: Vec<(f64, usize)> = vec![(0.0, a), (1.0, b)];
        chain.extend(splits[j].iter().map(|&n| (project_param(nodes[n], pa, pb), n)));
        chain.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for w in chain.windows(2) {
            edges.push((w[0].1, w[1].1));
        }
    }

    // Collapse any nodes the splitting brought within tolerance.
    loop {
        let (labels, merged) = cluster(&nodes, snap_tol);
        let changed = merged.len() != nodes.len();
        nodes = merged;
        for e in &mut edges {
            *e = (labels[e.0], labels[e.1]);
        }
        edges.retain(|e| e.0 != e.1);
        if !changed {
            break;
        }
    }
    for e in &mut edges {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    let mut seen = Vec::with_capacity(edges.len());
    edges.retain(|e| {
        if seen.contains(e) {
            false
        } else {
            seen.push(*e);
            true
        }
    });

    // Drop orphans, renumber densely.
    let mut used = vec![false; nodes.len()];
    for &(a, b) in &edges {
        used[a] = true;
        used[b] = true;
    }
    let mut remap = vec![u32::MAX; nodes.len()];
    let mut kept = Vec::new();
    for (i, p) in nodes.iter().enumerate() {
        if used[i] {
            remap[i] = kept.len() as u32;
            kept.push(*p);
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyScene);
    }
    let edges: Vec<Edge> = edges
        .iter()
        .map(|&(a, b)| Edge { a: NodeId(remap[a]), b: NodeId(remap[b]), kind: ElementKind::Wall })
        .collect();
    let mut graph = ParametricGraph { nodes: kept, edges, axes: Vec::new(), groups: Vec::new(), snap_tol };
    graph.axes = singleton_axes(&graph);
    Ok(graph)
}

pub(crate) fn singleton_axes(graph: &ParametricGraph) -> Vec<WallAxis> {
    graph
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (pa, pb) = graph.edge_endpoints(e);
            let direction = (pb - pa).normalized().unwrap_or(Point::new(1.0, 0.0)).canonical_direction();
            let node_ids = if (pb - pa).dot(direction) >= 0.0 { vec![e.a, e.b] } else { vec![e.b, e.a] };
            WallAxis {
                id: AxisId(i as u32),
                direction,
                node_ids,
                edge_ids: vec![EdgeId(i as u32)],
                anchor: pa.midpoint(pb),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorizer::LineSegment;

    fn scene(segs: &[((f64, f64), (f64, f64))]) -> VectorScene {
        VectorScene::new(
            100,
            100,
            segs.iter()
                .map(|&((a, b), (c, d))| LineSegment::new(Point::new(a, b), Point::new(c, d)))
                .collect(),
        )
    }

    #[test]
    fn near_endpoints_merge_at_centroid() {
        let g = build_graph(&scene(&[((0.0, 0.0), (10.0, 0.0)), ((10.5, 0.2), (10.5, 8.0))]), 1.0).unwrap();
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.edges.len(), 2);
        assert!(g.nodes.iter().any(|p| p.distance(Point::new(10.25, 0.1)) < 1e-12));
        g.check_invariants().unwrap();
    }

    #[test]
    fn crossing_splits_both_segments() {
        let g = build_graph(&scene(&[((0.0, 5.0), (10.0, 5.0)), ((5.0, 0.0), (5.0, 10.0))]), 1.0).unwrap();
        assert_eq!(g.nodes.len(), 5);
        assert_eq!(g.edges.len(), 4);
        assert!(g.nodes.contains(&Point::new(5.0, 5.0)));
        g.check_invariants().unwrap();
    }

    #[test]
    fn near_miss_t_junction_snaps_onto_bar() {
        let g = build_graph(&scene(&[((0.0, 0.0), (20.0, 0.0)), ((8.0, 1.5), (8.0, 15.0))]), 2.0).unwrap();
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.edges.len(), 3);
        assert!(g.nodes.contains(&Point::new(8.0, 0.0)));
    }

    #[test]
    fn overshoot_stub_is_absorbed() {
        let g = build_graph(&scene(&[((0.0, 0.0), (20.0, 0.0)), ((8.0, -1.0), (8.0, 15.0))]), 2.0).unwrap();
        assert_eq!(g.nodes.len(), 4, "{:?}", g.nodes);
        assert_eq!(g.edges.len(), 3);
    }

    #[test]
    fn empty_scene_is_an_error() {
        assert_eq!(build_graph(&scene(&[]), 1.0), Err(Error::EmptyScene));
        assert!(matches!(build_graph(&scene(&[((0.0, 0.0), (1.0, 0.0))]), 0.0), Err(Error::Param(_))));
    }
}
