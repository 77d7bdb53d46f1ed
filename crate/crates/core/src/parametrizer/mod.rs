//! Constrained parametric floorplan graphs.
//!
//! [`build_graph`] turns vector segments into nodes and wall edges,
//! [`merge_collinear`] chains collinear edges into [`WallAxis`] units,
//! [`apply_translation`] slides an axis along its normal while every
//! incident wall follows, and [`instantiate`] applies a whole assignment of
//! design variables to produce a [`FloorplanLayout`].

mod axes;
mod build;
mod transform;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use axes::{collect_axis_nodes, group_elements, merge_collinear};
pub use build::build_graph;
pub use transform::{apply_translation, instantiate, instantiate_graph, validate_layout, Assignment};

use crate::error::{param, Error, Result};
use crate::geom::Point;

pub const DEFAULT_SNAP_TOL: f64 = 4.0;
pub const DEFAULT_ANGLE_TOL: f64 = 0.087_266_462_599_716_48; // 5 degrees
pub const DEFAULT_COLLINEAR_TOL: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxisId(pub u32);

impl fmt::Display for AxisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axis {}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: ElementKind,
}

/// A maximal chain of connected collinear wall edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WallAxis {
    pub id: AxisId,
    /// Unit vector whose leading nonzero component is positive.
    pub direction: Point,
    /// Member nodes ordered by projection onto `direction`.
    pub node_ids: Vec<NodeId>,
    pub edge_ids: Vec<EdgeId>,
    /// A point on the axis line (member centroid).
    pub anchor: Point,
}

impl WallAxis {
    /// `direction` turned a quarter so that `(0, 1)` maps to `(1, 0)`.
    pub fn normal(&self) -> Point {
        self.direction.quarter_turn()
    }
}

/// Grouping criteria for [`group_elements`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupCriterion {
    ByAxis,
    ByConnectivity,
    ByAdjacentNodes { radius: f64 },
}

impl GroupCriterion {
    pub fn tag(&self) -> &'static str {
        match self {
            GroupCriterion::ByAxis => "by_axis",
            GroupCriterion::ByConnectivity => "by_connectivity",
            GroupCriterion::ByAdjacentNodes { .. } => "by_adjacent_nodes",
        }
    }
}

impl FromStr for GroupCriterion {
    type Err = Error;

    /// Accepts `by_axis`, `by_connectivity` and `by_adjacent_nodes:<radius>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "by_axis" => Ok(Self::ByAxis),
            "by_connectivity" => Ok(Self::ByConnectivity),
            _ => {
                let radius = s
                    .strip_prefix("by_adjacent_nodes:")
                    .and_then(|r| r.parse::<f64>().ok())
                    .ok_or_else(|| param(alloc::format!("unknown grouping criterion '{s}'")))?;
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(param("adjacent-node radius must be positive"));
                }
                Ok(Self::ByAdjacentNodes { radius })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub id: u32,
    pub criterion: String,
    pub node_ids: Vec<NodeId>,
}

/// Nodes, wall edges, collinear axes and groups of one floorplan.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricGraph {
    pub nodes: Vec<Point>,
    pub edges: Vec<Edge>,
    pub axes: Vec<WallAxis>,
    pub groups: Vec<Group>,
    pub snap_tol: f64,
}

impl ParametricGraph {
    pub fn node(&self, id: NodeId) -> Point {
        self.nodes[id.0 as usize]
    }

    pub fn axis(&self, id: AxisId) -> Result<&WallAxis> {
        self.axes
            .iter()
            .find(|a| a.id == id)
            .ok_or_else(|| Error::NotFound(alloc::format!("{id}")))
    }

    pub fn edge_endpoints(&self, e: &Edge) -> (Point, Point) {
        (self.node(e.a), self.node(e.b))
    }

    /// Sorted undirected adjacency pairs, used to compare topology.
    pub fn adjacency(&self) -> Vec<(NodeId, NodeId)> {
        let mut pairs: Vec<_> = self
            .edges
            .iter()
            .map(|e| if e.a <= e.b { (e.a, e.b) } else { (e.b, e.a) })
            .collect();
        pairs.sort();
        pairs
    }

    /// Node degree per node id.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0usize; self.nodes.len()];
        for e in &self.edges {
            deg[e.a.0 as usize] += 1;
            deg[e.b.0 as usize] += 1;
        }
        deg
    }

    /// Checks the structural invariants; returns the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.nodes.len() as u32;
        for (i, e) in self.edges.iter().enumerate() {
            if e.a.0 >= n || e.b.0 >= n || e.a == e.b {
                return Err(param(alloc::format!("edge {i} has invalid endpoints")));
            }
        }
        if self.degrees().iter().any(|&d| d == 0) {
            return Err(param("orphan node"));
        }
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                if self.nodes[i].distance(self.nodes[j]) < self.snap_tol {
                    return Err(param(alloc::format!("nodes {i} and {j} closer than snap tolerance")));
                }
            }
        }
        let mut owner = alloc::vec![0usize; self.edges.len()];
        for axis in &self.axes {
            for e in &axis.edge_ids {
                owner[e.0 as usize] += 1;
            }
        }
        if owner.iter().any(|&c| c != 1) {
            return Err(param("axes do not partition the edge set"));
        }
        Ok(())
    }
}

/// Wall centerlines and node positions of one instantiated design.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorplanLayout {
    /// One polyline per wall axis, following the axis node order.
    pub polylines: Vec<Vec<Point>>,
    pub node_positions: Vec<Point>,
    pub edges: Vec<(NodeId, NodeId)>,
}
