//! Road network: nodes in a local planar projection and directed edges.
//!
//! Text format, one record per line, `#` starts a comment:
//!
//! ```text
//! node <id> <x> <y>
//! edge <id> <from> <to> <length_m> <speed_mps> <lanes>
//! ```

mod components;
mod snap;
mod taz;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use components::{strongly_connected_components, weakly_connected_components};
pub use snap::Snap;
pub use taz::{assign_edges_to_taz, load_taz_zones, parse_taz_zones, TazPartition, ZoneRing};

use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Tolerance on the chord check; edges may be curved but never shorter than the chord.
const CHORD_TOLERANCE: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeIdx(pub usize);

/// Index of an edge. Edges are stored sorted by id, so index order is id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeIdx(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub pos: Point<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: NodeIdx,
    pub to: NodeIdx,
    pub length_m: f64,
    pub speed_limit_mps: f64,
    pub lanes: u32,
}

impl Edge {
    pub fn free_flow_time(&self) -> f64 {
        self.length_m / self.speed_limit_mps
    }
}

/// Raw edge record prior to validation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length_m: f64,
    pub speed_limit_mps: f64,
    pub lanes: u32,
}

#[derive(Debug, Clone)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, NodeIdx>,
    edge_index: HashMap<String, EdgeIdx>,
    out_edges: Vec<Vec<EdgeIdx>>,
    in_edges: Vec<Vec<EdgeIdx>>,
    grid: snap::SpatialGrid,
}

impl RoadNetwork {
    /// Builds and validates a network from node and edge records.
    pub fn from_parts(nodes: Vec<(String, Point<f64>)>, edges: Vec<EdgeSpec>) -> Result<Self> {
        let mut nodes: Vec<Node> = nodes
            .into_iter()
            .map(|(id, pos)| Node { id, pos })
            .collect();
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !n.pos.x.is_finite() || !n.pos.y.is_finite() {
                return Err(Error::Network(format!("node {} has non-finite coordinates", n.id)));
            }
            if node_index.insert(n.id.clone(), NodeIdx(i)).is_some() {
                return Err(Error::Network(format!("duplicate node id {}", n.id)));
            }
        }

        let mut specs = edges;
        specs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut edges = Vec::with_capacity(specs.len());
        let mut edge_index = HashMap::with_capacity(specs.len());
        for (i, s) in specs.into_iter().enumerate() {
            let from = *node_index
                .get(&s.from)
                .ok_or_else(|| Error::Network(format!("edge {} references unknown node {}", s.id, s.from)))?;
            let to = *node_index
                .get(&s.to)
                .ok_or_else(|| Error::Network(format!("edge {} references unknown node {}", s.id, s.to)))?;
            if !s.length_m.is_finite() || s.length_m <= 0.0 {
                return Err(Error::Network(format!("edge {} has nonpositive length {}", s.id, s.length_m)));
            }
            if !s.speed_limit_mps.is_finite() || s.speed_limit_mps <= 0.0 {
                return Err(Error::Network(format!(
                    "edge {} has nonpositive speed {}",
                    s.id, s.speed_limit_mps
                )));
            }
            if s.lanes == 0 {
                return Err(Error::Network(format!("edge {} has zero lanes", s.id)));
            }
            let chord = nodes[from.0].pos.distance(nodes[to.0].pos);
            if s.length_m < chord * CHORD_TOLERANCE {
                return Err(Error::Network(format!(
                    "edge {} length {} is shorter than its chord {chord:.3}",
                    s.id, s.length_m
                )));
            }
            if edge_index.insert(s.id.clone(), EdgeIdx(i)).is_some() {
                return Err(Error::Network(format!("duplicate edge id {}", s.id)));
            }
            edges.push(Edge {
                id: s.id,
                from,
                to,
                length_m: s.length_m,
                speed_limit_mps: s.speed_limit_mps,
                lanes: s.lanes,
            });
        }

        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from.0].push(EdgeIdx(i));
            in_edges[e.to.0].push(EdgeIdx(i));
        }
        let grid = snap::SpatialGrid::build(&nodes, &edges);
        Ok(Self {
            nodes,
            edges,
            node_index,
            edge_index,
            out_edges,
            in_edges,
            grid,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: EdgeIdx) -> &Edge {
        &self.edges[idx.0]
    }

    pub fn node(&self, idx: NodeIdx) -> &Node {
        &self.nodes[idx.0]
    }

    pub fn edge_idx(&self, id: &str) -> Option<EdgeIdx> {
        self.edge_index.get(id).copied()
    }

    pub fn node_idx(&self, id: &str) -> Option<NodeIdx> {
        self.node_index.get(id).copied()
    }

    /// Edges leaving the head node of `edge`, in id order.
    pub fn successors(&self, edge: EdgeIdx) -> &[EdgeIdx] {
        &self.out_edges[self.edges[edge.0].to.0]
    }

    pub fn out_edges(&self, node: NodeIdx) -> &[EdgeIdx] {
        &self.out_edges[node.0]
    }

    pub fn in_edges(&self, node: NodeIdx) -> &[EdgeIdx] {
        &self.in_edges[node.0]
    }

    pub fn edge_endpoints(&self, idx: EdgeIdx) -> (Point<f64>, Point<f64>) {
        let e = &self.edges[idx.0];
        (self.nodes[e.from.0].pos, self.nodes[e.to.0].pos)
    }

    pub fn edge_midpoint(&self, idx: EdgeIdx) -> Point<f64> {
        let (a, b) = self.edge_endpoints(idx);
        a.midpoint(b)
    }

    /// Planar position of a point `offset_m` along the edge.
    pub fn point_on_edge(&self, idx: EdgeIdx, offset_m: f64) -> Point<f64> {
        let (a, b) = self.edge_endpoints(idx);
        let frac = (offset_m / self.edges[idx.0].length_m).clamp(0.0, 1.0);
        a.lerp(b, frac)
    }

    pub fn max_speed_limit(&self) -> f64 {
        self.edges.iter().map(|e| e.speed_limit_mps).fold(0.0, f64::max)
    }

    /// Structural warnings: dead ends and disconnected components.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if self.out_edges[i].is_empty() {
                diags.push(Diagnostic::warning(format!("node {}", n.id), "dead end: no outgoing edges"));
            }
            if self.in_edges[i].is_empty() {
                diags.push(Diagnostic::warning(format!("node {}", n.id), "unreachable: no incoming edges"));
            }
        }
        let comps = weakly_connected_components(self);
        if comps.len() > 1 {
            for (k, comp) in comps.iter().enumerate() {
                let ids: Vec<&str> = comp.iter().map(|n| self.nodes[n.0].id.as_str()).collect();
                diags.push(Diagnostic::warning(
                    format!("component {k}"),
                    format!("disconnected component: {}", ids.join(" ")),
                ));
            }
        }
        diags
    }

    /// Serializes to the text format; `parse_network(to_text())` reproduces the graph.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(out, "node {} {:?} {:?}", n.id, n.pos.x, n.pos.y);
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "edge {} {} {} {:?} {:?} {}",
                e.id, self.nodes[e.from.0].id, self.nodes[e.to.0].id, e.length_m, e.speed_limit_mps, e.lanes
            );
        }
        out
    }
}

/// Parses the network text format. `origin` names the source in errors.
pub fn parse_network(text: &str, origin: &Path) -> Result<(RoadNetwork, Vec<Diagnostic>)> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::format(origin, lineno + 1, msg.to_string());
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::format(origin, lineno + 1, format!("malformed {what} `{s}`")))
        };
        match fields[0] {
            "node" => {
                if fields.len() != 4 {
                    return Err(bad("expected `node id x y`"));
                }
                nodes.push((fields[1].to_string(), Point::new(num(fields[2], "x")?, num(fields[3], "y")?)));
            }
            "edge" => {
                if fields.len() != 7 {
                    return Err(bad("expected `edge id from to length speed lanes`"));
                }
                let lanes = fields[6]
                    .parse::<u32>()
                    .map_err(|_| bad(&format!("malformed lanes `{}`", fields[6])))?;
                edges.push(EdgeSpec {
                    id: fields[1].to_string(),
                    from: fields[2].to_string(),
                    to: fields[3].to_string(),
                    length_m: num(fields[4], "length")?,
                    speed_limit_mps: num(fields[5], "speed")?,
                    lanes,
                });
            }
            other => return Err(bad(&format!("unknown record type `{other}`"))),
        }
    }
    let net = RoadNetwork::from_parts(nodes, edges)?;
    let diags = net.diagnostics();
    Ok((net, diags))
}

pub fn load_network(path: &Path) -> Result<(RoadNetwork, Vec<Diagnostic>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_network(&text, path)
}
