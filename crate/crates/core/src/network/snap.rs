use std::collections::HashMap;

use super::{Edge, EdgeIdx, Node, RoadNetwork};
use crate::error::{Error, Result};
use crate::geometry::{project_onto_segment, Point};

const CELL_M: f64 = 250.0;
/// Distances closer than this are treated as ties and resolved by edge id.
pub(crate) const SNAP_TIE_M: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub edge: EdgeIdx,
    /// Distance along the edge, in `[0, length_m]`.
    pub offset_m: f64,
    /// Perpendicular distance from the query point.
    pub distance_m: f64,
}

/// Uniform bucket grid over edge bounding boxes.
#[derive(Debug, Clone, Default)]
pub(crate) struct SpatialGrid {
    cells: HashMap<(i64, i64), Vec<EdgeIdx>>,
}

fn cell_of(v: f64) -> i64 {
    (v / CELL_M).floor() as i64
}

impl SpatialGrid {
    pub(crate) fn build(nodes: &[Node], edges: &[Edge]) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<EdgeIdx>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            let (a, b) = (nodes[e.from.0].pos, nodes[e.to.0].pos);
            for cx in cell_of(a.x.min(b.x))..=cell_of(a.x.max(b.x)) {
                for cy in cell_of(a.y.min(b.y))..=cell_of(a.y.max(b.y)) {
                    cells.entry((cx, cy)).or_default().push(EdgeIdx(i));
                }
            }
        }
        Self { cells }
    }

    fn candidates(&self, p: Point<f64>, radius: f64, edge_count: usize) -> Option<Vec<EdgeIdx>> {
        let (x0, x1) = (cell_of(p.x - radius), cell_of(p.x + radius));
        let (y0, y1) = (cell_of(p.y - radius), cell_of(p.y + radius));
        let span = (x1 - x0 + 1).saturating_mul(y1 - y0 + 1);
        if span as u128 > (4 * edge_count.max(1)) as u128 {
            return None;
        }
        let mut out = Vec::new();
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                if let Some(v) = self.cells.get(&(cx, cy)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Some(out)
    }
}

impl RoadNetwork {
    /// Nearest edge to `p` within `max_radius_m`; ties within 1e-9 m go to the smaller edge id.
    pub fn snap_to_edge(&self, p: Point<f64>, max_radius_m: f64) -> Result<Snap> {
        if max_radius_m.is_nan() || max_radius_m <= 0.0 {
            return Err(Error::Network(format!("snap radius must be positive, got {max_radius_m}")));
        }
        let candidates = self
            .grid
            .candidates(p, max_radius_m, self.edges.len())
            .unwrap_or_else(|| (0..self.edges.len()).map(EdgeIdx).collect());
        let mut best: Option<Snap> = None;
        for idx in candidates {
            let (a, b) = self.edge_endpoints(idx);
            let proj = project_onto_segment(p, a, b);
            if proj.distance > max_radius_m {
                continue;
            }
            let snap = Snap {
                edge: idx,
                offset_m: proj.fraction * self.edge(idx).length_m,
                distance_m: proj.distance,
            };
            best = match best {
                None => Some(snap),
                Some(cur) => {
                    if snap.distance_m < cur.distance_m - SNAP_TIE_M
                        || (snap.distance_m <= cur.distance_m + SNAP_TIE_M && snap.edge < cur.edge)
                    {
                        Some(snap)
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        best.ok_or_else(|| {
            Error::Network(format!(
                "no edge within {max_radius_m} m of ({}, {})",
                p.x, p.y
            ))
        })
    }
}
