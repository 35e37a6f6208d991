use std::collections::BTreeMap;
use std::path::Path;

use super::{EdgeIdx, RoadNetwork};
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::geometry::{polygon_contains, Point};

pub type ZoneRing = Vec<Point<f64>>;

/// Parses TAZ polygons from JSON: `{"taz_id": [[x, y], ...], ...}`.
pub fn parse_taz_zones(json: &str) -> Result<BTreeMap<String, ZoneRing>> {
    let raw: BTreeMap<String, Vec<[f64; 2]>> =
        serde_json::from_str(json).map_err(|e| Error::Network(format!("TAZ json: {e}")))?;
    let mut zones = BTreeMap::new();
    for (id, ring) in raw {
        if ring.len() < 3 {
            return Err(Error::Network(format!("TAZ {id} has fewer than 3 vertices")));
        }
        zones.insert(id, ring.into_iter().map(|[x, y]| Point::new(x, y)).collect());
    }
    Ok(zones)
}

pub fn load_taz_zones(path: &Path) -> Result<BTreeMap<String, ZoneRing>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_taz_zones(&text)
}

/// Zones with their member edges. Each edge belongs to at most one zone.
#[derive(Debug, Clone, Default)]
pub struct TazPartition {
    zones: BTreeMap<String, ZoneRing>,
    membership: Vec<Option<String>>,
    members: BTreeMap<String, Vec<EdgeIdx>>,
}

impl TazPartition {
    pub fn zones(&self) -> &BTreeMap<String, ZoneRing> {
        &self.zones
    }

    pub fn zone_of(&self, edge: EdgeIdx) -> Option<&str> {
        self.membership.get(edge.0).and_then(|z| z.as_deref())
    }

    /// Member edges of a zone in id order; empty for unknown zones.
    pub fn members(&self, taz: &str) -> &[EdgeIdx] {
        self.members.get(taz).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains_zone(&self, taz: &str) -> bool {
        self.zones.contains_key(taz)
    }

    pub fn unassigned(&self) -> Vec<EdgeIdx> {
        self.membership
            .iter()
            .enumerate()
            .filter(|(_, z)| z.is_none())
            .map(|(i, _)| EdgeIdx(i))
            .collect()
    }
}

/// Assigns each edge to the zone containing its midpoint.
///
/// Zone boundaries are closed; a midpoint on a shared boundary goes to the
/// zone with the lexicographically smallest id.
pub fn assign_edges_to_taz(
    net: &RoadNetwork,
    zones: BTreeMap<String, ZoneRing>,
) -> (TazPartition, Vec<Diagnostic>) {
    let mut membership = Vec::with_capacity(net.edges().len());
    let mut members: BTreeMap<String, Vec<EdgeIdx>> =
        zones.keys().map(|k| (k.clone(), Vec::new())).collect();
    let mut diags = Vec::new();
    for i in 0..net.edges().len() {
        let mid = net.edge_midpoint(EdgeIdx(i));
        // BTreeMap iterates in id order, so the first hit is the smallest id.
        let zone = zones
            .iter()
            .find(|(_, ring)| polygon_contains(ring, mid))
            .map(|(id, _)| id.clone());
        match &zone {
            Some(z) => members.get_mut(z).expect("zone present").push(EdgeIdx(i)),
            None => diags.push(Diagnostic::warning(
                format!("edge {}", net.edges()[i].id),
                "midpoint outside every TAZ; edge unassigned",
            )),
        }
        membership.push(zone);
    }
    for (z, m) in &members {
        if m.is_empty() {
            diags.push(Diagnostic::warning(format!("taz {z}"), "zone has no member edges"));
        }
    }
    (
        TazPartition {
            zones,
            membership,
            members,
        },
        diags,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::EdgeSpec;

    fn net_with_midpoints(mids: &[(f64, f64)]) -> RoadNetwork {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (i, (x, y)) in mids.iter().enumerate() {
            nodes.push((format!("s{i}"), Point::new(x - 1.0, *y)));
            nodes.push((format!("t{i}"), Point::new(x + 1.0, *y)));
            edges.push(EdgeSpec {
                id: format!("e{i}"),
                from: format!("s{i}"),
                to: format!("t{i}"),
                length_m: 2.0,
                speed_limit_mps: 10.0,
                lanes: 1,
            });
        }
        RoadNetwork::from_parts(nodes, edges).unwrap()
    }

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> ZoneRing {
        vec![Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)]
    }

    #[test]
    fn interior_boundary_and_exterior_midpoints() {
        let net = net_with_midpoints(&[(5.0, 5.0), (10.0, 5.0), (50.0, 50.0)]);
        let mut zones = BTreeMap::new();
        zones.insert("west".to_string(), rect(0.0, 0.0, 10.0, 10.0));
        zones.insert("east".to_string(), rect(10.0, 0.0, 20.0, 10.0));
        let (part, diags) = assign_edges_to_taz(&net, zones);
        assert_eq!(part.zone_of(EdgeIdx(0)), Some("west"));
        // shared boundary x = 10: "east" < "west"
        assert_eq!(part.zone_of(EdgeIdx(1)), Some("east"));
        assert_eq!(part.zone_of(EdgeIdx(2)), None);
        assert_eq!(part.unassigned(), vec![EdgeIdx(2)]);
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn parses_json_rings() {
        let zones = parse_taz_zones(r#"{"Z1": [[0,0],[10,0],[10,10],[0,10]]}"#).unwrap();
        assert_eq!(zones["Z1"].len(), 4);
        assert!(parse_taz_zones(r#"{"Z1": [[0,0],[10,0]]}"#).is_err());
    }
}
