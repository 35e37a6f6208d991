use std::collections::BTreeMap;

use serde::Serialize;

use super::TransitSchedule;
use crate::diagnostics::Diagnostic;
use crate::network::{EdgeIdx, RoadNetwork};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacedStop {
    pub stop_id: String,
    pub edge_id: String,
    #[serde(skip)]
    pub edge: EdgeIdx,
    pub offset_m: f64,
}

#[derive(Debug, Clone, Default)]
pub struct StopPlacements {
    pub placed: BTreeMap<String, PlacedStop>,
    /// Stop id to the reason it could not be placed.
    pub unplaceable: BTreeMap<String, String>,
}

impl StopPlacements {
    pub fn get(&self, stop_id: &str) -> Option<&PlacedStop> {
        self.placed.get(stop_id)
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.unplaceable
            .iter()
            .map(|(id, why)| Diagnostic::warning(format!("stop {id}"), format!("unplaceable: {why}")))
            .collect()
    }
}

/// Snaps every stop to its nearest edge within `radius_m`.
pub fn place_stops(schedule: &TransitSchedule, net: &RoadNetwork, radius_m: f64) -> StopPlacements {
    let mut out = StopPlacements::default();
    for stop in schedule.stops.values() {
        match net.snap_to_edge(stop.pos, radius_m) {
            Ok(snap) => {
                out.placed.insert(
                    stop.id.clone(),
                    PlacedStop {
                        stop_id: stop.id.clone(),
                        edge_id: net.edge(snap.edge).id.clone(),
                        edge: snap.edge,
                        offset_m: snap.offset_m,
                    },
                );
            }
            Err(e) => {
                out.unplaceable.insert(stop.id.clone(), e.to_string());
            }
        }
    }
    out
}
