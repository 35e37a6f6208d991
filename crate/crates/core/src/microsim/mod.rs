//! Deterministic 1 Hz microsimulation of buses, background traffic and riders.

mod aggregate;
mod engine;
mod krauss;
mod output;
mod stops;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_edges, EdgeAccumulator};
pub use engine::run_simulation;
pub use krauss::{car_following_step, safe_speed, KraussParams, Leader};
pub use output::{
    edge_intervals_from_csv, edge_intervals_to_csv, person_outcomes_from_csv, person_outcomes_to_csv,
    stop_events_from_csv, stop_events_to_csv, trajectories_from_csv, trajectories_to_csv,
};
pub use stops::{dwell_time_s, service_stop, DwellParams, Exchange};

use crate::demand::{PersonTrip, VehicleTrip};
use crate::diagnostics::Diagnostic;
use crate::network::{EdgeIdx, RoadNetwork};
use crate::router::{shortest_vehicle_path, JourneyOutcome};
use crate::transit::BusTripPlan;
use crate::vehicles::VehicleCatalog;

/// Reaction time used by every driver.
pub const TAU_S: f64 = 1.0;
/// How far ahead along its route a driver looks for a leader.
pub const LOOKAHEAD_M: f64 = 200.0;
/// A bus is at its stop once its front is within this distance.
pub const STOP_REACH_M: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t_s: u32,
    pub vehicle_id: Arc<str>,
    pub type_id: Arc<str>,
    pub edge_id: Arc<str>,
    /// Front bumper distance from the edge start.
    pub position_m: f64,
    pub speed_mps: f64,
    pub accel_mps2: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopEvent {
    pub trip_id: String,
    pub stop_id: String,
    pub arrival_s: u32,
    pub departure_s: u32,
    pub boarded: u32,
    pub alighted: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInterval {
    pub edge_id: String,
    pub t0_s: u32,
    pub t1_s: u32,
    pub mean_speed_mps: f64,
    pub density_veh_per_km: f64,
    pub occupancy: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersonStatus {
    Arrived,
    Unfinished,
    Unserved,
}

impl PersonStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PersonStatus::Arrived => "arrived",
            PersonStatus::Unfinished => "unfinished",
            PersonStatus::Unserved => "unserved",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "arrived" => PersonStatus::Arrived,
            "unfinished" => PersonStatus::Unfinished,
            "unserved" => PersonStatus::Unserved,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersonOutcome {
    pub person_id: String,
    pub status: PersonStatus,
    pub depart_s: f64,
    pub arrive_s: Option<f64>,
}

/// Background trip with its precomputed route.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedVehicle {
    pub trip: VehicleTrip,
    pub path: Vec<EdgeIdx>,
}

/// Routes every background trip on free-flow shortest paths; unreachable trips are dropped with a warning.
pub fn route_background(net: &RoadNetwork, trips: &[VehicleTrip]) -> (Vec<RoutedVehicle>, Vec<Diagnostic>) {
    let mut cache: BTreeMap<(EdgeIdx, EdgeIdx), Option<Vec<EdgeIdx>>> = BTreeMap::new();
    let mut out = Vec::with_capacity(trips.len());
    let mut diags = Vec::new();
    for t in trips {
        let path = cache
            .entry((t.origin_edge, t.dest_edge))
            .or_insert_with(|| shortest_vehicle_path(net, t.origin_edge, t.dest_edge).ok().map(|p| p.edges));
        match path {
            Some(p) => out.push(RoutedVehicle {
                trip: t.clone(),
                path: p.clone(),
            }),
            None => diags.push(Diagnostic::warning(
                format!("vehicle {}", t.id),
                format!(
                    "no route from {} to {}; trip dropped",
                    net.edge(t.origin_edge).id,
                    net.edge(t.dest_edge).id
                ),
            )),
        }
    }
    (out, diags)
}

/// Everything a run consumes.
#[derive(Debug, Clone, Copy)]
pub struct World<'a> {
    pub net: &'a RoadNetwork,
    pub catalog: &'a VehicleCatalog,
    pub bus_trips: &'a [BusTripPlan],
    pub persons: &'a [PersonTrip],
    /// One outcome per entry of `persons`.
    pub person_plans: &'a [JourneyOutcome],
    pub vehicles: &'a [RoutedVehicle],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub start_s: u32,
    pub end_s: u32,
    pub seed: u64,
    pub sampling_period_s: u32,
    pub dwell: DwellParams,
    /// Also record background vehicles in the trajectory stream.
    pub record_background: bool,
}

impl SimParams {
    pub fn new(start_s: u32, end_s: u32, seed: u64) -> Self {
        Self {
            start_s,
            end_s,
            seed,
            sampling_period_s: 900,
            dwell: DwellParams::default(),
            record_background: false,
        }
    }
}

/// Internal checks gathered while running.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimStats {
    /// Smallest bumper gap between consecutive vehicles on one edge over all ticks.
    pub min_gap_m: Option<f64>,
    /// Largest onboard count relative to capacity at any tick.
    pub max_load_factor: f64,
    pub vehicles_inserted: usize,
    pub vehicles_completed: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulationOutputs {
    pub trajectories: Vec<TrajectoryRecord>,
    pub stop_events: Vec<StopEvent>,
    pub edge_intervals: Vec<EdgeInterval>,
    pub person_outcomes: Vec<PersonOutcome>,
    /// Onboard count just before each stop event's arrival, aligned with `stop_events`.
    pub onboard_before_arrival: Vec<u32>,
    /// Riders still aboard when the bus left the simulation, per simulated trip.
    pub final_onboard: BTreeMap<String, u32>,
    pub stats: SimStats,
}
