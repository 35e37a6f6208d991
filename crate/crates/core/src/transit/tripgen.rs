use std::collections::BTreeMap;

use super::{DayType, StopPlacements, TransitSchedule};
use crate::error::{Error, Result};
use crate::network::{EdgeIdx, RoadNetwork};
use crate::router::{shortest_loop_path, shortest_vehicle_path};

/// Which trips to plan and how to type them.
#[derive(Debug, Clone, Copy)]
pub struct TripSelection<'a> {
    pub day: DayType,
    pub start_s: u32,
    pub end_s: u32,
    /// Trip id to vehicle type id.
    pub trip_types: &'a BTreeMap<String, String>,
}

impl TripSelection<'_> {
    pub fn selects(&self, schedule: &TransitSchedule, trip_id: &str) -> bool {
        schedule.trip_runs_on(trip_id, self.day)
            && schedule
                .first_departure(trip_id)
                .is_some_and(|d| d >= self.start_s && d < self.end_s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedStop {
    pub stop_id: String,
    pub edge: EdgeIdx,
    pub offset_m: f64,
    /// Position of the stop's edge within the plan path.
    pub path_index: usize,
    pub arrival_s: u32,
    pub departure_s: u32,
}

impl PlannedStop {
    pub fn scheduled_dwell_s(&self) -> u32 {
        self.departure_s - self.arrival_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusTripPlan {
    pub trip_id: String,
    pub route_id: String,
    pub block_id: Option<String>,
    pub vehicle_type_id: String,
    pub depart_s: u32,
    pub stops: Vec<PlannedStop>,
    /// Edge path from the first stop's edge to the last stop's edge.
    pub path: Vec<EdgeIdx>,
}

/// One plan per selected trip, in trip id order.
///
/// Consecutive stops are joined by free-flow shortest paths computed once here.
pub fn generate_bus_trips(
    schedule: &TransitSchedule,
    placements: &StopPlacements,
    net: &RoadNetwork,
    selection: &TripSelection<'_>,
) -> Result<Vec<BusTripPlan>> {
    let mut plans = Vec::new();
    for trip in schedule.trips.values() {
        if !selection.selects(schedule, &trip.id) {
            continue;
        }
        let times = &schedule.stop_times[&trip.id];
        let vehicle_type_id = selection
            .trip_types
            .get(&trip.id)
            .ok_or_else(|| Error::Scenario(format!("trip {} has no vehicle type", trip.id)))?
            .clone();

        let mut stops: Vec<PlannedStop> = Vec::with_capacity(times.len());
        let mut path: Vec<EdgeIdx> = Vec::new();
        for st in times {
            let placed = placements.get(&st.stop_id).ok_or_else(|| {
                Error::Routing(format!("trip {} visits unplaced stop {}", trip.id, st.stop_id))
            })?;
            match stops.last() {
                None => path.push(placed.edge),
                Some(prev) => {
                    let leg = if prev.edge == placed.edge && placed.offset_m >= prev.offset_m {
                        Vec::new()
                    } else if prev.edge == placed.edge {
                        shortest_loop_path(net, prev.edge)?.edges
                    } else {
                        shortest_vehicle_path(net, prev.edge, placed.edge)
                            .map_err(|_| {
                                Error::Routing(format!(
                                    "trip {}: no path from stop {} to stop {}",
                                    trip.id, prev.stop_id, st.stop_id
                                ))
                            })?
                            .edges
                    };
                    path.extend(leg.into_iter().skip(1));
                }
            }
            stops.push(PlannedStop {
                stop_id: st.stop_id.clone(),
                edge: placed.edge,
                offset_m: placed.offset_m,
                path_index: path.len() - 1,
                arrival_s: st.arrival_s,
                departure_s: st.departure_s,
            });
        }
        plans.push(BusTripPlan {
            trip_id: trip.id.clone(),
            route_id: trip.route_id.clone(),
            block_id: trip.block_id.clone(),
            vehicle_type_id,
            depart_s: times[0].departure_s,
            stops,
            path,
        });
    }
    Ok(plans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transit::fixtures::write_feed;
    use crate::transit::{load_gtfs, place_stops};

    // Two perpendicular two-way corridors from the origin: x axis and y axis.
    fn corridor_net(with_y_axis: bool) -> RoadNetwork {
        let mut text = String::from(
            "node o 0 0\nnode x1 100 0\nnode x2 200 0\nnode x3 300 0\n\
             edge ox1 o x1 100 10 1\nedge x1x2 x1 x2 100 10 1\nedge x2x3 x2 x3 100 10 1\n\
             edge x3x2 x3 x2 100 10 1\nedge x2x1 x2 x1 100 10 1\nedge x1o x1 o 100 10 1\n",
        );
        if with_y_axis {
            text.push_str(
                "node y1 0 100\nnode y2 0 200\nnode y3 0 300\n\
                 edge oy1 o y1 100 10 1\nedge y1y2 y1 y2 100 10 1\nedge y2y3 y2 y3 100 10 1\n\
                 edge y3y2 y3 y2 100 10 1\nedge y2y1 y2 y1 100 10 1\nedge y1o y1 o 100 10 1\n",
            );
        } else {
            text.push_str("node y1 0 100\nnode y2 0 200\nnode y3 0 300\nedge y1y2 y1 y2 100 10 1\nedge y2y3 y2 y3 100 10 1\n");
        }
        crate::network::parse_network(&text, std::path::Path::new("test.net")).unwrap().0
    }

    fn all_types(s: &TransitSchedule) -> BTreeMap<String, String> {
        s.trips.keys().map(|t| (t.clone(), "Bus".to_string())).collect()
    }

    #[test]
    fn window_filter_keeps_morning_weekday_trips() {
        let dir = tempfile::tempdir().unwrap();
        write_feed(dir.path(), &[]);
        let s = load_gtfs(dir.path()).unwrap();
        let net = corridor_net(true);
        let p = place_stops(&s, &net, 50.0);
        let types = all_types(&s);
        let sel = TripSelection {
            day: DayType::Weekday,
            start_s: 0,
            end_s: 43_200,
            trip_types: &types,
        };
        let plans = generate_bus_trips(&s, &p, &net, &sel).unwrap();
        let ids: Vec<&str> = plans.iter().map(|p| p.trip_id.as_str()).collect();
        assert_eq!(ids, ["T1", "T2"]);
        let t1 = &plans[0];
        assert_eq!(t1.depart_s, 7 * 3600);
        let names: Vec<&str> = t1.path.iter().map(|&e| net.edge(e).id.as_str()).collect();
        assert_eq!(names, ["ox1", "x1x2", "x2x3"]);
        for w in t1.path.windows(2) {
            assert!(net.successors(w[0]).contains(&w[1]));
        }
        for stop in &t1.stops {
            assert_eq!(t1.path[stop.path_index], stop.edge);
        }
    }

    #[test]
    fn broken_leg_is_named() {
        let dir = tempfile::tempdir().unwrap();
        write_feed(dir.path(), &[]);
        let s = load_gtfs(dir.path()).unwrap();
        let net = corridor_net(false);
        let p = place_stops(&s, &net, 50.0);
        let types = all_types(&s);
        let sel = TripSelection {
            day: DayType::Weekday,
            start_s: 0,
            end_s: 86_400,
            trip_types: &types,
        };
        let err = generate_bus_trips(&s, &p, &net, &sel).unwrap_err().to_string();
        assert!(err.contains("T3") && err.contains("from stop D to stop E"), "{err}");
    }
}
