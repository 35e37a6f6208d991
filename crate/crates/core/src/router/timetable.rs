use std::collections::BTreeMap;

use crate::geometry::Point;
use crate::transit::TransitSchedule;

/// One hop of one trip between consecutive stops.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub trip: usize,
    /// Index of `from_stop` within the trip's stop sequence.
    pub seq: usize,
    pub from_stop: usize,
    pub to_stop: usize,
    pub dep_s: u32,
    pub arr_s: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footpath {
    pub to_stop: usize,
    pub distance_m: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct TripStops {
    pub stops: Vec<usize>,
    pub arrival_s: Vec<u32>,
    pub departure_s: Vec<u32>,
}

/// Scheduled connections of a set of trips, sorted by departure.
///
/// Trip indices follow trip id order and stop indices follow stop id order,
/// so comparing index sequences compares id sequences.
#[derive(Debug, Clone)]
pub struct TimetableIndex {
    pub(crate) stop_ids: Vec<String>,
    pub(crate) stop_pos: Vec<Point<f64>>,
    pub(crate) trip_ids: Vec<String>,
    pub(crate) trips: Vec<TripStops>,
    pub(crate) connections: Vec<Connection>,
    pub(crate) footpaths: Vec<Vec<Footpath>>,
}

impl TimetableIndex {
    /// Indexes the given trips; stop pairs closer than `footpath_radius_m` get footpaths.
    pub fn build<'a>(
        schedule: &TransitSchedule,
        trip_ids: impl IntoIterator<Item = &'a str>,
        footpath_radius_m: f64,
    ) -> Self {
        let mut trip_ids: Vec<String> = trip_ids
            .into_iter()
            .filter(|t| schedule.stop_times.contains_key(*t))
            .map(str::to_owned)
            .collect();
        trip_ids.sort();
        trip_ids.dedup();

        let mut stop_index: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &trip_ids {
            for st in &schedule.stop_times[t] {
                stop_index.insert(st.stop_id.as_str(), 0);
            }
        }
        for (i, v) in stop_index.values_mut().enumerate() {
            *v = i;
        }
        let stop_ids: Vec<String> = stop_index.keys().map(|s| s.to_string()).collect();
        let stop_pos: Vec<Point<f64>> = stop_ids.iter().map(|s| schedule.stops[s].pos).collect();

        let mut trips = Vec::with_capacity(trip_ids.len());
        let mut connections = Vec::new();
        for (ti, t) in trip_ids.iter().enumerate() {
            let times = &schedule.stop_times[t];
            let ts = TripStops {
                stops: times.iter().map(|st| stop_index[st.stop_id.as_str()]).collect(),
                arrival_s: times.iter().map(|st| st.arrival_s).collect(),
                departure_s: times.iter().map(|st| st.departure_s).collect(),
            };
            for i in 0..ts.stops.len() - 1 {
                connections.push(Connection {
                    trip: ti,
                    seq: i,
                    from_stop: ts.stops[i],
                    to_stop: ts.stops[i + 1],
                    dep_s: ts.departure_s[i],
                    arr_s: ts.arrival_s[i + 1],
                });
            }
            trips.push(ts);
        }
        connections.sort_by_key(|c| (c.dep_s, c.arr_s, c.trip, c.seq));

        let mut footpaths = vec![Vec::new(); stop_ids.len()];
        for a in 0..stop_ids.len() {
            for b in 0..stop_ids.len() {
                if a == b {
                    continue;
                }
                let d = stop_pos[a].distance(stop_pos[b]);
                if d <= footpath_radius_m {
                    footpaths[a].push(Footpath {
                        to_stop: b,
                        distance_m: d,
                    });
                }
            }
        }
        Self {
            stop_ids,
            stop_pos,
            trip_ids,
            trips,
            connections,
            footpaths,
        }
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn footpaths(&self, stop: usize) -> &[Footpath] {
        &self.footpaths[stop]
    }

    pub fn stop_id(&self, stop: usize) -> &str {
        &self.stop_ids[stop]
    }

    pub fn stop_pos(&self, stop: usize) -> Point<f64> {
        self.stop_pos[stop]
    }

    pub fn stop_count(&self) -> usize {
        self.stop_ids.len()
    }

    pub fn trip_id(&self, trip: usize) -> &str {
        &self.trip_ids[trip]
    }

    pub fn trip_count(&self) -> usize {
        self.trip_ids.len()
    }
}
