//! Static GTFS schedule, stop placement and bus trip generation.
//!
//! Stops must carry planar coordinates in `stop_x`/`stop_y` columns (meters,
//! same projection as the road network).

mod placement;
mod tripgen;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use placement::{place_stops, PlacedStop, StopPlacements};
pub use tripgen::{generate_bus_trips, BusTripPlan, PlannedStop, TripSelection};

use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const SECONDS_PER_DAY: u32 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayType {
    Weekday,
    Weekend,
}

impl DayType {
    pub fn as_str(self) -> &'static str {
        match self {
            DayType::Weekday => "weekday",
            DayType::Weekend => "weekend",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stop {
    pub id: String,
    pub name: String,
    pub pos: Point<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub id: String,
    pub short_name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    pub id: String,
    pub route_id: String,
    pub block_id: Option<String>,
    pub service_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopTimeSecs {
    pub arrival_s: u32,
    pub departure_s: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopTime {
    pub stop_id: String,
    pub arrival_s: u32,
    pub departure_s: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Service {
    pub id: String,
    pub days: BTreeSet<DayType>,
}

#[derive(Debug, Clone, Default)]
pub struct TransitSchedule {
    pub stops: BTreeMap<String, Stop>,
    pub routes: BTreeMap<String, Route>,
    pub trips: BTreeMap<String, Trip>,
    pub stop_times: BTreeMap<String, Vec<StopTime>>,
    pub services: BTreeMap<String, Service>,
}

impl TransitSchedule {
    pub fn trip_runs_on(&self, trip_id: &str, day: DayType) -> bool {
        self.trips
            .get(trip_id)
            .and_then(|t| self.services.get(&t.service_id))
            .is_some_and(|s| s.days.contains(&day))
    }

    pub fn first_departure(&self, trip_id: &str) -> Option<u32> {
        self.stop_times.get(trip_id)?.first().map(|st| st.departure_s)
    }

    pub fn last_arrival(&self, trip_id: &str) -> Option<u32> {
        self.stop_times.get(trip_id)?.last().map(|st| st.arrival_s)
    }

    pub fn has_block(&self, block_id: &str) -> bool {
        self.trips.values().any(|t| t.block_id.as_deref() == Some(block_id))
    }

    /// Trips of a block in id order.
    pub fn trips_in_block(&self, block_id: &str) -> Vec<&Trip> {
        self.trips
            .values()
            .filter(|t| t.block_id.as_deref() == Some(block_id))
            .collect()
    }

    /// Warnings for blocks whose trips overlap in time.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut by_block: BTreeMap<&str, Vec<(u32, u32, &str)>> = BTreeMap::new();
        for t in self.trips.values() {
            if let (Some(b), Some(s), Some(e)) = (&t.block_id, self.first_departure(&t.id), self.last_arrival(&t.id)) {
                by_block.entry(b).or_default().push((s, e, &t.id));
            }
        }
        let mut diags = Vec::new();
        for (block, mut spans) in by_block {
            spans.sort();
            for w in spans.windows(2) {
                let (a, b) = (w[0], w[1]);
                let same_days = self.trips[a.2].service_id == self.trips[b.2].service_id;
                if same_days && b.0 < a.1 {
                    diags.push(Diagnostic::warning(
                        format!("block {block}"),
                        format!("trips {} and {} overlap in time", a.2, b.2),
                    ));
                }
            }
        }
        diags
    }
}

/// Parses `HH:MM:SS`; times past 24:00:00 are rejected.
pub fn parse_gtfs_time(s: &str) -> Result<u32> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let bad = || Error::Gtfs(format!("malformed time `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<u32> = parts
        .iter()
        .map(|p| p.parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (h, m, sec) = (nums[0], nums[1], nums[2]);
    if m >= 60 || sec >= 60 {
        return Err(bad());
    }
    let total = h * 3600 + m * 60 + sec;
    if total > SECONDS_PER_DAY {
        return Err(Error::Gtfs(format!("time `{s}` is past 24:00:00")));
    }
    Ok(total)
}

pub fn format_hms(t: u32) -> String {
    format!("{:02}:{:02}:{:02}", t / 3600, (t / 60) % 60, t % 60)
}

#[derive(Debug, Deserialize)]
struct StopRow {
    stop_id: String,
    #[serde(default)]
    stop_name: String,
    stop_x: Option<f64>,
    stop_y: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RouteRow {
    route_id: String,
    #[serde(default)]
    route_short_name: String,
}

#[derive(Debug, Deserialize)]
struct TripRow {
    route_id: String,
    service_id: String,
    trip_id: String,
    #[serde(default)]
    block_id: Option<String>,
}

#[derive(Debug, Deserialize)]
struct StopTimeRow {
    trip_id: String,
    arrival_time: String,
    departure_time: String,
    stop_id: String,
    stop_sequence: u32,
}

#[derive(Debug, Deserialize)]
struct CalendarRow {
    service_id: String,
    monday: u8,
    tuesday: u8,
    wednesday: u8,
    thursday: u8,
    friday: u8,
    saturday: u8,
    sunday: u8,
}

fn read_table<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<Vec<T>> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(Error::Gtfs(format!("missing required table {name}")));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(|e| Error::Gtfs(format!("{name}: {e}")))?;
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Gtfs(format!("{name} row {}: {e}", i + 2))))
        .collect()
}

/// Loads and cross-references a static feed directory.
pub fn load_gtfs(dir: &Path) -> Result<TransitSchedule> {
    if !dir.is_dir() {
        return Err(Error::io(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "GTFS directory not found")));
    }
    let stops: Vec<StopRow> = read_table(dir, "stops.txt")?;
    let routes: Vec<RouteRow> = read_table(dir, "routes.txt")?;
    let trips: Vec<TripRow> = read_table(dir, "trips.txt")?;
    let stop_times: Vec<StopTimeRow> = read_table(dir, "stop_times.txt")?;
    let calendar: Vec<CalendarRow> = read_table(dir, "calendar.txt")?;

    let mut sched = TransitSchedule::default();
    for s in stops {
        let (Some(x), Some(y)) = (s.stop_x, s.stop_y) else {
            return Err(Error::Gtfs(format!("stop {} lacks planar stop_x/stop_y coordinates", s.stop_id)));
        };
        let stop = Stop {
            id: s.stop_id.clone(),
            name: s.stop_name,
            pos: Point::new(x, y),
        };
        if sched.stops.insert(s.stop_id.clone(), stop).is_some() {
            return Err(Error::Gtfs(format!("duplicate stop {}", s.stop_id)));
        }
    }
    for r in routes {
        let route = Route {
            id: r.route_id.clone(),
            short_name: r.route_short_name,
        };
        if sched.routes.insert(r.route_id.clone(), route).is_some() {
            return Err(Error::Gtfs(format!("duplicate route {}", r.route_id)));
        }
    }
    for c in calendar {
        let mut days = BTreeSet::new();
        if [c.monday, c.tuesday, c.wednesday, c.thursday, c.friday].contains(&1) {
            days.insert(DayType::Weekday);
        }
        if [c.saturday, c.sunday].contains(&1) {
            days.insert(DayType::Weekend);
        }
        let svc = Service {
            id: c.service_id.clone(),
            days,
        };
        if sched.services.insert(c.service_id.clone(), svc).is_some() {
            return Err(Error::Gtfs(format!("duplicate service {}", c.service_id)));
        }
    }
    for t in trips {
        if !sched.routes.contains_key(&t.route_id) {
            return Err(Error::Gtfs(format!("trip {} references unknown route {}", t.trip_id, t.route_id)));
        }
        if !sched.services.contains_key(&t.service_id) {
            return Err(Error::Gtfs(format!(
                "trip {} references unknown service {}",
                t.trip_id, t.service_id
            )));
        }
        let trip = Trip {
            id: t.trip_id.clone(),
            route_id: t.route_id,
            block_id: t.block_id.filter(|b| !b.is_empty()),
            service_id: t.service_id,
        };
        if sched.trips.insert(t.trip_id.clone(), trip).is_some() {
            return Err(Error::Gtfs(format!("duplicate trip {}", t.trip_id)));
        }
    }

    let mut grouped: BTreeMap<String, Vec<(u32, StopTime)>> = BTreeMap::new();
    for st in stop_times {
        if !sched.trips.contains_key(&st.trip_id) {
            return Err(Error::Gtfs(format!("stop_time references unknown trip {}", st.trip_id)));
        }
        if !sched.stops.contains_key(&st.stop_id) {
            return Err(Error::Gtfs(format!(
                "stop_time of trip {} references unknown stop {}",
                st.trip_id, st.stop_id
            )));
        }
        let arrival_s = parse_gtfs_time(&st.arrival_time)?;
        let departure_s = parse_gtfs_time(&st.departure_time)?;
        if departure_s < arrival_s {
            return Err(Error::Gtfs(format!(
                "trip {} stop {}: departure {} before arrival {}",
                st.trip_id, st.stop_id, st.departure_time, st.arrival_time
            )));
        }
        grouped.entry(st.trip_id).or_default().push((
            st.stop_sequence,
            StopTime {
                stop_id: st.stop_id,
                arrival_s,
                departure_s,
            },
        ));
    }
    for (trip_id, mut rows) in grouped {
        rows.sort_by_key(|(seq, _)| *seq);
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Gtfs(format!("trip {trip_id} repeats a stop_sequence")));
        }
        let times: Vec<StopTime> = rows.into_iter().map(|(_, st)| st).collect();
        for w in times.windows(2) {
            if w[1].arrival_s < w[0].departure_s {
                return Err(Error::Gtfs(format!(
                    "trip {trip_id}: nonmonotone stop_times at stop {} ({} after departure {})",
                    w[1].stop_id,
                    format_hms(w[1].arrival_s),
                    format_hms(w[0].departure_s)
                )));
            }
        }
        sched.stop_times.insert(trip_id, times);
    }
    for trip_id in sched.trips.keys() {
        let n = sched.stop_times.get(trip_id).map_or(0, Vec::len);
        if n < 2 {
            return Err(Error::Gtfs(format!("trip {trip_id} has {n} stop_times; at least 2 required")));
        }
    }
    Ok(sched)
}
