//! Analysis tables computed from a run's output files.
//!
//! Every function here is a pure function of the written streams, so the
//! `analyze` subcommand reproduces the same tables from disk.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::{reports_from_csv, EnergyReport};
use crate::error::{Error, Result};
use crate::microsim::{stop_events_from_csv, trajectories_from_csv, StopEvent, TrajectoryRecord};

/// Route label used for per-route rollup rows.
pub const ALL_TRIPS: &str = "ALL";

/// One simulated bus trip, as listed in `trips.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripInfo {
    pub trip: String,
    pub route: String,
    pub block: String,
    pub vehicle_type: String,
    pub propulsion: String,
    pub capacity: u32,
}

pub fn trips_to_csv(trips: &[TripInfo]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in trips {
        w.serialize(t).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

pub fn trips_from_csv(text: &str) -> Result<Vec<TripInfo>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Analysis(format!("trips csv: {e}")))
}

pub fn route_map(trips: &[TripInfo]) -> BTreeMap<String, String> {
    trips.iter().map(|t| (t.trip.clone(), t.route.clone())).collect()
}

fn route_of<'a>(routes: &'a BTreeMap<String, String>, trip: &str) -> &'a str {
    routes.get(trip).map_or("", String::as_str)
}

/// Events grouped by trip, in input order, with arrival order checked.
fn events_by_trip(events: &[StopEvent]) -> Result<BTreeMap<&str, Vec<&StopEvent>>> {
    let mut by_trip: BTreeMap<&str, Vec<&StopEvent>> = BTreeMap::new();
    for e in events {
        let list = by_trip.entry(e.trip_id.as_str()).or_default();
        if let Some(prev) = list.last() {
            if e.arrival_s < prev.departure_s {
                return Err(Error::Analysis(format!(
                    "trip {}: stop event at {} arrives before the previous departure",
                    e.trip_id, e.stop_id
                )));
            }
        }
        list.push(e);
    }
    Ok(by_trip)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyProfile {
    pub trip_id: String,
    pub route_id: String,
    pub stops: Vec<String>,
    /// Riders on board immediately before arriving at each stop.
    pub counts: Vec<u32>,
}

pub fn occupancy_by_trip(events: &[StopEvent], routes: &BTreeMap<String, String>) -> Result<Vec<OccupancyProfile>> {
    let mut out = Vec::new();
    for (trip, list) in events_by_trip(events)? {
        if list.len() < 2 {
            return Err(Error::Analysis(format!("trip {trip}: fewer than 2 stop visits")));
        }
        let mut onboard: i64 = 0;
        let mut counts = Vec::with_capacity(list.len());
        for e in &list {
            counts.push(onboard as u32);
            onboard += i64::from(e.boarded) - i64::from(e.alighted);
            if onboard < 0 {
                return Err(Error::Analysis(format!(
                    "trip {trip}: more riders alight at {} than are on board",
                    e.stop_id
                )));
            }
        }
        out.push(OccupancyProfile {
            trip_id: trip.to_string(),
            route_id: route_of(routes, trip).to_string(),
            stops: list.iter().map(|e| e.stop_id.clone()).collect(),
            counts,
        });
    }
    Ok(out)
}

pub fn occupancy_to_csv(profiles: &[OccupancyProfile]) -> String {
    let mut out = String::from("route,trip,seq,stop,onboard\n");
    for p in profiles {
        for (i, (stop, n)) in p.stops.iter().zip(&p.counts).enumerate() {
            let _ = writeln!(out, "{},{},{i},{stop},{n}", p.route_id, p.trip_id);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedSummary {
    pub hour: u32,
    pub samples: usize,
    /// `None` for an hour with no samples.
    pub summary: Option<Quartiles>,
}

/// Linear-interpolation quantile (`h = (n - 1) p`) by selection.
fn quantile(xs: &mut [f64], p: f64) -> f64 {
    let h = (xs.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let (_, &mut x_lo, right) = xs.select_nth_unstable_by(lo, f64::total_cmp);
    if right.is_empty() {
        return x_lo;
    }
    let x_hi = right.iter().copied().fold(f64::INFINITY, f64::min);
    x_lo + (h - lo as f64) * (x_hi - x_lo)
}

pub fn summarize(samples: &[f64]) -> Option<Quartiles> {
    if samples.is_empty() {
        return None;
    }
    let mut xs = samples.to_vec();
    Some(Quartiles {
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        q1: quantile(&mut xs, 0.25),
        median: quantile(&mut xs, 0.5),
        q3: quantile(&mut xs, 0.75),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: samples.iter().sum::<f64>() / samples.len() as f64,
    })
}

/// Per-hour distribution of per-second speeds of the given vehicles.
///
/// Hour `h` covers `[3600 h, 3600 (h + 1))` seconds after midnight.
pub fn speed_stats(records: &[TrajectoryRecord], vehicles: &BTreeSet<String>, hours: &[u32]) -> Vec<SpeedSummary> {
    let mut buckets: BTreeMap<u32, Vec<f64>> = hours.iter().map(|&h| (h, Vec::new())).collect();
    for r in records {
        if !vehicles.contains(r.vehicle_id.as_ref()) {
            continue;
        }
        if let Some(b) = buckets.get_mut(&(r.t_s / 3600)) {
            b.push(r.speed_mps);
        }
    }
    hours
        .iter()
        .map(|h| {
            let xs = &buckets[h];
            SpeedSummary {
                hour: *h,
                samples: xs.len(),
                summary: summarize(xs),
            }
        })
        .collect()
}

/// Hours touched by any record, ascending.
pub fn hours_present(records: &[TrajectoryRecord]) -> Vec<u32> {
    records
        .iter()
        .map(|r| r.t_s / 3600)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn speed_stats_to_csv(rows: &[(String, SpeedSummary)]) -> String {
    let mut out = String::from("route,hour,samples,mean,min,q1,median,q3,max\n");
    for (route, s) in rows {
        match s.summary {
            Some(q) => {
                let _ = writeln!(
                    out,
                    "{route},{},{},{},{},{},{},{},{}",
                    s.hour, s.samples, q.mean, q.min, q.q1, q.median, q.q3, q.max
                );
            }
            None => {
                let _ = writeln!(out, "{route},{},0,,,,,,", s.hour);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripTotals {
    pub trip_id: String,
    pub boarded: u64,
    pub alighted: u64,
    /// Largest load carried between two stops.
    pub max_occupancy: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteSummary {
    pub route_id: String,
    pub trips: Vec<TripTotals>,
    pub boarded: u64,
    pub alighted: u64,
    pub max_occupancy: u64,
}

pub fn boarding_alighting_totals(events: &[StopEvent], routes: &BTreeMap<String, String>) -> Vec<RouteSummary> {
    let mut per_trip: BTreeMap<&str, (u64, u64, i64, i64)> = BTreeMap::new();
    for e in events {
        let t = per_trip.entry(e.trip_id.as_str()).or_default();
        t.0 += u64::from(e.boarded);
        t.1 += u64::from(e.alighted);
        t.2 += i64::from(e.boarded) - i64::from(e.alighted);
        t.3 = t.3.max(t.2);
    }
    let mut by_route: BTreeMap<&str, RouteSummary> = BTreeMap::new();
    for (trip, (b, a, _, peak)) in per_trip {
        let route = route_of(routes, trip);
        let r = by_route.entry(route).or_insert_with(|| RouteSummary {
            route_id: route.to_string(),
            trips: Vec::new(),
            boarded: 0,
            alighted: 0,
            max_occupancy: 0,
        });
        let peak = peak.max(0) as u64;
        r.boarded += b;
        r.alighted += a;
        r.max_occupancy = r.max_occupancy.max(peak);
        r.trips.push(TripTotals {
            trip_id: trip.to_string(),
            boarded: b,
            alighted: a,
            max_occupancy: peak,
        });
    }
    by_route.into_values().collect()
}

pub fn totals_to_csv(routes: &[RouteSummary]) -> String {
    let mut out = String::from("route,trip,boarded,alighted,max_occupancy\n");
    for r in routes {
        for t in &r.trips {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.route_id, t.trip_id, t.boarded, t.alighted, t.max_occupancy
            );
        }
        let _ = writeln!(
            out,
            "{},{ALL_TRIPS},{},{},{}",
            r.route_id, r.boarded, r.alighted, r.max_occupancy
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommercialSpeed {
    pub trip_id: String,
    pub route_id: String,
    pub distance_m: f64,
    pub duration_s: u32,
    pub speed_mps: f64,
}

/// Distance over time between leaving the first stop and reaching the last.
///
/// The record at `t` carries the displacement over `[t - 1, t]`.
pub fn commercial_speeds(
    records: &[TrajectoryRecord],
    events: &[StopEvent],
    routes: &BTreeMap<String, String>,
) -> Result<Vec<CommercialSpeed>> {
    let mut distance: BTreeMap<&str, Vec<(u32, f64)>> = BTreeMap::new();
    for r in records {
        distance.entry(r.vehicle_id.as_ref()).or_default().push((r.t_s, r.speed_mps));
    }
    let mut out = Vec::new();
    for (trip, list) in events_by_trip(events)? {
        let (Some(first), Some(last)) = (list.first(), list.last()) else { continue };
        if list.len() < 2 || last.arrival_s <= first.departure_s {
            continue;
        }
        let (t0, t1) = (first.departure_s, last.arrival_s);
        let d: f64 = distance
            .get(trip)
            .map(|xs| xs.iter().filter(|(t, _)| *t > t0 && *t <= t1).map(|(_, v)| v).sum())
            .unwrap_or(0.0);
        out.push(CommercialSpeed {
            trip_id: trip.to_string(),
            route_id: route_of(routes, trip).to_string(),
            distance_m: d,
            duration_s: t1 - t0,
            speed_mps: d / f64::from(t1 - t0),
        });
    }
    Ok(out)
}

pub fn mean_commercial_speed(speeds: &[CommercialSpeed]) -> Option<f64> {
    (!speeds.is_empty()).then(|| speeds.iter().map(|s| s.speed_mps).sum::<f64>() / speeds.len() as f64)
}

/// The files of one configuration's output directory.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub trips: Vec<TripInfo>,
    pub trajectories: Vec<TrajectoryRecord>,
    pub stop_events: Vec<StopEvent>,
    pub energy: Vec<EnergyReport>,
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

impl RunOutputs {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(Self {
            trips: trips_from_csv(&read(dir, "trips.csv")?)?,
            trajectories: trajectories_from_csv(&read(dir, "trajectories.csv")?)?,
            stop_events: stop_events_from_csv(&read(dir, "stop_events.csv")?)?,
            energy: reports_from_csv(&read(dir, "energy.csv")?)?,
        })
    }

    pub fn routes(&self) -> BTreeMap<String, String> {
        route_map(&self.trips)
    }

    /// Per-route, per-hour speed summaries over every hour with bus records.
    pub fn route_speed_stats(&self) -> Vec<(String, SpeedSummary)> {
        let hours = hours_present(&self.trajectories);
        let mut by_route: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        for t in &self.trips {
            by_route.entry(t.route.as_str()).or_default().insert(t.trip.clone());
        }
        by_route
            .into_iter()
            .flat_map(|(route, ids)| {
                speed_stats(&self.trajectories, &ids, &hours)
                    .into_iter()
                    .map(move |s| (route.to_string(), s))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(trip: &str, stop: &str, t: u32, b: u32, a: u32) -> StopEvent {
        StopEvent {
            trip_id: trip.into(),
            stop_id: stop.into(),
            arrival_s: t,
            departure_s: t + 10,
            boarded: b,
            alighted: a,
        }
    }

    #[test]
    fn occupancy_is_counted_before_arrival() {
        let events = [ev("T1", "A", 0, 3, 0), ev("T1", "B", 60, 2, 1)];
        let p = occupancy_by_trip(&events, &BTreeMap::new()).unwrap();
        assert_eq!(p[0].counts, vec![0, 3]);
    }

    #[test]
    fn single_visit_and_disorder_are_errors() {
        assert!(occupancy_by_trip(&[ev("T1", "A", 0, 1, 0)], &BTreeMap::new()).is_err());
        let events = [ev("T1", "A", 100, 1, 0), ev("T1", "B", 50, 0, 1)];
        assert!(occupancy_by_trip(&events, &BTreeMap::new()).is_err());
    }

    #[test]
    fn speed_summary_of_four_samples() {
        let q = summarize(&[10.0, 20.0, 10.0, 20.0]).unwrap();
        assert_eq!(q.mean, 15.0);
        assert_eq!(q.median, 15.0);
        assert_eq!(q.q1, 10.0);
        assert_eq!(q.q3, 20.0);
        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn empty_hour_yields_empty_summary() {
        let s = speed_stats(&[], &BTreeSet::from(["T1".to_string()]), &[8]);
        assert_eq!(s[0].samples, 0);
        assert!(s[0].summary.is_none());
    }

    #[test]
    fn route_totals_add_trip_totals() {
        let routes = BTreeMap::from([("T1".to_string(), "4".to_string()), ("T2".to_string(), "4".to_string())]);
        let events = [ev("T1", "A", 0, 5, 0), ev("T1", "B", 60, 0, 5), ev("T2", "A", 0, 7, 0)];
        let r = boarding_alighting_totals(&events, &routes);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].boarded, 12);
        assert_eq!(r[0].alighted, 5);
        assert_eq!(r[0].max_occupancy, 7);
        assert!(boarding_alighting_totals(&[], &routes).is_empty());
    }

    #[test]
    fn trips_csv_round_trips() {
        let trips = vec![TripInfo {
            trip: "T1".into(),
            route: "4".into(),
            block: "101".into(),
            vehicle_type: "BYD_K9".into(),
            propulsion: "electric".into(),
            capacity: 60,
        }];
        assert_eq!(trips_from_csv(&trips_to_csv(&trips)).unwrap(), trips);
    }
}
