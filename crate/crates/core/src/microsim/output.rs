//! Comma-separated output streams.

use std::sync::Arc;

use super::{EdgeInterval, PersonOutcome, PersonStatus, StopEvent, TrajectoryRecord};
use crate::error::{Error, Result};

fn write_rows<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn read_rows(text: &str, header: &[&str], what: &str) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let got = r.headers().map_err(|e| Error::Analysis(format!("{what}: {e}")))?;
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Analysis(format!("{what}: expected header {}", header.join(","))));
    }
    r.records()
        .map(|rec| rec.map_err(|e| Error::Analysis(format!("{what}: {e}"))))
        .collect()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Analysis(format!("{what} line {line}: bad field {}", i + 1)))
}

const TRAJ: [&str; 7] = ["t", "vehicle", "type", "edge", "pos", "speed", "accel"];
const STOPS: [&str; 6] = ["trip", "stop", "arrival", "departure", "boarded", "alighted"];
const EDGES: [&str; 7] = ["edge", "t0", "t1", "mean_speed", "density", "occupancy", "samples"];
const PERSONS: [&str; 4] = ["person", "status", "depart", "arrive"];

pub fn trajectories_to_csv(records: &[TrajectoryRecord]) -> String {
    write_rows(
        TRAJ,
        records.iter().map(|r| {
            [
                r.t_s.to_string(),
                r.vehicle_id.to_string(),
                r.type_id.to_string(),
                r.edge_id.to_string(),
                r.position_m.to_string(),
                r.speed_mps.to_string(),
                r.accel_mps2.to_string(),
            ]
        }),
    )
}

pub fn trajectories_from_csv(text: &str) -> Result<Vec<TrajectoryRecord>> {
    const W: &str = "trajectories";
    read_rows(text, &TRAJ, W)?
        .iter()
        .map(|r| {
            Ok(TrajectoryRecord {
                t_s: field(r, 0, W)?,
                vehicle_id: Arc::from(field::<String>(r, 1, W)?),
                type_id: Arc::from(field::<String>(r, 2, W)?),
                edge_id: Arc::from(field::<String>(r, 3, W)?),
                position_m: field(r, 4, W)?,
                speed_mps: field(r, 5, W)?,
                accel_mps2: field(r, 6, W)?,
            })
        })
        .collect()
}

pub fn stop_events_to_csv(events: &[StopEvent]) -> String {
    write_rows(
        STOPS,
        events.iter().map(|e| {
            [
                e.trip_id.clone(),
                e.stop_id.clone(),
                e.arrival_s.to_string(),
                e.departure_s.to_string(),
                e.boarded.to_string(),
                e.alighted.to_string(),
            ]
        }),
    )
}

pub fn stop_events_from_csv(text: &str) -> Result<Vec<StopEvent>> {
    const W: &str = "stop_events";
    read_rows(text, &STOPS, W)?
        .iter()
        .map(|r| {
            Ok(StopEvent {
                trip_id: field(r, 0, W)?,
                stop_id: field(r, 1, W)?,
                arrival_s: field(r, 2, W)?,
                departure_s: field(r, 3, W)?,
                boarded: field(r, 4, W)?,
                alighted: field(r, 5, W)?,
            })
        })
        .collect()
}

pub fn edge_intervals_to_csv(intervals: &[EdgeInterval]) -> String {
    write_rows(
        EDGES,
        intervals.iter().map(|i| {
            [
                i.edge_id.clone(),
                i.t0_s.to_string(),
                i.t1_s.to_string(),
                i.mean_speed_mps.to_string(),
                i.density_veh_per_km.to_string(),
                i.occupancy.to_string(),
                i.samples.to_string(),
            ]
        }),
    )
}

pub fn edge_intervals_from_csv(text: &str) -> Result<Vec<EdgeInterval>> {
    const W: &str = "edge_intervals";
    read_rows(text, &EDGES, W)?
        .iter()
        .map(|r| {
            Ok(EdgeInterval {
                edge_id: field(r, 0, W)?,
                t0_s: field(r, 1, W)?,
                t1_s: field(r, 2, W)?,
                mean_speed_mps: field(r, 3, W)?,
                density_veh_per_km: field(r, 4, W)?,
                occupancy: field(r, 5, W)?,
                samples: field(r, 6, W)?,
            })
        })
        .collect()
}

pub fn person_outcomes_to_csv(outcomes: &[PersonOutcome]) -> String {
    write_rows(
        PERSONS,
        outcomes.iter().map(|o| {
            [
                o.person_id.clone(),
                o.status.as_str().to_string(),
                o.depart_s.to_string(),
                o.arrive_s.map(|a| a.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

pub fn person_outcomes_from_csv(text: &str) -> Result<Vec<PersonOutcome>> {
    const W: &str = "person_outcomes";
    read_rows(text, &PERSONS, W)?
        .iter()
        .map(|r| {
            let status: String = field(r, 1, W)?;
            Ok(PersonOutcome {
                person_id: field(r, 0, W)?,
                status: PersonStatus::parse(&status)
                    .ok_or_else(|| Error::Analysis(format!("{W}: unknown status `{status}`")))?,
                depart_s: field(r, 2, W)?,
                arrive_s: match r.get(3) {
                    Some("") | None => None,
                    Some(_) => Some(field(r, 3, W)?),
                },
            })
        })
        .collect()
}
