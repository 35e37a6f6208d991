#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use transit_core::demand::PersonTrip;
use transit_core::microsim::{EdgeInterval, TrajectoryRecord};
use transit_core::network::RoadNetwork;
use transit_core::router::WalkParams;
use transit_core::transit::{DayType, Route, Service, Stop, StopTime, TransitSchedule, Trip};
use transit_core::Point;

pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

/// A random single-service timetable with at most `max_connections` connections.
pub fn random_schedule<R: Rng>(rng: &mut R, max_connections: usize) -> TransitSchedule {
    let mut s = TransitSchedule::default();
    let n_stops = rng.gen_range(4..=10);
    for i in 0..n_stops {
        let id = format!("S{i:02}");
        s.stops.insert(
            id.clone(),
            Stop {
                id: id.clone(),
                name: id,
                pos: Point::new(rng.gen_range(0..1200) as f64, rng.gen_range(0..1200) as f64),
            },
        );
    }
    s.routes.insert(
        "R".into(),
        Route {
            id: "R".into(),
            short_name: "R".into(),
        },
    );
    s.services.insert(
        "WK".into(),
        Service {
            id: "WK".into(),
            days: BTreeSet::from([DayType::Weekday]),
        },
    );
    let stop_ids: Vec<String> = s.stops.keys().cloned().collect();
    let mut budget = max_connections;
    let mut k = 0;
    while budget > 0 {
        let len = rng.gen_range(2..=6usize).min(budget + 1).min(stop_ids.len());
        let mut visit = stop_ids.clone();
        visit.shuffle(rng);
        visit.truncate(len);
        let mut t = rng.gen_range(0..1800u32);
        let mut times = Vec::new();
        for stop in visit {
            let arrival = t;
            let departure = arrival + rng.gen_range(0..3) * 10;
            times.push(StopTime {
                stop_id: stop,
                arrival_s: arrival,
                departure_s: departure,
            });
            t = departure + rng.gen_range(0..=5) * 30;
        }
        let id = format!("T{k:02}");
        s.trips.insert(
            id.clone(),
            Trip {
                id: id.clone(),
                route_id: "R".into(),
                block_id: None,
                service_id: "WK".into(),
            },
        );
        budget -= times.len() - 1;
        s.stop_times.insert(id, times);
        k += 1;
    }
    s
}

pub fn random_person<R: Rng>(rng: &mut R, id: usize) -> PersonTrip {
    PersonTrip {
        id: format!("p{id}"),
        depart_s: rng.gen_range(0..1500) as f64,
        origin: Point::new(rng.gen_range(-100.0..1300.0), rng.gen_range(-100.0..1300.0)),
        dest: Point::new(rng.gen_range(-100.0..1300.0), rng.gen_range(-100.0..1300.0)),
    }
}

/// Earliest arrival over every journey of walks and at most `max_rides` rides,
/// by depth-first enumeration of trip boardings.
pub fn exhaustive_earliest_arrival(
    s: &TransitSchedule,
    person: &PersonTrip,
    walk: &WalkParams,
    transfer_radius_m: f64,
    max_rides: usize,
) -> Option<f64> {
    let speed = walk.walk_speed_mps;
    let pos = |id: &str| s.stops[id].pos;
    let mut best: Option<f64> = None;
    let consider = |t: f64, best: &mut Option<f64>| {
        if best.is_none_or(|b| t < b) {
            *best = Some(t);
        }
    };
    let direct = person.origin.distance(person.dest);
    if direct <= walk.max_walk_m {
        consider(person.depart_s + direct / speed, &mut best);
    }
    // (stop, time ready to board, rides taken)
    let mut stack: Vec<(String, f64, usize)> = Vec::new();
    for id in s.stops.keys() {
        let d = person.origin.distance(pos(id));
        if d <= walk.max_walk_m {
            stack.push((id.clone(), person.depart_s + d / speed, 0));
        }
    }
    let mut seen: HashMap<(String, usize), f64> = HashMap::new();
    while let Some((stop, ready, rides)) = stack.pop() {
        if let Some(&t) = seen.get(&(stop.clone(), rides)) {
            if t <= ready {
                continue;
            }
        }
        seen.insert((stop.clone(), rides), ready);
        for times in s.stop_times.values() {
            for i in 0..times.len() {
                if times[i].stop_id != stop || f64::from(times[i].departure_s) < ready {
                    continue;
                }
                for later in &times[i + 1..] {
                    let arr = f64::from(later.arrival_s);
                    let egress = pos(&later.stop_id).distance(person.dest);
                    if egress <= walk.max_walk_m {
                        consider(arr + egress / speed, &mut best);
                    }
                    if rides + 1 < max_rides {
                        stack.push((later.stop_id.clone(), arr, rides + 1));
                        for other in s.stops.keys() {
                            if *other == later.stop_id {
                                continue;
                            }
                            let d = pos(&later.stop_id).distance(pos(other));
                            if d <= transfer_radius_m && d <= walk.max_walk_m {
                                stack.push((other.clone(), arr + d / speed, rides + 1));
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

/// Recomputes one edge interval cell directly from trajectory records.
pub fn edge_cell_from_trajectories(
    records: &[TrajectoryRecord],
    net: &RoadNetwork,
    type_lengths: &BTreeMap<String, f64>,
    edge_id: &str,
    t0: u32,
    t1: u32,
) -> Option<(f64, f64, f64)> {
    let length = net.edge(net.edge_idx(edge_id)?).length_m;
    let period = f64::from(t1 - t0);
    let mut speed_sum = 0.0;
    let mut samples = 0usize;
    let mut covered = 0.0;
    for r in records {
        if r.edge_id.as_ref() != edge_id || r.t_s < t0 || r.t_s >= t1 {
            continue;
        }
        samples += 1;
        speed_sum += r.speed_mps;
        let len = type_lengths[r.type_id.as_ref()];
        covered += if r.position_m < len { r.position_m.max(0.0) } else { len };
    }
    if samples == 0 {
        return None;
    }
    Some((
        speed_sum / samples as f64,
        samples as f64 / period / (length / 1000.0),
        covered / (length * period),
    ))
}

pub fn cell_matches(e: &EdgeInterval, oracle: (f64, f64, f64), tol: f64) -> bool {
    (e.mean_speed_mps - oracle.0).abs() <= tol
        && (e.density_veh_per_km - oracle.1).abs() <= tol
        && (e.occupancy - oracle.2).abs() <= tol
}

/// Random directed network on a 50 m lattice; edge lengths are at least the chord.
pub fn random_network<R: Rng>(rng: &mut R, max_nodes: usize) -> transit_core::network::RoadNetwork {
    use transit_core::network::EdgeSpec;
    let n = rng.gen_range(2..=max_nodes);
    let mut coords = BTreeSet::new();
    while coords.len() < n {
        coords.insert((rng.gen_range(-20i32..20), rng.gen_range(-20i32..20)));
    }
    let nodes: Vec<(String, Point)> = coords
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| (format!("n{i:02}"), Point::new(f64::from(x) * 50.0, f64::from(y) * 50.0)))
        .collect();
    let mut edges = Vec::new();
    for i in 0..rng.gen_range(n..=4 * n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let extra = rng.gen_range(0..4u8);
        edges.push(EdgeSpec {
            id: format!("e{i:03}"),
            from: nodes[a].0.clone(),
            to: nodes[b].0.clone(),
            length_m: nodes[a].1.distance(nodes[b].1) + f64::from(extra) * 10.0,
            speed_limit_mps: 10.0 + f64::from(extra),
            lanes: 1,
        });
    }
    RoadNetwork::from_parts(nodes, edges).expect("valid random network")
}
