//! Earliest-arrival person journeys over a scheduled timetable.
//!
//! Round `k` scans every connection once and extends the labels that
//! finished round `k - 1`, so journeys are found in order of ride count.
//! Each (round, stop) keeps a Pareto set over (time, trip sequence), which
//! preserves the tie-break on lexicographic trip ids.

use std::cmp::Ordering;

use serde::Serialize;

use super::{TimetableIndex, MAX_RIDES};
use crate::demand::PersonTrip;
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub walk_speed_mps: f64,
    pub max_walk_m: f64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            walk_speed_mps: 1.4,
            max_walk_m: 800.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Leg {
    Walk {
        from: Point<f64>,
        to: Point<f64>,
        distance_m: f64,
        duration_s: f64,
    },
    Ride {
        trip_id: String,
        board_stop: String,
        alight_stop: String,
        scheduled_board_s: u32,
        scheduled_alight_s: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersonPlan {
    pub person_id: String,
    pub depart_s: f64,
    pub legs: Vec<Leg>,
    pub arrival_s: f64,
}

impl PersonPlan {
    pub fn rides(&self) -> impl Iterator<Item = &Leg> {
        self.legs.iter().filter(|l| matches!(l, Leg::Ride { .. }))
    }

    pub fn ride_count(&self) -> usize {
        self.rides().count()
    }

    pub fn trip_sequence(&self) -> Vec<&str> {
        self.legs
            .iter()
            .filter_map(|l| match l {
                Leg::Ride { trip_id, .. } => Some(trip_id.as_str()),
                Leg::Walk { .. } => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnservedReason {
    /// No stop within walking range of the origin or the destination, and too far to walk.
    NoStopInReach,
    /// Stops are in reach but no scheduled combination connects them in time.
    NoJourney,
}

impl UnservedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnservedReason::NoStopInReach => "no_stop_in_reach",
            UnservedReason::NoJourney => "no_journey",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unserved {
    pub person_id: String,
    pub reason: UnservedReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum JourneyOutcome {
    Planned(PersonPlan),
    Unserved(Unserved),
}

impl JourneyOutcome {
    pub fn plan(&self) -> Option<&PersonPlan> {
        match self {
            JourneyOutcome::Planned(p) => Some(p),
            JourneyOutcome::Unserved(_) => None,
        }
    }
}

type LabelId = usize;

#[derive(Debug, Clone, Copy)]
enum Via {
    Access,
    Ride {
        from: LabelId,
        trip: usize,
        board: usize,
        alight: usize,
    },
    Foot {
        from: LabelId,
    },
}

#[derive(Debug, Clone)]
struct Label {
    time: f64,
    seq: Vec<usize>,
    stop: usize,
    via: Via,
}

#[derive(Default)]
struct Arena {
    labels: Vec<Label>,
}

impl Arena {
    /// Inserts into a Pareto set unless an existing label is at least as good on both axes.
    fn offer(&mut self, set: &mut Vec<LabelId>, label: Label) {
        let dominated = set.iter().any(|&id| {
            let o = &self.labels[id];
            o.time <= label.time && o.seq <= label.seq
        });
        if dominated {
            return;
        }
        set.retain(|&id| {
            let o = &self.labels[id];
            !(label.time <= o.time && label.seq <= o.seq)
        });
        set.push(self.labels.len());
        self.labels.push(label);
    }

    /// Ready label that can make a departure at `dep`, preferring the smallest sequence.
    fn best_boarding(&self, set: &[LabelId], dep: f64) -> Option<LabelId> {
        set.iter()
            .copied()
            .filter(|&id| self.labels[id].time <= dep)
            .min_by(|&a, &b| self.labels[a].seq.cmp(&self.labels[b].seq))
    }
}

struct Candidate {
    arrival: f64,
    seq: Vec<usize>,
    last: Option<(LabelId, f64)>,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        self.arrival
            .total_cmp(&other.arrival)
            .then_with(|| self.seq.len().cmp(&other.seq.len()))
            .then_with(|| self.seq.cmp(&other.seq))
            == Ordering::Less
    }
}

/// Plans the earliest-arriving journey of walks and up to three scheduled rides.
///
/// Equal arrivals prefer fewer rides, then the lexicographically smaller trip id
/// sequence. A direct walk within `max_walk_m` competes as a zero-ride journey.
pub fn plan_person_journey(index: &TimetableIndex, person: &PersonTrip, params: &WalkParams) -> JourneyOutcome {
    let speed = params.walk_speed_mps;
    let max_walk = params.max_walk_m;
    let n = index.stop_count();
    let mut arena = Arena::default();

    let mut ready: Vec<Vec<LabelId>> = vec![Vec::new(); n];
    let mut any_access = false;
    for (s, slot) in ready.iter_mut().enumerate() {
        let d = person.origin.distance(index.stop_pos(s));
        if d <= max_walk {
            any_access = true;
            arena.offer(
                slot,
                Label {
                    time: person.depart_s + d / speed,
                    seq: Vec::new(),
                    stop: s,
                    via: Via::Access,
                },
            );
        }
    }
    let egress: Vec<Option<f64>> = (0..n)
        .map(|s| {
            let d = index.stop_pos(s).distance(person.dest);
            (d <= max_walk).then_some(d)
        })
        .collect();

    let direct = person.origin.distance(person.dest);
    let mut best: Option<Candidate> = (direct <= max_walk).then(|| Candidate {
        arrival: person.depart_s + direct / speed,
        seq: Vec::new(),
        last: None,
    });

    for round in 1..=MAX_RIDES {
        let mut arrived: Vec<Vec<LabelId>> = vec![Vec::new(); n];
        let mut onboard: Vec<Option<(LabelId, usize)>> = vec![None; index.trip_count()];
        for c in index.connections() {
            if let Some(id) = arena.best_boarding(&ready[c.from_stop], f64::from(c.dep_s)) {
                let replace = match onboard[c.trip] {
                    None => true,
                    Some((cur, _)) => arena.labels[id].seq < arena.labels[cur].seq,
                };
                if replace {
                    onboard[c.trip] = Some((id, c.seq));
                }
            }
            if let Some((from, board)) = onboard[c.trip] {
                let mut seq = arena.labels[from].seq.clone();
                seq.push(c.trip);
                arena.offer(
                    &mut arrived[c.to_stop],
                    Label {
                        time: f64::from(c.arr_s),
                        seq,
                        stop: c.to_stop,
                        via: Via::Ride {
                            from,
                            trip: c.trip,
                            board,
                            alight: c.seq + 1,
                        },
                    },
                );
            }
        }

        for (s, set) in arrived.iter().enumerate() {
            let Some(d) = egress[s] else { continue };
            for &id in set {
                let l = &arena.labels[id];
                let cand = Candidate {
                    arrival: l.time + d / speed,
                    seq: l.seq.clone(),
                    last: Some((id, d)),
                };
                if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                    best = Some(cand);
                }
            }
        }
        if round == MAX_RIDES {
            break;
        }

        let mut next: Vec<Vec<LabelId>> = vec![Vec::new(); n];
        for s in 0..n {
            for &id in &arrived[s].clone() {
                let (time, seq) = (arena.labels[id].time, arena.labels[id].seq.clone());
                arena.offer(
                    &mut next[s],
                    Label {
                        time,
                        seq: seq.clone(),
                        stop: s,
                        via: Via::Foot { from: id },
                    },
                );
                for fp in index.footpaths(s) {
                    if fp.distance_m > max_walk {
                        continue;
                    }
                    arena.offer(
                        &mut next[fp.to_stop],
                        Label {
                            time: time + fp.distance_m / speed,
                            seq: seq.clone(),
                            stop: fp.to_stop,
                            via: Via::Foot { from: id },
                        },
                    );
                }
            }
        }
        ready = next;
    }

    match best {
        Some(c) => JourneyOutcome::Planned(build_plan(index, person, &arena, &c, speed)),
        None => JourneyOutcome::Unserved(Unserved {
            person_id: person.id.clone(),
            reason: if !any_access || egress.iter().all(Option::is_none) {
                UnservedReason::NoStopInReach
            } else {
                UnservedReason::NoJourney
            },
        }),
    }
}

fn walk(from: Point<f64>, to: Point<f64>, distance_m: f64, speed: f64) -> Leg {
    Leg::Walk {
        from,
        to,
        distance_m,
        duration_s: distance_m / speed,
    }
}

fn build_plan(index: &TimetableIndex, person: &PersonTrip, arena: &Arena, best: &Candidate, speed: f64) -> PersonPlan {
    let mut legs = Vec::new();
    match best.last {
        None => {
            let d = person.origin.distance(person.dest);
            legs.push(walk(person.origin, person.dest, d, speed));
        }
        Some((last, egress_m)) => {
            let egress_from = index.stop_pos(arena.labels[last].stop);
            if egress_m > 0.0 {
                legs.push(walk(egress_from, person.dest, egress_m, speed));
            }
            let mut cur = last;
            loop {
                let l = &arena.labels[cur];
                match l.via {
                    Via::Access => {
                        let p = index.stop_pos(l.stop);
                        let d = person.origin.distance(p);
                        if d > 0.0 {
                            legs.push(walk(person.origin, p, d, speed));
                        }
                        break;
                    }
                    Via::Ride {
                        from,
                        trip,
                        board,
                        alight,
                    } => {
                        let ts = &index.trips[trip];
                        legs.push(Leg::Ride {
                            trip_id: index.trip_id(trip).to_string(),
                            board_stop: index.stop_id(ts.stops[board]).to_string(),
                            alight_stop: index.stop_id(ts.stops[alight]).to_string(),
                            scheduled_board_s: ts.departure_s[board],
                            scheduled_alight_s: ts.arrival_s[alight],
                        });
                        cur = from;
                    }
                    Via::Foot { from } => {
                        let prev = arena.labels[from].stop;
                        if prev != l.stop {
                            let (a, b) = (index.stop_pos(prev), index.stop_pos(l.stop));
                            legs.push(walk(a, b, a.distance(b), speed));
                        }
                        cur = from;
                    }
                }
            }
            legs.reverse();
        }
    }
    PersonPlan {
        person_id: person.id.clone(),
        depart_s: person.depart_s,
        legs,
        arrival_s: best.arrival,
    }
}
