//! The tick loop.
//!
//! Each tick first settles the state at `t` (riders reaching stops, vehicle
//! insertions, stop service), records it, then advances every vehicle to
//! `t + 1` from the state at `t`. Each edge holds one FIFO queue ordered by
//! front position; the head of a queue may cross into the next edge of its
//! route when the entry cell is free, one entrant per edge per tick.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::aggregate::EdgeAccumulator;
use super::krauss::{car_following_step, safe_speed, KraussParams, Leader};
use super::stops::{dwell_time_s, service_stop};
use super::*;
use crate::network::EdgeIdx;
use crate::rng::StreamKey;
use crate::router::Leg;
use crate::vehicles::VehicleType;

struct Dwell {
    stop: usize,
    event: usize,
    depart_at: u32,
    boarded: usize,
    alighted: usize,
}

struct BusState {
    plan: usize,
    capacity: usize,
    next_stop: usize,
    dwell: Option<Dwell>,
    onboard: Vec<usize>,
    finished: bool,
}

struct Vehicle {
    id: Arc<str>,
    type_id: Arc<str>,
    length: f64,
    kp: KraussParams<f64>,
    path: Vec<EdgeIdx>,
    ri: usize,
    pos: f64,
    speed: f64,
    accel: f64,
    rng: ChaCha8Rng,
    record: bool,
    bus: Option<BusState>,
}

impl Vehicle {
    fn new(id: &str, vt: &VehicleType, path: Vec<EdgeIdx>, seed: u64, record: bool, bus: Option<BusState>) -> Self {
        Self {
            id: Arc::from(id),
            type_id: Arc::from(vt.id.as_str()),
            length: vt.length_m,
            kp: KraussParams {
                accel: vt.accel_mps2,
                decel: vt.decel_mps2,
                max_speed: vt.max_speed_mps,
                min_gap: vt.min_gap_m,
                sigma: vt.sigma,
                tau: TAU_S,
            },
            path,
            ri: 0,
            pos: 0.0,
            speed: 0.0,
            accel: 0.0,
            rng: StreamKey::new(seed).str("dawdle").str(id).rng(),
            record,
            bus,
        }
    }

    fn edge(&self) -> EdgeIdx {
        self.path[self.ri]
    }
}

struct Ride {
    plan: Option<usize>,
    board_stop: String,
    board_idx: usize,
    alight_stop: String,
    walk_before: f64,
}

enum PaxState {
    Pending,
    Waiting,
    Riding,
    Done(f64),
    Unserved,
}

struct Pax {
    rides: Vec<Ride>,
    final_walk: f64,
    ride: usize,
    alight_idx: usize,
    frustrated: bool,
    state: PaxState,
}

struct Sim<'a> {
    world: World<'a>,
    params: SimParams,
    vehicles: Vec<Vehicle>,
    active: Vec<usize>,
    queues: Vec<Vec<usize>>,
    rr_last: Vec<Option<EdgeIdx>>,
    pax: Vec<Pax>,
    waiting: HashMap<String, Vec<usize>>,
    joins: BTreeMap<u32, Vec<usize>>,
    departed: Vec<Vec<bool>>,
    out: SimulationOutputs,
    acc: EdgeAccumulator,
}

fn tick_at_or_after(t: f64) -> u32 {
    t.ceil().max(0.0).min(f64::from(u32::MAX)) as u32
}

impl<'a> Sim<'a> {
    fn setup_persons(&mut self) {
        let plan_of: HashMap<&str, usize> = self
            .world
            .bus_trips
            .iter()
            .enumerate()
            .map(|(i, p)| (p.trip_id.as_str(), i))
            .collect();
        for (i, outcome) in self.world.person_plans.iter().enumerate() {
            let Some(plan) = outcome.plan() else {
                self.pax.push(Pax {
                    rides: Vec::new(),
                    final_walk: 0.0,
                    ride: 0,
                    alight_idx: 0,
                    frustrated: false,
                    state: PaxState::Unserved,
                });
                continue;
            };
            let mut rides = Vec::new();
            let mut walk_acc = 0.0;
            for leg in &plan.legs {
                match leg {
                    Leg::Walk { duration_s, .. } => walk_acc += duration_s,
                    Leg::Ride {
                        trip_id,
                        board_stop,
                        alight_stop,
                        scheduled_board_s,
                        ..
                    } => {
                        let p = plan_of.get(trip_id.as_str()).copied();
                        let board_idx = p
                            .and_then(|p| {
                                let stops = &self.world.bus_trips[p].stops;
                                stops
                                    .iter()
                                    .position(|s| &s.stop_id == board_stop && s.departure_s == *scheduled_board_s)
                                    .or_else(|| stops.iter().position(|s| &s.stop_id == board_stop))
                            })
                            .unwrap_or(0);
                        rides.push(Ride {
                            plan: p,
                            board_stop: board_stop.clone(),
                            board_idx,
                            alight_stop: alight_stop.clone(),
                            walk_before: walk_acc,
                        });
                        walk_acc = 0.0;
                    }
                }
            }
            let depart = self.world.persons[i].depart_s;
            let state = if rides.is_empty() {
                PaxState::Done(depart + walk_acc)
            } else {
                self.joins
                    .entry(tick_at_or_after(depart + rides[0].walk_before))
                    .or_default()
                    .push(i);
                PaxState::Pending
            };
            self.pax.push(Pax {
                rides,
                final_walk: walk_acc,
                ride: 0,
                alight_idx: 0,
                frustrated: false,
                state,
            });
        }
    }

    fn process_joins(&mut self, t: u32) {
        while let Some(entry) = self.joins.first_entry() {
            if *entry.key() > t {
                break;
            }
            for p in entry.remove() {
                let pax = &mut self.pax[p];
                let ride = &pax.rides[pax.ride];
                pax.frustrated = match ride.plan {
                    Some(plan) => self.departed[plan][ride.board_idx],
                    None => true,
                };
                pax.state = PaxState::Waiting;
                self.waiting.entry(ride.board_stop.clone()).or_default().push(p);
            }
        }
    }

    fn queue_free(&self, edge: EdgeIdx, front: f64, length: f64, gap: f64) -> bool {
        let (lo, hi) = (front - length - gap, front + gap);
        self.queues[edge.0].iter().all(|&s| {
            let v = &self.vehicles[s];
            !(v.pos > lo && v.pos - v.length < hi)
        })
    }

    fn try_insert(&mut self, slot: usize) -> bool {
        let v = &self.vehicles[slot];
        let edge = v.edge();
        let edge_len = self.world.net.edge(edge).length_m;
        let body = v.length.min(edge_len);
        let front = match &v.bus {
            Some(b) => self.world.bus_trips[b.plan].stops[0].offset_m.max(body),
            None => body,
        };
        if !self.queue_free(edge, front, v.length, v.kp.min_gap) {
            return false;
        }
        let q = &self.queues[edge.0];
        let at = q
            .iter()
            .position(|&s| self.vehicles[s].pos < front)
            .unwrap_or(q.len());
        self.queues[edge.0].insert(at, slot);
        let v = &mut self.vehicles[slot];
        v.pos = front;
        v.speed = 0.0;
        v.accel = 0.0;
        let at = self.active.partition_point(|&s| s < slot);
        self.active.insert(at, slot);
        self.out.stats.vehicles_inserted += 1;
        true
    }

    fn dist_to_stop(&self, v: &Vehicle, bus: &BusState) -> Option<f64> {
        let stop = self.world.bus_trips[bus.plan].stops.get(bus.next_stop)?;
        let net = self.world.net;
        if stop.path_index <= v.ri {
            return Some(stop.offset_m - v.pos);
        }
        let mut d = net.edge(v.edge()).length_m - v.pos;
        for k in v.ri + 1..stop.path_index {
            d += net.edge(v.path[k]).length_m;
        }
        Some(d + stop.offset_m)
    }

    fn boards(&self, p: usize, plan: usize, k: usize) -> Option<usize> {
        let pax = &self.pax[p];
        let ride = &pax.rides[pax.ride];
        let stops = &self.world.bus_trips[plan].stops;
        let planned = ride.plan == Some(plan) && ride.board_idx == k;
        if !planned && !pax.frustrated {
            return None;
        }
        stops
            .iter()
            .enumerate()
            .skip(k + 1)
            .find(|(_, s)| s.stop_id == ride.alight_stop)
            .map(|(j, _)| j)
    }

    /// Boards eligible riders waiting at stop `k` of the bus in `slot`; returns how many boarded.
    fn board(&mut self, slot: usize, t: u32) -> usize {
        let bus = self.vehicles[slot].bus.as_ref().expect("bus");
        let (plan, capacity) = (bus.plan, bus.capacity);
        let k = bus.dwell.as_ref().map_or(bus.next_stop, |d| d.stop);
        let stops = &self.world.bus_trips[plan].stops;
        if k + 1 >= stops.len() {
            return 0;
        }
        let stop_id = stops[k].stop_id.clone();
        let Some(mut queue) = self.waiting.remove(&stop_id) else { return 0 };
        let targets: HashMap<usize, usize> = queue
            .iter()
            .filter_map(|&p| self.boards(p, plan, k).map(|j| (p, j)))
            .collect();
        let mut onboard = std::mem::take(&mut self.vehicles[slot].bus.as_mut().unwrap().onboard);
        let ex = service_stop(&mut onboard, &mut queue, capacity, |_| false, |p| targets.contains_key(p));
        self.vehicles[slot].bus.as_mut().unwrap().onboard = onboard;
        if !queue.is_empty() {
            self.waiting.insert(stop_id, queue);
        }
        for &p in &ex.boarded {
            let pax = &mut self.pax[p];
            pax.state = PaxState::Riding;
            pax.alight_idx = targets[&p];
        }
        let _ = t;
        ex.boarded.len()
    }

    fn alight(&mut self, slot: usize, k: usize, t: u32) -> usize {
        let mut onboard = std::mem::take(&mut self.vehicles[slot].bus.as_mut().unwrap().onboard);
        let mut none: Vec<usize> = Vec::new();
        let pax = &self.pax;
        let ex = service_stop(&mut onboard, &mut none, 0, |&p| pax[p].alight_idx == k, |_| false);
        self.vehicles[slot].bus.as_mut().unwrap().onboard = onboard;
        for &p in &ex.alighted {
            let pax = &mut self.pax[p];
            pax.ride += 1;
            pax.frustrated = false;
            if pax.ride < pax.rides.len() {
                pax.state = PaxState::Pending;
                let at = tick_at_or_after(f64::from(t) + pax.rides[pax.ride].walk_before);
                self.joins.entry(at.max(t + 1)).or_default().push(p);
            } else {
                pax.state = PaxState::Done(f64::from(t) + pax.final_walk);
            }
        }
        ex.alighted.len()
    }

    fn service_buses(&mut self, t: u32) {
        let slots: Vec<usize> = self.active.clone();
        for slot in slots {
            let Some(bus) = &self.vehicles[slot].bus else { continue };
            if bus.finished {
                continue;
            }
            let plan = bus.plan;
            let trip = &self.world.bus_trips[plan];
            match &bus.dwell {
                None => {
                    let Some(d) = self.dist_to_stop(&self.vehicles[slot], bus) else { continue };
                    if d > STOP_REACH_M {
                        continue;
                    }
                    let k = bus.next_stop;
                    let onboard_before = bus.onboard.len();
                    let alighted = self.alight(slot, k, t);
                    let boarded = self.board(slot, t);
                    let stop = &trip.stops[k];
                    let depart_at =
                        (t + dwell_time_s(&self.params.dwell, stop.scheduled_dwell_s(), alighted, boarded))
                            .max(stop.departure_s);
                    self.out.stop_events.push(StopEvent {
                        trip_id: trip.trip_id.clone(),
                        stop_id: stop.stop_id.clone(),
                        arrival_s: t,
                        departure_s: depart_at,
                        boarded: boarded as u32,
                        alighted: alighted as u32,
                    });
                    self.out.onboard_before_arrival.push(onboard_before as u32);
                    let event = self.out.stop_events.len() - 1;
                    self.vehicles[slot].bus.as_mut().unwrap().dwell = Some(Dwell {
                        stop: k,
                        event,
                        depart_at,
                        boarded,
                        alighted,
                    });
                }
                Some(dw) if t >= dw.depart_at => {
                    let (k, event) = (dw.stop, dw.event);
                    let late = self.board(slot, t);
                    let bus = self.vehicles[slot].bus.as_mut().unwrap();
                    let dw = bus.dwell.as_mut().unwrap();
                    if late > 0 {
                        dw.boarded += late;
                        let stop = &trip.stops[k];
                        let arrival = self.out.stop_events[event].arrival_s;
                        dw.depart_at = (arrival
                            + dwell_time_s(&self.params.dwell, stop.scheduled_dwell_s(), dw.alighted, dw.boarded))
                        .max(stop.departure_s);
                        let ev = &mut self.out.stop_events[event];
                        ev.boarded = dw.boarded as u32;
                        ev.departure_s = dw.depart_at;
                        if dw.depart_at > t {
                            continue;
                        }
                    }
                    self.out.stop_events[event].departure_s = t;
                    bus.dwell = None;
                    self.departed[plan][k] = true;
                    if k + 1 == trip.stops.len() {
                        bus.finished = true;
                    } else {
                        bus.next_stop = k + 1;
                    }
                    let stop_id = &trip.stops[k].stop_id;
                    if let Some(q) = self.waiting.get(stop_id) {
                        for &p in q {
                            let pax = &mut self.pax[p];
                            let ride = &pax.rides[pax.ride];
                            if ride.plan == Some(plan) && ride.board_idx == k {
                                pax.frustrated = true;
                            }
                        }
                    }
                }
                Some(_) => {}
            }
        }
    }

    fn record(&mut self, t: u32) {
        let net = self.world.net;
        for &slot in &self.active {
            let v = &self.vehicles[slot];
            let edge = v.edge();
            self.acc.add(edge, t, v.speed, v.pos, v.length);
            if let Some(b) = &v.bus {
                let load = b.onboard.len() as f64 / b.capacity as f64;
                self.out.stats.max_load_factor = self.out.stats.max_load_factor.max(load);
            }
            if v.record {
                self.out.trajectories.push(TrajectoryRecord {
                    t_s: t,
                    vehicle_id: Arc::clone(&v.id),
                    type_id: Arc::clone(&v.type_id),
                    edge_id: Arc::from(net.edge(edge).id.as_str()),
                    position_m: v.pos,
                    speed_mps: v.speed,
                    accel_mps2: v.accel,
                });
            }
        }
    }

    fn remove_finished(&mut self) {
        let finished: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&s| self.vehicles[s].bus.as_ref().is_some_and(|b| b.finished))
            .collect();
        for slot in finished {
            self.retire(slot);
        }
    }

    fn retire(&mut self, slot: usize) {
        let edge = self.vehicles[slot].edge();
        self.queues[edge.0].retain(|&s| s != slot);
        self.active.retain(|&s| s != slot);
        self.out.stats.vehicles_completed += 1;
        if let Some(b) = &self.vehicles[slot].bus {
            let trip = &self.world.bus_trips[b.plan].trip_id;
            self.out.final_onboard.insert(trip.clone(), b.onboard.len() as u32);
        }
    }

    fn leader(&self, slot: usize) -> Option<Leader<f64>> {
        let v = &self.vehicles[slot];
        let q = &self.queues[v.edge().0];
        let idx = q.iter().position(|&s| s == slot).expect("vehicle is queued on its edge");
        if idx > 0 {
            let l = &self.vehicles[q[idx - 1]];
            return Some(Leader {
                speed: l.speed,
                gap: l.pos - l.length - v.pos,
            });
        }
        let net = self.world.net;
        let mut dist = net.edge(v.edge()).length_m - v.pos;
        for &e in &v.path[v.ri + 1..] {
            if dist > LOOKAHEAD_M {
                break;
            }
            if let Some(&ls) = self.queues[e.0].last() {
                let l = &self.vehicles[ls];
                return Some(Leader {
                    speed: l.speed,
                    gap: dist + l.pos - l.length,
                });
            }
            dist += net.edge(e).length_m;
        }
        None
    }

    fn step(&mut self) {
        let net = self.world.net;
        let slots = self.active.clone();
        let mut new_speed: HashMap<usize, f64> = HashMap::with_capacity(slots.len());
        for &slot in &slots {
            let leader = self.leader(slot);
            let xi = self.draw(slot);
            let v = &self.vehicles[slot];
            let edge = net.edge(v.edge());
            let dwelling = v.bus.as_ref().is_some_and(|b| b.dwell.is_some());
            let mut speed = if dwelling {
                0.0
            } else {
                let mut s = car_following_step(leader, v.speed, &v.kp, edge.speed_limit_mps, 1.0, xi);
                if let Some(l) = leader {
                    s = s.min(l.gap.max(0.0));
                }
                if let Some(d) = v.bus.as_ref().and_then(|b| self.dist_to_stop(v, b)) {
                    let d = d.max(0.0);
                    s = s.min(safe_speed(0.0, d, v.speed, v.kp.decel, v.kp.tau).max(0.0)).min(d);
                }
                s
            };
            if v.pos + speed > edge.length_m {
                if let Some(&next) = v.path.get(v.ri + 1) {
                    speed = speed.min(net.edge(next).speed_limit_mps);
                }
            }
            new_speed.insert(slot, speed);
        }

        // Moves within edges; heads that reach past their edge end either
        // finish, or compete for the next edge of their route.
        let mut displacement: HashMap<usize, f64> = HashMap::with_capacity(slots.len());
        let mut crossings: BTreeMap<EdgeIdx, Vec<(EdgeIdx, usize, f64)>> = BTreeMap::new();
        let mut completed = Vec::new();
        for &slot in &slots {
            let v = &self.vehicles[slot];
            let len = net.edge(v.edge()).length_m;
            let target = v.pos + new_speed[&slot];
            if target <= len {
                displacement.insert(slot, new_speed[&slot]);
                continue;
            }
            displacement.insert(slot, len - v.pos);
            let is_head = self.queues[v.edge().0].first() == Some(&slot);
            match v.path.get(v.ri + 1) {
                Some(&next) if is_head => crossings.entry(next).or_default().push((v.edge(), slot, target - len)),
                None if v.bus.is_none() => completed.push(slot),
                _ => {}
            }
        }

        // Lower bound on the rear of each edge's last vehicle after this tick.
        let last_rear = |e: EdgeIdx| -> Option<f64> {
            let &s = self.queues[e.0].last()?;
            let v = &self.vehicles[s];
            Some(v.pos + displacement[&s] - v.length)
        };
        let mut entries: Vec<(usize, EdgeIdx, f64)> = Vec::new();
        let mut served: Vec<(EdgeIdx, EdgeIdx)> = Vec::new();
        for (target, mut cands) in crossings {
            cands.sort_by_key(|c| c.0);
            let pick = self.rr_last[target.0]
                .and_then(|last| cands.iter().position(|c| c.0 > last))
                .unwrap_or(0);
            let (approach, slot, overshoot) = cands[pick];
            let v = &self.vehicles[slot];
            let rear = last_rear(target);
            if rear.is_none_or(|r| r >= v.length + v.kp.min_gap) {
                served.push((target, approach));
                let mut x = overshoot.min(net.edge(target).length_m);
                if let Some(r) = rear {
                    x = x.min(r);
                }
                entries.push((slot, target, x));
            }
        }
        for (target, approach) in served {
            self.rr_last[target.0] = Some(approach);
        }

        for &slot in &slots {
            let d = displacement[&slot];
            let v = &mut self.vehicles[slot];
            v.pos += d;
            v.accel = d - v.speed;
            v.speed = d;
        }
        for (slot, target, x) in entries {
            let from = self.vehicles[slot].edge();
            self.queues[from.0].retain(|&s| s != slot);
            self.queues[target.0].push(slot);
            let v = &mut self.vehicles[slot];
            v.ri += 1;
            v.pos = x;
            v.speed += x;
            v.accel += x;
        }
        for slot in completed {
            self.retire(slot);
        }

        for q in &self.queues {
            for w in q.windows(2) {
                let (l, f) = (&self.vehicles[w[0]], &self.vehicles[w[1]]);
                let gap = l.pos - l.length - f.pos;
                let m = self.out.stats.min_gap_m.get_or_insert(gap);
                *m = m.min(gap);
            }
        }
    }

    fn draw(&mut self, slot: usize) -> f64 {
        self.vehicles[slot].rng.gen()
    }
}

/// Runs one configuration over `[start_s, end_s)`.
///
/// Output is a pure function of `(world, params)`.
pub fn run_simulation(world: &World<'_>, params: &SimParams) -> SimulationOutputs {
    let mut sim = Sim {
        world: *world,
        params: *params,
        vehicles: Vec::new(),
        active: Vec::new(),
        queues: vec![Vec::new(); world.net.edges().len()],
        rr_last: vec![None; world.net.edges().len()],
        pax: Vec::new(),
        waiting: HashMap::new(),
        joins: BTreeMap::new(),
        departed: world.bus_trips.iter().map(|p| vec![false; p.stops.len()]).collect(),
        out: SimulationOutputs::default(),
        acc: EdgeAccumulator::new(params.sampling_period_s),
    };

    // (insertion tick, kind, index) in deterministic order.
    let mut pending: Vec<(u32, u8, String, usize)> = Vec::new();
    for (i, p) in world.bus_trips.iter().enumerate() {
        let t = p.stops[0].arrival_s.max(params.start_s);
        if t < params.end_s {
            pending.push((t, 0, p.trip_id.clone(), i));
        }
    }
    for (i, rv) in world.vehicles.iter().enumerate() {
        let t = tick_at_or_after(rv.trip.depart_s);
        if t >= params.start_s && t < params.end_s {
            pending.push((t, 1, rv.trip.id.clone(), i));
        }
    }
    pending.sort();
    for (_, kind, id, i) in &pending {
        let v = if *kind == 0 {
            let plan = &world.bus_trips[*i];
            let vt = world
                .catalog
                .get(&plan.vehicle_type_id)
                .cloned()
                .unwrap_or_else(|| world.catalog.default_bus_type().clone());
            let bus = BusState {
                plan: *i,
                capacity: vt.passenger_capacity as usize,
                next_stop: 0,
                dwell: None,
                onboard: Vec::new(),
                finished: false,
            };
            Vehicle::new(id, &vt, plan.path.clone(), params.seed, true, Some(bus))
        } else {
            let rv = &world.vehicles[*i];
            let vt = world.catalog.background_type(rv.trip.class);
            Vehicle::new(id, &vt, rv.path.clone(), params.seed, params.record_background, None)
        };
        sim.vehicles.push(v);
    }
    let insert_at: Vec<u32> = pending.iter().map(|p| p.0).collect();
    for p in world.bus_trips {
        sim.out.final_onboard.insert(p.trip_id.clone(), 0);
    }
    sim.setup_persons();

    let mut next_pending = 0usize;
    let mut due: Vec<usize> = Vec::new();
    let mut t = params.start_s;
    while t < params.end_s {
        sim.process_joins(t);
        while next_pending < insert_at.len() && insert_at[next_pending] <= t {
            due.push(next_pending);
            next_pending += 1;
        }
        due.retain(|&slot| !sim.try_insert(slot));
        sim.service_buses(t);
        sim.record(t);
        sim.remove_finished();
        if t + 1 >= params.end_s {
            break;
        }
        if sim.active.is_empty() && due.is_empty() {
            let next = insert_at.get(next_pending).copied().unwrap_or(params.end_s);
            t = next.max(t + 1);
            continue;
        }
        sim.step();
        t += 1;
    }

    for &slot in &sim.active {
        if let Some(b) = &sim.vehicles[slot].bus {
            let trip = &world.bus_trips[b.plan].trip_id;
            sim.out.final_onboard.insert(trip.clone(), b.onboard.len() as u32);
        }
    }
    sim.out.person_outcomes = world
        .persons
        .iter()
        .zip(&sim.pax)
        .map(|(p, pax)| {
            let (status, arrive_s) = match pax.state {
                PaxState::Unserved => (PersonStatus::Unserved, None),
                PaxState::Done(a) if a <= f64::from(params.end_s) => (PersonStatus::Arrived, Some(a)),
                _ => (PersonStatus::Unfinished, None),
            };
            PersonOutcome {
                person_id: p.id.clone(),
                status,
                depart_s: p.depart_s,
                arrive_s,
            }
        })
        .collect();
    sim.out.edge_intervals = sim.acc.finish(world.net);
    sim.out
}
