//! Acceptance gate: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transit_core::analysis::{commercial_speeds, mean_commercial_speed, route_map, TripInfo};
use transit_core::demand::{expand_trips, DemandMode, DeparturePolicy, OdCell, OdMatrix};
use transit_core::dsml::{interpret, parse_scenario, DirectoryWorkspace};
use transit_core::energy::{estimate_trip, LongitudinalModel, Propulsion, UnitConstants};
use transit_core::microsim::{
    car_following_step, safe_speed, trajectories_from_csv, edge_intervals_from_csv, KraussParams, Leader,
    TrajectoryRecord,
};
use transit_core::pipeline::{compile, run_scenario, ConfigRun, RunOptions};
use transit_core::router::{plan_person_journey, TimetableIndex, WalkParams, MAX_RIDES};
use transit_core::Error;

const SEED: u64 = 7;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: impl Into<String>) -> Outcome {
    if cond {
        Ok(detail.into())
    } else {
        Err(detail.into())
    }
}

fn listing_program() -> String {
    r#"import "network.toy"
import "vehicle.buses.json"
import "gtfs.latest"
import "td.toy.od"

simulation configuration 1 {
    time [0000:1200]
    schedule weekday
    output_sampling_period 3600
    vehicleassignment {
        block 101: "Gillig_103"
    }
}

simulation configuration 2 {
    time [0000:1200]
    schedule weekend
    output_sampling_period 3600
}
"#
    .to_string()
}

fn dsml_conformance() -> Outcome {
    let started = Instant::now();
    let ws = DirectoryWorkspace::new(common::toy_dir());
    let program = parse_scenario(&listing_program()).map_err(|e| e.to_string())?;
    let configs = interpret(&program, &ws).map_err(|e| e.to_string())?;
    let compiled = transit_core::pipeline::Compiled {
        program,
        configs,
        diagnostics: Vec::new(),
    };
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = run_scenario(&compiled, &RunOptions::default(), out.path()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let weekday_events = runs[0].outputs.stop_events.len();

    let bad = compile(&common::toy_dir().join("bad_block.scn"));
    let rejected = match &bad {
        Err(Error::Validation(d)) => d.iter().any(|d| d.construct == "block 101" && d.message.contains("block 101")),
        _ => false,
    };
    check(
        weekday_events > 0 && rejected && elapsed < Duration::from_secs(1),
        format!("{weekday_events} stop events, inconsistent block rejected: {rejected}, {elapsed:.2?}"),
    )
}

fn files_identical(a: &Path, b: &Path, names: &[&str]) -> Result<bool, String> {
    for n in names {
        let x = std::fs::read(a.join(n)).map_err(|e| format!("{}: {e}", a.join(n).display()))?;
        let y = std::fs::read(b.join(n)).map_err(|e| format!("{}: {e}", b.join(n).display()))?;
        if x != y {
            return Ok(false);
        }
    }
    Ok(true)
}

fn determinism() -> Outcome {
    let started = Instant::now();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_transit-engine"))
            .arg("run")
            .arg(common::toy_dir().join("toy.scn"))
            .args(["--seed", &SEED.to_string(), "--out"])
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
    }
    let elapsed = started.elapsed() / 2;
    let names = ["trajectories.csv", "stop_events.csv", "edge_intervals.csv", "energy.csv"];
    let mut same = true;
    for c in ["config_1", "config_2"] {
        same &= files_identical(&dirs[0].path().join(c), &dirs[1].path().join(c), &names)?;
    }
    check(
        same && elapsed < Duration::from_secs(30),
        format!("byte-identical: {same}, {elapsed:.2?} per run"),
    )
}

fn toy_runs(scenario: &str, opts: &RunOptions) -> Result<(Vec<ConfigRun>, tempfile::TempDir), String> {
    let compiled = compile(&common::toy_dir().join(scenario)).map_err(|e| e.to_string())?;
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = run_scenario(&compiled, opts, out.path()).map_err(|e| e.to_string())?;
    Ok((runs, out))
}

fn conservation() -> Outcome {
    let opts = RunOptions {
        seed: SEED,
        record_background: true,
        ..RunOptions::default()
    };
    let mut trips = 0;
    let mut events = 0;
    let mut ticks_checked = 0;
    for scenario in ["toy.scn", "demand.scn"] {
        let (runs, _dir) = toy_runs(scenario, &opts)?;
        for run in &runs {
            let o = &run.outputs;
            let capacity: BTreeMap<&str, u32> = run.trips.iter().map(|t| (t.trip.as_str(), t.capacity)).collect();
            let mut sums: BTreeMap<&str, i64> = BTreeMap::new();
            for (e, before) in o.stop_events.iter().zip(&o.onboard_before_arrival) {
                let cap = i64::from(capacity[e.trip_id.as_str()]);
                let after = i64::from(*before) - i64::from(e.alighted) + i64::from(e.boarded);
                if i64::from(*before) > cap || after > cap {
                    return Err(format!("trip {} over capacity at {}", e.trip_id, e.stop_id));
                }
                *sums.entry(e.trip_id.as_str()).or_default() += i64::from(e.boarded) - i64::from(e.alighted);
                events += 1;
            }
            for (trip, net) in &sums {
                let final_onboard = i64::from(o.final_onboard[*trip]);
                if net - final_onboard != 0 {
                    return Err(format!("trip {trip}: boarded - alighted - final onboard = {}", net - final_onboard));
                }
                trips += 1;
            }
            let lengths = type_lengths();
            let mut by_tick: BTreeMap<(u32, &str), Vec<&TrajectoryRecord>> = BTreeMap::new();
            for r in &o.trajectories {
                by_tick.entry((r.t_s, r.edge_id.as_ref())).or_default().push(r);
            }
            for ((t, edge), mut list) in by_tick {
                list.sort_by(|a, b| b.position_m.total_cmp(&a.position_m));
                for w in list.windows(2) {
                    let gap = w[0].position_m - lengths[w[0].type_id.as_ref()] - w[1].position_m;
                    if gap < 0.0 {
                        return Err(format!("negative gap {gap} on {edge} at t={t}"));
                    }
                }
                ticks_checked += 1;
            }
            if o.stats.min_gap_m.is_some_and(|g| g < 0.0) {
                return Err("engine reported a negative gap".into());
            }
        }
    }
    check(
        trips > 0,
        format!("{trips} trips, {events} stop events, {ticks_checked} (tick, edge) queues"),
    )
}

fn type_lengths() -> BTreeMap<String, f64> {
    let compiled = compile(&common::toy_dir().join("toy.scn")).expect("toy compiles");
    let catalog = &compiled.configs[0].catalog;
    let mut out: BTreeMap<String, f64> = catalog.types().map(|t| (t.id.clone(), t.length_m)).collect();
    for class in [
        transit_core::vehicles::VehicleClass::Car,
        transit_core::vehicles::VehicleClass::Truck,
        transit_core::vehicles::VehicleClass::Trailer,
    ] {
        let t = catalog.background_type(class);
        out.insert(t.id.clone(), t.length_m);
    }
    out
}

fn routing_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let walk = WalkParams::default();
    let radius = 400.0;
    let mut compared = 0;
    for case in 0..50 {
        let schedule = common::random_schedule(&mut rng, 50);
        let conns: usize = schedule.stop_times.values().map(|v| v.len() - 1).sum();
        if conns > 50 {
            return Err(format!("timetable {case} has {conns} connections"));
        }
        let index = TimetableIndex::build(&schedule, schedule.trips.keys().map(String::as_str), radius);
        for p in 0..40 {
            let person = common::random_person(&mut rng, p);
            let got = plan_person_journey(&index, &person, &walk).plan().map(|p| p.arrival_s);
            let want = common::exhaustive_earliest_arrival(&schedule, &person, &walk, radius, MAX_RIDES);
            if got != want {
                return Err(format!("timetable {case}, person {p}: planner {got:?}, enumeration {want:?}"));
            }
            compared += 1;
        }
    }
    check(true, format!("{compared} journeys on 50 timetables match exactly"))
}

fn bus_trajectories(run: &ConfigRun) -> BTreeMap<String, Vec<TrajectoryRecord>> {
    let trips: BTreeSet<&str> = run.trips.iter().map(|t| t.trip.as_str()).collect();
    let mut out: BTreeMap<String, Vec<TrajectoryRecord>> = BTreeMap::new();
    for r in &run.outputs.trajectories {
        if trips.contains(r.vehicle_id.as_ref()) {
            out.entry(r.vehicle_id.to_string()).or_default().push(r.clone());
        }
    }
    out
}

fn energy_ordering() -> Outcome {
    let opts = RunOptions {
        seed: SEED,
        ..RunOptions::default()
    };
    let mut runs = Vec::new();
    for scenario in ["toy.scn", "demand.scn", "fleet.scn"] {
        runs.extend(toy_runs(scenario, &opts)?.0);
    }
    let models = [Propulsion::Diesel, Propulsion::Hybrid, Propulsion::Electric].map(LongitudinalModel::<f64>::with_defaults);
    let mut rows = 0;
    let mut example = String::new();
    for run in &runs {
        for (trip, records) in bus_trajectories(run) {
            let econ: Vec<f64> = models
                .iter()
                .map(|m| {
                    estimate_trip(&trip, &records, m)
                        .ok()
                        .and_then(|r| r.economy_mi_per_deg)
                        .unwrap_or(f64::NAN)
                })
                .collect();
            if !(econ[2] > econ[1] && econ[1] > econ[0]) {
                return Err(format!("trip {trip}: diesel {:.2}, hybrid {:.2}, electric {:.2}", econ[0], econ[1], econ[2]));
            }
            if example.is_empty() {
                example = format!("e.g. {trip}: {:.2} / {:.2} / {:.2} mi/DEG", econ[0], econ[1], econ[2]);
            }
            rows += 1;
        }
    }
    check(rows > 0, format!("{rows} trajectories ordered, {example}"))
}

fn unit_constants() -> Outcome {
    let u = UnitConstants::<f64>::default();
    let one_kwh_deg = u.kj_to_deg(u.kwh_to_kj(1.0));
    let exact = one_kwh_deg == 3600.0 / 146_520.0;
    let mut worst: f64 = 0.0;
    for kwh in [1e-6, 0.37, 1.0, 42.5, 1234.5678, 9.9e5] {
        let back = u.kj_to_kwh(u.deg_to_kj(u.kj_to_deg(u.kwh_to_kj(kwh))));
        worst = worst.max(((back - kwh) / kwh).abs());
    }
    check(
        exact && worst < 1e-12,
        format!("1 kWh = {one_kwh_deg} DEG, worst round-trip relative error {worst:e}"),
    )
}

fn demand_direction() -> Outcome {
    let opts = RunOptions {
        seed: SEED,
        ..RunOptions::default()
    };
    let (runs, _dir) = toy_runs("demand.scn", &opts)?;
    let (full, reduced) = (&runs[0], &runs[1]);
    let speeds = |r: &ConfigRun| {
        let routes = route_map(&r.trips);
        commercial_speeds(&r.outputs.trajectories, &r.outputs.stop_events, &routes)
            .map_err(|e| e.to_string())
            .map(|s| mean_commercial_speed(&s).unwrap_or(0.0))
    };
    let (v_full, v_reduced) = (speeds(full)?, speeds(reduced)?);
    let energy = |r: &ConfigRun| -> BTreeMap<String, f64> {
        r.energy.iter().map(|e| (e.trip_id.clone(), e.energy_kj)).collect()
    };
    let (e_full, e_reduced) = (energy(full), energy(reduced));
    let diesel: BTreeSet<&str> = full
        .trips
        .iter()
        .filter(|t: &&TripInfo| t.propulsion == "diesel")
        .map(|t| t.trip.as_str())
        .collect();
    let not_worse = diesel
        .iter()
        .filter(|t| matches!((e_full.get(**t), e_reduced.get(**t)), (Some(a), Some(b)) if b <= a))
        .count();
    let share = not_worse as f64 / diesel.len().max(1) as f64;
    check(
        v_reduced >= v_full && share >= 0.8 && !diesel.is_empty(),
        format!(
            "commercial speed {v_full:.3} -> {v_reduced:.3} m/s, diesel energy not higher on {not_worse}/{} trips",
            diesel.len()
        ),
    )
}

fn edge_aggregate_oracle() -> Outcome {
    let opts = RunOptions {
        seed: SEED,
        record_background: true,
        ..RunOptions::default()
    };
    let (_runs, dir) = toy_runs("toy.scn", &opts)?;
    let compiled = compile(&common::toy_dir().join("toy.scn")).map_err(|e| e.to_string())?;
    let net = &compiled.configs[0].network.net;
    let cfg_dir = dir.path().join("config_1");
    let read = |n: &str| std::fs::read_to_string(cfg_dir.join(n)).map_err(|e| e.to_string());
    let records = trajectories_from_csv(&read("trajectories.csv")?).map_err(|e| e.to_string())?;
    let intervals = edge_intervals_from_csv(&read("edge_intervals.csv")?).map_err(|e| e.to_string())?;
    let lengths = type_lengths();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let picks: Vec<_> = intervals.choose_multiple(&mut rng, 20).collect();
    let mut worst: f64 = 0.0;
    for e in &picks {
        let Some(o) = common::edge_cell_from_trajectories(&records, net, &lengths, &e.edge_id, e.t0_s, e.t1_s) else {
            return Err(format!("{} [{}, {}) has no raw samples", e.edge_id, e.t0_s, e.t1_s));
        };
        worst = worst
            .max((e.mean_speed_mps - o.0).abs())
            .max((e.density_veh_per_km - o.1).abs())
            .max((e.occupancy - o.2).abs());
    }
    check(
        picks.len() == 20 && worst <= 1e-9,
        format!("{} cells, worst deviation {worst:e}", picks.len()),
    )
}

fn expansion_exactness() -> Outcome {
    let compiled = compile(&common::toy_dir().join("toy.scn")).map_err(|e| e.to_string())?;
    let data = &compiled.configs[0].network;
    let zones: Vec<&String> = data.taz.zones().keys().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let modes = [DemandMode::Car, DemandMode::Truck, DemandMode::Trailer, DemandMode::Person];
    let cells: Vec<OdCell> = (0..100)
        .map(|_| {
            let start = rng.gen_range(0..20) * 900;
            OdCell {
                origin: zones[rng.gen_range(0..zones.len())].clone(),
                dest: zones[rng.gen_range(0..zones.len())].clone(),
                start_s: start,
                end_s: start + rng.gen_range(1..8) * 450,
                mode: modes[rng.gen_range(0..modes.len())],
                count: f64::from(rng.gen_range(0..40u32)) + [0.0, 0.25, 0.5, 0.75][rng.gen_range(0..4)],
            }
        })
        .collect();
    let matrix = OdMatrix { cells };
    let mut summary = Vec::new();
    for scale in [1.0, 0.8] {
        let x = expand_trips(&matrix, &data.taz, &data.net, DeparturePolicy::Uniform, scale, SEED)
            .map_err(|e| e.to_string())?;
        let want: usize = matrix.cells.iter().map(|c| (c.count * scale).round() as usize).sum();
        let got = x.vehicles.len() + x.persons.len();
        if got != want {
            return Err(format!("scale {scale}: {got} trips, expected {want}"));
        }
        // Uniform departures, cell by cell, in emission order.
        let (mut vi, mut pi) = (0, 0);
        for c in &matrix.cells {
            let n = (c.count * scale).round() as usize;
            for i in 0..n {
                let expect = f64::from(c.start_s) + i as f64 * (f64::from(c.end_s - c.start_s) / n as f64);
                let got = if c.mode == DemandMode::Person {
                    pi += 1;
                    x.persons[pi - 1].depart_s
                } else {
                    vi += 1;
                    x.vehicles[vi - 1].depart_s
                };
                if got != expect {
                    return Err(format!("scale {scale}: departure {got} != {expect}"));
                }
            }
        }
        summary.push(format!("{want} trips at scale {scale}"));
    }
    check(true, summary.join(", "))
}

fn car_following_vectors() -> Outcome {
    let params = |min_gap: f64| KraussParams {
        accel: 1.0,
        decel: 4.0,
        max_speed: 30.0,
        min_gap,
        sigma: 0.0,
        tau: 1.0,
    };
    let free = car_following_step(None, 10.0, &params(2.5), 15.0, 1.0, 0.5);
    let stopped = car_following_step(Some(Leader { speed: 0.0, gap: 2.5 }), 10.0, &params(2.5), 15.0, 1.0, 0.5);
    let v_safe: f64 = safe_speed(8.0, 20.0, 10.0, 4.0, 1.0);
    let clamped = car_following_step(Some(Leader { speed: 8.0, gap: 20.0 }), 10.0, &params(0.0), 20.0, 1.0, 0.5);
    let ok = (free - 11.0).abs() <= 1e-9
        && stopped.abs() <= 1e-9
        && (v_safe - (8.0 + 12.0 / 3.5)).abs() <= 1e-9
        && (clamped - 11.0).abs() <= 1e-9;
    check(
        ok,
        format!("free {free}, stopped leader {stopped}, v_safe {v_safe:.6} -> {clamped}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("dsml conformance", dsml_conformance),
        ("determinism", determinism),
        ("conservation", conservation),
        ("routing optimality oracle", routing_oracle),
        ("energy ordering", energy_ordering),
        ("unit constants", unit_constants),
        ("demand reduction direction", demand_direction),
        ("edge aggregate oracle", edge_aggregate_oracle),
        ("expansion exactness", expansion_exactness),
        ("car-following vectors", car_following_vectors),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
