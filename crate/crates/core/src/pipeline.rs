//! Scenario file to output directory.
//!
//! `compile` parses, loads and validates; `run_config` turns one resolved
//! configuration into simulation outputs and energy reports; `run_scenario`
//! does both and writes one `config_<id>/` directory per configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use crate::analysis::{trips_to_csv, TripInfo};
use crate::diagnostics::Diagnostic;
use crate::dsml::{interpret_with, load_resources, parse_scenario, DirectoryWorkspace, ResolvedConfig, ScenarioProgram};
use crate::dsml::validate_scenario;
use crate::demand::{expand_trips, PersonTrip};
use crate::energy::{estimate_trip, reports_to_csv, EnergyReport};
use crate::error::{Error, Result};
use crate::microsim::{
    edge_intervals_to_csv, person_outcomes_to_csv, route_background, run_simulation, stop_events_to_csv,
    trajectories_to_csv, SimParams, SimulationOutputs, TrajectoryRecord, World,
};
use crate::router::{plan_person_journey, JourneyOutcome, TimetableIndex, WalkParams};
use crate::transit::{generate_bus_trips, place_stops, BusTripPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Largest distance between a GTFS stop and the edge it is placed on.
    pub stop_radius_m: f64,
    /// Stops closer than this are joined by transfer footpaths.
    pub footpath_radius_m: f64,
    pub walk: WalkParams,
    pub record_background: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            stop_radius_m: 100.0,
            footpath_radius_m: 400.0,
            walk: WalkParams::default(),
            record_background: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub program: ScenarioProgram,
    pub configs: Vec<ResolvedConfig>,
    /// Loader and validator warnings.
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses and validates a scenario file; imports resolve against its directory.
pub fn compile(path: &Path) -> Result<Compiled> {
    let source = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let root = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    compile_source(&source, &DirectoryWorkspace::new(root))
}

pub fn compile_source(source: &str, workspace: &DirectoryWorkspace) -> Result<Compiled> {
    let program = parse_scenario(source)?;
    let res = load_resources(&program, workspace)?;
    let mut diagnostics = res.network.diagnostics.clone();
    diagnostics.extend(res.schedule.diagnostics());
    diagnostics.extend(validate_scenario(&program, &res.schedule, &res.catalog));
    let configs = interpret_with(&program, &res)?;
    Ok(Compiled {
        program,
        configs,
        diagnostics,
    })
}

/// Everything one configuration produced.
#[derive(Debug, Clone)]
pub struct ConfigRun {
    pub id: u32,
    pub bus_trips: Vec<BusTripPlan>,
    pub persons: Vec<PersonTrip>,
    pub plans: Vec<JourneyOutcome>,
    pub outputs: SimulationOutputs,
    pub energy: Vec<EnergyReport>,
    pub trips: Vec<TripInfo>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn run_config(cfg: &ResolvedConfig, opts: &RunOptions) -> Result<ConfigRun> {
    let net = &cfg.network.net;
    let catalog = &cfg.catalog;
    let mut diagnostics = Vec::new();

    let placements = place_stops(&cfg.schedule, net, opts.stop_radius_m);
    diagnostics.extend(placements.diagnostics());
    let bus_trips = generate_bus_trips(&cfg.schedule, &placements, net, &cfg.selection())?;
    let index = TimetableIndex::build(
        &cfg.schedule,
        bus_trips.iter().map(|p| p.trip_id.as_str()),
        opts.footpath_radius_m,
    );

    // The demand scale applies to background traffic; riders stay at full demand.
    let expand = |scale| expand_trips(&cfg.demand, &cfg.network.taz, net, cfg.departure, scale, opts.seed);
    let full = expand(1.0)?;
    let background = if cfg.demand_scale == 1.0 {
        full.vehicles
    } else {
        expand(cfg.demand_scale)?.vehicles
    };
    let riders = full.persons;
    let in_window = |t: f64| t >= f64::from(cfg.start_s) && t < f64::from(cfg.end_s);
    let persons: Vec<PersonTrip> = riders.into_iter().filter(|p| in_window(p.depart_s)).collect();
    let vehicle_trips: Vec<_> = background.into_iter().filter(|v| in_window(v.depart_s)).collect();
    let plans: Vec<JourneyOutcome> = persons
        .iter()
        .map(|p| plan_person_journey(&index, p, &opts.walk))
        .collect();
    let (vehicles, route_diags) = route_background(net, &vehicle_trips);
    diagnostics.extend(route_diags);

    let world = World {
        net,
        catalog,
        bus_trips: &bus_trips,
        persons: &persons,
        person_plans: &plans,
        vehicles: &vehicles,
    };
    let mut params = SimParams::new(cfg.start_s, cfg.end_s, opts.seed);
    params.sampling_period_s = cfg.sampling_period_s;
    params.record_background = opts.record_background;
    let outputs = run_simulation(&world, &params);

    let mut by_vehicle: BTreeMap<&str, Vec<TrajectoryRecord>> = BTreeMap::new();
    for r in &outputs.trajectories {
        by_vehicle.entry(r.vehicle_id.as_ref()).or_default().push(r.clone());
    }
    let mut energy = Vec::new();
    let mut trips = Vec::new();
    for plan in &bus_trips {
        let vt = catalog.get(&plan.vehicle_type_id).unwrap_or_else(|| catalog.default_bus_type());
        trips.push(TripInfo {
            trip: plan.trip_id.clone(),
            route: plan.route_id.clone(),
            block: plan.block_id.clone().unwrap_or_default(),
            vehicle_type: vt.id.clone(),
            propulsion: vt.propulsion().to_string(),
            capacity: vt.passenger_capacity,
        });
        match by_vehicle.get(plan.trip_id.as_str()) {
            Some(records) => {
                let mut report = estimate_trip(&plan.trip_id, records, &vt.energy_model())?;
                report.route_id = plan.route_id.clone();
                energy.push(report);
            }
            None => diagnostics.push(Diagnostic::warning(
                format!("trip {}", plan.trip_id),
                "bus never entered the network; no energy report",
            )),
        }
    }
    let diagnostics = diagnostics.into_iter().map(|d| d.in_config(cfg.id)).collect();
    info!(
        "config {}: {} bus trips, {} vehicles, {} persons",
        cfg.id,
        bus_trips.len(),
        vehicles.len(),
        persons.len()
    );
    Ok(ConfigRun {
        id: cfg.id,
        bus_trips,
        persons,
        plans,
        outputs,
        energy,
        trips,
        diagnostics,
    })
}

pub fn config_dir(out: &Path, id: u32) -> PathBuf {
    out.join(format!("config_{id}"))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub fn diagnostics_to_json(diags: &[Diagnostic]) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        diagnostics: &'a [Diagnostic],
    }
    serde_json::to_string_pretty(&Doc { diagnostics: diags }).expect("diagnostics serialize")
}

/// Writes one configuration's output files into `dir`.
pub fn write_outputs(dir: &Path, run: &ConfigRun, cfg: &ResolvedConfig) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let o = &run.outputs;
    write(dir, "trajectories.csv", &trajectories_to_csv(&o.trajectories))?;
    write(dir, "stop_events.csv", &stop_events_to_csv(&o.stop_events))?;
    write(dir, "edge_intervals.csv", &edge_intervals_to_csv(&o.edge_intervals))?;
    write(dir, "person_outcomes.csv", &person_outcomes_to_csv(&o.person_outcomes))?;
    write(dir, "energy.csv", &reports_to_csv(&run.energy))?;
    write(dir, "trips.csv", &trips_to_csv(&run.trips))?;
    write(dir, "vehicle_types.json", &cfg.catalog.to_json())?;
    write(dir, "diagnostics.json", &diagnostics_to_json(&run.diagnostics))
}

/// Runs every configuration concurrently and writes `out/config_<id>/`.
pub fn run_scenario(compiled: &Compiled, opts: &RunOptions, out: &Path) -> Result<Vec<ConfigRun>> {
    let runs: Vec<Result<ConfigRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = compiled
            .configs
            .iter()
            .map(|cfg| s.spawn(move || run_config(cfg, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("configuration thread panicked"))
            .collect()
    });
    let mut done = Vec::with_capacity(runs.len());
    for (cfg, run) in compiled.configs.iter().zip(runs) {
        let run = run?;
        write_outputs(&config_dir(out, cfg.id), &run, cfg)?;
        done.push(run);
    }
    Ok(done)
}
