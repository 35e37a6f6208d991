use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::ast::*;
use super::validate::{resolve_trip_types, validate_scenario};
use crate::demand::{load_od, DeparturePolicy, OdMatrix};
use crate::diagnostics::{has_errors, Diagnostic};
use crate::error::{Error, Result};
use crate::network::{assign_edges_to_taz, load_network, load_taz_zones, RoadNetwork, TazPartition};
use crate::transit::{load_gtfs, DayType, TransitSchedule, TripSelection};
use crate::vehicles::VehicleCatalog;

/// Road network with its zones and load-time diagnostics.
#[derive(Debug)]
pub struct NetworkData {
    pub net: RoadNetwork,
    pub taz: TazPartition,
    pub diagnostics: Vec<Diagnostic>,
}

/// Looks up imported resources by workspace key.
pub trait ResourceResolver {
    fn network(&self, name: &str) -> Result<Arc<NetworkData>>;
    fn vehicles(&self, name: &str) -> Result<Arc<VehicleCatalog>>;
    fn gtfs(&self, name: &str) -> Result<Arc<TransitSchedule>>;
    fn demand(&self, name: &str) -> Result<Arc<OdMatrix>>;
}

/// Resolves imports against a directory laid out as
/// `network/<X>.net` + `network/<X>.taz.json`, `vehicle/<X>`, `gtfs/<X>/`, `td/<X>`.
#[derive(Debug, Clone)]
pub struct DirectoryWorkspace {
    root: PathBuf,
}

impl DirectoryWorkspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn require(&self, path: PathBuf) -> Result<PathBuf> {
        if path.exists() {
            Ok(path)
        } else {
            Err(Error::io(
                &path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "imported resource not found"),
            ))
        }
    }
}

impl ResourceResolver for DirectoryWorkspace {
    fn network(&self, name: &str) -> Result<Arc<NetworkData>> {
        let dir = self.root.join("network");
        let net_path = self.require(dir.join(format!("{name}.net")))?;
        let taz_path = self.require(dir.join(format!("{name}.taz.json")))?;
        let (net, mut diagnostics) = load_network(&net_path)?;
        let zones = load_taz_zones(&taz_path)?;
        let (taz, taz_diags) = assign_edges_to_taz(&net, zones);
        diagnostics.extend(taz_diags);
        Ok(Arc::new(NetworkData { net, taz, diagnostics }))
    }

    fn vehicles(&self, name: &str) -> Result<Arc<VehicleCatalog>> {
        let path = self.require(self.root.join("vehicle").join(name))?;
        VehicleCatalog::load(&path).map(Arc::new)
    }

    fn gtfs(&self, name: &str) -> Result<Arc<TransitSchedule>> {
        let path = self.require(self.root.join("gtfs").join(name))?;
        load_gtfs(&path).map(Arc::new)
    }

    fn demand(&self, name: &str) -> Result<Arc<OdMatrix>> {
        let path = self.require(self.root.join("td").join(name))?;
        load_od(&path).map(Arc::new)
    }
}

/// A configuration with every reference resolved.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub id: u32,
    pub start_s: u32,
    pub end_s: u32,
    pub day: DayType,
    pub sampling_period_s: u32,
    pub demand_scale: f64,
    pub departure: DeparturePolicy,
    pub network: Arc<NetworkData>,
    pub schedule: Arc<TransitSchedule>,
    pub demand: Arc<OdMatrix>,
    pub catalog: Arc<VehicleCatalog>,
    /// Vehicle type of every schedule trip.
    pub trip_types: BTreeMap<String, String>,
}

impl ResolvedConfig {
    pub fn selection(&self) -> TripSelection<'_> {
        TripSelection {
            day: self.day,
            start_s: self.start_s,
            end_s: self.end_s,
            trip_types: &self.trip_types,
        }
    }

    /// Trips running on the configured day with first departure inside the window.
    pub fn active_trips(&self) -> Vec<&str> {
        let sel = self.selection();
        self.schedule
            .trips
            .keys()
            .filter(|t| sel.selects(&self.schedule, t))
            .map(String::as_str)
            .collect()
    }
}

/// Shared handles for one program's imports.
#[derive(Debug, Clone)]
pub struct Resources {
    pub network: Arc<NetworkData>,
    pub catalog: Arc<VehicleCatalog>,
    pub schedule: Arc<TransitSchedule>,
    pub demand: Arc<OdMatrix>,
}

/// Loads each imported resource once.
pub fn load_resources(program: &ScenarioProgram, resolver: &dyn ResourceResolver) -> Result<Resources> {
    let name = |kind: ImportKind| {
        program
            .import(kind)
            .map(|i| i.resource.as_str())
            .ok_or_else(|| Error::Scenario(format!("missing `import \"{kind}.<name>\"`")))
    };
    Ok(Resources {
        network: resolver.network(name(ImportKind::Network)?)?,
        catalog: resolver.vehicles(name(ImportKind::Vehicle)?)?,
        schedule: resolver.gtfs(name(ImportKind::Gtfs)?)?,
        demand: resolver.demand(name(ImportKind::Td)?)?,
    })
}

/// Resolves every configuration; fails with the diagnostics if validation finds errors.
pub fn interpret(program: &ScenarioProgram, resolver: &dyn ResourceResolver) -> Result<Vec<ResolvedConfig>> {
    let res = load_resources(program, resolver)?;
    interpret_with(program, &res)
}

pub fn interpret_with(program: &ScenarioProgram, res: &Resources) -> Result<Vec<ResolvedConfig>> {
    let diags = validate_scenario(program, &res.schedule, &res.catalog);
    if has_errors(&diags) {
        return Err(Error::Validation(diags.into_iter().filter(Diagnostic::is_error).collect()));
    }
    Ok(program
        .configurations
        .iter()
        .map(|c| ResolvedConfig {
            id: c.id,
            start_s: c.start_s,
            end_s: c.end_s,
            day: c.schedule_day,
            sampling_period_s: c.output_sampling_period,
            demand_scale: c.demand_scale.unwrap_or(1.0),
            departure: c.departure.unwrap_or_default(),
            network: Arc::clone(&res.network),
            schedule: Arc::clone(&res.schedule),
            demand: Arc::clone(&res.demand),
            catalog: Arc::clone(&res.catalog),
            trip_types: resolve_trip_types(c, &res.schedule, &res.catalog),
        })
        .collect())
}
