//! Vehicle types and the fleet catalog.
//!
//! The catalog is a JSON document:
//!
//! ```json
//! { "vehicle_types": [
//!     { "id": "Gillig_103", "class": "bus", "propulsion": "diesel", "default": true,
//!       "length_m": 12.0, "passenger_capacity": 60,
//!       "powertrain": { "idle_power_kw": 8.0 } } ] }
//! ```
//!
//! Omitted kinematic fields fall back to class defaults and omitted powertrain
//! fields fall back to the propulsion defaults. Background classes (`car`,
//! `truck`, `trailer`) have built-in types that a catalog entry with the same
//! id overrides.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::{LongitudinalModel, PowertrainParams, Propulsion, RoadLoad};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleClass {
    Bus,
    Car,
    Truck,
    Trailer,
}

impl VehicleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VehicleClass::Bus => "bus",
            VehicleClass::Car => "car",
            VehicleClass::Truck => "truck",
            VehicleClass::Trailer => "trailer",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleType {
    pub id: String,
    pub class: VehicleClass,
    pub max_speed_mps: f64,
    pub accel_mps2: f64,
    pub decel_mps2: f64,
    pub min_gap_m: f64,
    pub length_m: f64,
    pub passenger_capacity: u32,
    /// Krauss dawdling factor in `[0, 1]`.
    pub sigma: f64,
    pub road_load: RoadLoad<f64>,
    pub powertrain: PowertrainParams<f64>,
}

impl VehicleType {
    pub fn propulsion(&self) -> Propulsion {
        self.powertrain.propulsion
    }

    pub fn energy_model(&self) -> LongitudinalModel<f64> {
        LongitudinalModel::new(self.road_load, self.powertrain)
    }

    fn class_default(id: &str, class: VehicleClass, propulsion: Propulsion) -> Self {
        let (max_speed, accel, decel, gap, len, cap, mass) = match class {
            VehicleClass::Bus => (20.0, 1.2, 4.0, 2.5, 12.0, 60, 12_000.0),
            VehicleClass::Car => (20.0, 2.6, 4.5, 2.5, 5.0, 4, 1_500.0),
            VehicleClass::Truck => (17.0, 1.3, 4.0, 2.5, 8.0, 2, 9_000.0),
            VehicleClass::Trailer => (15.0, 1.0, 4.0, 2.5, 16.5, 2, 20_000.0),
        };
        Self {
            id: id.to_string(),
            class,
            max_speed_mps: max_speed,
            accel_mps2: accel,
            decel_mps2: decel,
            min_gap_m: gap,
            length_m: len,
            passenger_capacity: cap,
            sigma: 0.5,
            road_load: RoadLoad {
                mass_kg: mass,
                ..RoadLoad::default()
            },
            powertrain: PowertrainParams::defaults(propulsion),
        }
    }

    /// Built-in type used for a background class absent from the catalog.
    pub fn builtin_background(class: VehicleClass) -> Self {
        Self::class_default(class.as_str(), class, Propulsion::Diesel)
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("max_speed_mps", self.max_speed_mps),
            ("accel_mps2", self.accel_mps2),
            ("decel_mps2", self.decel_mps2),
            ("min_gap_m", self.min_gap_m),
            ("length_m", self.length_m),
            ("mass_kg", self.road_load.mass_kg),
            ("rolling_cr", self.road_load.rolling_cr),
            ("drag_cda_m2", self.road_load.drag_cda_m2),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Catalog(format!("type {}: {name} must be positive", self.id)));
            }
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::Catalog(format!("type {}: sigma must be in [0,1]", self.id)));
        }
        if self.class == VehicleClass::Bus && self.passenger_capacity < 1 {
            return Err(Error::Catalog(format!("type {}: bus capacity must be >= 1", self.id)));
        }
        self.powertrain
            .validate()
            .map_err(|e| Error::Catalog(format!("type {}: {e}", self.id)))
    }
}

#[derive(Debug, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
struct PowertrainOverrides {
    drivetrain_efficiency: Option<f64>,
    regen_efficiency: Option<f64>,
    idle_power_kw: Option<f64>,
    auxiliary_power_kw: Option<f64>,
    engine_efficiency: Option<f64>,
    hybrid_blend: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TypeRecord {
    id: String,
    #[serde(default = "default_class")]
    class: VehicleClass,
    #[serde(default = "default_propulsion")]
    propulsion: Propulsion,
    #[serde(default)]
    default: bool,
    max_speed_mps: Option<f64>,
    accel_mps2: Option<f64>,
    decel_mps2: Option<f64>,
    min_gap_m: Option<f64>,
    length_m: Option<f64>,
    passenger_capacity: Option<u32>,
    sigma: Option<f64>,
    mass_kg: Option<f64>,
    rolling_cr: Option<f64>,
    drag_cda_m2: Option<f64>,
    #[serde(default)]
    powertrain: PowertrainOverrides,
}

fn default_class() -> VehicleClass {
    VehicleClass::Bus
}

fn default_propulsion() -> Propulsion {
    Propulsion::Diesel
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    vehicle_types: Vec<TypeRecord>,
}

impl TypeRecord {
    fn into_type(self) -> VehicleType {
        let mut t = VehicleType::class_default(&self.id, self.class, self.propulsion);
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { t.$field = v; } )* };
        }
        set!(max_speed_mps, accel_mps2, decel_mps2, min_gap_m, length_m, passenger_capacity, sigma);
        if let Some(v) = self.mass_kg {
            t.road_load.mass_kg = v;
        }
        if let Some(v) = self.rolling_cr {
            t.road_load.rolling_cr = v;
        }
        if let Some(v) = self.drag_cda_m2 {
            t.road_load.drag_cda_m2 = v;
        }
        let p = &mut t.powertrain;
        let o = self.powertrain;
        macro_rules! pt {
            ($($field:ident),*) => { $( if let Some(v) = o.$field { p.$field = v; } )* };
        }
        pt!(drivetrain_efficiency, regen_efficiency, idle_power_kw, auxiliary_power_kw, engine_efficiency, hybrid_blend);
        t
    }
}

#[derive(Debug, Clone)]
pub struct VehicleCatalog {
    types: BTreeMap<String, VehicleType>,
    default_bus: String,
}

impl VehicleCatalog {
    pub fn from_types(types: Vec<VehicleType>, default_bus: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for t in types {
            t.validate()?;
            if map.insert(t.id.clone(), t).is_some() {
                return Err(Error::Catalog("duplicate vehicle type id".into()));
            }
        }
        match map.get(default_bus) {
            Some(t) if t.class == VehicleClass::Bus => {}
            _ => return Err(Error::Catalog(format!("default type {default_bus} is not a bus type"))),
        }
        Ok(Self {
            types: map,
            default_bus: default_bus.to_string(),
        })
    }

    pub fn parse(json: &str) -> Result<Self> {
        let file: CatalogFile = serde_json::from_str(json).map_err(|e| Error::Catalog(e.to_string()))?;
        let defaults: Vec<String> = file
            .vehicle_types
            .iter()
            .filter(|r| r.default)
            .map(|r| r.id.clone())
            .collect();
        if defaults.len() != 1 {
            return Err(Error::Catalog(format!(
                "exactly one type must be marked default, found {}",
                defaults.len()
            )));
        }
        let types = file.vehicle_types.into_iter().map(TypeRecord::into_type).collect();
        Self::from_types(types, &defaults[0])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))
    }

    pub fn get(&self, id: &str) -> Option<&VehicleType> {
        self.types.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.types.contains_key(id)
    }

    pub fn default_bus_type(&self) -> &VehicleType {
        &self.types[&self.default_bus]
    }

    pub fn types(&self) -> impl Iterator<Item = &VehicleType> {
        self.types.values()
    }

    /// Type used for background traffic of the given class.
    pub fn background_type(&self, class: VehicleClass) -> VehicleType {
        match self.types.get(class.as_str()) {
            Some(t) => t.clone(),
            None => VehicleType::builtin_background(class),
        }
    }

    /// Serializes the fully resolved catalog (all defaults filled in).
    pub fn to_json(&self) -> String {
        let records: Vec<TypeRecord> = self
            .types
            .values()
            .map(|t| TypeRecord {
                id: t.id.clone(),
                class: t.class,
                propulsion: t.propulsion(),
                default: t.id == self.default_bus,
                max_speed_mps: Some(t.max_speed_mps),
                accel_mps2: Some(t.accel_mps2),
                decel_mps2: Some(t.decel_mps2),
                min_gap_m: Some(t.min_gap_m),
                length_m: Some(t.length_m),
                passenger_capacity: Some(t.passenger_capacity),
                sigma: Some(t.sigma),
                mass_kg: Some(t.road_load.mass_kg),
                rolling_cr: Some(t.road_load.rolling_cr),
                drag_cda_m2: Some(t.road_load.drag_cda_m2),
                powertrain: PowertrainOverrides {
                    drivetrain_efficiency: Some(t.powertrain.drivetrain_efficiency),
                    regen_efficiency: Some(t.powertrain.regen_efficiency),
                    idle_power_kw: Some(t.powertrain.idle_power_kw),
                    auxiliary_power_kw: Some(t.powertrain.auxiliary_power_kw),
                    engine_efficiency: Some(t.powertrain.engine_efficiency),
                    hybrid_blend: Some(t.powertrain.hybrid_blend),
                },
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "vehicle_types": records }))
            .expect("catalog serializes")
    }
}
