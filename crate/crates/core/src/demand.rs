//! OD matrices and their expansion into individual trips.
//!
//! OD text format, one cell per line, `#` starts a comment:
//!
//! ```text
//! # origin dest period_start period_end mode count
//! A B 28800 32400 car 4
//! ```

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::{EdgeIdx, RoadNetwork, TazPartition};
use crate::rng::StreamKey;
use crate::transit::SECONDS_PER_DAY;
use crate::vehicles::VehicleClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemandMode {
    Car,
    Truck,
    Trailer,
    Person,
}

impl DemandMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DemandMode::Car => "car",
            DemandMode::Truck => "truck",
            DemandMode::Trailer => "trailer",
            DemandMode::Person => "person",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "car" => DemandMode::Car,
            "truck" => DemandMode::Truck,
            "trailer" => DemandMode::Trailer,
            "person" => DemandMode::Person,
            _ => return None,
        })
    }

    pub fn vehicle_class(self) -> Option<VehicleClass> {
        match self {
            DemandMode::Car => Some(VehicleClass::Car),
            DemandMode::Truck => Some(VehicleClass::Truck),
            DemandMode::Trailer => Some(VehicleClass::Trailer),
            DemandMode::Person => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdCell {
    pub origin: String,
    pub dest: String,
    pub start_s: u32,
    pub end_s: u32,
    pub mode: DemandMode,
    /// Trips per period; may be fractional.
    pub count: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OdMatrix {
    pub cells: Vec<OdCell>,
}

impl OdMatrix {
    pub fn to_text(&self) -> String {
        let mut out = String::from("# origin dest period_start period_end mode count\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{} {} {} {} {} {}\n",
                c.origin,
                c.dest,
                c.start_s,
                c.end_s,
                c.mode.as_str(),
                c.count
            ));
        }
        out
    }
}

pub fn parse_od(text: &str, origin: &Path) -> Result<OdMatrix> {
    let mut cells = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let f: Vec<&str> = content.split_whitespace().collect();
        if f.len() != 6 {
            return Err(Error::format(origin, line, format!("expected 6 fields, found {}", f.len())));
        }
        let period = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::format(origin, line, format!("malformed period bound `{s}`")))
        };
        let (start_s, end_s) = (period(f[2])?, period(f[3])?);
        if start_s >= end_s || end_s > SECONDS_PER_DAY {
            return Err(Error::format(
                origin,
                line,
                format!("malformed period [{start_s}, {end_s}): need start < end <= 86400"),
            ));
        }
        let mode = DemandMode::parse(f[4])
            .ok_or_else(|| Error::format(origin, line, format!("unknown mode `{}`", f[4])))?;
        let count: f64 = f[5]
            .parse()
            .map_err(|_| Error::format(origin, line, format!("malformed count `{}`", f[5])))?;
        if !count.is_finite() || count < 0.0 {
            return Err(Error::format(origin, line, format!("count must be nonnegative, got {}", f[5])));
        }
        cells.push(OdCell {
            origin: f[0].to_string(),
            dest: f[1].to_string(),
            start_s,
            end_s,
            mode,
            count,
        });
    }
    Ok(OdMatrix { cells })
}

pub fn load_od(path: &Path) -> Result<OdMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_od(&text, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeparturePolicy {
    #[default]
    Uniform,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleTrip {
    pub id: String,
    pub class: VehicleClass,
    pub depart_s: f64,
    pub origin_edge: EdgeIdx,
    pub dest_edge: EdgeIdx,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersonTrip {
    pub id: String,
    pub depart_s: f64,
    pub origin: Point<f64>,
    pub dest: Point<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expansion {
    pub vehicles: Vec<VehicleTrip>,
    pub persons: Vec<PersonTrip>,
}

/// Trips emitted for one cell: `count * scale` rounded half up.
pub fn scaled_count(count: f64, scale: f64) -> usize {
    (count * scale + 0.5).floor() as usize
}

fn members<'a>(taz: &'a TazPartition, zone: &str) -> Result<&'a [EdgeIdx]> {
    if !taz.contains_zone(zone) {
        return Err(Error::Demand(format!("unknown TAZ {zone}")));
    }
    let m = taz.members(zone);
    if m.is_empty() {
        return Err(Error::Demand(format!("TAZ {zone} has no member edges")));
    }
    Ok(m)
}

/// Expands every cell into individual trips, in cell order.
///
/// Each cell samples from its own stream keyed by (seed, origin, dest,
/// period, mode), so reordering the matrix never changes a cell's trips.
pub fn expand_trips(
    matrix: &OdMatrix,
    taz: &TazPartition,
    net: &RoadNetwork,
    policy: DeparturePolicy,
    scale: f64,
    seed: u64,
) -> Result<Expansion> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Demand(format!("demand scale must be in (0, 1], got {scale}")));
    }
    let mut out = Expansion::default();
    for (ci, cell) in matrix.cells.iter().enumerate() {
        let from = members(taz, &cell.origin)?;
        let to = members(taz, &cell.dest)?;
        let n = scaled_count(cell.count, scale);
        let mut rng = StreamKey::new(seed)
            .str(&cell.origin)
            .str(&cell.dest)
            .u64(u64::from(cell.start_s))
            .u64(u64::from(cell.end_s))
            .str(cell.mode.as_str())
            .rng();
        let start = f64::from(cell.start_s);
        let len = f64::from(cell.end_s - cell.start_s);
        for i in 0..n {
            let depart_s = match policy {
                DeparturePolicy::Uniform => start + i as f64 * (len / n as f64),
                DeparturePolicy::Random => rng.gen_range(start..f64::from(cell.end_s)),
            };
            let o = from[rng.gen_range(0..from.len())];
            let d = to[rng.gen_range(0..to.len())];
            match cell.mode.vehicle_class() {
                Some(class) => out.vehicles.push(VehicleTrip {
                    id: format!("{}_{ci}_{i}", cell.mode.as_str()),
                    class,
                    depart_s,
                    origin_edge: o,
                    dest_edge: d,
                }),
                None => out.persons.push(PersonTrip {
                    id: format!("person_{ci}_{i}"),
                    depart_s,
                    origin: net.edge_midpoint(o),
                    dest: net.edge_midpoint(d),
                }),
            }
        }
    }
    Ok(out)
}
