//! Per-second bus energy estimation and trip economy.
//!
//! The estimator is pluggable through [`EnergyModel`]; the shipped model is a
//! longitudinal road-load surrogate with per-powertrain efficiencies.

mod power;
mod powertrain;
pub mod units;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

pub use power::{tractive_power, Ambient, RoadLoad};
pub use powertrain::{consumption_step, PowertrainParams, Propulsion};
pub use units::UnitConstants;

use crate::error::{Error, Result};
use crate::microsim::TrajectoryRecord;
use crate::scalar::Scalar;

/// Any estimator consuming a 1 Hz (speed, acceleration) stream.
pub trait EnergyModel {
    fn propulsion(&self) -> Propulsion;
    /// Energy in kJ drawn over `dt` seconds.
    fn step_kj(&self, speed_mps: f64, accel_mps2: f64, dt_s: f64) -> f64;
}

/// Road-load physics feeding a powertrain efficiency chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongitudinalModel<T> {
    pub body: RoadLoad<T>,
    pub powertrain: PowertrainParams<T>,
    pub ambient: Ambient<T>,
}

impl<T: Scalar> LongitudinalModel<T> {
    pub fn new(body: RoadLoad<T>, powertrain: PowertrainParams<T>) -> Self {
        Self {
            body,
            powertrain,
            ambient: Ambient::default(),
        }
    }

    pub fn with_defaults(propulsion: Propulsion) -> Self {
        Self::new(RoadLoad::default(), PowertrainParams::defaults(propulsion))
    }

    pub fn step(&self, speed: T, accel: T, dt: T) -> T {
        let p = tractive_power(speed, accel, &self.body, &self.ambient);
        consumption_step(p, &self.powertrain, dt)
    }
}

impl EnergyModel for LongitudinalModel<f64> {
    fn propulsion(&self) -> Propulsion {
        self.powertrain.propulsion
    }

    fn step_kj(&self, speed_mps: f64, accel_mps2: f64, dt_s: f64) -> f64 {
        self.step(speed_mps, accel_mps2, dt_s)
    }
}

impl EnergyModel for LongitudinalModel<f32> {
    fn propulsion(&self) -> Propulsion {
        self.powertrain.propulsion
    }

    fn step_kj(&self, speed_mps: f64, accel_mps2: f64, dt_s: f64) -> f64 {
        f64::from(self.step(speed_mps as f32, accel_mps2 as f32, dt_s as f32))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub trip_id: String,
    pub route_id: String,
    pub propulsion: Propulsion,
    pub distance_m: f64,
    pub energy_kj: f64,
    /// Miles per diesel-equivalent gallon; `None` when energy is not positive.
    pub economy_mi_per_deg: Option<f64>,
}

impl EnergyReport {
    pub fn distance_mi(&self) -> f64 {
        UnitConstants::<f64>::default().meters_to_miles(self.distance_m)
    }

    pub fn energy_kwh(&self) -> f64 {
        UnitConstants::<f64>::default().kj_to_kwh(self.energy_kj)
    }
}

/// Integrates a contiguous 1 Hz trajectory of one trip.
///
/// Distance is the per-second displacement, which under the simulator's
/// update rule equals the recorded speed times one second.
pub fn estimate_trip(trip_id: &str, records: &[TrajectoryRecord], model: &dyn EnergyModel) -> Result<EnergyReport> {
    let first = records
        .first()
        .ok_or_else(|| Error::Energy(format!("trip {trip_id}: no records")))?;
    let mut prev_t = first.t_s;
    let mut distance_m = 0.0;
    let mut energy_kj = 0.0;
    for (i, r) in records.iter().enumerate() {
        if i > 0 && r.t_s != prev_t + 1 {
            return Err(Error::Energy(format!(
                "trip {trip_id}: trajectory gap between t={prev_t} and t={}",
                r.t_s
            )));
        }
        prev_t = r.t_s;
        distance_m += r.speed_mps;
        energy_kj += model.step_kj(r.speed_mps, r.accel_mps2, 1.0);
    }
    Ok(EnergyReport {
        trip_id: trip_id.to_string(),
        route_id: String::new(),
        propulsion: model.propulsion(),
        distance_m,
        energy_kj,
        economy_mi_per_deg: UnitConstants::<f64>::default().economy_mi_per_deg(distance_m, energy_kj),
    })
}

pub const ENERGY_CSV_HEADER: &str = "trip,route,propulsion,distance_mi,energy_kJ,economy_mi_per_deg";

/// Marker for an economy that cannot be computed (nonpositive energy).
pub const UNAVAILABLE: &str = "NA";
/// Marker for a comparison cell with no report.
pub const ABSENT: &str = "absent";

pub fn reports_to_csv(reports: &[EnergyReport]) -> String {
    let mut out = String::from(ENERGY_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let econ = r.economy_mi_per_deg.map_or(UNAVAILABLE.to_string(), |e| e.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.trip_id,
            r.route_id,
            r.propulsion,
            r.distance_mi(),
            r.energy_kj,
            econ
        );
    }
    out
}

pub fn reports_from_csv(text: &str) -> Result<Vec<EnergyReport>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let units = UnitConstants::<f64>::default();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Analysis(format!("energy csv: {e}")))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| Error::Analysis(format!("energy csv: bad number `{}`", field(i))))
        };
        let propulsion = Propulsion::parse(field(2))
            .ok_or_else(|| Error::Analysis(format!("energy csv: bad propulsion `{}`", field(2))))?;
        let economy = match field(5) {
            UNAVAILABLE => None,
            _ => Some(num(5)?),
        };
        out.push(EnergyReport {
            trip_id: field(0).to_string(),
            route_id: field(1).to_string(),
            propulsion,
            distance_m: num(3)? * units.m_per_mile,
            energy_kj: num(4)?,
            economy_mi_per_deg: economy,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub route_id: String,
    pub trip_id: String,
    pub scenario: String,
    /// `None` when the scenario has no report for this trip.
    pub cell: Option<(Propulsion, Option<f64>)>,
}

/// Long-format table aligned on (route, trip) across scenarios.
pub fn compare_scenarios(reports: &BTreeMap<String, Vec<EnergyReport>>) -> Vec<ComparisonRow> {
    let keys: BTreeSet<(String, String)> = reports
        .values()
        .flatten()
        .map(|r| (r.route_id.clone(), r.trip_id.clone()))
        .collect();
    let mut rows = Vec::with_capacity(keys.len() * reports.len());
    for (route, trip) in &keys {
        for (scenario, list) in reports {
            let cell = list
                .iter()
                .find(|r| &r.route_id == route && &r.trip_id == trip)
                .map(|r| (r.propulsion, r.economy_mi_per_deg));
            rows.push(ComparisonRow {
                route_id: route.clone(),
                trip_id: trip.clone(),
                scenario: scenario.clone(),
                cell,
            });
        }
    }
    rows
}

pub fn comparison_to_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("route,trip,scenario,propulsion,economy_mi_per_deg\n");
    for r in rows {
        let (prop, econ) = match r.cell {
            None => (ABSENT.to_string(), ABSENT.to_string()),
            Some((p, None)) => (p.to_string(), UNAVAILABLE.to_string()),
            Some((p, Some(e))) => (p.to_string(), e.to_string()),
        };
        let _ = writeln!(out, "{},{},{},{prop},{econ}", r.route_id, r.trip_id, r.scenario);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn rec(t: u32, v: f64, a: f64) -> TrajectoryRecord {
        TrajectoryRecord {
            t_s: t,
            vehicle_id: Arc::from("T1"),
            type_id: Arc::from("bus"),
            edge_id: Arc::from("e"),
            position_m: 0.0,
            speed_mps: v,
            accel_mps2: a,
        }
    }

    #[test]
    fn empty_trajectory_is_an_error() {
        let m = LongitudinalModel::<f64>::with_defaults(Propulsion::Diesel);
        assert!(estimate_trip("T1", &[], &m).is_err());
    }

    #[test]
    fn gap_is_an_error() {
        let m = LongitudinalModel::<f64>::with_defaults(Propulsion::Diesel);
        let recs = [rec(10, 1.0, 1.0), rec(12, 2.0, 0.5)];
        assert!(estimate_trip("T1", &recs, &m).unwrap_err().to_string().contains("gap"));
    }

    #[test]
    fn sums_steps_and_distance() {
        let m = LongitudinalModel::<f64>::with_defaults(Propulsion::Electric);
        let recs = [rec(0, 0.0, 0.0), rec(1, 1.0, 1.0), rec(2, 2.0, 1.0), rec(3, 2.0, 0.0)];
        let r = estimate_trip("T1", &recs, &m).unwrap();
        assert_eq!(r.distance_m, 5.0);
        let expect: f64 = recs.iter().map(|x| m.step(x.speed_mps, x.accel_mps2, 1.0)).sum();
        assert!((r.energy_kj - expect).abs() < 1e-12);
        assert!(r.economy_mi_per_deg.is_some());
    }

    fn report(scn_trip: &str, route: &str, econ: f64) -> EnergyReport {
        EnergyReport {
            trip_id: scn_trip.into(),
            route_id: route.into(),
            propulsion: Propulsion::Diesel,
            distance_m: 1000.0,
            energy_kj: 100.0,
            economy_mi_per_deg: Some(econ),
        }
    }

    #[test]
    fn comparison_aligns_and_marks_absent() {
        let mut m = BTreeMap::new();
        m.insert("base".to_string(), vec![report("1", "R", 2.0), report("2", "R", 2.5)]);
        m.insert("electric".to_string(), vec![report("1", "R", 11.0), report("2", "R", 12.0)]);
        assert_eq!(compare_scenarios(&m).len(), 4);

        m.insert("partial".to_string(), vec![report("1", "R", 3.0)]);
        let rows = compare_scenarios(&m);
        assert_eq!(rows.len(), 6);
        let missing: Vec<_> = rows.iter().filter(|r| r.cell.is_none()).collect();
        assert_eq!(missing.len(), 1);
        assert_eq!((missing[0].scenario.as_str(), missing[0].trip_id.as_str()), ("partial", "2"));
        assert!(comparison_to_csv(&rows).contains("R,2,partial,absent,absent"));
    }

    #[test]
    fn csv_round_trip_preserves_reports() {
        let mut r = report("7", "4", 2.25);
        r.distance_m = 1234.5678;
        let mut na = report("8", "4", 0.0);
        na.economy_mi_per_deg = None;
        na.energy_kj = -3.0;
        na.propulsion = Propulsion::Electric;
        let back = reports_from_csv(&reports_to_csv(&[r.clone(), na.clone()])).unwrap();
        assert_eq!(back[0].trip_id, "7");
        assert!((back[0].distance_m - r.distance_m).abs() < 1e-9);
        assert_eq!(back[1].economy_mi_per_deg, None);
        assert_eq!(back[1].propulsion, Propulsion::Electric);
    }
}
