//! Scenario-driven bus transit microsimulation.
//!
//! A scenario file names a road network, a vehicle catalog, a GTFS feed and
//! an OD demand table, then lists simulation configurations. Each
//! configuration is compiled into bus trips, background traffic and routed
//! person journeys, run through a 1 Hz car-following simulation, and
//! summarized as edge aggregates, stop events and per-trip energy.
//!
//! Numeric kernels (geometry, car following, energy) are generic over the
//! scalar type; the aliases below fix them to `f64`, with `f32` variants for
//! the energy model.

pub mod analysis;
pub mod cli;
pub mod demand;
pub mod diagnostics;
pub mod dsml;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod microsim;
pub mod network;
pub mod pipeline;
pub mod rng;
pub mod router;
pub mod scalar;
pub mod transit;
pub mod vehicles;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point = geometry::Point<f64>;
pub type KraussParams = microsim::KraussParams<f64>;
pub type Leader = microsim::Leader<f64>;
pub type LongitudinalModel = energy::LongitudinalModel<f64>;
pub type LongitudinalModelF32 = energy::LongitudinalModel<f32>;
pub type PowertrainParams = energy::PowertrainParams<f64>;
pub type RoadLoad = energy::RoadLoad<f64>;
pub type UnitConstants = energy::UnitConstants<f64>;
