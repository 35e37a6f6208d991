//! Vehicle shortest paths and scheduled person journeys.

mod journey;
mod timetable;
mod vehicle_path;

pub use journey::{plan_person_journey, JourneyOutcome, Leg, PersonPlan, Unserved, UnservedReason, WalkParams};
pub use timetable::{Connection, Footpath, TimetableIndex};
pub use vehicle_path::{shortest_loop_path, shortest_vehicle_path, VehiclePath};

/// Upper bound on rides in one person journey.
pub const MAX_RIDES: usize = 3;
