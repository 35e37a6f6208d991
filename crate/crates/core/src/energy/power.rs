use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Road-load coefficients of a vehicle body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadLoad<T> {
    pub mass_kg: T,
    pub rolling_cr: T,
    pub drag_cda_m2: T,
}

impl<T: Scalar> Default for RoadLoad<T> {
    fn default() -> Self {
        Self {
            mass_kg: T::lit(12_000.0),
            rolling_cr: T::lit(0.008),
            drag_cda_m2: T::lit(6.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ambient<T> {
    pub air_density: T,
    pub gravity: T,
    /// Road grade in radians. The shipped networks are flat.
    pub grade_rad: T,
}

impl<T: Scalar> Default for Ambient<T> {
    fn default() -> Self {
        Self {
            air_density: T::lit(1.2),
            gravity: T::lit(9.81),
            grade_rad: T::zero(),
        }
    }
}

/// Signed power at the wheels in watts. Negative values are braking power.
pub fn tractive_power<T: Scalar>(speed: T, accel: T, body: &RoadLoad<T>, ambient: &Ambient<T>) -> T {
    let m = body.mass_kg;
    let inertial = m * accel * speed;
    let rolling = m * ambient.gravity * body.rolling_cr * ambient.grade_rad.cos() * speed;
    let grade = m * ambient.gravity * ambient.grade_rad.sin() * speed;
    let aero = T::lit(0.5) * ambient.air_density * body.drag_cda_m2 * speed * speed * speed;
    inertial + rolling + grade + aero
}
