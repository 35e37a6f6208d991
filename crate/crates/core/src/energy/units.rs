//! Fixed conversion constants for comparing fuel and electricity.

use crate::scalar::Scalar;

pub const KJ_PER_KWH: f64 = 3600.0;
/// Energy content of one diesel-equivalent gallon (DEG).
pub const KJ_PER_DEG: f64 = 146_520.0;
pub const M_PER_MILE: f64 = 1609.344;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitConstants<T> {
    pub kj_per_kwh: T,
    pub kj_per_deg: T,
    pub m_per_mile: T,
}

impl<T: Scalar> Default for UnitConstants<T> {
    fn default() -> Self {
        Self {
            kj_per_kwh: T::lit(KJ_PER_KWH),
            kj_per_deg: T::lit(KJ_PER_DEG),
            m_per_mile: T::lit(M_PER_MILE),
        }
    }
}

impl<T: Scalar> UnitConstants<T> {
    pub fn kwh_to_kj(&self, kwh: T) -> T {
        kwh * self.kj_per_kwh
    }

    pub fn kj_to_kwh(&self, kj: T) -> T {
        kj / self.kj_per_kwh
    }

    pub fn kj_to_deg(&self, kj: T) -> T {
        kj / self.kj_per_deg
    }

    pub fn deg_to_kj(&self, deg: T) -> T {
        deg * self.kj_per_deg
    }

    pub fn meters_to_miles(&self, m: T) -> T {
        m / self.m_per_mile
    }

    /// Miles per diesel-equivalent gallon; `None` unless energy is positive.
    pub fn economy_mi_per_deg(&self, distance_m: T, energy_kj: T) -> Option<T> {
        (energy_kj > T::zero()).then(|| self.meters_to_miles(distance_m) / self.kj_to_deg(energy_kj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_kwh_per_mile() {
        let u = UnitConstants::<f64>::default();
        let econ = u.economy_mi_per_deg(M_PER_MILE, u.kwh_to_kj(1.0)).unwrap();
        assert!((econ - 146_520.0 / 3600.0).abs() < 1e-12);
        assert!((econ - 40.7).abs() < 1e-9);
    }

    #[test]
    fn two_deg_over_five_miles() {
        let u = UnitConstants::<f64>::default();
        let econ = u.economy_mi_per_deg(5.0 * M_PER_MILE, u.deg_to_kj(2.0)).unwrap();
        assert!((econ - 2.5).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_energy_has_no_economy() {
        let u = UnitConstants::<f32>::default();
        assert_eq!(u.economy_mi_per_deg(100.0, 0.0), None);
        assert_eq!(u.economy_mi_per_deg(100.0, -3.0), None);
    }
}
