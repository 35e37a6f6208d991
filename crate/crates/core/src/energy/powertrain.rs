use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propulsion {
    Diesel,
    Hybrid,
    Electric,
}

impl Propulsion {
    pub fn as_str(self) -> &'static str {
        match self {
            Propulsion::Diesel => "diesel",
            Propulsion::Hybrid => "hybrid",
            Propulsion::Electric => "electric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "diesel" => Some(Propulsion::Diesel),
            "hybrid" => Some(Propulsion::Hybrid),
            "electric" => Some(Propulsion::Electric),
            _ => None,
        }
    }
}

impl std::fmt::Display for Propulsion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Efficiency and accessory-load parameters of one powertrain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowertrainParams<T> {
    pub propulsion: Propulsion,
    pub drivetrain_efficiency: T,
    pub regen_efficiency: T,
    pub idle_power_kw: T,
    pub auxiliary_power_kw: T,
    pub engine_efficiency: T,
    /// Share of the diesel path in the hybrid blend.
    pub hybrid_blend: T,
}

impl<T: Scalar> PowertrainParams<T> {
    pub fn defaults(propulsion: Propulsion) -> Self {
        let l = T::lit;
        match propulsion {
            Propulsion::Diesel => Self {
                propulsion,
                drivetrain_efficiency: l(0.90),
                regen_efficiency: l(0.0),
                idle_power_kw: l(8.0),
                auxiliary_power_kw: l(5.0),
                engine_efficiency: l(0.40),
                hybrid_blend: l(1.0),
            },
            Propulsion::Hybrid => Self {
                propulsion,
                drivetrain_efficiency: l(0.90),
                regen_efficiency: l(0.60),
                idle_power_kw: l(8.0),
                auxiliary_power_kw: l(5.0),
                engine_efficiency: l(0.40),
                hybrid_blend: l(0.5),
            },
            Propulsion::Electric => Self {
                propulsion,
                drivetrain_efficiency: l(0.90),
                regen_efficiency: l(0.60),
                idle_power_kw: l(0.0),
                auxiliary_power_kw: l(5.0),
                engine_efficiency: l(1.0),
                hybrid_blend: l(0.0),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (zero, one) = (T::zero(), T::one());
        let checks = [
            (self.drivetrain_efficiency > zero && self.drivetrain_efficiency <= one, "drivetrain_efficiency in (0,1]"),
            (self.regen_efficiency >= zero && self.regen_efficiency < one, "regen_efficiency in [0,1)"),
            (self.idle_power_kw >= zero, "idle_power_kw >= 0"),
            (self.auxiliary_power_kw >= zero, "auxiliary_power_kw >= 0"),
            (self.engine_efficiency > zero && self.engine_efficiency <= one, "engine_efficiency in (0,1]"),
            (self.hybrid_blend >= zero && self.hybrid_blend <= one, "hybrid_blend in [0,1]"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, what)) => Err(Error::Energy(format!("{} powertrain: {what}", self.propulsion))),
            None => Ok(()),
        }
    }
}

fn diesel_kj<T: Scalar>(p_wheel_w: T, p: &PowertrainParams<T>, dt: T) -> T {
    let k = T::lit(1000.0);
    let traction = p_wheel_w.max(T::zero()) / (p.drivetrain_efficiency * p.engine_efficiency);
    (traction + p.idle_power_kw * k + p.auxiliary_power_kw * k) * dt / k
}

fn electric_kj<T: Scalar>(p_wheel_w: T, p: &PowertrainParams<T>, dt: T) -> T {
    let k = T::lit(1000.0);
    let traction = p_wheel_w.max(T::zero()) / p.drivetrain_efficiency;
    let recovered = p.regen_efficiency * (-p_wheel_w).max(T::zero());
    (traction - recovered + p.auxiliary_power_kw * k) * dt / k
}

/// Energy drawn in one step, in kJ. Electric steps may be negative (net regeneration).
pub fn consumption_step<T: Scalar>(p_wheel_w: T, params: &PowertrainParams<T>, dt: T) -> T {
    match params.propulsion {
        Propulsion::Diesel => diesel_kj(p_wheel_w, params, dt),
        Propulsion::Electric => electric_kj(p_wheel_w, params, dt),
        Propulsion::Hybrid => {
            let b = params.hybrid_blend;
            b * diesel_kj(p_wheel_w, params, dt) + (T::one() - b) * electric_kj(p_wheel_w, params, dt)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeroed(propulsion: Propulsion) -> PowertrainParams<f64> {
        PowertrainParams {
            idle_power_kw: 0.0,
            auxiliary_power_kw: 0.0,
            ..PowertrainParams::defaults(propulsion)
        }
    }

    #[test]
    fn null_input_is_zero_for_all_modes() {
        for p in [Propulsion::Diesel, Propulsion::Hybrid, Propulsion::Electric] {
            assert_eq!(consumption_step(0.0, &zeroed(p), 1.0), 0.0);
        }
    }

    #[test]
    fn electric_traction_and_regeneration() {
        let p = PowertrainParams::<f64>::defaults(Propulsion::Electric);
        let drive = consumption_step(100_000.0, &p, 1.0);
        assert!((drive - (100.0 / 0.9 + 5.0)).abs() < 1e-9);
        assert!((drive - 116.11).abs() < 0.01);
        let regen = consumption_step(-100_000.0, &p, 1.0);
        assert!((regen + 55.0).abs() < 1e-9);
    }

    #[test]
    fn diesel_wastes_braking_energy() {
        let p = PowertrainParams::<f64>::defaults(Propulsion::Diesel);
        assert!((consumption_step(-100_000.0, &p, 1.0) - 13.0).abs() < 1e-12);
        assert!((consumption_step(36_000.0, &p, 1.0) - (100.0 + 13.0)).abs() < 1e-9);
    }

    #[test]
    fn hybrid_is_the_blend() {
        let h = PowertrainParams::<f64>::defaults(Propulsion::Hybrid);
        let d = PowertrainParams { propulsion: Propulsion::Diesel, ..h };
        let e = PowertrainParams { propulsion: Propulsion::Electric, ..h };
        for pw in [-50_000.0, 0.0, 20_000.0] {
            let blend = 0.5 * consumption_step(pw, &d, 1.0) + 0.5 * consumption_step(pw, &e, 1.0);
            assert!((consumption_step(pw, &h, 1.0) - blend).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_rejects_out_of_range() {
        assert!(PowertrainParams::<f64>::defaults(Propulsion::Hybrid).validate().is_ok());
        let bad = PowertrainParams { regen_efficiency: 1.0, ..PowertrainParams::<f64>::defaults(Propulsion::Electric) };
        assert!(bad.validate().is_err());
        let bad = PowertrainParams { drivetrain_efficiency: 0.0, ..PowertrainParams::<f32>::defaults(Propulsion::Diesel) };
        assert!(bad.validate().is_err());
    }
}
