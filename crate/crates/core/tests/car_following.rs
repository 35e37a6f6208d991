use proptest::prelude::*;
use transit_core::microsim::{car_following_step, KraussParams, Leader};

fn params<T: From<f32>>(accel: f32, decel: f32, min_gap: f32, sigma: f32) -> KraussParams<T> {
    KraussParams {
        accel: accel.into(),
        decel: decel.into(),
        max_speed: T::from(20.0),
        min_gap: min_gap.into(),
        sigma: sigma.into(),
        tau: T::from(1.0),
    }
}

proptest! {
    #[test]
    fn next_speed_is_bounded(
        v in 0.0f64..20.0,
        accel in 0.5f32..3.0,
        decel in 3.0f32..6.0,
        min_gap in 0.0f32..3.0,
        sigma in 0.0f32..1.0,
        limit in 5.0f64..25.0,
        xi in 0.0f64..1.0,
        leader in prop::option::of((0.0f64..20.0, 0.0f64..200.0)),
    ) {
        let p = params::<f64>(accel, decel, min_gap, sigma);
        let l = leader.map(|(speed, gap)| Leader { speed, gap });
        let next = car_following_step(l, v, &p, limit, 1.0, xi);
        let free = (v + f64::from(accel)).min(20.0).min(limit);
        prop_assert!(next >= 0.0);
        prop_assert!(next <= free + 1e-12);
        if l.is_none() {
            prop_assert!(next >= free - f64::from(sigma) * f64::from(accel) - 1e-12);
        }
        if let Some(l) = l {
            let gap = l.gap - f64::from(min_gap);
            let safe = l.speed + (gap - l.speed) / (v / f64::from(decel) + 1.0);
            prop_assert!(next <= safe.max(0.0) + 1e-12);
        }
    }

    #[test]
    fn without_dawdling_the_step_is_deterministic_in_xi(
        v in 0.0f64..20.0,
        xi_a in 0.0f64..1.0,
        xi_b in 0.0f64..1.0,
        leader in prop::option::of((0.0f64..20.0, 0.0f64..200.0)),
    ) {
        let p = params::<f64>(1.0, 4.0, 2.5, 0.0);
        let l = leader.map(|(speed, gap)| Leader { speed, gap });
        prop_assert_eq!(car_following_step(l, v, &p, 15.0, 1.0, xi_a), car_following_step(l, v, &p, 15.0, 1.0, xi_b));
    }

    #[test]
    fn single_precision_agrees(
        v in 0.0f32..20.0,
        xi in 0.0f32..1.0,
        leader in prop::option::of((0.0f32..20.0, 0.0f32..200.0)),
    ) {
        let wide = car_following_step(
            leader.map(|(s, g)| Leader { speed: f64::from(s), gap: f64::from(g) }),
            f64::from(v),
            &params::<f64>(1.2, 4.0, 2.5, 0.5),
            13.9,
            1.0,
            f64::from(xi),
        );
        let narrow = car_following_step(
            leader.map(|(speed, gap)| Leader { speed, gap }),
            v,
            &params::<f32>(1.2, 4.0, 2.5, 0.5),
            13.9,
            1.0,
            xi,
        );
        prop_assert!((wide - f64::from(narrow)).abs() <= 1e-4);
    }
}
