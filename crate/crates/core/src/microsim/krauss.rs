//! Krauss safe-speed car following.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KraussParams<T> {
    pub accel: T,
    pub decel: T,
    pub max_speed: T,
    pub min_gap: T,
    /// Dawdling factor in `[0, 1]`.
    pub sigma: T,
    /// Driver reaction time.
    pub tau: T,
}

/// Leader as seen by the follower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leader<T> {
    pub speed: T,
    /// Bumper-to-bumper distance.
    pub gap: T,
}

/// Highest speed from which the follower can still avoid the leader.
pub fn safe_speed<T: Scalar>(leader_speed: T, effective_gap: T, speed: T, decel: T, tau: T) -> T {
    leader_speed + (effective_gap - leader_speed * tau) / (speed / decel + tau)
}

/// One Krauss update. `xi` is the dawdling draw in `[0, 1)`.
///
/// The leader gap is reduced by the follower's minimum gap before the safe
/// speed is computed.
pub fn car_following_step<T: Scalar>(
    leader: Option<Leader<T>>,
    speed: T,
    params: &KraussParams<T>,
    speed_limit: T,
    dt: T,
    xi: T,
) -> T {
    let mut desired = (speed + params.accel * dt).min(params.max_speed).min(speed_limit);
    if let Some(l) = leader {
        let v_safe = safe_speed(l.speed, l.gap - params.min_gap, speed, params.decel, params.tau);
        desired = desired.min(v_safe);
    }
    (desired - params.sigma * params.accel * dt * xi).max(T::zero())
}
