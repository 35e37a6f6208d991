//! Passenger exchange and dwell at a stop.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellParams {
    pub door_time_s: f64,
    pub board_s_per_person: f64,
    pub alight_s_per_person: f64,
}

impl Default for DwellParams {
    fn default() -> Self {
        Self {
            door_time_s: 4.0,
            board_s_per_person: 2.0,
            alight_s_per_person: 1.5,
        }
    }
}

/// Dwell in whole seconds: the larger of the scheduled dwell and the exchange time, rounded up.
pub fn dwell_time_s(params: &DwellParams, scheduled_dwell_s: u32, alighted: usize, boarded: usize) -> u32 {
    let exchange = params.door_time_s
        + params.alight_s_per_person * alighted as f64
        + params.board_s_per_person * boarded as f64;
    f64::from(scheduled_dwell_s).max(exchange).ceil() as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exchange<P> {
    pub alighted: Vec<P>,
    pub boarded: Vec<P>,
}

/// Unloads riders whose plan ends here, then boards eligible waiting persons
/// in queue order until the bus is full. Ineligible or left-behind persons stay queued.
pub fn service_stop<P: Clone>(
    onboard: &mut Vec<P>,
    waiting: &mut Vec<P>,
    capacity: usize,
    mut alights_here: impl FnMut(&P) -> bool,
    mut boards_here: impl FnMut(&P) -> bool,
) -> Exchange<P> {
    let mut alighted = Vec::new();
    let mut stay = Vec::with_capacity(onboard.len());
    for p in onboard.drain(..) {
        if alights_here(&p) {
            alighted.push(p);
        } else {
            stay.push(p);
        }
    }
    *onboard = stay;

    let mut boarded = Vec::new();
    let mut still_waiting = Vec::with_capacity(waiting.len());
    for p in waiting.drain(..) {
        if onboard.len() < capacity && boards_here(&p) {
            onboard.push(p.clone());
            boarded.push(p);
        } else {
            still_waiting.push(p);
        }
    }
    *waiting = still_waiting;
    Exchange { alighted, boarded }
}
