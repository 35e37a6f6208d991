//! Edge state aggregated over fixed sampling intervals.

use std::collections::BTreeMap;

use super::{EdgeInterval, TrajectoryRecord};
use crate::network::{EdgeIdx, RoadNetwork};

#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    samples: u64,
    speed_sum: f64,
    length_sum: f64,
}

/// Streaming accumulator of vehicle-seconds per (edge, interval).
///
/// Intervals are `[k * period, (k + 1) * period)`. A vehicle contributes the
/// part of its body that lies on the edge, so occupancy never exceeds one.
#[derive(Debug, Clone)]
pub struct EdgeAccumulator {
    period_s: u32,
    cells: BTreeMap<(EdgeIdx, u32), Cell>,
}

impl EdgeAccumulator {
    pub fn new(period_s: u32) -> Self {
        assert!(period_s >= 1, "sampling period must be at least 1 s");
        Self {
            period_s,
            cells: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, edge: EdgeIdx, t_s: u32, speed_mps: f64, position_m: f64, vehicle_length_m: f64) {
        let c = self.cells.entry((edge, t_s / self.period_s)).or_default();
        c.samples += 1;
        c.speed_sum += speed_mps;
        c.length_sum += vehicle_length_m.min(position_m).max(0.0);
    }

    pub fn finish(self, net: &RoadNetwork) -> Vec<EdgeInterval> {
        let period = f64::from(self.period_s);
        self.cells
            .into_iter()
            .map(|((edge, k), c)| {
                let e = net.edge(edge);
                EdgeInterval {
                    edge_id: e.id.clone(),
                    t0_s: k * self.period_s,
                    t1_s: (k + 1) * self.period_s,
                    mean_speed_mps: c.speed_sum / c.samples as f64,
                    density_veh_per_km: (c.samples as f64 / period) / (e.length_m / 1000.0),
                    occupancy: c.length_sum / (e.length_m * period),
                    samples: c.samples,
                }
            })
            .collect()
    }
}

/// Aggregates recorded trajectories. `type_lengths` maps type id to vehicle length.
pub fn aggregate_edges(
    records: &[TrajectoryRecord],
    net: &RoadNetwork,
    type_lengths: &BTreeMap<String, f64>,
    period_s: u32,
) -> Vec<EdgeInterval> {
    let mut acc = EdgeAccumulator::new(period_s);
    for r in records {
        let Some(edge) = net.edge_idx(&r.edge_id) else { continue };
        let len = type_lengths.get(&*r.type_id).copied().unwrap_or(0.0);
        acc.add(edge, r.t_s, r.speed_mps, r.position_m, len);
    }
    acc.finish(net)
}
