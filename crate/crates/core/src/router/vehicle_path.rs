use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::network::{EdgeIdx, RoadNetwork};

#[derive(Debug, Clone, PartialEq)]
pub struct VehiclePath {
    /// Edges from origin to destination, both inclusive.
    pub edges: Vec<EdgeIdx>,
    /// Free-flow traversal time of every edge in the path.
    pub duration_s: f64,
}

/// Min-heap entry ordered by cost, then lexicographically by edge sequence.
#[derive(Debug, PartialEq)]
struct Label {
    cost: f64,
    path: Vec<EdgeIdx>,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.path.cmp(&self.path))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn search(net: &RoadNetwork, seeds: Vec<Label>, target: EdgeIdx) -> Option<VehiclePath> {
    let mut settled = vec![false; net.edges().len()];
    let mut heap: BinaryHeap<Label> = seeds.into();
    while let Some(label) = heap.pop() {
        let last = *label.path.last().expect("labels are never empty");
        if settled[last.0] {
            continue;
        }
        settled[last.0] = true;
        if last == target {
            return Some(VehiclePath {
                edges: label.path,
                duration_s: label.cost,
            });
        }
        for &next in net.successors(last) {
            if settled[next.0] {
                continue;
            }
            let mut path = label.path.clone();
            path.push(next);
            heap.push(Label {
                cost: label.cost + net.edge(next).free_flow_time(),
                path,
            });
        }
    }
    None
}

/// Minimum free-flow time path between two edges.
///
/// Costs include the origin and destination edges. Equal-cost alternatives
/// resolve to the lexicographically smallest edge-id sequence.
pub fn shortest_vehicle_path(net: &RoadNetwork, from: EdgeIdx, to: EdgeIdx) -> Result<VehiclePath> {
    let seed = Label {
        cost: net.edge(from).free_flow_time(),
        path: vec![from],
    };
    search(net, vec![seed], to).ok_or_else(|| {
        Error::Routing(format!(
            "edge {} unreachable from edge {}",
            net.edge(to).id,
            net.edge(from).id
        ))
    })
}

/// Shortest closed tour leaving `edge` and returning to it (for revisiting an
/// earlier point on the same edge).
pub fn shortest_loop_path(net: &RoadNetwork, edge: EdgeIdx) -> Result<VehiclePath> {
    let base = net.edge(edge).free_flow_time();
    let seeds = net
        .successors(edge)
        .iter()
        .map(|&s| Label {
            cost: base + net.edge(s).free_flow_time(),
            path: vec![edge, s],
        })
        .collect();
    search(net, seeds, edge).ok_or_else(|| {
        Error::Routing(format!("no loop returns to edge {}", net.edge(edge).id))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::EdgeSpec;

    fn diamond() -> RoadNetwork {
        // s -> {a, b} -> t, both branches cost 20 s
        let nodes = vec![
            ("s".into(), Point::new(0.0, 0.0)),
            ("a".into(), Point::new(50.0, 50.0)),
            ("b".into(), Point::new(50.0, -50.0)),
            ("t".into(), Point::new(100.0, 0.0)),
            ("x".into(), Point::new(50.0, 0.0)),
        ];
        let e = |id: &str, f: &str, t: &str| EdgeSpec {
            id: id.into(),
            from: f.into(),
            to: t.into(),
            length_m: 100.0,
            speed_limit_mps: 10.0,
            lanes: 1,
        };
        RoadNetwork::from_parts(
            nodes,
            vec![
                e("in", "x", "s"),
                e("s_b", "s", "b"),
                e("s_a", "s", "a"),
                e("b_t", "b", "t"),
                e("a_t", "a", "t"),
                e("t_x", "t", "x"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identity_path() {
        let net = diamond();
        let e = net.edge_idx("s_a").unwrap();
        let p = shortest_vehicle_path(&net, e, e).unwrap();
        assert_eq!(p.edges, vec![e]);
        assert_eq!(p.duration_s, 10.0);
    }

    #[test]
    fn equal_cost_branches_pick_smaller_sequence() {
        let net = diamond();
        let p = shortest_vehicle_path(&net, net.edge_idx("in").unwrap(), net.edge_idx("t_x").unwrap()).unwrap();
        let ids: Vec<&str> = p.edges.iter().map(|e| net.edge(*e).id.as_str()).collect();
        assert_eq!(ids, ["in", "s_a", "a_t", "t_x"]);
        assert_eq!(p.duration_s, 40.0);
    }

    #[test]
    fn unreachable_is_an_error() {
        let net = diamond();
        assert!(shortest_vehicle_path(&net, net.edge_idx("t_x").unwrap(), net.edge_idx("b_t").unwrap()).is_ok());
        let nodes = vec![("p".into(), Point::new(0.0, 0.0)), ("q".into(), Point::new(10.0, 0.0))];
        let e = |id: &str, f: &str, t: &str| EdgeSpec {
            id: id.into(),
            from: f.into(),
            to: t.into(),
            length_m: 10.0,
            speed_limit_mps: 10.0,
            lanes: 1,
        };
        let net = RoadNetwork::from_parts(nodes, vec![e("pq", "p", "q"), e("pq2", "p", "q")]).unwrap();
        assert!(shortest_vehicle_path(&net, net.edge_idx("pq").unwrap(), net.edge_idx("pq2").unwrap()).is_err());
    }

    #[test]
    fn loop_returns_to_start() {
        let net = diamond();
        let e = net.edge_idx("in").unwrap();
        let p = shortest_loop_path(&net, e).unwrap();
        assert_eq!(p.edges.first(), Some(&e));
        assert_eq!(p.edges.last(), Some(&e));
        assert_eq!(p.edges.len(), 5);
    }
}
