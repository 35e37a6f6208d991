use super::{NodeIdx, RoadNetwork};

/// Weakly connected components, each sorted, ordered by smallest node.
pub fn weakly_connected_components(net: &RoadNetwork) -> Vec<Vec<NodeIdx>> {
    let n = net.nodes().len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![NodeIdx(start)];
        comp[start] = id;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let neighbours = net
                .out_edges(NodeIdx(u))
                .iter()
                .map(|e| net.edge(*e).to)
                .chain(net.in_edges(NodeIdx(u)).iter().map(|e| net.edge(*e).from));
            for v in neighbours {
                if comp[v.0] == usize::MAX {
                    comp[v.0] = id;
                    members.push(v);
                    stack.push(v.0);
                }
            }
        }
        members.sort();
        out.push(members);
    }
    out
}

/// Strongly connected components (Kosaraju, iterative).
pub fn strongly_connected_components(net: &RoadNetwork) -> Vec<Vec<NodeIdx>> {
    let n = net.nodes().len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((u, i)) = stack.pop() {
            let outs = net.out_edges(NodeIdx(u));
            if i < outs.len() {
                stack.push((u, i + 1));
                let v = net.edge(outs[i]).to.0;
                if !visited[v] {
                    visited[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Vec<NodeIdx>> = Vec::new();
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![NodeIdx(s)];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for e in net.in_edges(NodeIdx(u)) {
                let v = net.edge(*e).from.0;
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(NodeIdx(v));
                    stack.push(v);
                }
            }
        }
        members.sort();
        out.push(members);
    }
    out.sort();
    out
}
