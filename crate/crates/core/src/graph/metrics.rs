use std::collections::VecDeque;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

pub(crate) fn first_unreachable(g: &Graph, root: NodeId) -> Option<NodeId> {
    let dist = shortest_path_lengths(g, root);
    dist.iter().position(Option::is_none)
}

/// Unit-length distances from `source`; `None` for unreachable nodes.
pub fn shortest_path_lengths(g: &Graph, source: NodeId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &(w, _) in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Exact diameter by a BFS from every node. Quadratic; meant for reporting.
pub fn graph_diameter(g: &Graph) -> Result<usize> {
    let mut diameter = 0;
    for source in 0..g.node_count() {
        let dist = shortest_path_lengths(g, source);
        for (node, d) in dist.iter().enumerate() {
            match d {
                Some(d) => diameter = diameter.max(*d),
                None => return Err(Error::Disconnected { root: source, node }),
            }
        }
    }
    Ok(diameter)
}

/// Component index per node; components numbered by smallest member.
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let mut comp = vec![usize::MAX; g.node_count()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..g.node_count() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &(w, _) in g.neighbors(u) {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

/// Nodes of the largest connected component in increasing id order. Ties
/// go to the component containing the smallest node id.
pub fn largest_component(g: &Graph) -> Vec<NodeId> {
    let (comp, count) = connected_components(g);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    let best = (0..count)
        .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    (0..g.node_count()).filter(|&v| comp[v] == best).collect()
}
