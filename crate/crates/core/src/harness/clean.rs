use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::io::{parse_line, IdMap};
use crate::graph::{largest_component, Graph, NodeId, SignedGraph};
use crate::sign::Sign;

/// Counts gathered while cleaning a directed snapshot.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CleanReport {
    pub input_arcs: usize,
    pub self_loops: usize,
    /// Arcs repeating an earlier arc in the same direction.
    pub repeated_arcs: usize,
    /// Undirected pairs dropped because their arcs disagree in sign.
    pub conflicting_pairs: usize,
    /// Reciprocal pairs with agreeing signs merged into one edge.
    pub collapsed_pairs: usize,
    pub components: usize,
    pub nodes: usize,
    pub edges: usize,
    pub negative_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct CleanedGraph {
    pub graph: SignedGraph,
    /// Snapshot id of every dense node.
    pub original_ids: Vec<u64>,
    pub report: CleanReport,
}

struct PairState {
    sign: Sign,
    conflict: bool,
    /// Bit 0: arc low -> high seen. Bit 1: arc high -> low seen.
    directions: u8,
}

/// Turns a directed signed edge list into the undirected graph the learners
/// run on: self-loops and sign-conflicting pairs are dropped, agreeing
/// reciprocal arcs merged, and only the largest connected component kept.
pub fn clean_directed_snapshot<R: BufRead>(reader: R) -> Result<CleanedGraph> {
    let mut ids = IdMap::default();
    let mut pairs: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut order: Vec<((NodeId, NodeId), PairState)> = Vec::new();
    let mut report = CleanReport::default();

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let Some((a, b, sign)) = parse_line(i + 1, &line)? else {
            continue;
        };
        report.input_arcs += 1;
        if a == b {
            report.self_loops += 1;
            continue;
        }
        let (u, v) = (ids.intern(a), ids.intern(b));
        let key = (u.min(v), u.max(v));
        let bit = if u < v { 1 } else { 2 };
        match pairs.get(&key) {
            Some(&slot) => {
                let state = &mut order[slot].1;
                if state.directions & bit != 0 {
                    report.repeated_arcs += 1;
                }
                state.directions |= bit;
                state.conflict |= state.sign != sign;
            }
            None => {
                pairs.insert(key, order.len());
                order.push((
                    key,
                    PairState {
                        sign,
                        conflict: false,
                        directions: bit,
                    },
                ));
            }
        }
    }

    let mut edges = Vec::new();
    let mut signs = Vec::new();
    for (key, state) in &order {
        if state.conflict {
            report.conflicting_pairs += 1;
            continue;
        }
        if state.directions == 3 {
            report.collapsed_pairs += 1;
        }
        edges.push(*key);
        signs.push(state.sign);
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let full = Graph::from_canonical(ids.original.len(), edges);
    let (_, components) = crate::graph::connected_components(&full);
    report.components = components;
    let keep = largest_component(&full);
    let (graph, edge_map) = full.induced_subgraph(&keep);
    let signs: Vec<Sign> = edge_map.iter().map(|&e| signs[e]).collect();
    let original_ids = keep.iter().map(|&v| ids.original[v]).collect();
    let graph = SignedGraph::new(graph, signs)?;

    report.nodes = graph.node_count();
    report.edges = graph.edge_count();
    report.negative_fraction = graph.negative_count() as f64 / graph.edge_count().max(1) as f64;
    Ok(CleanedGraph {
        graph,
        original_ids,
        report,
    })
}
