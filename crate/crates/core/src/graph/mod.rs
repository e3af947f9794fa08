//! Undirected simple graphs, their signed variant, and the tree machinery the
//! learners are built on.

pub(crate) mod io;
mod metrics;
mod tree;

use std::collections::HashSet;

pub use io::{load_edge_list, write_edge_list, LoadedGraph};
pub use metrics::{
    connected_components, graph_diameter, largest_component, shortest_path_lengths,
};
pub use tree::{bfs_spanning_tree, NeighborOrder, RootedTree};

use crate::error::{Error, Result};
use crate::sign::Sign;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Undirected simple graph with dense node ids and edge ids in insertion
/// order. Edges are stored with canonical orientation `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    offsets: Vec<usize>,
    incidences: Vec<(NodeId, EdgeId)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate pairs, and endpoints
    /// outside `0..node_count`.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let pair = (u.min(v), u.max(v));
            if !seen.insert(pair) {
                return Err(Error::DuplicateEdge(pair.0, pair.1));
            }
            canonical.push(pair);
        }
        Ok(Graph::from_canonical(node_count, canonical))
    }

    /// Caller guarantees the edges are canonical, simple and in range.
    pub(crate) fn from_canonical(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Graph {
        let mut degree = vec![0usize; node_count + 1];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &degree[..node_count] {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets.clone();
        let mut incidences = vec![(0, 0); acc];
        for (e, &(u, v)) in edges.iter().enumerate() {
            incidences[fill[u]] = (v, e);
            fill[u] += 1;
            incidences[fill[v]] = (u, e);
            fill[v] += 1;
        }
        Graph {
            node_count,
            edges,
            offsets,
            incidences,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    /// `(neighbor, edge)` pairs incident to `v`, in edge-id order.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.incidences[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// The node of largest degree, smallest id on ties.
    pub fn max_degree_node(&self) -> NodeId {
        (0..self.node_count)
            .max_by(|&a, &b| self.degree(a).cmp(&self.degree(b)).then(b.cmp(&a)))
            .expect("graph has at least one node")
    }

    /// Linear scan of the smaller adjacency list.
    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a)
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, e)| e)
    }

    /// The endpoint of `e` that is not `v`.
    pub fn opposite(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn is_connected(&self) -> bool {
        metrics::first_unreachable(self, 0).is_none()
    }

    /// Errors with the first node not reachable from node 0.
    pub fn ensure_connected(&self) -> Result<()> {
        match metrics::first_unreachable(self, 0) {
            None => Ok(()),
            Some(node) => Err(Error::Disconnected { root: 0, node }),
        }
    }

    /// Subgraph induced by `nodes` (remapped densely in the given order),
    /// plus the host edge id of every kept edge.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<EdgeId>) {
        let mut remap = vec![usize::MAX; self.node_count];
        for (i, &v) in nodes.iter().enumerate() {
            remap[v] = i;
        }
        let mut edges = Vec::new();
        let mut kept = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let (a, b) = (remap[u], remap[v]);
            if a != usize::MAX && b != usize::MAX {
                edges.push((a.min(b), a.max(b)));
                kept.push(e);
            }
        }
        (Graph::from_canonical(nodes.len().max(1), edges), kept)
    }
}

/// A graph together with the label of every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    graph: Graph,
    signs: Vec<Sign>,
}

impl SignedGraph {
    pub fn new(graph: Graph, signs: Vec<Sign>) -> Result<SignedGraph> {
        if signs.len() != graph.edge_count() {
            return Err(Error::LengthMismatch {
                left: graph.edge_count(),
                right: signs.len(),
            });
        }
        Ok(SignedGraph { graph, signs })
    }

    pub fn from_signed_edges(
        node_count: usize,
        edges: &[(NodeId, NodeId, Sign)],
    ) -> Result<SignedGraph> {
        let pairs: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let graph = Graph::from_edges(node_count, &pairs)?;
        let signs = edges.iter().map(|&(_, _, s)| s).collect();
        Ok(SignedGraph { graph, signs })
    }

    /// The label-free view handed to learners.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn sign(&self, e: EdgeId) -> Sign {
        self.signs[e]
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|s| s.is_negative()).count()
    }

    pub fn with_signs(&self, signs: Vec<Sign>) -> Result<SignedGraph> {
        SignedGraph::new(self.graph.clone(), signs)
    }

    pub fn into_parts(self) -> (Graph, Vec<Sign>) {
        (self.graph, self.signs)
    }
}
