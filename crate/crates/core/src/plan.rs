//! Query plans shared by all learners.
//!
//! Every learner reduces to the same shape: the nodes are split into groups,
//! each group is spanned by a tree of queried edges (a [`GroupForest`]), and
//! each pair of adjacent groups gets one queried connector edge. A test edge
//! inside a group is predicted by the parity of its forest path; a test edge
//! between groups by the forest path to the connector, the connector's
//! label, and the forest path on the far side.
//!
//! Plans are built from topology alone. [`QueryPlan::execute`] reveals the
//! whole query set before it predicts anything.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::oracle::LabelOracle;
use crate::sign::Sign;

/// Node groups, each spanned by a rooted tree of queried edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupForest {
    group: Vec<usize>,
    parent: Vec<Option<(NodeId, EdgeId)>>,
    depth: Vec<usize>,
    roots: Vec<NodeId>,
    // Members grouped by group, breadth-first within each group.
    order: Vec<NodeId>,
    offsets: Vec<usize>,
}

impl GroupForest {
    /// `group[v]` in `0..group_count`; `parent[v]` links `v` to a node of the
    /// same group through a host edge. Each group must have exactly one
    /// parentless node and every node must reach it.
    pub fn new(
        group: Vec<usize>,
        group_count: usize,
        parent: Vec<Option<(NodeId, EdgeId)>>,
    ) -> Result<GroupForest> {
        let n = group.len();
        if parent.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: parent.len(),
            });
        }
        let mut roots = vec![usize::MAX; group_count];
        let mut child_count = vec![0usize; n + 1];
        for v in 0..n {
            let g = group[v];
            if g >= group_count {
                return Err(Error::Invariant(format!("node {v} has group {g} out of range")));
            }
            match parent[v] {
                None if roots[g] != usize::MAX => {
                    return Err(Error::Invariant(format!("group {g} has two roots")));
                }
                None => roots[g] = v,
                Some((p, _)) => {
                    if p >= n || group[p] != g {
                        return Err(Error::Invariant(format!(
                            "parent of node {v} lies outside its group"
                        )));
                    }
                    child_count[p] += 1;
                }
            }
        }
        if let Some(g) = roots.iter().position(|&r| r == usize::MAX) {
            return Err(Error::Invariant(format!("group {g} has no root")));
        }

        let mut child_offsets = vec![0usize; n + 1];
        for v in 0..n {
            child_offsets[v + 1] = child_offsets[v] + child_count[v];
        }
        let mut fill = child_offsets.clone();
        let mut children = vec![0; child_offsets[n]];
        for v in 0..n {
            if let Some((p, _)) = parent[v] {
                children[fill[p]] = v;
                fill[p] += 1;
            }
        }

        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(group_count + 1);
        for &root in &roots {
            offsets.push(order.len());
            let mut head = order.len();
            order.push(root);
            while head < order.len() {
                let u = order[head];
                head += 1;
                for &c in &children[child_offsets[u]..child_offsets[u + 1]] {
                    depth[c] = depth[u] + 1;
                    order.push(c);
                }
            }
        }
        offsets.push(order.len());
        if order.len() != n {
            return Err(Error::Invariant(
                "forest parent links contain a cycle".into(),
            ));
        }
        Ok(GroupForest {
            group,
            parent,
            depth,
            roots,
            order,
            offsets,
        })
    }

    pub fn node_count(&self) -> usize {
        self.group.len()
    }

    pub fn group_count(&self) -> usize {
        self.roots.len()
    }

    pub fn group(&self, v: NodeId) -> usize {
        self.group[v]
    }

    pub fn groups(&self) -> &[usize] {
        &self.group
    }

    pub fn root(&self, group: usize) -> NodeId {
        self.roots[group]
    }

    pub fn parent(&self, v: NodeId) -> Option<(NodeId, EdgeId)> {
        self.parent[v]
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v]
    }

    /// Members of `group`, parents before children.
    pub fn members(&self, group: usize) -> &[NodeId] {
        &self.order[self.offsets[group]..self.offsets[group + 1]]
    }

    /// All nodes, parents before children.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn forest_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.parent.iter().filter_map(|l| l.map(|(_, e)| e))
    }

    /// Number of edges on the forest path `u -> v`; both in one group.
    pub fn distance(&self, u: NodeId, v: NodeId) -> usize {
        let (mut a, mut b) = (u, v);
        let mut steps = 0;
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap().0;
            steps += 1;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap().0;
            steps += 1;
        }
        while a != b {
            a = self.parent[a].unwrap().0;
            b = self.parent[b].unwrap().0;
            steps += 2;
        }
        steps
    }

    /// Edges of the forest path `u -> v` in walking order.
    pub fn path_edges(&self, u: NodeId, v: NodeId) -> Vec<EdgeId> {
        let (mut a, mut b) = (u, v);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            let (p, e) = self.parent[a].unwrap();
            up.push(e);
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            let (p, e) = self.parent[b].unwrap();
            down.push(e);
            b = p;
        }
        while a != b {
            let (pa, ea) = self.parent[a].unwrap();
            let (pb, eb) = self.parent[b].unwrap();
            up.push(ea);
            down.push(eb);
            a = pa;
            b = pb;
        }
        up.extend(down.into_iter().rev());
        up
    }

    /// Checks every forest link against the host graph.
    pub fn validate_against(&self, g: &Graph) -> Result<()> {
        if g.node_count() != self.node_count() {
            return Err(Error::LengthMismatch {
                left: g.node_count(),
                right: self.node_count(),
            });
        }
        for (v, link) in self.parent.iter().enumerate() {
            if let Some((p, e)) = *link {
                if e >= g.edge_count() || g.endpoints(e) != (p.min(v), p.max(v)) {
                    return Err(Error::Invariant(format!(
                        "forest edge {e} does not join {v} to its parent {p}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How a single edge is handled by a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// In the query set.
    Query,
    /// Test edge inside one group, predicted by its forest path.
    Forest,
    /// Test edge between two groups, predicted through `connector`.
    Bridged { connector: EdgeId },
}

/// Query set and test set of one run. Disjoint; together they are every edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePartition {
    pub query_edges: Vec<EdgeId>,
    pub test_edges: Vec<EdgeId>,
}

impl EdgePartition {
    pub fn covers_exactly(&self, edge_count: usize) -> bool {
        let mut seen = vec![false; edge_count];
        for &e in self.query_edges.iter().chain(&self.test_edges) {
            if e >= edge_count || seen[e] {
                return false;
            }
            seen[e] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Size figures describing how a plan was put together.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub groups: usize,
    pub forest_edges: usize,
    pub connectors: usize,
    /// Treelets, for the decompositions that build them.
    pub treelets: Option<usize>,
    /// Spanning tree height, when a spanning tree was drawn.
    pub tree_height: Option<usize>,
    /// Mean degree of star centers in the graph the stars were cut from.
    pub mean_center_degree: Option<f64>,
    /// Mean number of leaves a center actually received.
    pub mean_center_residual_degree: Option<f64>,
}

/// Query set plus, for every test edge, the route that predicts it.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    forest: GroupForest,
    routes: Vec<Route>,
    query_edges: Vec<EdgeId>,
    pub stats: PlanStats,
}

impl QueryPlan {
    /// Completes a plan from a forest: forest edges are queried, the first
    /// edge seen between each pair of groups becomes the connector for that
    /// pair, and every other edge is a test edge.
    ///
    /// Groups are scanned in index order with one slot per target group,
    /// cleared after each source group, so the whole pass is linear in the
    /// number of edges.
    pub fn assemble(g: &Graph, forest: GroupForest) -> Result<QueryPlan> {
        forest.validate_against(g)?;
        let m = g.edge_count();
        let mut routes = vec![Route::Forest; m];
        let mut forest_edges = 0;
        for e in forest.forest_edges() {
            routes[e] = Route::Query;
            forest_edges += 1;
        }

        let groups = forest.group_count();
        let mut slot: Vec<Option<EdgeId>> = vec![None; groups];
        let mut finished = vec![false; groups];
        let mut touched = Vec::new();
        let mut connectors = 0;
        for source in 0..groups {
            for &i in forest.members(source) {
                for &(j, e) in g.neighbors(i) {
                    let target = forest.group(j);
                    if target == source || finished[target] {
                        continue;
                    }
                    match slot[target] {
                        None => {
                            slot[target] = Some(e);
                            touched.push(target);
                            routes[e] = Route::Query;
                            connectors += 1;
                        }
                        Some(connector) => routes[e] = Route::Bridged { connector },
                    }
                }
            }
            for t in touched.drain(..) {
                slot[t] = None;
            }
            finished[source] = true;
        }

        let query_edges = (0..m).filter(|&e| routes[e] == Route::Query).collect();
        Ok(QueryPlan {
            stats: PlanStats {
                groups,
                forest_edges,
                connectors,
                ..PlanStats::default()
            },
            forest,
            routes,
            query_edges,
        })
    }

    pub fn forest(&self) -> &GroupForest {
        &self.forest
    }

    pub fn route(&self, e: EdgeId) -> Route {
        self.routes[e]
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    /// Query edges in increasing id order.
    pub fn query_edges(&self) -> &[EdgeId] {
        &self.query_edges
    }

    pub fn query_count(&self) -> usize {
        self.query_edges.len()
    }

    pub fn test_count(&self) -> usize {
        self.routes.len() - self.query_edges.len()
    }

    pub fn test_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.routes.len()).filter(|&e| self.routes[e] != Route::Query)
    }

    pub fn partition(&self) -> EdgePartition {
        EdgePartition {
            query_edges: self.query_edges.clone(),
            test_edges: self.test_edges().collect(),
        }
    }

    /// For a bridged test edge `(u, v)`, the connector endpoints ordered so
    /// the first shares a group with `u`.
    fn oriented_connector(&self, g: &Graph, u: NodeId, connector: EdgeId) -> (NodeId, NodeId) {
        let (a, b) = g.endpoints(connector);
        if self.forest.group(a) == self.forest.group(u) {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Queried edges closing test edge `e` into a circuit, in walking order
    /// from the lower endpoint. Empty for query edges.
    pub fn circuit_edges(&self, g: &Graph, e: EdgeId) -> Vec<EdgeId> {
        let (u, v) = g.endpoints(e);
        match self.routes[e] {
            Route::Query => Vec::new(),
            Route::Forest => self.forest.path_edges(u, v),
            Route::Bridged { connector } => {
                let (a, b) = self.oriented_connector(g, u, connector);
                let mut path = self.forest.path_edges(u, a);
                path.push(connector);
                path.extend(self.forest.path_edges(b, v));
                path
            }
        }
    }

    /// Length of the queried path closing test edge `e` into a circuit.
    pub fn circuit_length(&self, g: &Graph, e: EdgeId) -> usize {
        let (u, v) = g.endpoints(e);
        match self.routes[e] {
            Route::Query => 0,
            Route::Forest => self.forest.distance(u, v),
            Route::Bridged { connector } => {
                let (a, b) = self.oriented_connector(g, u, connector);
                self.forest.distance(u, a) + 1 + self.forest.distance(b, v)
            }
        }
    }

    /// Reveals every query edge, tags each node with the parity of its
    /// forest path to the group root, then predicts all test edges.
    pub fn execute<O: LabelOracle + ?Sized>(
        &self,
        g: &Graph,
        oracle: &mut O,
    ) -> Result<PredictionRecord> {
        if g.edge_count() != self.routes.len() || g.node_count() != self.forest.node_count() {
            return Err(Error::Invariant("plan was built for a different graph".into()));
        }
        let mut revealed: Vec<Option<Sign>> = vec![None; self.routes.len()];
        for &e in &self.query_edges {
            revealed[e] = Some(oracle.reveal(e));
        }
        let label = |e: EdgeId| revealed[e].expect("query edge revealed");

        let mut tag = vec![Sign::Positive; g.node_count()];
        for &v in self.forest.order() {
            if let Some((p, e)) = self.forest.parent(v) {
                tag[v] = tag[p] * label(e);
            }
        }

        let mut predictions = Vec::with_capacity(self.test_count());
        let mut test_edges = Vec::with_capacity(self.test_count());
        for (e, route) in self.routes.iter().enumerate() {
            let (u, v) = g.endpoints(e);
            let (sign, circuit_length) = match *route {
                Route::Query => continue,
                Route::Forest => (tag[u] * tag[v], self.forest.distance(u, v)),
                Route::Bridged { connector } => {
                    let (a, b) = self.oriented_connector(g, u, connector);
                    (
                        tag[u] * tag[a] * label(connector) * tag[b] * tag[v],
                        self.forest.distance(u, a) + 1 + self.forest.distance(b, v),
                    )
                }
            };
            test_edges.push(e);
            predictions.push(Prediction {
                edge: e,
                sign,
                circuit_length,
            });
        }
        Ok(PredictionRecord {
            partition: EdgePartition {
                query_edges: self.query_edges.clone(),
                test_edges,
            },
            predictions,
            mistakes: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub edge: EdgeId,
    pub sign: Sign,
    /// Queried edges on the path that closes `edge` into a circuit.
    pub circuit_length: usize,
}

/// Outcome of one run: the partition, one prediction per test edge in
/// increasing edge order, and the mistake count once scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub partition: EdgePartition,
    pub predictions: Vec<Prediction>,
    pub mistakes: Option<usize>,
}

impl PredictionRecord {
    pub fn query_count(&self) -> usize {
        self.partition.query_edges.len()
    }

    pub fn test_count(&self) -> usize {
        self.predictions.len()
    }

    pub fn max_circuit(&self) -> usize {
        self.predictions
            .iter()
            .map(|p| p.circuit_length)
            .max()
            .unwrap_or(0)
    }

    pub fn mean_circuit(&self) -> f64 {
        if self.predictions.is_empty() {
            return 0.0;
        }
        let total: usize = self.predictions.iter().map(|p| p.circuit_length).sum();
        total as f64 / self.predictions.len() as f64
    }

    /// Counts wrong predictions against `truth` (indexed by edge id) and
    /// stores the count.
    pub fn score(&mut self, truth: &[Sign]) -> usize {
        let mistakes = self
            .predictions
            .iter()
            .filter(|p| truth[p.edge] != p.sign)
            .count();
        self.mistakes = Some(mistakes);
        mistakes
    }

    pub fn predicted_signs(&self) -> Vec<Sign> {
        self.predictions.iter().map(|p| p.sign).collect()
    }
}
