//! The treeCutter(k) learner.
//!
//! A breadth-first spanning tree is cut into treelets of height `k` (the last
//! one, which holds the tree root, may be lower). All treelet edges are
//! queried, plus one edge for every pair of treelets that touch in the graph.
//! Circuits are at most `4k + 1` edges long.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{bfs_spanning_tree, Graph, NeighborOrder, NodeId, RootedTree};
use crate::oracle::LabelOracle;
use crate::plan::{GroupForest, PredictionRecord, QueryPlan};

/// How the spanning tree is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TreeOptions {
    /// Defaults to the highest-degree node, smallest id on ties.
    pub root: Option<NodeId>,
    pub neighbor_order: NeighborOrder,
}

impl TreeOptions {
    pub fn shuffled() -> TreeOptions {
        TreeOptions {
            root: None,
            neighbor_order: NeighborOrder::Shuffled,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, g: &Graph, rng: &mut R) -> Result<RootedTree> {
        let root = self.root.unwrap_or_else(|| g.max_degree_node());
        bfs_spanning_tree(g, root, self.neighbor_order, rng)
    }
}

/// Node-disjoint treelets covering a tree, in extraction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeletDecomposition {
    pub k: usize,
    roots: Vec<NodeId>,
    heights: Vec<usize>,
    owner: Vec<usize>,
    members: Vec<NodeId>,
    offsets: Vec<usize>,
}

impl TreeletDecomposition {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root(&self, treelet: usize) -> NodeId {
        self.roots[treelet]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn height(&self, treelet: usize) -> usize {
        self.heights[treelet]
    }

    /// Treelet index per node; `usize::MAX` for nodes outside the tree.
    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn owner(&self, v: NodeId) -> usize {
        self.owner[v]
    }

    /// Members of a treelet in breadth-first order of the host tree.
    pub fn members(&self, treelet: usize) -> &[NodeId] {
        &self.members[self.offsets[treelet]..self.offsets[treelet + 1]]
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k}, must be at least 2")));
    }
    Ok(())
}

/// One extraction step: a depth-first visit of the member part of `t` that
/// assigns height tags on each node's last visit and stops at the first node
/// whose height is `k`, or at the root. Returns that node; its member subtree
/// is the extracted treelet.
pub fn extract_treelet(t: &mut RootedTree, k: usize) -> Result<NodeId> {
    check_k(k)?;
    let root = t.root();
    if t.is_empty() {
        return Err(Error::InvalidParameter("tree is empty".into()));
    }
    let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        let children = t.children(v);
        if let Some(&c) = children.get(next) {
            top.1 += 1;
            if t.is_member(c) {
                stack.push((c, 0));
            }
            continue;
        }
        stack.pop();
        let h = t
            .children(v)
            .iter()
            .filter(|&&c| t.is_member(c))
            .map(|&c| t.height_tag(c) + 1)
            .max()
            .unwrap_or(0);
        t.set_height_tag(v, h);
        if h == k || v == root {
            return Ok(v);
        }
    }
    unreachable!("the root always ends the visit")
}

/// Splits the member part of `t` into treelets, equivalent to calling
/// [`extract_treelet`] and removing the returned subtree until nothing is
/// left, but done in one post-order pass: a node whose height reaches `k` is
/// cut off and no longer counts toward its parent's height.
pub fn decompose(t: &RootedTree, k: usize) -> Result<TreeletDecomposition> {
    check_k(k)?;
    let n = t.node_count();
    let root = t.root();
    let mut height = vec![0usize; n];
    let mut index = vec![usize::MAX; n];
    let mut roots = Vec::new();
    let mut heights = Vec::new();

    if !t.is_empty() {
        let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if let Some(&c) = t.children(v).get(next) {
                top.1 += 1;
                if t.is_member(c) {
                    stack.push((c, 0));
                }
                continue;
            }
            stack.pop();
            let h = t
                .children(v)
                .iter()
                .filter(|&&c| t.is_member(c) && index[c] == usize::MAX)
                .map(|&c| height[c] + 1)
                .max()
                .unwrap_or(0);
            height[v] = h;
            if h == k || v == root {
                index[v] = roots.len();
                roots.push(v);
                heights.push(h);
            }
        }
    }

    let mut owner = vec![usize::MAX; n];
    let mut counts = vec![0usize; roots.len() + 1];
    let bfs: Vec<NodeId> = t.members().collect();
    for &v in &bfs {
        owner[v] = if index[v] != usize::MAX {
            index[v]
        } else {
            owner[t.parent(v).expect("non-root member has a parent")]
        };
        counts[owner[v] + 1] += 1;
    }
    for i in 1..counts.len() {
        counts[i] += counts[i - 1];
    }
    let offsets = counts.clone();
    let mut members = vec![0; bfs.len()];
    for &v in &bfs {
        members[counts[owner[v]]] = v;
        counts[owner[v]] += 1;
    }
    Ok(TreeletDecomposition {
        k,
        roots,
        heights,
        owner,
        members,
        offsets,
    })
}

/// Forest whose groups are the treelets and whose edges are the treelet
/// edges of `t`.
pub(crate) fn treelet_forest(t: &RootedTree, d: &TreeletDecomposition) -> Result<GroupForest> {
    let n = t.node_count();
    let parent = (0..n)
        .map(|v| {
            let is_treelet_root = d.roots[d.owner[v]] == v;
            if is_treelet_root {
                None
            } else {
                Some((t.parent(v).unwrap(), t.tree_edge(v).unwrap()))
            }
        })
        .collect();
    GroupForest::new(d.owner.clone(), d.len(), parent)
}

/// Query plan of treeCutter(k).
pub fn plan<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    options: TreeOptions,
    rng: &mut R,
) -> Result<QueryPlan> {
    check_k(k)?;
    let t = options.draw(g, rng)?;
    let d = decompose(&t, k)?;
    let mut plan = QueryPlan::assemble(g, treelet_forest(&t, &d)?)?;
    plan.stats.treelets = Some(d.len());
    plan.stats.tree_height = Some(t.height());
    Ok(plan)
}

/// Runs treeCutter(k): plans, reveals the query set through `oracle`, and
/// predicts every other edge.
pub fn treecutter_run<O, R>(
    g: &Graph,
    oracle: &mut O,
    k: usize,
    options: TreeOptions,
    rng: &mut R,
) -> Result<PredictionRecord>
where
    O: LabelOracle + ?Sized,
    R: Rng + ?Sized,
{
    plan(g, k, options, rng)?.execute(g, oracle)
}

/// Plan that queries a single spanning tree and predicts every other edge
/// by its tree path.
pub fn spanning_tree_plan<R: Rng + ?Sized>(
    g: &Graph,
    options: TreeOptions,
    rng: &mut R,
) -> Result<QueryPlan> {
    let t = options.draw(g, rng)?;
    let parent = (0..g.node_count())
        .map(|v| t.parent(v).map(|p| (p, t.tree_edge(v).unwrap())))
        .collect();
    let forest = GroupForest::new(vec![0; g.node_count()], 1, parent)?;
    let mut plan = QueryPlan::assemble(g, forest)?;
    plan.stats.treelets = Some(1);
    plan.stats.tree_height = Some(t.height());
    Ok(plan)
}

/// `|V| - 1 + |V|^2 / (2k^2) + |V| / (2k)`.
pub fn query_bound(node_count: usize, k: usize) -> f64 {
    let n = node_count as f64;
    let k = k as f64;
    n - 1.0 + n * n / (2.0 * k * k) + n / (2.0 * k)
}

/// Whether `|E| >= 2|V| - 2 + |V|^2 / k^2 + |V| / k`, the density at which
/// the query bound is at most half the edges.
pub fn density_precondition(node_count: usize, edge_count: usize, k: usize) -> bool {
    let n = node_count as f64;
    let k = k as f64;
    edge_count as f64 >= 2.0 * n - 2.0 + n * n / (k * k) + n / k
}
