//! The treeletStar(k) learner.
//!
//! Treelets are cut from a breadth-first spanning tree as in
//! [`crate::treecutter`], contracted to single nodes, and the contracted
//! graph is split into stars as in [`crate::starmaker`]. A star of treelets
//! is spanned by its treelet edges plus one witness edge per center-leaf
//! pair; one more edge is queried per pair of adjacent stars.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, RootedTree};
use crate::oracle::LabelOracle;
use crate::plan::{GroupForest, PredictionRecord, QueryPlan};
use crate::starmaker::{center_degree_stats, star_decompose, StarDecomposition};
use crate::treecutter::{decompose, TreeOptions, TreeletDecomposition};

/// Quotient of the host graph by a treelet decomposition. Node `i` is
/// treelet `i`; nodes are adjacent iff some host edge joins the treelets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionGraph {
    pub graph: Graph,
    /// One host edge realizing each contraction edge.
    pub witness: Vec<EdgeId>,
    /// Host node -> contraction node.
    pub host_to_node: Vec<usize>,
    /// Contraction node -> host node (the treelet root).
    pub node_to_host: Vec<NodeId>,
}

/// Builds the contraction graph with a single scan of every treelet's
/// incident edges. The first host edge seen between two treelets becomes
/// the witness.
pub fn build_contraction_graph(
    g: &Graph,
    d: &TreeletDecomposition,
) -> Result<ContractionGraph> {
    let owners = d.owners();
    if owners.len() != g.node_count() || owners.contains(&usize::MAX) {
        return Err(Error::InvalidParameter(
            "treelet decomposition does not cover the graph".into(),
        ));
    }
    let count = d.len();
    let mut slot = vec![false; count];
    let mut touched = Vec::new();
    let mut edges = Vec::new();
    let mut witness = Vec::new();
    for a in 0..count {
        for &i in d.members(a) {
            for &(j, e) in g.neighbors(i) {
                let b = owners[j];
                // Pairs with an earlier treelet were created from its side.
                if b <= a || slot[b] {
                    continue;
                }
                slot[b] = true;
                touched.push(b);
                edges.push((a, b));
                witness.push(e);
            }
        }
        for b in touched.drain(..) {
            slot[b] = false;
        }
    }
    Ok(ContractionGraph {
        graph: Graph::from_canonical(count, edges),
        witness,
        host_to_node: owners.to_vec(),
        node_to_host: d.roots().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarOfTreelets {
    pub center_treelet: usize,
    pub leaf_treelets: Vec<usize>,
    /// Witness host edge joining the center treelet to each leaf treelet.
    pub intra_star_query_edges: Vec<EdgeId>,
}

/// Everything treeletStar(k) derives from the graph before querying.
#[derive(Debug, Clone)]
pub struct TreeletStars {
    pub tree: RootedTree,
    pub treelets: TreeletDecomposition,
    pub contraction: ContractionGraph,
    pub stars: Vec<StarOfTreelets>,
    star_owner: Vec<usize>,
    star_decomposition: StarDecomposition,
}

impl TreeletStars {
    pub fn build<R: Rng + ?Sized>(
        g: &Graph,
        k: usize,
        options: TreeOptions,
        rng: &mut R,
    ) -> Result<TreeletStars> {
        let tree = options.draw(g, rng)?;
        let treelets = decompose(&tree, k)?;
        let contraction = build_contraction_graph(g, &treelets)?;
        let star_decomposition = star_decompose(&contraction.graph);
        let stars = star_decomposition
            .stars
            .iter()
            .map(|s| StarOfTreelets {
                center_treelet: s.center,
                leaf_treelets: s.leaves.clone(),
                intra_star_query_edges: s.edges.iter().map(|&ce| contraction.witness[ce]).collect(),
            })
            .collect();
        Ok(TreeletStars {
            star_owner: star_decomposition.owner.clone(),
            tree,
            treelets,
            contraction,
            stars,
            star_decomposition,
        })
    }

    /// Star index of a host node.
    pub fn star_of(&self, v: NodeId) -> usize {
        self.star_owner[self.treelets.owner(v)]
    }

    /// Spanning forest of every star of treelets. The center treelet keeps
    /// its own root; each leaf treelet is re-rooted at its witness endpoint,
    /// which hangs off the center treelet through the witness edge.
    pub fn forest(&self, g: &Graph) -> Result<GroupForest> {
        let t = &self.tree;
        let d = &self.treelets;
        let n = g.node_count();
        let mut parent: Vec<Option<(NodeId, EdgeId)>> = (0..n)
            .map(|v| {
                if d.root(d.owner(v)) == v {
                    None
                } else {
                    Some((t.parent(v).unwrap(), t.tree_edge(v).unwrap()))
                }
            })
            .collect();
        for star in &self.stars {
            for (&leaf, &w) in star.leaf_treelets.iter().zip(&star.intra_star_query_edges) {
                let (x, y) = g.endpoints(w);
                let (near, far) = if d.owner(x) == star.center_treelet {
                    (x, y)
                } else {
                    (y, x)
                };
                debug_assert_eq!(d.owner(far), leaf);
                // Reverse the tree path far -> treelet root.
                let mut v = far;
                while v != d.root(leaf) {
                    let p = t.parent(v).unwrap();
                    parent[p] = Some((v, t.tree_edge(v).unwrap()));
                    v = p;
                }
                parent[far] = Some((near, w));
            }
        }
        let group = (0..n).map(|v| self.star_of(v)).collect();
        GroupForest::new(group, self.stars.len(), parent)
    }

    pub fn plan(&self, g: &Graph) -> Result<QueryPlan> {
        let mut plan = QueryPlan::assemble(g, self.forest(g)?)?;
        let (static_mean, residual_mean) =
            center_degree_stats(&self.contraction.graph, &self.star_decomposition);
        plan.stats.treelets = Some(self.treelets.len());
        plan.stats.tree_height = Some(self.tree.height());
        plan.stats.mean_center_degree = Some(static_mean);
        plan.stats.mean_center_residual_degree = Some(residual_mean);
        Ok(plan)
    }
}

/// Query plan of treeletStar(k).
pub fn plan<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    options: TreeOptions,
    rng: &mut R,
) -> Result<QueryPlan> {
    TreeletStars::build(g, k, options, rng)?.plan(g)
}

pub fn treeletstar_run<O, R>(
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

/// `|V| - 1 + ((|V| - 1) / k + 1)^{3/2}`.
pub fn query_bound(node_count: usize, k: usize) -> f64 {
    let n = node_count as f64;
    n - 1.0 + ((n - 1.0) / k as f64 + 1.0).powf(1.5)
}

/// Whether `|E| >= 2|V| - 2 + 2((|V| - 1) / k + 1)^{3/2}`.
pub fn density_precondition(node_count: usize, edge_count: usize, k: usize) -> bool {
    let n = node_count as f64;
    edge_count as f64 >= 2.0 * n - 2.0 + 2.0 * ((n - 1.0) / k as f64 + 1.0).powf(1.5)
}

/// Longest circuit a star of treelets can produce: on each side up to three
/// treelets of diameter `2k` joined by two witness edges, plus the connector.
pub fn circuit_bound(k: usize) -> usize {
    12 * k + 5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_spanning_tree, NeighborOrder};
    use crate::harness::generator::random_connected_graph;
    use crate::labeling::{consistent_labels, TwoClustering};
    use crate::oracle::CountingOracle;
    use crate::treecutter::spanning_tree_plan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(31)
    }

    #[test]
    fn contraction_of_path_of_five() {
        let edges: Vec<_> = (1..5).map(|i| (i - 1, i)).collect();
        let g = Graph::from_edges(5, &edges).unwrap();
        let t = bfs_spanning_tree(&g, 0, NeighborOrder::Input, &mut rng()).unwrap();
        let d = decompose(&t, 2).unwrap();
        let cg = build_contraction_graph(&g, &d).unwrap();
        assert_eq!(cg.graph.node_count(), 2);
        assert_eq!(cg.graph.edges(), &[(0, 1)]);
        assert_eq!(g.endpoints(cg.witness[0]), (1, 2));
        assert_eq!(cg.node_to_host, vec![2, 0]);
    }

    #[test]
    fn single_treelet_contracts_to_a_point() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = bfs_spanning_tree(&g, 0, NeighborOrder::Input, &mut rng()).unwrap();
        let d = decompose(&t, 2).unwrap();
        let cg = build_contraction_graph(&g, &d).unwrap();
        assert_eq!(cg.graph.node_count(), 1);
        assert_eq!(cg.graph.edge_count(), 0);
    }

    #[test]
    fn contraction_matches_pairwise_adjacency() {
        let mut r = rng();
        for _ in 0..60 {
            let n = r.gen_range(2..=100);
            let m = r.gen_range(n - 1..=(n * (n - 1) / 2).min(4 * n));
            let g = random_connected_graph(n, m, &mut r).unwrap();
            let t = TreeOptions::shuffled().draw(&g, &mut r).unwrap();
            let k = r.gen_range(2..5);
            let d = decompose(&t, k).unwrap();
            let cg = build_contraction_graph(&g, &d).unwrap();
            let mut expected = Vec::new();
            for a in 0..d.len() {
                for b in a + 1..d.len() {
                    let touching = d.members(a).iter().any(|&u| {
                        d.members(b).iter().any(|&v| g.find_edge(u, v).is_some())
                    });
                    if touching {
                        expected.push((a, b));
                    }
                }
            }
            let mut got = cg.graph.edges().to_vec();
            got.sort_unstable();
            assert_eq!(got, expected);
            for (ce, &(a, b)) in cg.graph.edges().iter().enumerate() {
                let (x, y) = g.endpoints(cg.witness[ce]);
                let mut pair = [d.owner(x), d.owner(y)];
                pair.sort_unstable();
                assert_eq!(pair, [a, b]);
            }
            if t.height() > k {
                assert!(d.len() as f64 <= n as f64 / (k as f64 + 1.0) + 1.0);
            }
        }
    }

    #[test]
    fn consistent_labels_are_never_mispredicted() {
        let mut r = rng();
        for _ in 0..30 {
            let n = r.gen_range(2..150);
            let m = r.gen_range(n - 1..=(n * (n - 1) / 2).min(4 * n));
            let g = random_connected_graph(n, m, &mut r).unwrap();
            let truth = consistent_labels(&g, &TwoClustering::uniform(n, &mut r))
                .unwrap()
                .realized;
            for k in [2, 3] {
                let mut oracle = CountingOracle::new(&truth);
                let mut rec = treeletstar_run(&g, &mut oracle, k, TreeOptions::shuffled(), &mut r).unwrap();
                assert_eq!(rec.score(&truth), 0);
                assert_eq!(oracle.revealed_count(), rec.query_count());
            }
        }
    }

    #[test]
    fn short_tree_degrades_to_spanning_tree() {
        let mut r = rng();
        for _ in 0..20 {
            let g = random_connected_graph(40, 300, &mut r).unwrap();
            let seed = r.gen::<u64>();
            let built = TreeletStars::build(&g, 10, TreeOptions::shuffled(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(built.contraction.graph.node_count(), 1);
            let plan = built.plan(&g).unwrap();
            assert_eq!(plan.query_count(), 39);
            let reference =
                spanning_tree_plan(&g, TreeOptions::shuffled(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let truth = vec![crate::sign::Sign::Negative; g.edge_count()];
            let a = plan.execute(&g, &mut CountingOracle::new(&truth)).unwrap();
            let b = reference.execute(&g, &mut CountingOracle::new(&truth)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bounds_on_random_graphs() {
        let mut r = rng();
        let budget = 119 + ((119.0f64 / 3.0 + 1.0).powf(1.5)).ceil() as usize;
        for _ in 0..100 {
            let m = r.gen_range(119..=700);
            let g = random_connected_graph(120, m, &mut r).unwrap();
            let p = plan(&g, 3, TreeOptions::shuffled(), &mut r).unwrap();
            assert!(p.query_count() <= budget);
            assert!(p.query_count() as f64 <= query_bound(120, 3));
            let longest = p.test_edges().map(|e| p.circuit_length(&g, e)).max().unwrap_or(0);
            assert!(longest <= circuit_bound(3));
        }
    }

    #[test]
    fn forest_spans_each_star() {
        let mut r = rng();
        let g = random_connected_graph(200, 420, &mut r).unwrap();
        let built = TreeletStars::build(&g, 2, TreeOptions::shuffled(), &mut r).unwrap();
        let forest = built.forest(&g).unwrap();
        assert_eq!(forest.group_count(), built.stars.len());
        for (s, star) in built.stars.iter().enumerate() {
            let expected: usize = std::iter::once(star.center_treelet)
                .chain(star.leaf_treelets.iter().copied())
                .map(|t| built.treelets.members(t).len())
                .sum();
            assert_eq!(forest.members(s).len(), expected);
            assert_eq!(forest.root(s), built.treelets.root(star.center_treelet));
        }
    }
}
