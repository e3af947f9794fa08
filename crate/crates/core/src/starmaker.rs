//! The starMaker learner.
//!
//! The graph is partitioned into stars: repeatedly take the unassigned node
//! of largest degree and make every still-unassigned neighbor one of its
//! leaves. Star edges are queried, plus one edge per pair of adjacent stars,
//! so every circuit has at most `2 + 1 + 2 = 5` queried edges.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::graph::{EdgeId, Graph, NodeId};
use crate::oracle::LabelOracle;
use crate::plan::{GroupForest, PredictionRecord, QueryPlan};

/// Max-heap of nodes keyed by their degree in the host graph, with lazy
/// deletion: nodes marked not-in-use stay in the heap and are discarded when
/// they reach the top. Keys never change.
#[derive(Debug, Clone)]
pub struct MaxDegreeHeap {
    heap: BinaryHeap<(usize, Reverse<NodeId>)>,
    in_use: Vec<bool>,
}

impl MaxDegreeHeap {
    pub fn new(g: &Graph) -> MaxDegreeHeap {
        let heap = (0..g.node_count())
            .map(|v| (g.degree(v), Reverse(v)))
            .collect();
        MaxDegreeHeap {
            heap,
            in_use: vec![true; g.node_count()],
        }
    }

    pub fn mark_not_in_use(&mut self, v: NodeId) {
        self.in_use[v] = false;
    }

    pub fn is_in_use(&self, v: NodeId) -> bool {
        self.in_use[v]
    }

    /// Pops stale tops, then pops and returns the top in-use node: largest
    /// degree, smallest id among equals.
    pub fn pop_in_use(&mut self) -> Option<NodeId> {
        while let Some((_, Reverse(v))) = self.heap.pop() {
            if self.in_use[v] {
                self.in_use[v] = false;
                return Some(v);
            }
        }
        None
    }

    /// Entries still stored, stale ones included.
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: NodeId,
    pub leaves: Vec<NodeId>,
    /// `edges[i]` joins the center to `leaves[i]`.
    pub edges: Vec<EdgeId>,
}

/// Stars in extraction order; `owner[v]` is the star holding `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    pub owner: Vec<usize>,
}

impl StarDecomposition {
    pub fn star_edge_count(&self) -> usize {
        self.stars.iter().map(|s| s.edges.len()).sum()
    }
}

/// Takes the next star off `heap`: the highest-degree unassigned node plus
/// all of its unassigned neighbors, which are then marked assigned to star
/// `index`. `None` once every node is assigned.
pub fn extract_star(
    g: &Graph,
    heap: &mut MaxDegreeHeap,
    owner: &mut [usize],
    index: usize,
) -> Option<Star> {
    let center = heap.pop_in_use()?;
    owner[center] = index;
    let mut leaves = Vec::new();
    let mut edges = Vec::new();
    for &(w, e) in g.neighbors(center) {
        if heap.is_in_use(w) {
            heap.mark_not_in_use(w);
            owner[w] = index;
            leaves.push(w);
            edges.push(e);
        }
    }
    Some(Star {
        center,
        leaves,
        edges,
    })
}

/// Repeats [`extract_star`] until every node is covered.
pub fn star_decompose(g: &Graph) -> StarDecomposition {
    let mut heap = MaxDegreeHeap::new(g);
    let mut owner = vec![usize::MAX; g.node_count()];
    let mut stars = Vec::new();
    while let Some(star) = extract_star(g, &mut heap, &mut owner, stars.len()) {
        stars.push(star);
    }
    StarDecomposition { stars, owner }
}

pub(crate) fn star_forest(g: &Graph, d: &StarDecomposition) -> Result<GroupForest> {
    let mut parent = vec![None; g.node_count()];
    for star in &d.stars {
        for (&leaf, &e) in star.leaves.iter().zip(&star.edges) {
            parent[leaf] = Some((star.center, e));
        }
    }
    GroupForest::new(d.owner.clone(), d.stars.len(), parent)
}

pub(crate) fn center_degree_stats(g: &Graph, d: &StarDecomposition) -> (f64, f64) {
    let count = d.stars.len().max(1) as f64;
    let static_sum: usize = d.stars.iter().map(|s| g.degree(s.center)).sum();
    let residual_sum: usize = d.stars.iter().map(|s| s.leaves.len()).sum();
    (static_sum as f64 / count, residual_sum as f64 / count)
}

/// Query plan of starMaker. The graph must be connected.
pub fn plan(g: &Graph) -> Result<QueryPlan> {
    g.ensure_connected()?;
    let d = star_decompose(g);
    let mut plan = QueryPlan::assemble(g, star_forest(g, &d)?)?;
    let (static_mean, residual_mean) = center_degree_stats(g, &d);
    plan.stats.mean_center_degree = Some(static_mean);
    plan.stats.mean_center_residual_degree = Some(residual_mean);
    Ok(plan)
}

pub fn starmaker_run<O: LabelOracle + ?Sized>(g: &Graph, oracle: &mut O) -> Result<PredictionRecord> {
    plan(g)?.execute(g, oracle)
}

/// `|V| - 1 + |V|^{3/2}`.
pub fn query_bound(node_count: usize) -> f64 {
    let n = node_count as f64;
    n - 1.0 + n.powf(1.5)
}

/// Whether `|E| >= 2|V| - 2 + 2|V|^{3/2}`.
pub fn density_precondition(node_count: usize, edge_count: usize) -> bool {
    let n = node_count as f64;
    edge_count as f64 >= 2.0 * n - 2.0 + 2.0 * n.powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::harness::generator::random_connected_graph;
    use crate::labeling::{consistent_labels, TwoClustering};
    use crate::oracle::CountingOracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn heap_discards_stale_entries() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut heap = MaxDegreeHeap::new(&g);
        heap.mark_not_in_use(1);
        // Degrees: 0:1, 1:3, 2:2, 3:2.
        assert_eq!(heap.pop_in_use(), Some(2));
        assert_eq!(heap.pop_in_use(), Some(3));
        assert_eq!(heap.pop_in_use(), Some(0));
        assert_eq!(heap.pop_in_use(), None);
        assert!(heap.is_empty());
    }

    #[test]
    fn complete_graph_is_one_star() {
        let g = k4();
        let d = star_decompose(&g);
        assert_eq!(d.stars.len(), 1);
        assert_eq!(d.stars[0].center, 0);
        assert_eq!(d.stars[0].leaves, vec![1, 2, 3]);
        assert_eq!(d.star_edge_count(), 3);

        let plan = plan(&g).unwrap();
        assert_eq!(plan.query_count(), 3);
        assert_eq!(plan.test_count(), 3);
        assert!(plan.test_edges().all(|e| plan.circuit_length(&g, e) == 2));
    }

    #[test]
    fn path_of_three_centers_on_middle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut heap = MaxDegreeHeap::new(&g);
        let mut owner = vec![usize::MAX; 3];
        let star = extract_star(&g, &mut heap, &mut owner, 0).unwrap();
        assert_eq!(star.center, 1);
        assert_eq!(star.leaves, vec![0, 2]);
        assert_eq!(extract_star(&g, &mut heap, &mut owner, 1), None);
        assert!(heap.is_empty());
    }

    #[test]
    fn star_graph_in_one_extraction() {
        let edges: Vec<_> = (1..9).map(|i| (0, i)).collect();
        let g = Graph::from_edges(9, &edges).unwrap();
        let d = star_decompose(&g);
        assert_eq!(d.stars.len(), 1);
        assert_eq!(d.stars[0].leaves.len(), 8);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(plan(&g), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn centers_have_maximum_static_degree() {
        let mut r = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = r.gen_range(2..100);
            let m = r.gen_range(n - 1..=(n * (n - 1) / 2).min(5 * n));
            let g = random_connected_graph(n, m, &mut r).unwrap();
            let d = star_decompose(&g);
            let mut assigned = vec![false; n];
            for star in &d.stars {
                for v in 0..n {
                    if !assigned[v] {
                        assert!(g.degree(star.center) >= g.degree(v));
                    }
                }
                let mut expected: Vec<_> = g
                    .neighbors(star.center)
                    .iter()
                    .map(|&(w, _)| w)
                    .filter(|&w| !assigned[w])
                    .collect();
                expected.sort_unstable();
                let mut leaves = star.leaves.clone();
                leaves.sort_unstable();
                assert_eq!(leaves, expected);
                assigned[star.center] = true;
                for &l in &star.leaves {
                    assigned[l] = true;
                }
            }
            assert!(assigned.iter().all(|&a| a));
            assert!(d.owner.iter().all(|&o| o < d.stars.len()));
            assert!(d.star_edge_count() < n);
        }
    }

    #[test]
    fn bounds_on_random_graphs() {
        let mut r = ChaCha8Rng::seed_from_u64(9);
        let budget = 79 + (80f64.powf(1.5)).ceil() as usize;
        for _ in 0..100 {
            let m = r.gen_range(79..=1200);
            let g = random_connected_graph(80, m, &mut r).unwrap();
            let truth = consistent_labels(&g, &TwoClustering::uniform(80, &mut r))
                .unwrap()
                .realized;
            let mut oracle = CountingOracle::new(&truth);
            let mut rec = starmaker_run(&g, &mut oracle).unwrap();
            assert!(rec.max_circuit() <= 5);
            assert!(rec.query_count() <= budget);
            assert_eq!(oracle.revealed_count(), rec.query_count());
            assert_eq!(rec.score(&truth), 0);
        }
    }

    #[test]
    fn density_formula() {
        // 2*16 - 2 + 2*64 = 158
        assert!(density_precondition(16, 158));
        assert!(!density_precondition(16, 157));
        assert!((query_bound(16) - 79.0).abs() < 1e-9);
    }
}
