//! Random connected graphs and planted two-cluster signed graphs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, SignedGraph};
use crate::labeling::TwoClustering;

type Pair = (NodeId, NodeId);

fn pair(u: NodeId, v: NodeId) -> Pair {
    (u.min(v), u.max(v))
}

/// Uniform random recursive tree on a random node order. Returns the tree
/// and the `(parent, edge)` link of every node; the root has none.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Graph, Vec<Option<(NodeId, EdgeId)>>) {
    let mut order: Vec<NodeId> = (0..n.max(1)).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut links = vec![None; n.max(1)];
    for i in 1..order.len() {
        let child = order[i];
        let parent = order[rng.gen_range(0..i)];
        links[child] = Some((parent, edges.len()));
        edges.push(pair(child, parent));
    }
    (Graph::from_canonical(n.max(1), edges), links)
}

fn max_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Draws `count` distinct pairs not yet in `taken` from a class of
/// `available` free pairs. Rejection sampling through `draw` while the class
/// is sparse, full enumeration through `all` otherwise.
fn sample_class<R, D, A>(
    count: usize,
    available: usize,
    taken: &mut HashSet<Pair>,
    rng: &mut R,
    mut draw: D,
    all: A,
) -> Vec<Pair>
where
    R: Rng + ?Sized,
    D: FnMut(&mut R) -> Pair,
    A: FnOnce() -> Vec<Pair>,
{
    debug_assert!(count <= available);
    let mut out = Vec::with_capacity(count);
    if count * 2 > available {
        let mut pool: Vec<Pair> = all().into_iter().filter(|p| !taken.contains(p)).collect();
        pool.shuffle(rng);
        pool.truncate(count);
        for &p in &pool {
            taken.insert(p);
        }
        out = pool;
    } else {
        while out.len() < count {
            let p = draw(rng);
            if taken.insert(p) {
                out.push(p);
            }
        }
    }
    out
}

/// Connected simple graph with `n` nodes and `m` edges: a random recursive
/// tree plus `m - n + 1` further pairs drawn uniformly. Edge ids are shuffled.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if m + 1 < n || m > max_pairs(n) {
        return Err(Error::InvalidParameter(format!(
            "{m} edges impossible for a connected simple graph on {n} nodes"
        )));
    }
    let (tree, _) = random_tree(n, rng);
    let mut taken: HashSet<Pair> = tree.edges().iter().copied().collect();
    let mut edges = tree.edges().to_vec();
    let extra = m - edges.len();
    let available = max_pairs(n) - edges.len();
    edges.extend(sample_class(
        extra,
        available,
        &mut taken,
        rng,
        |r| loop {
            let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
            if u != v {
                break pair(u, v);
            }
        },
        || (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
    ));
    edges.shuffle(rng);
    Ok(Graph::from_canonical(n, edges))
}

/// Parameters of a planted two-cluster graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub nodes: usize,
    pub target_edges: usize,
    /// Fraction of nodes in the first cluster.
    pub cluster_split: f64,
    /// Desired fraction of negative (between-cluster) edges. `None` leaves
    /// the mix to chance.
    pub negative_fraction_target: Option<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(nodes: usize, target_edges: usize) -> GeneratorSpec {
        GeneratorSpec {
            nodes,
            target_edges,
            cluster_split: 0.5,
            negative_fraction_target: None,
            seed: 0,
        }
    }
}

/// Output of [`generate_planted_graph`]. Labels are the consistent ones.
#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub graph: SignedGraph,
    pub clustering: TwoClustering,
    /// Edges of the random tree that keeps the graph connected; never pruned.
    pub skeleton_edges: usize,
    /// Generation is connected by construction, so this stays 0.
    pub regenerations: usize,
    pub negative_fraction: f64,
}

/// Allowed gap between the requested and the achieved negative fraction.
pub const NEGATIVE_FRACTION_TOLERANCE: f64 = 0.02;

/// Random connected graph on a planted two-clustering with consistent labels.
///
/// A random spanning tree guarantees connectivity. The remaining edges are
/// drawn uniformly within each sign class: between-cluster pairs up to the
/// negative quota, within-cluster pairs for the rest, which amounts to
/// oversampling the graph and pruning positive edges uniformly until the
/// negative fraction is met.
pub fn generate_planted_graph(spec: &GeneratorSpec) -> Result<PlantedGraph> {
    let n = spec.nodes;
    let m = spec.target_edges;
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if m + 1 < n || m > max_pairs(n) {
        return Err(Error::InvalidParameter(format!(
            "{m} edges impossible for a connected simple graph on {n} nodes"
        )));
    }
    if let Some(t) = spec.negative_fraction_target {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "negative fraction {t} outside [0, 1]"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let clustering = TwoClustering::with_split(n, spec.cluster_split, &mut rng)?;
    let first: Vec<NodeId> = (0..n).filter(|&v| !clustering.side[v]).collect();
    let second: Vec<NodeId> = (0..n).filter(|&v| clustering.side[v]).collect();

    let (tree, _) = random_tree(n, &mut rng);
    let mut taken: HashSet<Pair> = tree.edges().iter().copied().collect();
    let mut edges = tree.edges().to_vec();
    let is_negative = |&(u, v): &Pair| clustering.side[u] != clustering.side[v];
    let skeleton_neg = edges.iter().filter(|p| is_negative(p)).count();
    let skeleton_pos = edges.len() - skeleton_neg;

    let between_free = first.len() * second.len() - skeleton_neg;
    let within_free = max_pairs(first.len()) + max_pairs(second.len()) - skeleton_pos;
    let extra = m - edges.len();

    let (extra_neg, extra_pos) = match spec.negative_fraction_target {
        Some(t) => {
            let want_neg = (t * m as f64).round() as usize;
            let mut neg = want_neg.saturating_sub(skeleton_neg).min(extra).min(between_free);
            let mut pos = extra - neg;
            if pos > within_free {
                neg += pos - within_free;
                pos = within_free;
            }
            (neg, pos)
        }
        None => {
            // Uniform over all free pairs: split the extra edges between the
            // classes hypergeometrically.
            let mut neg = 0;
            let (mut b, mut w) = (between_free, within_free);
            for _ in 0..extra {
                if rng.gen_range(0..b + w) < b {
                    neg += 1;
                    b -= 1;
                } else {
                    w -= 1;
                }
            }
            (neg, extra - neg)
        }
    };

    let draw_between = |r: &mut ChaCha8Rng| {
        pair(
            first[r.gen_range(0..first.len())],
            second[r.gen_range(0..second.len())],
        )
    };
    let all_between = || {
        first
            .iter()
            .flat_map(|&u| second.iter().map(move |&v| pair(u, v)))
            .collect::<Vec<_>>()
    };
    edges.extend(sample_class(
        extra_neg,
        between_free,
        &mut taken,
        &mut rng,
        draw_between,
        all_between,
    ));

    let first_pairs = max_pairs(first.len());
    let within_total = first_pairs + max_pairs(second.len());
    let draw_within = |r: &mut ChaCha8Rng| {
        let side = if r.gen_range(0..within_total) < first_pairs {
            &first
        } else {
            &second
        };
        loop {
            let (a, b) = (r.gen_range(0..side.len()), r.gen_range(0..side.len()));
            if a != b {
                break pair(side[a], side[b]);
            }
        }
    };
    let all_within = || {
        [&first, &second]
            .iter()
            .flat_map(|side| {
                side.iter()
                    .enumerate()
                    .flat_map(move |(i, &u)| side[i + 1..].iter().map(move |&v| pair(u, v)))
            })
            .collect::<Vec<_>>()
    };
    edges.extend(sample_class(
        extra_pos,
        within_free,
        &mut taken,
        &mut rng,
        draw_within,
        all_within,
    ));

    edges.shuffle(&mut rng);
    let signs = edges.iter().map(|&(u, v)| clustering.edge_sign(u, v)).collect();
    let graph = SignedGraph::new(Graph::from_canonical(n, edges), signs)?;
    let negative_fraction = graph.negative_count() as f64 / m.max(1) as f64;
    if let Some(t) = spec.negative_fraction_target {
        if (negative_fraction - t).abs() > NEGATIVE_FRACTION_TOLERANCE {
            return Err(Error::Infeasible(format!(
                "negative fraction {t:.4} requested, {negative_fraction:.4} achieved"
            )));
        }
    }
    Ok(PlantedGraph {
        graph,
        clustering,
        skeleton_edges: n - 1,
        regenerations: 0,
        negative_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_tree_is_spanning() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..40 {
            let (g, links) = random_tree(n, &mut rng);
            assert_eq!(g.edge_count(), n - 1);
            assert!(g.is_connected());
            assert_eq!(links.iter().filter(|l| l.is_none()).count(), 1);
        }
    }

    #[test]
    fn random_connected_graph_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, m) in [(1, 0), (2, 1), (5, 10), (30, 29), (30, 200), (30, 435)] {
            let g = random_connected_graph(n, m, &mut rng).unwrap();
            assert_eq!(g.edge_count(), m);
            assert!(g.is_connected());
        }
        assert!(random_connected_graph(5, 3, &mut rng).is_err());
        assert!(random_connected_graph(5, 11, &mut rng).is_err());
    }

    #[test]
    fn one_cluster_spanning_structure() {
        let spec = GeneratorSpec {
            cluster_split: 1.0,
            ..GeneratorSpec::new(10, 9)
        };
        let planted = generate_planted_graph(&spec).unwrap();
        assert_eq!(planted.graph.edge_count(), 9);
        assert_eq!(planted.graph.negative_count(), 0);
        assert_eq!(planted.negative_fraction, 0.0);
        assert!(planted.graph.graph().is_connected());
    }

    #[test]
    fn negative_fraction_hits_target() {
        let spec = GeneratorSpec {
            negative_fraction_target: Some(0.219),
            seed: 5,
            ..GeneratorSpec::new(1000, 9138)
        };
        let planted = generate_planted_graph(&spec).unwrap();
        assert_eq!(planted.graph.node_count(), 1000);
        assert_eq!(planted.graph.edge_count(), 9138);
        assert!((0.199..=0.239).contains(&planted.negative_fraction));
        assert!(planted.graph.graph().is_connected());
    }

    #[test]
    fn labels_follow_clustering() {
        let spec = GeneratorSpec {
            cluster_split: 0.3,
            negative_fraction_target: Some(0.25),
            seed: 3,
            ..GeneratorSpec::new(60, 400)
        };
        let p = generate_planted_graph(&spec).unwrap();
        for (e, &(u, v)) in p.graph.graph().edges().iter().enumerate() {
            assert_eq!(p.graph.sign(e), p.clustering.edge_sign(u, v));
        }
    }

    #[test]
    fn infeasible_target_names_achieved_fraction() {
        let spec = GeneratorSpec {
            cluster_split: 1.0,
            negative_fraction_target: Some(0.3),
            ..GeneratorSpec::new(50, 200)
        };
        match generate_planted_graph(&spec) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("0.0000 achieved"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn any_spec_is_connected_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let n = rng.gen_range(2..120);
            let m = rng.gen_range(n - 1..=max_pairs(n));
            let spec = GeneratorSpec {
                cluster_split: rng.gen_range(0.0..=1.0),
                seed: rng.gen(),
                ..GeneratorSpec::new(n, m)
            };
            let a = generate_planted_graph(&spec).unwrap();
            let reach = crate::graph::shortest_path_lengths(a.graph.graph(), 0);
            assert_eq!(reach.iter().filter(|d| d.is_some()).count(), n);
            assert_eq!(a.graph.edge_count(), m);
            let b = generate_planted_graph(&spec).unwrap();
            assert_eq!(a.graph, b.graph);
        }
    }
}
