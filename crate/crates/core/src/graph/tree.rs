
use rand::seq::SliceRandom;
use rand::Rng;

use super::{EdgeId, Graph, NodeId};
use crate::error::{Error, Result};
use crate::sign::Sign;

/// How a breadth-first visit walks each adjacency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborOrder {
    /// Edge-id order.
    #[default]
    Input,
    /// A fresh seeded shuffle per node.
    Shuffled,
}

/// A rooted tree embedded in a host graph, stored as per-node arrays over
/// the host's node ids. Nodes with `member == false` are not part of it,
/// which lets one allocation describe a subtree or a tree with pieces cut
/// away.
#[derive(Debug, Clone)]
pub struct RootedTree {
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    tree_edge: Vec<Option<EdgeId>>,
    depth: Vec<usize>,
    height_tag: Vec<usize>,
    parity_tag: Vec<Sign>,
    member: Vec<bool>,
    tagged: bool,
    // Members in breadth-first order; each node's children are contiguous.
    order: Vec<NodeId>,
    child_range: Vec<(usize, usize)>,
}

/// Breadth-first spanning tree of a connected graph.
///
/// `depth[v]` is the unit-length distance from `root`. With
/// [`NeighborOrder::Shuffled`] each adjacency list is visited in a random
/// order drawn from `rng`; with [`NeighborOrder::Input`] `rng` is unused.
pub fn bfs_spanning_tree<R: Rng + ?Sized>(
    g: &Graph,
    root: NodeId,
    neighbor_order: NeighborOrder,
    rng: &mut R,
) -> Result<RootedTree> {
    let n = g.node_count();
    if root >= n {
        return Err(Error::NodeOutOfRange {
            node: root,
            node_count: n,
        });
    }
    let mut parent = vec![None; n];
    let mut tree_edge = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut child_range = vec![(0, 0); n];
    let mut scratch: Vec<(NodeId, EdgeId)> = Vec::new();

    seen[root] = true;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        let start = order.len();
        let adjacency = match neighbor_order {
            NeighborOrder::Input => g.neighbors(u),
            NeighborOrder::Shuffled => {
                scratch.clear();
                scratch.extend_from_slice(g.neighbors(u));
                scratch.shuffle(rng);
                &scratch[..]
            }
        };
        for &(w, e) in adjacency {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(u);
                tree_edge[w] = Some(e);
                depth[w] = depth[u] + 1;
                order.push(w);
            }
        }
        child_range[u] = (start, order.len());
    }
    if let Some(node) = seen.iter().position(|&s| !s) {
        return Err(Error::Disconnected { root, node });
    }

    let mut tree = RootedTree {
        root,
        parent,
        tree_edge,
        depth,
        height_tag: vec![0; n],
        parity_tag: vec![Sign::Positive; n],
        member: vec![true; n],
        tagged: false,
        order,
        child_range,
    };
    tree.recompute_heights();
    Ok(tree)
}

impl RootedTree {
    /// Builds a tree over `node_count` host nodes from `(parent, edge)` links.
    /// Members are `root` and every node with a link; all of them must reach
    /// `root`.
    pub fn from_parents(
        node_count: usize,
        root: NodeId,
        links: &[Option<(NodeId, EdgeId)>],
    ) -> Result<RootedTree> {
        if links.len() != node_count {
            return Err(Error::LengthMismatch {
                left: node_count,
                right: links.len(),
            });
        }
        if root >= node_count {
            return Err(Error::NodeOutOfRange {
                node: root,
                node_count,
            });
        }
        if links[root].is_some() {
            return Err(Error::Invariant(format!("root {root} has a parent")));
        }
        let mut kids: Vec<Vec<NodeId>> = vec![Vec::new(); node_count];
        let mut member = vec![false; node_count];
        member[root] = true;
        for (v, link) in links.iter().enumerate() {
            if let Some((p, _)) = link {
                if *p >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: *p,
                        node_count,
                    });
                }
                kids[*p].push(v);
                member[v] = true;
            }
        }
        let mut order = vec![root];
        let mut child_range = vec![(0, 0); node_count];
        let mut depth = vec![0; node_count];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            let start = order.len();
            for &w in &kids[u] {
                depth[w] = depth[u] + 1;
                order.push(w);
            }
            child_range[u] = (start, order.len());
        }
        let members = member.iter().filter(|&&m| m).count();
        if order.len() != members {
            return Err(Error::Invariant(
                "parent links contain a cycle or a node detached from the root".into(),
            ));
        }
        let mut tree = RootedTree {
            root,
            parent: links.iter().map(|l| l.map(|(p, _)| p)).collect(),
            tree_edge: links.iter().map(|l| l.map(|(_, e)| e)).collect(),
            depth,
            height_tag: vec![0; node_count],
            parity_tag: vec![Sign::Positive; node_count],
            member,
            tagged: false,
            order,
            child_range,
        };
        tree.recompute_heights();
        Ok(tree)
    }

    /// Heights of the subtrees hanging from every member, counting members
    /// only: `0` for leaves, `1 + max(children)` otherwise.
    pub fn recompute_heights(&mut self) {
        for &v in self.order.iter().rev() {
            if !self.member[v] {
                continue;
            }
            let h = self
                .children(v)
                .iter()
                .filter(|&&c| self.member[c])
                .map(|&c| self.height_tag[c] + 1)
                .max()
                .unwrap_or(0);
            self.height_tag[v] = h;
        }
    }

    /// Sets `parity_tag[root] = +1` and `parity_tag[child] =
    /// parity_tag[parent] * sign(tree edge)` for every member, after which
    /// the parity of any tree path is the product of its endpoint tags.
    pub fn tag_parities<F: FnMut(EdgeId) -> Sign>(&mut self, mut sign_of: F) {
        for i in 0..self.order.len() {
            let v = self.order[i];
            if !self.member[v] {
                continue;
            }
            self.parity_tag[v] = match (self.parent[v], self.tree_edge[v]) {
                (Some(p), Some(e)) if self.member[p] => self.parity_tag[p] * sign_of(e),
                _ => Sign::Positive,
            };
        }
        self.tagged = true;
    }

    /// Sign product along the tree path `u -> v`, in constant time.
    pub fn path_parity(&self, u: NodeId, v: NodeId) -> Result<Sign> {
        self.check_member(u)?;
        self.check_member(v)?;
        if !self.tagged {
            return Err(Error::Invariant("parity tags have not been computed".into()));
        }
        Ok(self.parity_tag[u] * self.parity_tag[v])
    }

    /// Edges of the tree path `u -> v`, found by climbing parent links.
    pub fn path_edges(&self, u: NodeId, v: NodeId) -> Result<Vec<EdgeId>> {
        self.check_member(u)?;
        self.check_member(v)?;
        let (mut a, mut b) = (u, v);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            up.push(self.tree_edge[a].unwrap());
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            down.push(self.tree_edge[b].unwrap());
            b = self.parent[b].unwrap();
        }
        while a != b {
            up.push(self.tree_edge[a].unwrap());
            down.push(self.tree_edge[b].unwrap());
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        up.extend(down.into_iter().rev());
        Ok(up)
    }

    fn check_member(&self, v: NodeId) -> Result<()> {
        if v < self.member.len() && self.member[v] {
            Ok(())
        } else {
            Err(Error::NotAMember(v))
        }
    }

    /// Checks every tree edge against the host graph.
    pub fn validate_against(&self, g: &Graph) -> Result<()> {
        for v in self.members() {
            if let (Some(p), Some(e)) = (self.parent[v], self.tree_edge[v]) {
                if e >= g.edge_count() {
                    return Err(Error::EdgeOutOfRange(e));
                }
                let (a, b) = g.endpoints(e);
                if (a, b) != (p.min(v), p.max(v)) {
                    return Err(Error::Invariant(format!(
                        "tree edge {e} does not join {v} to its parent {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.member.len()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn tree_edge(&self, v: NodeId) -> Option<EdgeId> {
        self.tree_edge[v]
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v]
    }

    pub fn height_tag(&self, v: NodeId) -> usize {
        self.height_tag[v]
    }

    pub(crate) fn set_height_tag(&mut self, v: NodeId, h: usize) {
        self.height_tag[v] = h;
    }

    pub fn parity_tag(&self, v: NodeId) -> Sign {
        self.parity_tag[v]
    }

    pub fn is_member(&self, v: NodeId) -> bool {
        self.member[v]
    }

    pub fn is_empty(&self) -> bool {
        !self.member[self.root]
    }

    /// All children in the host tree, including non-members.
    pub fn children(&self, v: NodeId) -> &[NodeId] {
        let (a, b) = self.child_range[v];
        &self.order[a..b]
    }

    /// Members in breadth-first order.
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.order.iter().copied().filter(|&v| self.member[v])
    }

    pub fn member_count(&self) -> usize {
        self.members().count()
    }

    /// Height of the member part hanging from the root, as of the last
    /// height computation.
    pub fn height(&self) -> usize {
        self.height_tag[self.root]
    }

    /// Tree edges of all members except the root.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members().filter_map(|v| self.tree_edge[v])
    }

    /// Members of the subtree rooted at `v`, in breadth-first order.
    pub fn subtree(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        if !self.member[v] {
            return out;
        }
        out.push(v);
        let mut head = 0;
        while head < out.len() {
            let u = out[head];
            head += 1;
            out.extend(self.children(u).iter().filter(|&&c| self.member[c]));
        }
        out
    }

    /// Drops the subtree rooted at `v` from the member set.
    pub fn remove_subtree(&mut self, v: NodeId) -> Vec<NodeId> {
        let nodes = self.subtree(v);
        for &u in &nodes {
            self.member[u] = false;
        }
        nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::shortest_path_lengths;
    use crate::harness::generator::{random_connected_graph, random_tree};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Sign product along the explicit tree path, found without tags: walk
    /// both endpoints to the root and cancel the shared suffix.
    fn brute_path_product(t: &RootedTree, signs: &[Sign], u: NodeId, v: NodeId) -> Sign {
        let to_root = |mut x: NodeId| {
            let mut edges = Vec::new();
            while let Some(p) = t.parent(x) {
                edges.push(t.tree_edge(x).unwrap());
                x = p;
            }
            edges
        };
        let (mut a, mut b) = (to_root(u), to_root(v));
        while let (Some(x), Some(y)) = (a.last(), b.last()) {
            if x != y {
                break;
            }
            a.pop();
            b.pop();
        }
        Sign::product(a.iter().chain(b.iter()).map(|&e| signs[e]))
    }

    #[test]
    fn path_tree_parents_and_depths() {
        let t = bfs_spanning_tree(&path(3), 0, NeighborOrder::Input, &mut rng()).unwrap();
        assert_eq!((0..3).map(|v| t.parent(v)).collect::<Vec<_>>(), vec![None, Some(0), Some(1)]);
        assert_eq!((0..3).map(|v| t.depth(v)).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(t.height(), 2);
    }

    #[test]
    fn star_rooted_at_center_has_height_one() {
        let g = Graph::from_edges(6, &[(3, 0), (3, 1), (3, 2), (3, 4), (3, 5)]).unwrap();
        let t = bfs_spanning_tree(&g, 3, NeighborOrder::Shuffled, &mut rng()).unwrap();
        assert!((0..6).all(|v| t.depth(v) <= 1));
        assert_eq!(t.height(), 1);
    }

    #[test]
    fn complete_graph_tree() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        for root in 0..4 {
            let t = bfs_spanning_tree(&g, root, NeighborOrder::Input, &mut rng()).unwrap();
            assert_eq!(t.edges().count(), 3);
            assert_eq!(t.height(), 1);
            t.validate_against(&g).unwrap();
        }
    }

    #[test]
    fn depths_are_shortest_paths_on_small_graphs() {
        let mut r = rng();
        for n in 2..=6 {
            for _ in 0..40 {
                let max_m = n * (n - 1) / 2;
                let m = r.gen_range(n - 1..=max_m);
                let g = random_connected_graph(n, m, &mut r).unwrap();
                let root = r.gen_range(0..n);
                let t = bfs_spanning_tree(&g, root, NeighborOrder::Shuffled, &mut r).unwrap();
                let truth = shortest_path_lengths(&g, root);
                for v in 0..n {
                    assert_eq!(Some(t.depth(v)), truth[v]);
                }
                t.validate_against(&g).unwrap();
            }
        }
    }

    #[test]
    fn disconnected_graph_names_unreachable_node() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let err = bfs_spanning_tree(&g, 1, NeighborOrder::Input, &mut rng()).unwrap_err();
        assert!(matches!(err, Error::Disconnected { root: 1, node: 2 }));
    }

    #[test]
    fn tags_on_small_examples() {
        let g = path(3);
        let mut t = bfs_spanning_tree(&g, 0, NeighborOrder::Input, &mut rng()).unwrap();
        t.tag_parities(|_| Sign::Positive);
        assert!((0..3).all(|v| t.parity_tag(v) == Sign::Positive));

        let signs = [Sign::Positive, Sign::Negative];
        t.tag_parities(|e| signs[e]);
        let tags: Vec<_> = (0..3).map(|v| t.parity_tag(v)).collect();
        assert_eq!(tags, vec![Sign::Positive, Sign::Positive, Sign::Negative]);
        assert_eq!(t.path_parity(0, 2).unwrap(), Sign::Negative);
        assert_eq!(t.path_parity(1, 0).unwrap(), Sign::Positive);
        assert_eq!(t.path_edges(2, 0).unwrap(), vec![1, 0]);
    }

    #[test]
    fn parity_requires_membership_and_tags() {
        let mut t = bfs_spanning_tree(&path(4), 0, NeighborOrder::Input, &mut rng()).unwrap();
        assert!(matches!(t.path_parity(0, 3), Err(Error::Invariant(_))));
        t.tag_parities(|_| Sign::Negative);
        t.remove_subtree(2);
        assert!(matches!(t.path_parity(0, 3), Err(Error::NotAMember(3))));
        assert!(matches!(t.path_parity(0, 9), Err(Error::NotAMember(9))));
        assert_eq!(t.path_parity(0, 1).unwrap(), Sign::Negative);
    }

    #[test]
    fn tags_match_path_products_on_random_trees() {
        let mut r = rng();
        for _ in 0..100 {
            let (g, links) = random_tree(15, &mut r);
            let signs: Vec<Sign> = (0..g.edge_count())
                .map(|_| Sign::from_agreement(r.gen_bool(0.5)))
                .collect();
            let root = links.iter().position(|l| l.is_none()).unwrap();
            let mut t = RootedTree::from_parents(15, root, &links).unwrap();
            t.tag_parities(|e| signs[e]);
            for u in 0..15 {
                for v in 0..15 {
                    assert_eq!(t.path_parity(u, v).unwrap(), brute_path_product(&t, &signs, u, v));
                }
            }
        }
    }

    #[test]
    fn from_parents_rejects_cycles() {
        let links = vec![None, Some((2, 0)), Some((1, 1))];
        assert!(matches!(
            RootedTree::from_parents(3, 0, &links),
            Err(Error::Invariant(_))
        ));
    }

    proptest! {
        #[test]
        fn parity_tags_agree_with_brute_force(n in 1usize..50, seed in any::<u64>()) {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let (g, links) = random_tree(n, &mut r);
            let signs: Vec<Sign> = (0..g.edge_count())
                .map(|_| Sign::from_agreement(r.gen_bool(0.5)))
                .collect();
            let root = links.iter().position(Option::is_none).unwrap();
            let mut t = RootedTree::from_parents(n, root, &links).unwrap();
            t.tag_parities(|e| signs[e]);
            for u in 0..n {
                for v in 0..n {
                    prop_assert_eq!(t.path_parity(u, v).unwrap(), brute_path_product(&t, &signs, u, v));
                    let via_edges = Sign::product(t.path_edges(u, v).unwrap().iter().map(|&e| signs[e]));
                    prop_assert_eq!(via_edges, t.path_parity(u, v).unwrap());
                }
            }
        }

        #[test]
        fn bfs_tree_height_bounded_by_diameter(n in 2usize..40, extra in 0usize..60, seed in any::<u64>()) {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let m = (n - 1 + extra).min(n * (n - 1) / 2);
            let g = random_connected_graph(n, m, &mut r).unwrap();
            let d = crate::graph::graph_diameter(&g).unwrap();
            let t = bfs_spanning_tree(&g, g.max_degree_node(), NeighborOrder::Shuffled, &mut r).unwrap();
            prop_assert!(t.height() <= d);
            for u in 0..n {
                for v in 0..n {
                    prop_assert!(t.path_edges(u, v).unwrap().len() <= 2 * d);
                }
            }
        }
    }
}
