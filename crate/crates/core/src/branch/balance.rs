//! Height reduction: re-hang a decomposition along heavy paths so that every
//! edge lies in logarithmically many clusters, at most doubling the width.

use super::{BranchDecomposition, BranchError, NodeId, NodeKind};
use crate::graph::EdgeId;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BalanceStats {
    /// Heavy paths processed, one per recursive call.
    pub heavy_paths: usize,
    pub longest_path: usize,
}

fn graft(src: &BranchDecomposition, n: NodeId, dst: &mut BranchDecomposition) -> NodeId {
    match src.node(n).kind {
        NodeKind::Leaf(e) => dst.add_leaf(e),
        NodeKind::Join(a, b) => {
            let x = graft(src, a, dst);
            let y = graft(src, b, dst);
            dst.add_join(x, y)
        }
    }
}

/// Joins already-built parts, given as `(root, size)` in order, into one tree.
fn complete_into(dst: &mut BranchDecomposition, parts: &[(NodeId, usize)]) -> NodeId {
    if parts.len() == 1 {
        return parts[0].0;
    }
    let m: usize = parts.iter().map(|p| p.1).sum();
    let mut prefix = Vec::with_capacity(parts.len());
    let mut acc = 0;
    for p in parts {
        acc += p.1;
        prefix.push(acc);
    }
    let j = prefix.partition_point(|&s| 2 * s <= m);
    let b = if j > 0 {
        let a = complete_into(dst, &parts[..j]);
        dst.add_join(a, parts[j].0)
    } else {
        parts[j].0
    };
    if j + 1 < parts.len() {
        let d = complete_into(dst, &parts[j + 1..]);
        dst.add_join(b, d)
    } else {
        b
    }
}

/// Merges decompositions with pairwise disjoint edge sets into a
/// decomposition of their union that keeps every input cluster.
pub fn complete(parts: Vec<BranchDecomposition>) -> Result<BranchDecomposition, BranchError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut dst = BranchDecomposition::new();
    let mut roots = Vec::with_capacity(parts.len());
    for p in &parts {
        let Some(r) = p.root() else { continue };
        let edges = p.cluster(r);
        for &e in &edges {
            if !seen.insert(e) {
                return Err(BranchError::DuplicateEdge(e));
            }
        }
        roots.push((graft(p, r, &mut dst), edges.len()));
    }
    if roots.is_empty() {
        return Err(BranchError::NoRoot);
    }
    let r = complete_into(&mut dst, &roots);
    dst.set_root(Some(r));
    Ok(dst)
}

struct Balancer<'a> {
    src: &'a BranchDecomposition,
    size: Vec<usize>,
    min_edge: Vec<EdgeId>,
    dst: BranchDecomposition,
    stats: BalanceStats,
}

impl Balancer<'_> {
    fn run(&mut self, n: NodeId) -> NodeId {
        let mut lights = Vec::new();
        let mut x = n;
        while let Some((a, b)) = self.src.children(x) {
            let (sa, sb) = (self.size[a.index()], self.size[b.index()]);
            let a_heavy = sa > sb || (sa == sb && self.min_edge[a.index()] < self.min_edge[b.index()]);
            let (heavy, light) = if a_heavy { (a, b) } else { (b, a) };
            lights.push(light);
            x = heavy;
        }
        self.stats.heavy_paths += 1;
        self.stats.longest_path = self.stats.longest_path.max(lights.len() + 1);
        let mut parts = vec![(self.dst.add_leaf(self.src.leaf_edge(x).unwrap()), 1)];
        for &l in lights.iter().rev() {
            parts.push((self.run(l), self.size[l.index()]));
        }
        let mut acc = 0;
        for (i, p) in parts.iter().enumerate() {
            assert!(i == 0 || acc >= p.1, "heavy path yields a part larger than its prefix");
            acc += p.1;
        }
        complete_into(&mut self.dst, &parts)
    }
}

/// Balanced decomposition with the same root cluster and leaves.
pub fn balance(bd: &BranchDecomposition) -> (BranchDecomposition, BalanceStats) {
    let Some(root) = bd.root() else {
        return (BranchDecomposition::new(), BalanceStats::default());
    };
    let size = bd.sizes();
    let mut min_edge = vec![EdgeId(u32::MAX); bd.len()];
    for n in bd.postorder() {
        min_edge[n.index()] = match bd.node(n).kind {
            NodeKind::Leaf(e) => e,
            NodeKind::Join(a, b) => min_edge[a.index()].min(min_edge[b.index()]),
        };
    }
    let mut b = Balancer { src: bd, size, min_edge, dst: BranchDecomposition::new(), stats: BalanceStats::default() };
    let r = b.run(root);
    b.dst.set_root(Some(r));
    (b.dst, b.stats)
}

/// Largest number of clusters containing one edge that the balanced output
/// may have on `m` edges.
pub fn per_edge_bound(m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        3.0 * (m as f64).log2() + 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{length, Graph, VertexId};
    use crate::io::{generate_planar_instance, LengthDist};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(m: u32) -> Graph {
        let mut g = Graph::with_vertices(m as usize + 1);
        for i in 0..m {
            g.add_edge(VertexId(i), VertexId(i + 1), length(1)).unwrap();
        }
        g
    }

    #[test]
    fn two_edges_are_left_alone() {
        let bd = BranchDecomposition::caterpillar(&[EdgeId(0), EdgeId(1)]);
        assert_eq!(balance(&bd).0.cluster_family(), bd.cluster_family());
    }

    #[test]
    fn caterpillar_of_64_edges() {
        let g = path(64);
        let bd = BranchDecomposition::caterpillar(&g.edge_ids());
        assert_eq!(bd.height(), 64);
        let (out, _) = balance(&bd);
        out.validate(&g).unwrap();
        let worst = out.clusters_per_edge().into_iter().map(|(_, c)| c).max().unwrap();
        assert!(worst <= 19, "{worst}");
        assert!(out.width(&g) <= 2 * bd.width(&g));
    }

    #[test]
    fn complete_single_part_is_unchanged() {
        let bd = BranchDecomposition::caterpillar(&[EdgeId(0), EdgeId(1), EdgeId(2)]);
        let out = complete(vec![bd.clone()]).unwrap();
        assert_eq!(out.cluster_family(), bd.cluster_family());
        assert_eq!(complete(vec![]), Err(BranchError::NoRoot));
    }

    #[test]
    fn complete_two_equal_parts_wraps_the_first() {
        let a = BranchDecomposition::caterpillar(&[EdgeId(0), EdgeId(1)]);
        let b = BranchDecomposition::caterpillar(&[EdgeId(2), EdgeId(3)]);
        let out = complete(vec![a, b]).unwrap();
        // j is the second part, so the root is the join of the first part with it.
        assert_eq!(out.to_text(), "((0 1) (2 3))");
        let overlap = complete(vec![
            BranchDecomposition::caterpillar(&[EdgeId(0)]),
            BranchDecomposition::caterpillar(&[EdgeId(0)]),
        ]);
        assert_eq!(overlap, Err(BranchError::DuplicateEdge(EdgeId(0))));
    }

    #[test]
    fn random_decompositions_meet_both_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let rows = rng.gen_range(2..8);
            let cols = rng.gen_range(2..10);
            let inst = generate_planar_instance(rows, cols, 0, 0.4, LengthDist::Constant(1), rng.gen()).unwrap();
            let g = inst.graph;
            let edges: Vec<EdgeId> = g.edge_ids();
            let bd = BranchDecomposition::random(&edges, &mut rng);
            let (out, _) = balance(&bd);
            out.validate(&g).unwrap();
            assert_eq!(out.edges(), bd.edges());
            assert!(out.width(&g) <= 2 * bd.width(&g));
            let bound = per_edge_bound(edges.len());
            for (_, c) in out.clusters_per_edge() {
                assert!(c as f64 <= bound);
            }
        }
    }
}
