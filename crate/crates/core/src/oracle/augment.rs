//! Constructive check that a solution can be padded into one whose canonical
//! configurations are simple everywhere, at bounded extra length.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::branch::{BranchDecomposition, NodeId};
use crate::dp::{
    find_witness, is_simple_with, scale_range, simple::witness_parts, ClusterInfo, ClusterRegions, ClusterTable,
    Configuration, ContractionLayers, DpParameters, RegionCover, Witness, WitnessPart,
};
use crate::dsu::DisjointSets;
use crate::graph::{Demand, EdgeId, Graph, Length, VertexId};

#[derive(Clone, Debug)]
pub struct Augmentation {
    pub f1: Vec<EdgeId>,
    pub f_prime: Vec<EdgeId>,
    /// Witness derived from the input solution, per node.
    pub witnesses: Vec<Witness>,
    /// Nodes where some active vertex of a part is not tied to its tree
    /// after the first step.
    pub first_step_failures: Vec<NodeId>,
    /// Nodes where two boundary vertices are linked through the contracted
    /// area but not inside the cluster after the second step.
    pub second_step_failures: Vec<NodeId>,
    /// Nodes whose canonical configuration of `f_prime` the derived witness
    /// does not explain.
    pub witness_failures: Vec<NodeId>,
    /// Nodes whose canonical configuration admits no witness at all.
    pub not_simple: Vec<NodeId>,
    pub added_first: Length,
    pub added_second: Length,
    pub bound: f64,
}

impl Augmentation {
    pub fn length_ok(&self, g: &Graph) -> bool {
        crate::io::to_f64(g.length_of(&self.f_prime)) <= self.bound + 1e-9
    }

    pub fn all_hold(&self, g: &Graph) -> bool {
        self.first_step_failures.is_empty()
            && self.second_step_failures.is_empty()
            && self.not_simple.is_empty()
            && self.length_ok(g)
    }
}

fn preorder(bd: &BranchDecomposition) -> Vec<NodeId> {
    let mut post = bd.postorder();
    post.reverse();
    post
}

fn depths(bd: &BranchDecomposition) -> Vec<usize> {
    let mut d = vec![0; bd.len()];
    for n in preorder(bd) {
        if let Some((a, b)) = bd.children(n) {
            d[a.index()] = d[n.index()] + 1;
            d[b.index()] = d[n.index()] + 1;
        }
    }
    d
}

/// Lowest node whose cluster holds every edge of each component, keyed by
/// component label, with the component's smallest edge.
fn minimal_clusters(
    g: &Graph,
    bd: &BranchDecomposition,
    f: &[EdgeId],
    comp: &[usize],
) -> HashMap<usize, (NodeId, EdgeId)> {
    let depth = depths(bd);
    let leaf_of: HashMap<EdgeId, NodeId> = bd.node_ids().filter_map(|n| bd.leaf_edge(n).map(|e| (e, n))).collect();
    let lca = |mut a: NodeId, mut b: NodeId| {
        while a != b {
            if depth[a.index()] >= depth[b.index()] {
                a = bd.node(a).parent.unwrap();
            } else {
                b = bd.node(b).parent.unwrap();
            }
        }
        a
    };
    let mut out: HashMap<usize, (NodeId, EdgeId)> = HashMap::new();
    let mut sorted = f.to_vec();
    sorted.sort_unstable();
    for e in sorted {
        let c = comp[g.e(e).u.index()];
        let leaf = leaf_of[&e];
        out.entry(c).and_modify(|(n, _)| *n = lca(*n, leaf)).or_insert((leaf, e));
    }
    out
}

fn components(g: &Graph, f: &[EdgeId]) -> Vec<usize> {
    let mut dsu = DisjointSets::new(g.vertex_bound());
    for &e in f {
        dsu.union(g.e(e).u.index(), g.e(e).v.index());
    }
    (0..g.vertex_bound()).map(|i| dsu.find(i)).collect()
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Minimal set of regions covering `targets`: greedy largest gain, then
/// drop any region the others make redundant.
fn cover(regions: &[Vec<VertexId>], targets: &BTreeSet<VertexId>) -> Vec<usize> {
    let mut left = targets.clone();
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let best = (0..regions.len())
            .map(|k| (regions[k].iter().filter(|v| left.contains(v)).count(), std::cmp::Reverse(k)))
            .max()
            .filter(|&(gain, _)| gain > 0);
        let Some((_, std::cmp::Reverse(k))) = best else { break };
        for v in &regions[k] {
            left.remove(v);
        }
        chosen.push(k);
    }
    let mut i = 0;
    while i < chosen.len() {
        let others: BTreeSet<VertexId> =
            chosen.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, &k)| regions[k].iter().copied()).collect();
        if targets.iter().all(|t| others.contains(t) || !regions[chosen[i]].contains(t)) {
            chosen.remove(i);
        } else {
            i += 1;
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Witness read off the trees of a solution: trees meeting the active
/// vertices, deepest minimal cluster first, each covered at the scale of its
/// farthest active vertex. Also returns the tree labels in that order.
fn derive_witness(
    depth: &[usize],
    info: &ClusterInfo,
    regions: &ClusterRegions,
    gamma: f64,
    comp: &[usize],
    minimal: &HashMap<usize, (NodeId, EdgeId)>,
) -> (Witness, Vec<usize>) {
    let range = scale_range(regions.mu, gamma);
    let mut tree_ids: Vec<usize> =
        info.active.iter().map(|v| comp[v.index()]).filter(|c| minimal.contains_key(c)).collect();
    tree_ids.sort_unstable();
    tree_ids.dedup();
    tree_ids.sort_by_key(|c| {
        let (n, e) = minimal[c];
        (std::cmp::Reverse(depth[n.index()]), e)
    });
    let mut w = Vec::new();
    for &c in &tree_ids {
        let act: BTreeSet<VertexId> = info.active.iter().copied().filter(|v| comp[v.index()] == c).collect();
        let far = act.iter().filter_map(|v| regions.dist.get(v)).copied().max().unwrap_or(0);
        let Some(lo) = range.clone().next() else { continue };
        let i = ceil_log2(far).max(lo).min(regions.mu);
        let list = &regions.scale(i).regions;
        w.push(WitnessPart { scale: i, regions: cover(list, &act) });
    }
    (w, tree_ids)
}

/// Cheapest way to join `from` to `to` in `edges / contracted`, where edges
/// of `free` cost nothing. Returns the paid edges.
fn cheapest_link(
    g: &Graph,
    edges: &[EdgeId],
    contracted: &[EdgeId],
    free: &BTreeSet<EdgeId>,
    from: &[VertexId],
    to: &BTreeSet<VertexId>,
) -> Option<(usize, Vec<EdgeId>)> {
    let sub = g.edge_subgraph(edges);
    let q = sub.quotient(contracted);
    let targets: BTreeSet<VertexId> = to.iter().filter(|v| sub.has_vertex(**v)).map(|&v| q.image(v)).collect();
    let mut dist: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut back: BTreeMap<VertexId, EdgeId> = BTreeMap::new();
    let mut dq = VecDeque::new();
    for &s in from {
        if sub.has_vertex(s) {
            let x = q.image(s);
            dist.insert(x, 0);
            dq.push_back(x);
        }
    }
    let mut settled = BTreeSet::new();
    while let Some(x) = dq.pop_front() {
        if !settled.insert(x) {
            continue;
        }
        if targets.contains(&x) {
            let mut path = Vec::new();
            let mut y = x;
            while let Some(&e) = back.get(&y) {
                if !free.contains(&e) {
                    path.push(e);
                }
                y = q.graph.e(e).other(y);
            }
            return Some((dist[&x], path));
        }
        let dx = dist[&x];
        for &e in q.graph.incident(x) {
            let y = q.graph.e(e).other(x);
            let w = usize::from(!free.contains(&e));
            if dist.get(&y).is_none_or(|&d| dx + w < d) {
                dist.insert(y, dx + w);
                back.insert(y, e);
                if w == 0 {
                    dq.push_front(y);
                } else {
                    dq.push_back(y);
                }
            }
        }
    }
    None
}

fn connected_in(g: &Graph, edges: &[EdgeId], contracted: &[EdgeId], f: &BTreeSet<EdgeId>) -> DisjointSets {
    let mut dsu = DisjointSets::new(g.vertex_bound());
    for &e in contracted.iter().chain(edges.iter().filter(|e| f.contains(e))) {
        dsu.union(g.e(e).u.index(), g.e(e).v.index());
    }
    dsu
}

/// Builds the padded solution from a feasible `f` and checks the structural
/// claims on it.
#[allow(clippy::too_many_arguments)]
pub fn augment_to_simple(
    g: &Graph,
    bd: &BranchDecomposition,
    demands: &[Demand],
    f: &[EdgeId],
    clusters: &ClusterTable,
    layers: &ContractionLayers,
    regions_all: &RegionCover,
    params: &DpParameters,
) -> Augmentation {
    let comp = components(g, f);
    let minimal = minimal_clusters(g, bd, f, &comp);
    let depth = depths(bd);
    let mut witnesses = vec![Vec::new(); bd.len()];
    let mut tree_lists = vec![Vec::new(); bd.len()];
    for n in bd.postorder() {
        let (w, t) =
            derive_witness(&depth, clusters.info(n), &regions_all.clusters[n.index()], params.gamma, &comp, &minimal);
        witnesses[n.index()] = w;
        tree_lists[n.index()] = t;
    }
    let mut f1: BTreeSet<EdgeId> = f.iter().copied().collect();
    let mut added_first = 0usize;
    for n in preorder(bd) {
        let info = clusters.info(n);
        let regions = &regions_all.clusters[n.index()];
        let b = &layers.clusters[n.index()].b;
        let parts = witness_parts(info, regions, &witnesses[n.index()]);
        for (j, &part) in parts.iter().enumerate() {
            let tree = tree_lists[n.index()][j];
            let tree_verts: BTreeSet<VertexId> =
                info.vertices.iter().copied().filter(|v| comp[v.index()] == tree).collect();
            for (k, &u) in info.active.iter().enumerate() {
                if part >> k & 1 == 0 {
                    continue;
                }
                if let Some((_, path)) = cheapest_link(g, &info.edges, b, &f1, &[u], &tree_verts) {
                    added_first += path.len();
                    f1.extend(path);
                }
            }
        }
    }
    let mut first_step_failures = Vec::new();
    for n in bd.postorder() {
        let info = clusters.info(n);
        let b = &layers.clusters[n.index()].b;
        let mut dsu = connected_in(g, &info.edges, b, &f1);
        let parts = witness_parts(info, &regions_all.clusters[n.index()], &witnesses[n.index()]);
        let ok = parts.iter().enumerate().all(|(j, &part)| {
            let tree = tree_lists[n.index()][j];
            let tree_verts: Vec<VertexId> = info.vertices.iter().copied().filter(|v| comp[v.index()] == tree).collect();
            info.active
                .iter()
                .enumerate()
                .filter(|&(k, _)| part >> k & 1 == 1)
                .all(|(_, u)| tree_verts.iter().any(|t| dsu.same(t.index(), u.index())))
        });
        if !ok {
            first_step_failures.push(n);
        }
    }
    let mut fp = f1.clone();
    let mut added_second = 0usize;
    for n in preorder(bd) {
        let info = clusters.info(n);
        let c = &layers.clusters[n.index()];
        let budget = 2 * c.rho as usize;
        loop {
            let mut grew = false;
            for (i, &u) in info.boundary.iter().enumerate() {
                for &v in &info.boundary[i + 1..] {
                    let target = BTreeSet::from([v]);
                    if let Some((cost, path)) = cheapest_link(g, &info.edges, &c.a, &fp, &[u], &target) {
                        if cost > 0 && cost <= budget {
                            added_second += path.len();
                            fp.extend(path);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
    }
    let mut second_step_failures = Vec::new();
    let mut witness_failures = Vec::new();
    let mut not_simple = Vec::new();
    let fp_vec: Vec<EdgeId> = fp.iter().copied().collect();
    for n in bd.postorder() {
        let info = clusters.info(n);
        let b = &layers.clusters[n.index()].b;
        let mut contracted = connected_in(g, &info.edges, b, &fp);
        let mut plain = connected_in(g, &info.edges, &[], &fp);
        let bad = info.boundary.iter().enumerate().any(|(i, u)| {
            info.boundary[i + 1..]
                .iter()
                .any(|v| contracted.same(u.index(), v.index()) && !plain.same(u.index(), v.index()))
        });
        if bad {
            second_step_failures.push(n);
        }
        let regions = &regions_all.clusters[n.index()];
        let range = scale_range(regions.mu, params.gamma);
        let config = Configuration::canonical(g, &fp_vec, info);
        if !is_simple_with(&config, info, regions, &range, &witnesses[n.index()]) {
            witness_failures.push(n);
            if find_witness(&config, info, regions, &range).is_none() {
                not_simple.push(n);
            }
        }
    }
    debug_assert!(g.is_feasible(&fp_vec, demands));
    Augmentation {
        f1: f1.into_iter().collect(),
        f_prime: fp_vec,
        witnesses,
        first_step_failures,
        second_step_failures,
        witness_failures,
        not_simple,
        added_first: Length::from_integer(added_first as i128),
        added_second: Length::from_integer(added_second as i128),
        bound: params.augmentation_bound(g.length_of(f), g.total_length()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{heuristic_decompose, parse_decomposition};
    use crate::dp::{build_regions, contract_alpha};
    use crate::graph::length;
    use crate::io::{generate_planar_instance, LengthDist};
    use crate::oracle::opt_by_subsets;
    use num_rational::Ratio;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn params(alpha: Length, beta: Length, gamma: f64, g: &Graph, bd: &BranchDecomposition) -> DpParameters {
        DpParameters { alpha, beta, gamma, w: bd.width(g), m: g.num_edges() }
    }

    /// Path 0-1-2-3-4 with chord 0-3 inside the cluster; 1 hangs to 5 and 3
    /// to 6 through separate boundary vertices.
    #[test]
    fn lower_priority_terminal_is_rehomed() {
        let mut g = Graph::with_vertices(7);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (0, 3), (3, 4), (0, 5), (4, 6)] {
            g.add_edge(v(a), v(b), length(1)).unwrap();
        }
        let bd = parse_decomposition("(((((0 1) 2) 3) 4) (5 6))").unwrap();
        let d = [Demand::new(v(1), v(5)).unwrap(), Demand::new(v(3), v(6)).unwrap()];
        let f = [EdgeId(0), EdgeId(4), EdgeId(5), EdgeId(6)];
        let ct = ClusterTable::build(&g, &bd, &d);
        let layers = contract_alpha(&g, &bd, length(1000));
        let cover = build_regions(&g, &bd, &ct, &layers, length(4));
        let p = params(length(1000), length(4), 100.0, &g, &bd);
        let aug = augment_to_simple(&g, &bd, &d, &f, &ct, &layers, &cover, &p);
        let mut expected = f.to_vec();
        expected.push(EdgeId(3));
        expected.sort_unstable();
        assert_eq!(aug.f_prime, expected);
        assert!(aug.witness_failures.is_empty());
        assert!(aug.all_hold(&g));
    }

    #[test]
    fn fine_regions_leave_solution_unchanged() {
        for seed in 0..20 {
            let inst = generate_planar_instance(3, 4, 3, 0.3, LengthDist::Constant(1), seed).unwrap();
            let g = &inst.graph;
            let bd = heuristic_decompose(g);
            let ct = ClusterTable::build(g, &bd, &inst.demands);
            let opt = opt_by_subsets(g, &inst.demands).unwrap();
            let layers = contract_alpha(g, &bd, length(500));
            let cover = build_regions(g, &bd, &ct, &layers, Ratio::new(1, 100));
            let p = params(length(500), Ratio::new(1, 100), 10.0, g, &bd);
            let aug = augment_to_simple(g, &bd, &inst.demands, &opt.edges, &ct, &layers, &cover, &p);
            assert_eq!(aug.f_prime, opt.edges, "seed {seed}");
            assert!(
                aug.all_hold(g),
                "seed {seed} {:?} {:?} {:?} {:?}",
                aug.first_step_failures,
                aug.second_step_failures,
                aug.witness_failures,
                aug.not_simple
            );
        }
    }

    #[test]
    fn coarse_parameters_keep_every_claim() {
        for seed in 0..40 {
            let inst = generate_planar_instance(3, 4, 3, 0.3, LengthDist::Constant(1), seed).unwrap();
            let g = &inst.graph;
            let bd = heuristic_decompose(g);
            let ct = ClusterTable::build(g, &bd, &inst.demands);
            let opt = opt_by_subsets(g, &inst.demands).unwrap();
            let alpha = length(1 + seed as i64 % 3);
            let beta = [Ratio::new(1, 2), length(1), length(3)][seed as usize % 3];
            let layers = contract_alpha(g, &bd, alpha);
            let cover = build_regions(g, &bd, &ct, &layers, beta);
            let p = params(alpha, beta, 4.0, g, &bd);
            let aug = augment_to_simple(g, &bd, &inst.demands, &opt.edges, &ct, &layers, &cover, &p);
            assert!(opt.edges.iter().all(|e| aug.f_prime.contains(e)));
            assert!(g.is_feasible(&aug.f_prime, &inst.demands));
            assert_eq!(aug.first_step_failures, vec![], "seed {seed}");
            assert_eq!(aug.second_step_failures, vec![], "seed {seed}");
            assert_eq!(aug.witness_failures, vec![], "seed {seed}");
            assert!(aug.length_ok(g), "seed {seed}");
        }
    }
}
