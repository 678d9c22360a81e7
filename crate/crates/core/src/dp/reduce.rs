//! Rounding to unit lengths: each edge becomes a chain of unit edgelets, and
//! edges that round to nothing are contracted.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::branch::{BranchDecomposition, NodeId};
use crate::dsu::DisjointSets;
use crate::graph::{length, Demand, EdgeId, Graph, Length, VertexId};

#[derive(Clone, Debug)]
pub struct UnitInstance {
    /// Every edge has length one.
    pub graph: Graph,
    /// Input demands whose endpoints stay apart after contraction.
    pub demands: Vec<Demand>,
    pub eta: Length,
    /// Input edge of each edgelet, indexed by edgelet id.
    pub origin: Vec<EdgeId>,
    pub chains: BTreeMap<EdgeId, Vec<EdgeId>>,
    /// Input edges rounded to zero and contracted.
    pub contracted: Vec<EdgeId>,
    /// Image of each input vertex.
    pub vertex_map: Vec<Option<VertexId>>,
}

fn floor_div(a: Length, b: Length) -> u64 {
    let q = a / b;
    q.numer().div_floor(q.denom()).to_u64().expect("non-negative quotient")
}

/// Scale `eta = eps * len(G) / (c * m)`; edge `e` becomes `floor(len(e) / eta)`
/// edgelets.
pub fn unit_length_reduce(g: &Graph, demands: &[Demand], eps: Length, c: Length) -> UnitInstance {
    let m = g.num_edges();
    let total = g.total_length();
    let eta =
        if m == 0 || total.is_zero() { Length::zero() } else { eps * total / (c * Length::from_integer(m as i128)) };
    let pieces: BTreeMap<EdgeId, u64> =
        g.edges().map(|e| (e.id, if eta.is_zero() { 0 } else { floor_div(e.len, eta) })).collect();
    let mut dsu = DisjointSets::new(g.vertex_bound());
    let mut contracted = Vec::new();
    for e in g.edges() {
        if pieces[&e.id] == 0 {
            dsu.union(e.u.index(), e.v.index());
            contracted.push(e.id);
        }
    }
    let mut unit = Graph::new();
    let mut root_image: Vec<Option<VertexId>> = vec![None; g.vertex_bound()];
    let mut vertex_map = vec![None; g.vertex_bound()];
    for v in g.vertices() {
        let r = dsu.find(v.index());
        let img = *root_image[r].get_or_insert_with(|| unit.add_vertex());
        vertex_map[v.index()] = Some(img);
    }
    let mut origin = Vec::new();
    let mut chains = BTreeMap::new();
    for e in g.edges() {
        let k = pieces[&e.id];
        let (a, b) = (vertex_map[e.u.index()].unwrap(), vertex_map[e.v.index()].unwrap());
        if k == 0 || a == b {
            continue;
        }
        let mut chain = Vec::with_capacity(k as usize);
        let mut prev = a;
        for i in 0..k {
            let next = if i + 1 == k { b } else { unit.add_vertex() };
            chain.push(unit.add_edge(prev, next, length(1)).expect("distinct endpoints"));
            origin.push(e.id);
            prev = next;
        }
        chains.insert(e.id, chain);
    }
    let demands =
        demands.iter().filter_map(|d| Demand::new(vertex_map[d.s.index()]?, vertex_map[d.t.index()]?).ok()).collect();
    UnitInstance { graph: unit, demands, eta, origin, chains, contracted, vertex_map }
}

impl UnitInstance {
    /// Input edges hit by `unit_edges`, completed with contracted edges and
    /// trimmed to a forest serving `demands`.
    pub fn lift(&self, g: &Graph, unit_edges: &[EdgeId], demands: &[Demand]) -> Vec<EdgeId> {
        let mut cand: Vec<EdgeId> = unit_edges.iter().map(|e| self.origin[e.index()]).collect();
        cand.extend(&self.contracted);
        cand.sort_unstable();
        cand.dedup();
        g.prune_to_demands(&g.spanning_forest(&cand), demands)
    }

    /// Number of edgelets of an input edge set.
    pub fn rounded_length(&self, edges: &[EdgeId]) -> usize {
        edges.iter().map(|e| self.chains.get(e).map_or(0, Vec::len)).sum()
    }

    /// Replaces each leaf by a balanced tree over its edgelets and drops
    /// leaves of contracted edges.
    pub fn expand_decomposition(&self, bd: &BranchDecomposition) -> BranchDecomposition {
        let mut out = BranchDecomposition::new();
        let mut img: Vec<Option<NodeId>> = vec![None; bd.len()];
        for n in bd.postorder() {
            img[n.index()] = match bd.children(n) {
                None => {
                    let e = bd.leaf_edge(n).unwrap();
                    self.chains.get(&e).and_then(|c| balanced(&mut out, c))
                }
                Some((a, b)) => match (img[a.index()], img[b.index()]) {
                    (Some(x), Some(y)) => Some(out.add_join(x, y)),
                    (x, y) => x.or(y),
                },
            };
        }
        out.set_root(bd.root().and_then(|r| img[r.index()]));
        out
    }
}

fn balanced(bd: &mut BranchDecomposition, edges: &[EdgeId]) -> Option<NodeId> {
    match edges.len() {
        0 => None,
        1 => Some(bd.add_leaf(edges[0])),
        k => {
            let (l, r) = edges.split_at(k / 2);
            let (a, b) = (balanced(bd, l)?, balanced(bd, r)?);
            Some(bd.add_join(a, b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::heuristic_decompose;
    use crate::io::{generate_planar_instance, LengthDist};
    use crate::oracle::opt_by_subsets;
    use num_rational::Ratio;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn single_edge_splits_into_floor_pieces() {
        let mut g = Graph::with_vertices(2);
        g.add_edge(v(0), v(1), length(10)).unwrap();
        // eta = eps * 10 / (c * 1) = 2 with eps = 1, c = 5
        let u = unit_length_reduce(&g, &[], length(1), length(5));
        assert_eq!(u.eta, length(2));
        assert_eq!(u.graph.num_edges(), 5);
        assert!(u.graph.edges().all(|e| e.len == length(1)));
        assert!(u.graph.is_feasible(&u.graph.edge_ids(), &[Demand::new(v(0), v(1)).unwrap()]));
    }

    #[test]
    fn short_edge_is_contracted() {
        let mut g = Graph::with_vertices(3);
        g.add_edge(v(0), v(1), length(1)).unwrap();
        g.add_edge(v(1), v(2), length(100)).unwrap();
        let u = unit_length_reduce(&g, &[Demand::new(v(0), v(1)).unwrap()], Ratio::new(1, 2), length(1));
        assert_eq!(u.contracted, vec![EdgeId(0)]);
        assert_eq!(u.vertex_map[0], u.vertex_map[1]);
        assert!(u.demands.is_empty());
        assert_eq!(u.graph.num_vertices(), u.graph.num_edges() + 1);
    }

    #[test]
    fn totals_and_rounding_error() {
        for seed in 0..30 {
            let inst = generate_planar_instance(3, 4, 2, 0.3, LengthDist::Uniform(9), seed).unwrap();
            let g = &inst.graph;
            let (eps, c) = (Ratio::new(1, 2), length(1));
            let u = unit_length_reduce(g, &inst.demands, eps, c);
            let m = Length::from_integer(g.num_edges() as i128);
            assert!(Length::from_integer(u.graph.num_edges() as i128) <= c / eps * m);
            let bd = u.expand_decomposition(&heuristic_decompose(g));
            bd.validate(&u.graph).unwrap();
            let opt = opt_by_subsets(g, &inst.demands).unwrap();
            let lifted = u.lift(
                g,
                &opt.edges.iter().flat_map(|e| u.chains.get(e).cloned().unwrap_or_default()).collect::<Vec<_>>(),
                &inst.demands,
            );
            assert!(g.is_feasible(&lifted, &inst.demands), "seed {seed}");
            let err = g.length_of(&opt.edges) - u.eta * Length::from_integer(u.rounded_length(&opt.edges) as i128);
            assert!(err >= Length::zero() && err <= u.eta * m);
        }
    }

    #[test]
    fn expansion_keeps_width() {
        let inst = generate_planar_instance(4, 4, 0, 0.3, LengthDist::Uniform(5), 3).unwrap();
        let bd = heuristic_decompose(&inst.graph);
        let u = unit_length_reduce(&inst.graph, &[], Ratio::new(1, 3), length(1));
        let ex = u.expand_decomposition(&bd);
        ex.validate(&u.graph).unwrap();
        assert!(ex.width(&u.graph) <= bd.width(&inst.graph).max(2));
    }
}
