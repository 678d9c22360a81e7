//! Exact Steiner forest at small scale, by two independent methods.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSets;
use crate::graph::{Demand, EdgeId, Graph, Length, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    SubsetSearch,
    TerminalPartition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub opt: Length,
    pub edges: Vec<EdgeId>,
    pub method: OracleMethod,
    pub fingerprint: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_edges: usize,
    pub max_terminals: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_edges: 18, max_terminals: 10 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{edges} edges and {terminals} terminals exceed the exact-solver limits")]
    TooLarge { edges: usize, terminals: usize },
    #[error("demand {0:?} cannot be connected")]
    Infeasible(Demand),
}

/// Stable hash of the edge list and demands.
pub fn fingerprint(g: &Graph, demands: &[Demand]) -> String {
    let mut h = DefaultHasher::new();
    for e in g.edges() {
        (e.id.0, e.u.0, e.v.0, e.len.numer(), e.len.denom()).hash(&mut h);
    }
    for d in demands {
        (d.s.0, d.t.0).hash(&mut h);
    }
    format!("{:016x}", h.finish())
}

fn check_feasible(g: &Graph, demands: &[Demand]) -> Result<(), OracleError> {
    let all = g.edge_ids();
    match demands.iter().find(|d| !g.is_feasible(&all, &[**d])) {
        Some(d) => Err(OracleError::Infeasible(*d)),
        None => Ok(()),
    }
}

fn terminals(demands: &[Demand]) -> Vec<VertexId> {
    let mut t: Vec<VertexId> = demands.iter().flat_map(|d| [d.s, d.t]).collect();
    t.sort_unstable();
    t.dedup();
    t
}

/// Picks the subset search when the edge count allows, otherwise the
/// terminal-partition method.
pub fn brute_force_opt(g: &Graph, demands: &[Demand], limits: OracleLimits) -> Result<OracleResult, OracleError> {
    let m = g.num_edges();
    let k = terminals(demands).len();
    if m <= limits.max_edges {
        opt_by_subsets(g, demands)
    } else if k <= limits.max_terminals {
        opt_by_partitions(g, demands)
    } else {
        Err(OracleError::TooLarge { edges: m, terminals: k })
    }
}

/// Include/exclude search over edges, heaviest first, cut off whenever the
/// partial length reaches the best feasible length found so far or the
/// still-available edges cannot satisfy the demands.
pub fn opt_by_subsets(g: &Graph, demands: &[Demand]) -> Result<OracleResult, OracleError> {
    check_feasible(g, demands)?;
    let mut order = g.edge_ids();
    order.sort_by(|&a, &b| g.e(b).len.cmp(&g.e(a).len).then(a.cmp(&b)));
    let mut best_edges = g.prune_to_demands(&g.spanning_forest(&order), demands);
    let mut best = g.length_of(&best_edges);
    let mut chosen = Vec::new();
    let mut excluded = vec![false; g.edge_bound()];
    search(g, demands, &order, 0, Length::zero(), &mut chosen, &mut excluded, &mut best, &mut best_edges);
    best_edges.sort_unstable();
    Ok(OracleResult {
        opt: best,
        edges: best_edges,
        method: OracleMethod::SubsetSearch,
        fingerprint: fingerprint(g, demands),
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    g: &Graph,
    demands: &[Demand],
    order: &[EdgeId],
    i: usize,
    len: Length,
    chosen: &mut Vec<EdgeId>,
    excluded: &mut [bool],
    best: &mut Length,
    best_edges: &mut Vec<EdgeId>,
) {
    if len >= *best {
        return;
    }
    if g.is_feasible(chosen, demands) {
        *best = len;
        *best_edges = chosen.clone();
        return;
    }
    if i == order.len() {
        return;
    }
    let available: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !excluded[e.index()]).collect();
    if !g.is_feasible(&available, demands) {
        return;
    }
    let e = order[i];
    chosen.push(e);
    search(g, demands, order, i + 1, len + g.e(e).len, chosen, excluded, best, best_edges);
    chosen.pop();
    excluded[e.index()] = true;
    search(g, demands, order, i + 1, len, chosen, excluded, best, best_edges);
    excluded[e.index()] = false;
}

/// Steiner trees by subset dynamic programming over terminals, combined
/// over all groupings of demand-connected terminal classes.
pub fn opt_by_partitions(g: &Graph, demands: &[Demand]) -> Result<OracleResult, OracleError> {
    check_feasible(g, demands)?;
    let terms = terminals(demands);
    let idx = |v: VertexId| terms.binary_search(&v).unwrap();
    let mut classes = DisjointSets::new(terms.len());
    for d in demands {
        classes.union(idx(d.s), idx(d.t));
    }
    let mut class_of = vec![usize::MAX; terms.len()];
    let mut class_masks: Vec<u32> = Vec::new();
    for i in 0..terms.len() {
        let r = classes.find(i);
        if class_of[r] == usize::MAX {
            class_of[r] = class_masks.len();
            class_masks.push(0);
        }
        class_masks[class_of[r]] |= 1 << i;
    }
    let tree = SteinerTable::new(g, &terms);
    let mut best: Option<(Length, Vec<u32>)> = None;
    for p in crate::dp::Partition::all(class_masks.len()) {
        let mut masks = vec![0u32; p.num_blocks()];
        for (c, &m) in class_masks.iter().enumerate() {
            masks[p.label(c)] |= m;
        }
        let Some(total) = masks.iter().try_fold(Length::zero(), |acc, &m| tree.cost(m).map(|c| acc + c)) else {
            continue;
        };
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, masks));
        }
    }
    let (opt, masks) = best.unwrap_or((Length::zero(), Vec::new()));
    let mut edges: Vec<EdgeId> = masks.iter().flat_map(|&m| tree.edges(m)).collect();
    edges.sort_unstable();
    edges.dedup();
    let mut edges = g.prune_to_demands(&g.spanning_forest(&edges), demands);
    edges.sort_unstable();
    debug_assert_eq!(g.length_of(&edges), opt);
    Ok(OracleResult { opt, edges, method: OracleMethod::TerminalPartition, fingerprint: fingerprint(g, demands) })
}

/// Dreyfus-Wagner table: `dp[mask][v]` is the cheapest tree spanning the
/// terminals in `mask` plus vertex `v`.
struct SteinerTable<'a> {
    g: &'a Graph,
    terms: Vec<VertexId>,
    dp: Vec<Vec<Option<Length>>>,
    how: Vec<Vec<How>>,
    sp: Vec<crate::graph::ShortestPathForest>,
}

#[derive(Clone, Copy)]
enum How {
    None,
    /// Path from a vertex `u` whose entry for the same mask is a merge.
    Path(VertexId),
    Merge(u32),
}

impl<'a> SteinerTable<'a> {
    fn new(g: &'a Graph, terms: &[VertexId]) -> Self {
        let n = g.vertex_bound();
        let k = terms.len();
        let sp: Vec<_> = g.vertices().map(|v| g.shortest_path_forest(&[v])).collect::<Vec<_>>();
        let mut sp_by = Vec::with_capacity(n);
        {
            let mut it = sp.into_iter();
            for i in 0..n {
                if g.has_vertex(VertexId(i as u32)) {
                    sp_by.push(it.next().unwrap());
                } else {
                    sp_by.push(g.shortest_path_forest(&[]));
                }
            }
        }
        let dist = |a: VertexId, b: VertexId| sp_by[a.index()].dist(b);
        let mut dp = vec![vec![None; n]; 1 << k];
        let mut how = vec![vec![How::None; n]; 1 << k];
        for (i, &t) in terms.iter().enumerate() {
            for v in g.vertices() {
                dp[1 << i][v.index()] = dist(t, v);
                how[1 << i][v.index()] = How::Path(t);
            }
        }
        for mask in 1u32..(1 << k) {
            if mask.count_ones() < 2 {
                continue;
            }
            let m = mask as usize;
            for v in g.vertices() {
                let mut sub = (mask - 1) & mask;
                while sub > 0 {
                    if sub < mask ^ sub {
                        if let (Some(a), Some(b)) = (dp[sub as usize][v.index()], dp[(mask ^ sub) as usize][v.index()])
                        {
                            if dp[m][v.index()].is_none_or(|c| a + b < c) {
                                dp[m][v.index()] = Some(a + b);
                                how[m][v.index()] = How::Merge(sub);
                            }
                        }
                    }
                    sub = (sub - 1) & mask;
                }
            }
            let merged: Vec<(VertexId, Length)> =
                g.vertices().filter_map(|u| dp[m][u.index()].map(|c| (u, c))).collect();
            for v in g.vertices() {
                for &(u, c) in &merged {
                    if u == v {
                        continue;
                    }
                    if let Some(d) = dist(u, v) {
                        if dp[m][v.index()].is_none_or(|x| c + d < x) && matches!(how[m][u.index()], How::Merge(_)) {
                            dp[m][v.index()] = Some(c + d);
                            how[m][v.index()] = How::Path(u);
                        }
                    }
                }
            }
        }
        Self { g, terms: terms.to_vec(), dp, how, sp: sp_by }
    }

    fn cost(&self, mask: u32) -> Option<Length> {
        let lowest = self.terms[mask.trailing_zeros() as usize];
        self.dp[mask as usize][lowest.index()]
    }

    fn path(&self, from: VertexId, to: VertexId, out: &mut Vec<EdgeId>) {
        let sp = &self.sp[from.index()];
        let mut x = to;
        while x != from {
            let e = sp.parent[x.index()].expect("reachable");
            out.push(e);
            x = self.g.e(e).other(x);
        }
    }

    fn edges(&self, mask: u32) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let lowest = self.terms[mask.trailing_zeros() as usize];
        let mut stack = vec![(mask, lowest)];
        while let Some((m, v)) = stack.pop() {
            match self.how[m as usize][v.index()] {
                How::None => {}
                How::Path(u) => {
                    self.path(u, v, &mut out);
                    if m.count_ones() > 1 {
                        stack.push((m, u));
                    }
                }
                How::Merge(sub) => {
                    stack.push((sub, v));
                    stack.push((m ^ sub, v));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::length;
    use crate::io::{generate_grid_instance, generate_planar_instance, LengthDist};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn tiny_examples() {
        let mut g = Graph::with_vertices(2);
        g.add_edge(v(0), v(1), length(7)).unwrap();
        let d = [Demand::new(v(0), v(1)).unwrap()];
        assert_eq!(brute_force_opt(&g, &d, OracleLimits::default()).unwrap().opt, length(7));

        let mut p = Graph::with_vertices(3);
        p.add_edge(v(0), v(1), length(1)).unwrap();
        p.add_edge(v(1), v(2), length(1)).unwrap();
        let d = [Demand::new(v(0), v(2)).unwrap()];
        assert_eq!(opt_by_subsets(&p, &d).unwrap().opt, length(2));
        assert_eq!(opt_by_partitions(&p, &d).unwrap().opt, length(2));
    }

    #[test]
    fn grid_corner_to_corner() {
        let inst = generate_grid_instance(3, 3, 0, LengthDist::Constant(1), 0).unwrap();
        let d = [Demand::new(v(0), v(8)).unwrap()];
        let r = opt_by_subsets(&inst.graph, &d).unwrap();
        assert_eq!(r.opt, length(4));
        assert!(inst.graph.is_feasible(&r.edges, &d));
    }

    #[test]
    fn methods_agree() {
        for seed in 0..60 {
            let inst = generate_planar_instance(3, 4, 3, 0.3, LengthDist::Uniform(6), seed).unwrap();
            let a = opt_by_subsets(&inst.graph, &inst.demands).unwrap();
            let b = opt_by_partitions(&inst.graph, &inst.demands).unwrap();
            assert_eq!(a.opt, b.opt, "seed {seed}");
            for r in [&a, &b] {
                assert!(inst.graph.is_feasible(&r.edges, &inst.demands));
                assert_eq!(inst.graph.length_of(&r.edges), r.opt);
            }
        }
    }

    #[test]
    fn limits_are_enforced() {
        let inst = generate_grid_instance(5, 5, 6, LengthDist::Constant(1), 0).unwrap();
        let err = brute_force_opt(&inst.graph, &inst.demands, OracleLimits::default()).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
        let d = [Demand::new(v(0), v(1)).unwrap()];
        let g = Graph::with_vertices(2);
        assert_eq!(opt_by_subsets(&g, &d).unwrap_err(), OracleError::Infeasible(d[0]));
    }
}
