//! The framework stages around the dynamic program: spanner, thinning,
//! lifting, and merging of per-subinstance solutions.

use std::collections::VecDeque;

use crate::dsu::DisjointSets;
use crate::graph::{Demand, EdgeId, Graph, Length, Quotient, VertexId};
use num_integer::Integer;

/// Produces a subgraph that still holds a near-optimal solution and whose
/// total length is within a constant of the optimum.
pub trait Spanner {
    fn build(&self, g: &Graph, demands: &[Demand], eps: Length) -> Graph;
}

/// Keeps the whole graph.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentitySpanner;

impl Spanner for IdentitySpanner {
    fn build(&self, g: &Graph, _: &[Demand], _: Length) -> Graph {
        g.clone()
    }
}

pub fn spanner_stage(g: &Graph, demands: &[Demand], eps: Length, spanner: &dyn Spanner) -> Graph {
    spanner.build(g, demands, eps)
}

#[derive(Clone, Debug)]
pub struct Thinning {
    pub contracted: Quotient,
    /// The cheapest edge class, contracted away.
    pub s: Vec<EdgeId>,
    pub class_lengths: Vec<Length>,
}

/// BFS level of every vertex, each component from its smallest vertex.
pub fn bfs_levels(g: &Graph) -> Vec<usize> {
    let mut level = vec![usize::MAX; g.vertex_bound()];
    for r in g.vertices() {
        if level[r.index()] != usize::MAX {
            continue;
        }
        level[r.index()] = 0;
        let mut q = VecDeque::from([r]);
        while let Some(v) = q.pop_front() {
            for &e in g.incident(v) {
                let w = g.e(e).other(v);
                if level[w.index()] == usize::MAX {
                    level[w.index()] = level[v.index()] + 1;
                    q.push_back(w);
                }
            }
        }
    }
    level
}

/// Splits edges into `p` classes by the lower BFS level of their endpoints
/// modulo `p` and contracts the lightest class.
pub fn thinning_stage(g: &Graph, p: usize) -> Thinning {
    let p = p.max(1);
    let level = bfs_levels(g);
    let mut classes: Vec<Vec<EdgeId>> = vec![Vec::new(); p];
    for e in g.edges() {
        let l = level[e.u.index()].min(level[e.v.index()]);
        classes[l.mod_floor(&p)].push(e.id);
    }
    let class_lengths: Vec<Length> = classes.iter().map(|c| g.length_of(c)).collect();
    let best = (0..p).min_by(|&a, &b| class_lengths[a].cmp(&class_lengths[b]).then(a.cmp(&b))).unwrap();
    let s = std::mem::take(&mut classes[best]);
    Thinning { contracted: g.quotient(&s), s, class_lengths }
}

impl Thinning {
    pub fn image(&self, v: VertexId) -> VertexId {
        self.contracted.image(v)
    }

    /// Demands mapped into the contracted graph; pairs that collapse are
    /// dropped.
    pub fn map_demands(&self, demands: &[Demand]) -> Vec<Demand> {
        demands.iter().filter_map(|d| Demand::new(self.image(d.s), self.image(d.t)).ok()).collect()
    }
}

/// Re-expands contracted edges: the solution edges come first, then edges of
/// `s` are added only where they join two different components, and the
/// result is pruned to the demands.
pub fn lift_stage(solution: &[EdgeId], s: &[EdgeId], demands: &[Demand], g: &Graph) -> Vec<EdgeId> {
    let mut dsu = DisjointSets::new(g.vertex_bound());
    let mut keep = Vec::new();
    let mut extra: Vec<EdgeId> = s.to_vec();
    extra.sort_by(|&a, &b| g.e(a).len.cmp(&g.e(b).len).then(a.cmp(&b)));
    for &e in solution.iter().chain(&extra) {
        let ed = g.e(e);
        if dsu.union(ed.u.index(), ed.v.index()) {
            keep.push(e);
        }
    }
    g.prune_to_demands(&keep, demands)
}

/// Union of partial solutions, reduced to a minimum spanning forest and
/// pruned. Never longer than the union.
pub fn merge(g: &Graph, parts: &[Vec<EdgeId>], demands: &[Demand]) -> Vec<EdgeId> {
    let mut all: Vec<EdgeId> = parts.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    g.prune_to_demands(&g.spanning_forest(&all), demands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::length;
    use crate::io::{generate_grid_instance, LengthDist};
    use crate::oracle::opt_by_subsets;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn path(k: u32) -> Graph {
        let mut g = Graph::with_vertices(k as usize + 1);
        for i in 0..k {
            g.add_edge(v(i), v(i + 1), length(1)).unwrap();
        }
        g
    }

    #[test]
    fn identity_spanner() {
        let g = path(3);
        let h = spanner_stage(&g, &[], length(1), &IdentitySpanner);
        assert_eq!(h.edge_ids(), g.edge_ids());
    }

    /// Keeps only a spanning tree: a constant-factor stand-in on a path.
    struct TreeSpanner;
    impl Spanner for TreeSpanner {
        fn build(&self, g: &Graph, _: &[Demand], _: Length) -> Graph {
            g.edge_subgraph(&g.spanning_forest(&g.edge_ids()))
        }
    }

    #[test]
    fn plugged_spanner_on_a_path() {
        let g = path(4);
        let d = [Demand::new(v(0), v(4)).unwrap()];
        let h = spanner_stage(&g, &d, length(1), &TreeSpanner);
        assert!(h.total_length() <= length(1) * g.total_length());
        assert!(h.is_feasible(&h.edge_ids(), &d));
    }

    #[test]
    fn one_class_contracts_everything() {
        let g = path(4);
        let t = thinning_stage(&g, 1);
        assert_eq!(t.s.len(), 4);
        assert_eq!(t.contracted.graph.num_vertices(), 1);
        assert_eq!(t.contracted.graph.num_edges(), 0);
    }

    #[test]
    fn path_of_six_in_three_classes() {
        let t = thinning_stage(&path(6), 3);
        assert!(t.s.len() <= 2);
    }

    #[test]
    fn cheapest_class_is_light() {
        for seed in 0..20 {
            let inst = generate_grid_instance(6, 7, 0, LengthDist::Uniform(9), seed).unwrap();
            for p in 1..5 {
                let t = thinning_stage(&inst.graph, p);
                assert!(inst.graph.length_of(&t.s) * Length::from_integer(p as i128) <= inst.graph.total_length());
            }
        }
    }

    #[test]
    fn lifting() {
        let g = path(3);
        let d = [Demand::new(v(0), v(3)).unwrap()];
        assert_eq!(lift_stage(&g.edge_ids(), &[], &d, &g), g.edge_ids());
        let t = thinning_stage(&g, 2);
        let sol = g.edge_ids().into_iter().filter(|e| !t.s.contains(e)).collect::<Vec<_>>();
        let lifted = lift_stage(&sol, &t.s, &d, &g);
        assert_eq!(lifted, g.edge_ids());
    }

    #[test]
    fn lifted_solutions_stay_feasible() {
        for seed in 0..20 {
            let inst = generate_grid_instance(3, 4, 2, LengthDist::Uniform(5), seed).unwrap();
            let g = &inst.graph;
            let t = thinning_stage(g, 2);
            let d2 = t.map_demands(&inst.demands);
            let sol2 = opt_by_subsets(&t.contracted.graph, &d2).unwrap();
            let lifted = lift_stage(&sol2.edges, &t.s, &inst.demands, g);
            assert!(g.is_feasible(&lifted, &inst.demands));
            assert!(g.length_of(&lifted) <= sol2.opt + g.length_of(&t.s));
            // contraction never raises the optimum
            assert!(sol2.opt <= opt_by_subsets(g, &inst.demands).unwrap().opt);
        }
    }

    #[test]
    fn merge_breaks_cycles() {
        let mut g = path(3);
        g.add_edge(v(0), v(3), length(5)).unwrap();
        let d = [Demand::new(v(0), v(3)).unwrap()];
        let m = merge(&g, &[g.edge_ids()], &d);
        assert_eq!(m, vec![EdgeId(0), EdgeId(1), EdgeId(2)]);
    }
}
