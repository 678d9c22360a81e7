//! Configurations: how a cluster's boundary is connected inside and outside
//! the cluster, and how its active vertices are connected overall.

use std::collections::BTreeSet;

use super::cluster::ClusterInfo;
use super::partition::Partition;
use crate::dsu::DisjointSets;
use crate::graph::{Demand, EdgeId, Graph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    /// Connectivity of the boundary through the cluster.
    pub inner: Partition,
    /// Connectivity of the boundary through the rest of the graph.
    pub outer: Partition,
    /// Connectivity of the active vertices through everything.
    pub all: Partition,
}

impl Configuration {
    /// The overall partition restricted to the boundary equals the join of
    /// the inner and outer ones.
    pub fn is_well_formed(&self, info: &ClusterInfo) -> bool {
        self.inner.len() == info.boundary.len()
            && self.outer.len() == info.boundary.len()
            && self.all.len() == info.active.len()
            && self.all.restrict(&info.boundary_pos) == self.inner.join(&self.outer)
    }

    /// Every block of the overall partition touches the boundary.
    pub fn is_outgoing(&self, info: &ClusterInfo) -> bool {
        let mut hit = vec![false; self.all.num_blocks()];
        for &p in &info.boundary_pos {
            hit[self.all.label(p)] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Canonical configuration of edge set `f` with respect to the cluster.
    pub fn canonical(g: &Graph, f: &[EdgeId], info: &ClusterInfo) -> Self {
        let inside: BTreeSet<EdgeId> = info.edges.iter().copied().collect();
        let conn = |keep: &dyn Fn(EdgeId) -> bool, verts: &[VertexId]| {
            let mut dsu = DisjointSets::new(g.vertex_bound());
            for &e in f {
                if keep(e) {
                    let ed = g.e(e);
                    dsu.union(ed.u.index(), ed.v.index());
                }
            }
            let roots: Vec<usize> = verts.iter().map(|v| dsu.find(v.index())).collect();
            Partition::from_labels(&roots)
        };
        Self {
            inner: conn(&|e| inside.contains(&e), &info.boundary),
            outer: conn(&|e| !inside.contains(&e), &info.boundary),
            all: conn(&|_| true, &info.active),
        }
    }
}

/// Union of the given vertex lists, sorted.
fn ground(lists: &[&[VertexId]]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Join of partitions of vertex lists, taken on `ground`.
fn join_on(ground: &[VertexId], parts: &[(&[VertexId], &Partition)]) -> Partition {
    let mut dsu = DisjointSets::new(ground.len());
    for (verts, p) in parts {
        for block in p.blocks() {
            let pos = |i: usize| ground.binary_search(&verts[i]).expect("vertex in ground");
            for w in block.windows(2) {
                dsu.union(pos(w[0]), pos(w[1]));
            }
        }
    }
    let roots: Vec<usize> = (0..ground.len()).map(|i| dsu.find(i)).collect();
    Partition::from_labels(&roots)
}

fn restrict_to(ground: &[VertexId], p: &Partition, verts: &[VertexId]) -> Partition {
    let idx: Vec<usize> = verts.iter().map(|v| ground.binary_search(v).expect("vertex in ground")).collect();
    p.restrict(&idx)
}

/// Parent/child consistency of three configurations: inner connectivity
/// composes upward, outer connectivity of a child is the parent's outer
/// joined with the sibling's inner, and every overall partition is the
/// restriction of the joint one.
pub fn compatible_triple(c: [&Configuration; 3], info: [&ClusterInfo; 3]) -> bool {
    let bnd = ground(&[&info[0].boundary, &info[1].boundary, &info[2].boundary]);
    let inner12 = join_on(&bnd, &[(&info[1].boundary, &c[1].inner), (&info[2].boundary, &c[2].inner)]);
    if restrict_to(&bnd, &inner12, &info[0].boundary) != c[0].inner {
        return false;
    }
    for (i, other) in [(1, 2), (2, 1)] {
        let j = join_on(&bnd, &[(&info[0].boundary, &c[0].outer), (&info[other].boundary, &c[other].inner)]);
        if restrict_to(&bnd, &j, &info[i].boundary) != c[i].outer {
            return false;
        }
    }
    let act = ground(&[&info[0].active, &info[1].active, &info[2].active]);
    let all =
        join_on(&act, &[(&info[0].active, &c[0].all), (&info[1].active, &c[1].all), (&info[2].active, &c[2].all)]);
    (0..3).all(|i| restrict_to(&act, &all, &info[i].active) == c[i].all)
}

/// Compatible, all three outgoing, and every demand active for both children
/// but not the parent has its endpoints related by the joint partition.
pub fn demand_consistent(c: [&Configuration; 3], info: [&ClusterInfo; 3], demands: &[Demand]) -> bool {
    if !compatible_triple(c, info) || !(0..3).all(|i| c[i].is_outgoing(info[i])) {
        return false;
    }
    let act = ground(&[&info[0].active, &info[1].active, &info[2].active]);
    let all =
        join_on(&act, &[(&info[0].active, &c[0].all), (&info[1].active, &c[1].all), (&info[2].active, &c[2].all)]);
    demands.iter().all(|d| {
        if info[0].demand_active(d) || !info[1].demand_active(d) || !info[2].demand_active(d) {
            return true;
        }
        match (act.binary_search(&d.s), act.binary_search(&d.t)) {
            (Ok(a), Ok(b)) => all.same(a, b),
            _ => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::BranchDecomposition;
    use crate::dp::cluster::ClusterTable;
    use crate::graph::length;
    use crate::io::{generate_planar_instance, LengthDist};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn empty_solution_gives_discrete_partitions() {
        let inst = crate::io::generate_grid_instance(3, 3, 2, LengthDist::Constant(1), 2).unwrap();
        let bd = crate::branch::heuristic_decompose(&inst.graph);
        let t = ClusterTable::build(&inst.graph, &bd, &inst.demands);
        for info in &t.infos {
            let c = Configuration::canonical(&inst.graph, &[], info);
            assert_eq!(c.inner, Partition::discrete(info.boundary.len()));
            assert_eq!(c.outer, Partition::discrete(info.boundary.len()));
            assert_eq!(c.all, Partition::discrete(info.active.len()));
            assert!(c.is_well_formed(info));
        }
    }

    #[test]
    fn spanning_tree_at_the_root_is_one_block() {
        let inst = crate::io::generate_grid_instance(3, 3, 2, LengthDist::Constant(1), 2).unwrap();
        let g = &inst.graph;
        let bd = crate::branch::heuristic_decompose(g);
        let t = ClusterTable::build(g, &bd, &inst.demands);
        let tree = g.spanning_forest(&g.edge_ids());
        let root = t.info(bd.root().unwrap());
        assert!(root.boundary.is_empty() && root.active.is_empty());
        let c = Configuration::canonical(g, &tree, root);
        assert_eq!(c.all.num_blocks(), 0);
        // A cluster with everything but one leaf edge: its active set is one block.
        let (a, b) = bd.children(bd.root().unwrap()).unwrap();
        for n in [a, b] {
            let c = Configuration::canonical(g, &tree, t.info(n));
            assert!(c.all.num_blocks() <= 1);
        }
    }

    /// Boundary a,b,c,d,e; interior active vertices f,g,h. Inside the
    /// cluster b-c, d-g, a-h and e-f are joined; outside a-b and c-d are.
    #[test]
    fn pictured_canonical_configuration() {
        let (a, b, c, d, e, f, gg, h) = (v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7));
        let (x, y, z) = (v(8), v(9), v(10));
        let mut g = Graph::with_vertices(11);
        let mut inside = Vec::new();
        for (p, q) in [(b, c), (d, gg), (a, h), (e, f)] {
            inside.push(g.add_edge(p, q, length(1)).unwrap());
        }
        let mut outside = Vec::new();
        for (p, q) in [(a, x), (x, b), (c, y), (y, d), (e, z)] {
            outside.push(g.add_edge(p, q, length(1)).unwrap());
        }
        // f, g, h need partners beyond the cluster.
        let demands = [Demand::new(f, z).unwrap(), Demand::new(gg, x).unwrap(), Demand::new(h, y).unwrap()];
        let info = ClusterInfo::new(&g, inside.clone(), vec![a, b, c, d, e], &demands);
        assert_eq!(info.active, vec![a, b, c, d, e, f, gg, h]);
        let mut sol = inside.clone();
        sol.extend(&outside[..4]);
        let conf = Configuration::canonical(&g, &sol, &info);
        assert_eq!(conf.inner, Partition::from_blocks(5, &[vec![0], vec![1, 2], vec![3], vec![4]]));
        assert_eq!(conf.outer, Partition::from_blocks(5, &[vec![0, 1], vec![2, 3], vec![4]]));
        assert_eq!(conf.all, Partition::from_blocks(8, &[vec![0, 1, 2, 3, 6, 7], vec![4, 5]]));
        assert!(conf.is_well_formed(&info));
        assert_eq!(crate::branch::boundary(&g, &inside), vec![a, b, c, d, e]);
    }

    /// Demand g-g' lies in two sibling clusters joined through d.
    #[test]
    fn pictured_compatible_configurations() {
        // C1: g-d ; C2: d-g' ; outside: d-o. Boundary of C0 = {d}.
        let (g1, d, g2, o) = (v(0), v(1), v(2), v(3));
        let mut g = Graph::with_vertices(4);
        let e1 = g.add_edge(g1, d, length(1)).unwrap();
        let e2 = g.add_edge(d, g2, length(1)).unwrap();
        let e3 = g.add_edge(d, o, length(1)).unwrap();
        let demands = [Demand::new(g1, g2).unwrap()];
        let mut bd = BranchDecomposition::new();
        let l1 = bd.add_leaf(e1);
        let l2 = bd.add_leaf(e2);
        let c0 = bd.add_join(l1, l2);
        let l3 = bd.add_leaf(e3);
        bd.add_join(c0, l3);
        let t = ClusterTable::build(&g, &bd, &demands);
        let infos = [t.info(c0), t.info(l1), t.info(l2)];
        assert!(infos[1].is_active(g1) && infos[2].is_active(g2));
        assert!(!infos[0].is_active(g1) && !infos[0].is_active(g2));
        let sol = [e1, e2];
        let confs = infos.map(|i| Configuration::canonical(&g, &sol, i));
        assert!(compatible_triple([&confs[0], &confs[1], &confs[2]], infos));
        assert!(demand_consistent([&confs[0], &confs[1], &confs[2]], infos, &demands));
        assert_eq!(t.settled_at[c0.index()], vec![0]);
        let broken = infos.map(|i| Configuration::canonical(&g, &[e1], i));
        assert!(!demand_consistent([&broken[0], &broken[1], &broken[2]], infos, &demands));
    }

    /// s reaches u inside C1, u reaches v outside C0, v reaches t inside C2.
    #[test]
    fn demand_satisfied_through_the_outside() {
        let (s, u, vv, t, x) = (v(0), v(1), v(2), v(3), v(4));
        let mut g = Graph::with_vertices(5);
        let su = g.add_edge(s, u, length(1)).unwrap();
        let vt = g.add_edge(vv, t, length(1)).unwrap();
        let ux = g.add_edge(u, x, length(1)).unwrap();
        let xv = g.add_edge(x, vv, length(1)).unwrap();
        let demands = [Demand::new(s, t).unwrap()];
        let mut bd = BranchDecomposition::new();
        let l1 = bd.add_leaf(su);
        let l2 = bd.add_leaf(vt);
        let c0 = bd.add_join(l1, l2);
        let l3 = bd.add_leaf(ux);
        let l4 = bd.add_leaf(xv);
        let rest = bd.add_join(l3, l4);
        bd.add_join(c0, rest);
        let tbl = ClusterTable::build(&g, &bd, &demands);
        let infos = [tbl.info(c0), tbl.info(l1), tbl.info(l2)];
        let good = infos.map(|i| Configuration::canonical(&g, &[su, vt, ux, xv], i));
        assert!(demand_consistent([&good[0], &good[1], &good[2]], infos, &demands));
        let bad = infos.map(|i| Configuration::canonical(&g, &[su, vt, ux], i));
        assert!(compatible_triple([&bad[0], &bad[1], &bad[2]], infos));
        assert!(!demand_consistent([&bad[0], &bad[1], &bad[2]], infos, &demands));
    }

    #[test]
    fn empty_boundaries_are_vacuously_compatible() {
        let info = ClusterInfo::default();
        let c = Configuration { inner: Partition::default(), outer: Partition::default(), all: Partition::default() };
        assert!(compatible_triple([&c, &c, &c], [&info, &info, &info]));
        assert!(demand_consistent([&c, &c, &c], [&info, &info, &info], &[]));
    }

    #[test]
    fn canonical_configurations_are_always_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let inst = generate_planar_instance(3, 4, 3, 0.3, LengthDist::Constant(1), rng.gen()).unwrap();
            let g = &inst.graph;
            let edges = g.edge_ids();
            let bd = BranchDecomposition::random(&edges, &mut rng);
            let t = ClusterTable::build(g, &bd, &inst.demands);
            let f: Vec<EdgeId> = edges.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let feasible = g.is_feasible(&f, &inst.demands);
            let mut all_consistent = true;
            for n in bd.postorder() {
                let Some((a, b)) = bd.children(n) else { continue };
                let infos = [t.info(n), t.info(a), t.info(b)];
                let confs = infos.map(|i| Configuration::canonical(g, &f, i));
                for (c, i) in confs.iter().zip(infos) {
                    assert!(c.is_well_formed(i));
                }
                assert!(compatible_triple([&confs[0], &confs[1], &confs[2]], infos));
                all_consistent &= demand_consistent([&confs[0], &confs[1], &confs[2]], infos, &inst.demands);
            }
            assert_eq!(all_consistent, feasible);
        }
    }
}
