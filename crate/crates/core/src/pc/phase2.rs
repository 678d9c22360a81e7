//! Phase 2: prune contracted edges hanging off dead vertices.
//!
//! An edge of the input graph is incident to a contraction-forest vertex `x`
//! when exactly one endpoint lies in `S_x`. While some dead `x` has exactly one
//! incident forest edge and that edge is not saved, the edge is dropped. An
//! edge that becomes removable stays removable, so the result does not depend
//! on the removal order.

use std::collections::BTreeSet;

use super::segtree::{AddMinTree, MinTree};
use super::tree::ContractionTree;
use super::Phase1Output;
use crate::graph::{EdgeId, Graph, VertexId};

const RETIRED: i64 = 1 << 40;

/// Reference pruning: recompute every incidence set after each deletion.
pub fn phase2_naive(g0: &Graph, p1: &Phase1Output) -> Vec<EdgeId> {
    let tree = ContractionTree::new(p1);
    let members: Vec<BTreeSet<usize>> =
        (0..tree.len()).map(|x| tree.leaves(x).into_iter().map(|v| v.index()).collect()).collect();
    let mut f2: BTreeSet<EdgeId> = p1.f1.iter().copied().collect();
    'outer: loop {
        for (x, s) in members.iter().enumerate() {
            if !p1.is_dead(VertexId(x as u32)) {
                continue;
            }
            let incident: Vec<EdgeId> = f2
                .iter()
                .copied()
                .filter(|&e| {
                    let ed = g0.e(e);
                    s.contains(&ed.u.index()) != s.contains(&ed.v.index())
                })
                .collect();
            if incident.len() == 1 && !p1.save.contains(&incident[0]) {
                f2.remove(&incident[0]);
                continue 'outer;
            }
        }
        break;
    }
    f2.into_iter().collect()
}

/// Pruning with crossing counts kept in a segment tree over the heavy-light
/// layout of the contraction forest.
pub fn phase2(g0: &Graph, p1: &Phase1Output) -> Vec<EdgeId> {
    let tree = ContractionTree::new(p1);
    let n = tree.len();
    let mut init = vec![0i64; n];
    for x in 0..n {
        if !p1.is_dead(VertexId(x as u32)) {
            init[tree.pos[x]] = RETIRED;
        }
    }
    let mut counts = AddMinTree::new(&init);
    // per leaf position: (depth of the edge's lca, edge)
    let mut at_leaf: Vec<BTreeSet<(usize, EdgeId)>> = vec![BTreeSet::new(); n];
    let mut lowest = MinTree::new(n);
    let mut lca_of = std::collections::HashMap::new();
    for &e in &p1.f1 {
        let ed = g0.e(e);
        let (a, b) = (ed.u.index(), ed.v.index());
        let w = tree.lca(a, b).expect("contracted edges stay inside one tree");
        lca_of.insert(e, w);
        for x in [a, b] {
            for r in tree.path_ranges(x, w) {
                counts.add(r, 1);
            }
            at_leaf[tree.pos[x]].insert((tree.depth[w], e));
        }
    }
    for (p, set) in at_leaf.iter().enumerate() {
        lowest.set(p, set.first().copied());
    }
    let mut f2: BTreeSet<EdgeId> = p1.f1.iter().copied().collect();
    while let Some((p, value)) = counts.find_at_most(1) {
        let x = tree.at[p];
        if value <= 0 {
            counts.add(p..p + 1, RETIRED);
            continue;
        }
        let (dw, e) = lowest.min(tree.subtree(x)).expect("one crossing edge");
        debug_assert!(dw < tree.depth[x]);
        if p1.save.contains(&e) {
            counts.add(p..p + 1, RETIRED);
            continue;
        }
        f2.remove(&e);
        let ed = g0.e(e);
        let w = lca_of[&e];
        for v in [ed.u.index(), ed.v.index()] {
            for r in tree.path_ranges(v, w) {
                counts.add(r, -1);
            }
            let lp = tree.pos[v];
            at_leaf[lp].remove(&(tree.depth[w], e));
            lowest.set(lp, at_leaf[lp].first().copied());
        }
    }
    f2.into_iter().collect()
}

/// Number of edges of `f2` incident to each contraction-forest vertex.
pub fn crossing_counts(g0: &Graph, tree: &ContractionTree, f2: &[EdgeId]) -> Vec<usize> {
    let n = tree.len();
    let mut val = vec![0i64; n];
    for &e in f2 {
        let ed = g0.e(e);
        let (a, b) = (ed.u.index(), ed.v.index());
        val[a] += 1;
        val[b] += 1;
        if let Some(w) = tree.lca(a, b) {
            val[w] -= 2;
        }
    }
    // children precede parents in id order
    for x in 0..n {
        if let Some(p) = tree.parent[x] {
            val[p] += val[x];
        }
    }
    val.into_iter().map(|v| v as usize).collect()
}
