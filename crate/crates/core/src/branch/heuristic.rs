//! Decomposition by recursive edge bisection: breadth-first halves refined by
//! single-edge moves that shrink the two boundaries.

use std::collections::{HashMap, VecDeque};

use super::{BranchDecomposition, NodeId};
use crate::graph::{EdgeId, Graph, VertexId};

const PASSES: usize = 3;

/// Deterministic decomposition of all edges of `g`, with no width guarantee.
pub fn heuristic_decompose(g: &Graph) -> BranchDecomposition {
    let mut bd = BranchDecomposition::new();
    let edges: Vec<EdgeId> = g.edge_ids();
    let root = (!edges.is_empty()).then(|| split(g, edges, &mut bd));
    bd.set_root(root);
    bd
}

fn split(g: &Graph, set: Vec<EdgeId>, bd: &mut BranchDecomposition) -> NodeId {
    if set.len() == 1 {
        return bd.add_leaf(set[0]);
    }
    let (a, b) = bisect(g, &set);
    let x = split(g, a, bd);
    let y = split(g, b, bd);
    bd.add_join(x, y)
}

/// Orders `set` by breadth-first distance from a far-out vertex of its
/// subgraph, so that prefixes are compact.
fn bfs_order(g: &Graph, set: &[EdgeId]) -> Vec<EdgeId> {
    let mut adj: HashMap<VertexId, Vec<(EdgeId, VertexId)>> = HashMap::new();
    for &e in set {
        let ed = g.e(e);
        adj.entry(ed.u).or_default().push((e, ed.v));
        adj.entry(ed.v).or_default().push((e, ed.u));
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    let mut verts: Vec<VertexId> = adj.keys().copied().collect();
    verts.sort_unstable();
    let bfs = |starts: &[VertexId]| -> HashMap<VertexId, usize> {
        let mut dist = HashMap::new();
        let mut next_start = 0;
        let mut q = VecDeque::new();
        let mut layer_base = 0;
        loop {
            if q.is_empty() {
                while next_start < starts.len() && dist.contains_key(&starts[next_start]) {
                    next_start += 1;
                }
                let Some(&s) = starts.get(next_start) else { break };
                dist.insert(s, layer_base);
                q.push_back(s);
            }
            while let Some(x) = q.pop_front() {
                let dx = dist[&x];
                layer_base = layer_base.max(dx + 1);
                for &(_, y) in &adj[&x] {
                    if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(y) {
                        slot.insert(dx + 1);
                        q.push_back(y);
                    }
                }
            }
        }
        dist
    };
    let first = bfs(&verts);
    let far = verts.iter().copied().max_by_key(|v| (first[v], std::cmp::Reverse(*v))).unwrap();
    let mut starts = vec![far];
    starts.extend(verts.iter().copied());
    let dist = bfs(&starts);
    let mut order = set.to_vec();
    order.sort_by_key(|&e| {
        let ed = g.e(e);
        (dist[&ed.u].min(dist[&ed.v]), dist[&ed.u].max(dist[&ed.v]), e)
    });
    order
}

fn in_boundary(count: usize, v: VertexId, g: &Graph) -> bool {
    count > 0 && count < g.degree(v)
}

fn bisect(g: &Graph, set: &[EdgeId]) -> (Vec<EdgeId>, Vec<EdgeId>) {
    let order = bfs_order(g, set);
    let n = order.len();
    let half = n / 2;
    let (lo, hi) = (n.div_ceil(3), (2 * n / 3).max(1));
    let mut side: HashMap<EdgeId, bool> = order.iter().enumerate().map(|(i, &e)| (e, i < half)).collect();
    let mut count_a: HashMap<VertexId, usize> = HashMap::new();
    let mut count_b: HashMap<VertexId, usize> = HashMap::new();
    for (&e, &in_a) in &side {
        let ed = g.e(e);
        let c = if in_a { &mut count_a } else { &mut count_b };
        *c.entry(ed.u).or_default() += 1;
        *c.entry(ed.v).or_default() += 1;
    }
    let mut size_a = half;
    let cost_at =
        |v: VertexId, ca: usize, cb: usize| -> i64 { in_boundary(ca, v, g) as i64 + in_boundary(cb, v, g) as i64 };
    for _ in 0..PASSES {
        let mut improved = false;
        for &e in &order {
            let in_a = side[&e];
            let new_size = if in_a { size_a - 1 } else { size_a + 1 };
            if new_size < lo || new_size > hi {
                continue;
            }
            let ed = g.e(e);
            let mut delta = 0;
            for v in [ed.u, ed.v] {
                let (ca, cb) = (count_a.get(&v).copied().unwrap_or(0), count_b.get(&v).copied().unwrap_or(0));
                let (na, nb) = if in_a { (ca - 1, cb + 1) } else { (ca + 1, cb - 1) };
                delta += cost_at(v, na, nb) - cost_at(v, ca, cb);
            }
            if delta < 0 {
                for v in [ed.u, ed.v] {
                    let (from, to) = if in_a { (&mut count_a, &mut count_b) } else { (&mut count_b, &mut count_a) };
                    *from.get_mut(&v).unwrap() -= 1;
                    *to.entry(v).or_default() += 1;
                }
                side.insert(e, !in_a);
                size_a = new_size;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let (a, b): (Vec<EdgeId>, Vec<EdgeId>) = order.iter().partition(|e| side[e]);
    (a, b)
}
