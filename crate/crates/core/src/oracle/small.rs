//! Every connected simple graph up to a given edge count, one per
//! isomorphism class.

use std::collections::BTreeSet;

use crate::graph::{length, Graph, VertexId};

/// A simple graph stored as a sorted list of vertex pairs on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SmallGraph {
    pub n: usize,
    pub edges: Vec<(u8, u8)>,
}

impl SmallGraph {
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::with_vertices(self.n);
        for &(a, b) in &self.edges {
            g.add_edge(VertexId(a as u32), VertexId(b as u32), length(1)).expect("distinct endpoints");
        }
        g
    }

    fn has(&self, a: u8, b: u8) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    fn with_edge(&self, a: u8, b: u8) -> SmallGraph {
        let mut edges = self.edges.clone();
        edges.push((a.min(b), a.max(b)));
        edges.sort_unstable();
        SmallGraph { n: self.n.max(a.max(b) as usize + 1), edges }
    }

    /// Lexicographically least relabelling among orderings that sort
    /// vertices by descending degree.
    fn canonical(&self) -> SmallGraph {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(deg[v]));
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match classes.last_mut() {
                Some(c) if deg[c[0]] == deg[v] => c.push(v),
                _ => classes.push(vec![v]),
            }
        }
        let mut best: Option<SmallGraph> = None;
        let mut slot = vec![0u8; self.n];
        permute_classes(&classes, 0, 0, &mut slot, &mut |slot| {
            let mut edges: Vec<(u8, u8)> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (slot[a as usize], slot[b as usize]);
                    (x.min(y), x.max(y))
                })
                .collect();
            edges.sort_unstable();
            let cand = SmallGraph { n: self.n, edges };
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        });
        best.unwrap_or_else(|| self.clone())
    }
}

fn permute_classes(classes: &[Vec<usize>], ci: usize, base: usize, slot: &mut [u8], f: &mut impl FnMut(&[u8])) {
    let Some(class) = classes.get(ci) else {
        f(slot);
        return;
    };
    let mut perm = class.clone();
    heap_permutations(&mut perm, class.len(), &mut |p| {
        for (i, &v) in p.iter().enumerate() {
            slot[v] = (base + i) as u8;
        }
        permute_classes(classes, ci + 1, base + class.len(), slot, f);
    });
}

fn heap_permutations(a: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(a);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(a, k - 1, f);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permutations(a, k - 1, f);
}

/// Connected simple graphs with `1..=max_edges` edges, up to isomorphism,
/// ordered by edge count.
pub fn connected_graphs(max_edges: usize) -> Vec<SmallGraph> {
    let mut out = Vec::new();
    let mut layer: BTreeSet<SmallGraph> = BTreeSet::new();
    layer.insert(SmallGraph { n: 2, edges: vec![(0, 1)] });
    for _ in 1..=max_edges {
        out.extend(layer.iter().cloned());
        let mut next = BTreeSet::new();
        for g in &layer {
            let n = g.n as u8;
            for a in 0..n {
                for b in a + 1..n {
                    if !g.has(a, b) {
                        next.insert(g.with_edge(a, b).canonical());
                    }
                }
                next.insert(g.with_edge(a, n).canonical());
            }
        }
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        let all = connected_graphs(7);
        let mut per = [0usize; 8];
        for g in &all {
            per[g.edges.len()] += 1;
        }
        assert_eq!(&per[1..], &[1, 1, 3, 5, 12, 30, 79]);
        assert_eq!(all.len(), 131);
        for g in &all {
            let h = g.to_graph();
            assert_eq!(h.connected_components(&h.edge_ids()).len(), 1);
        }
    }
}
