use std::collections::BTreeSet;

use super::heap::{GroupId, MeldArena, NodeId};
use super::{check_bicategory, Bicategory, Category, EdgeQueue, QueueError};
use crate::dsu::DisjointSets;
use crate::graph::{EdgeId, Length, VertexId};

const NO_NODE: NodeId = NodeId(u32::MAX);

#[derive(Clone, Debug)]
struct EdgeRec {
    tail: VertexId,
    head: VertexId,
    live: bool,
    node: NodeId,
    out_pos: usize,
}

#[derive(Clone, Debug)]
struct Heap {
    root: Option<NodeId>,
    group: GroupId,
    label: Length,
    vertex: VertexId,
    cat: Category,
    /// Entry currently filed in a bicategory set: (set index, key, min edge).
    filed: Option<(usize, Length, EdgeId)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrientationStats {
    pub flips: usize,
    /// Searches that found no vertex with spare outdegree.
    pub failures: usize,
    pub max_outdegree: usize,
}

/// Mergeable-heap edge queue with a bounded-outdegree orientation.
///
/// Each edge is oriented; it is owned by its tail's out-list and sits in the
/// heap `IN[head, category(tail)]`. Every heap is filed in the set of its
/// bicategory under the key `heap label + heap min`. The true cost of an edge
/// is its key inside the heap plus the heap label plus the bicategory label,
/// so a bulk decrease is one label update.
#[derive(Clone, Debug)]
pub struct CategoryQueue {
    k: usize,
    bound: usize,
    budget: Option<usize>,
    category: Vec<Option<Category>>,
    alias: DisjointSets,
    alias_cur: Vec<VertexId>,
    out: Vec<Vec<EdgeId>>,
    edges: Vec<EdgeRec>,
    in_heap: Vec<Vec<Option<usize>>>,
    heaps: Vec<Heap>,
    heap_of_group: Vec<usize>,
    b_label: Vec<Length>,
    b_set: Vec<BTreeSet<(Length, EdgeId, usize)>>,
    arena: MeldArena,
    seen: Vec<u32>,
    seen_gen: u32,
    stats: OrientationStats,
}

pub const DEFAULT_OUTDEGREE: usize = 9;
pub const DEFAULT_SEARCH_BUDGET: usize = 512;

impl CategoryQueue {
    /// Edge `i` of `edges` gets id `i`; self-loops are accepted and dropped.
    pub fn new(categories: Vec<Category>, k: usize, edges: &[(VertexId, VertexId, Length)]) -> Self {
        Self::with_orientation(categories, k, edges, DEFAULT_OUTDEGREE, Some(DEFAULT_SEARCH_BUDGET))
    }

    pub fn with_orientation(
        categories: Vec<Category>,
        k: usize,
        edges: &[(VertexId, VertexId, Length)],
        bound: usize,
        budget: Option<usize>,
    ) -> Self {
        Self::build(categories, k, edges, bound, budget, true)
    }

    /// Orients every edge from its first endpoint and leaves overfull
    /// vertices as they are.
    pub fn from_oriented(
        categories: Vec<Category>,
        k: usize,
        edges: &[(VertexId, VertexId, Length)],
        bound: usize,
        budget: Option<usize>,
    ) -> Self {
        Self::build(categories, k, edges, bound, budget, false)
    }

    fn build(
        categories: Vec<Category>,
        k: usize,
        edges: &[(VertexId, VertexId, Length)],
        bound: usize,
        budget: Option<usize>,
        greedy: bool,
    ) -> Self {
        assert!(categories.iter().all(|&c| c < k));
        assert!(bound >= 1);
        let n = categories.len();
        let mut q = Self {
            k,
            bound,
            budget,
            category: categories.into_iter().map(Some).collect(),
            alias: DisjointSets::new(n),
            alias_cur: (0..n as u32).map(VertexId).collect(),
            out: vec![Vec::new(); n],
            edges: Vec::with_capacity(edges.len()),
            in_heap: vec![vec![None; k]; n],
            heaps: Vec::new(),
            heap_of_group: Vec::new(),
            b_label: vec![Length::from_integer(0); k * k],
            b_set: vec![BTreeSet::new(); k * k],
            arena: MeldArena::new(),
            seen: vec![0; n],
            seen_gen: 0,
            stats: OrientationStats::default(),
        };
        for (i, &(u, v, cost)) in edges.iter().enumerate() {
            let id = EdgeId(i as u32);
            let (tail, head) = if greedy && q.out[v.index()].len() < q.out[u.index()].len() { (v, u) } else { (u, v) };
            q.edges.push(EdgeRec { tail, head, live: u != v, node: NO_NODE, out_pos: 0 });
            if u == v {
                continue;
            }
            q.push_out(tail, id);
            q.place(id, cost);
            if greedy && q.out[tail.index()].len() > q.bound {
                let _ = q.reorient_for_insertion(tail);
            }
        }
        q
    }

    pub fn stats(&self) -> &OrientationStats {
        &self.stats
    }

    pub fn outdegree_bound(&self) -> usize {
        self.bound
    }

    pub fn outdegree(&self, v: VertexId) -> usize {
        self.out.get(v.index()).map_or(0, |o| o.len())
    }

    /// Live vertices whose outdegree exceeds the bound.
    pub fn overfull_vertices(&self) -> Vec<VertexId> {
        (0..self.category.len())
            .filter(|&i| self.category[i].is_some() && self.out[i].len() > self.bound)
            .map(|i| VertexId(i as u32))
            .collect()
    }

    fn resolve(&mut self, v: VertexId) -> VertexId {
        self.alias_cur[self.alias.find(v.index())]
    }

    fn bidx(&self, h: usize) -> usize {
        let heap = &self.heaps[h];
        Bicategory::new(self.category[heap.vertex.index()].unwrap(), heap.cat).index(self.k)
    }

    fn push_out(&mut self, v: VertexId, e: EdgeId) {
        self.edges[e.index()].out_pos = self.out[v.index()].len();
        self.out[v.index()].push(e);
        self.stats.max_outdegree = self.stats.max_outdegree.max(self.out[v.index()].len());
    }

    fn remove_out(&mut self, v: VertexId, e: EdgeId) {
        let pos = self.edges[e.index()].out_pos;
        let list = &mut self.out[v.index()];
        debug_assert_eq!(list[pos], e);
        list.swap_remove(pos);
        if let Some(&moved) = list.get(pos) {
            self.edges[moved.index()].out_pos = pos;
        }
    }

    fn heap_for(&mut self, v: VertexId, c: Category) -> usize {
        if let Some(h) = self.in_heap[v.index()][c] {
            return h;
        }
        let group = self.arena.new_group();
        let h = self.heaps.len();
        self.heaps.push(Heap { root: None, group, label: Length::from_integer(0), vertex: v, cat: c, filed: None });
        if self.heap_of_group.len() <= group.0 as usize {
            self.heap_of_group.resize(group.0 as usize + 1, usize::MAX);
        }
        self.heap_of_group[group.0 as usize] = h;
        self.in_heap[v.index()][c] = Some(h);
        h
    }

    fn valid(&self, n: NodeId) -> bool {
        let e = self.arena.edge(n);
        let rec = &self.edges[e.index()];
        rec.live && rec.node == n
    }

    fn clean(&mut self, h: usize) {
        while let Some(r) = self.heaps[h].root {
            if self.valid(r) {
                break;
            }
            self.heaps[h].root = self.arena.pop(r);
        }
    }

    fn unfile(&mut self, h: usize) {
        if let Some((idx, key, edge)) = self.heaps[h].filed.take() {
            self.b_set[idx].remove(&(key, edge, h));
        }
    }

    /// Recomputes the heap's entry in its bicategory set.
    fn refile(&mut self, h: usize) {
        self.unfile(h);
        self.clean(h);
        if let Some(r) = self.heaps[h].root {
            let idx = self.bidx(h);
            let key = self.heaps[h].label + self.arena.key(r);
            let edge = self.arena.edge(r);
            self.b_set[idx].insert((key, edge, h));
            self.heaps[h].filed = Some((idx, key, edge));
        }
    }

    fn heap_of_node(&mut self, n: NodeId) -> usize {
        let g = self.arena.group_of(n);
        self.heap_of_group[g.0 as usize]
    }

    fn edge_cost(&mut self, e: EdgeId) -> Length {
        let n = self.edges[e.index()].node;
        let key = self.arena.key(n);
        let h = self.heap_of_node(n);
        key + self.heaps[h].label + self.b_label[self.bidx(h)]
    }

    /// Files a live edge into `IN[head, category(tail)]` with the given cost.
    fn place(&mut self, e: EdgeId, cost: Length) {
        let rec = &self.edges[e.index()];
        let (t, hd) = (rec.tail, rec.head);
        let (t, hd) = (self.resolve(t), self.resolve(hd));
        let c = self.category[t.index()].unwrap();
        let h = self.heap_for(hd, c);
        let rel = cost - self.heaps[h].label - self.b_label[self.bidx(h)];
        let (root, node) = self.arena.insert(self.heaps[h].root, self.heaps[h].group, rel, e, 0);
        self.heaps[h].root = Some(root);
        self.edges[e.index()].node = node;
        self.refile(h);
    }

    fn flip(&mut self, e: EdgeId) {
        let cost = self.edge_cost(e);
        let rec = &self.edges[e.index()];
        let (t, hd) = (rec.tail, rec.head);
        let (t, hd) = (self.resolve(t), self.resolve(hd));
        self.remove_out(t, e);
        self.edges[e.index()].tail = hd;
        self.edges[e.index()].head = t;
        self.push_out(hd, e);
        self.place(e, cost);
        self.stats.flips += 1;
    }

    /// Flips edges along out-paths from `v` until its outdegree is within the
    /// bound. On failure every vertex reachable from `v` along out-edges had no
    /// spare outdegree, so that vertex set spans more than `bound` edges per
    /// vertex.
    pub fn reorient_for_insertion(&mut self, v: VertexId) -> Result<Vec<EdgeId>, QueueError> {
        let mut flips = Vec::new();
        while self.out[v.index()].len() > self.bound {
            let Some(path) = self.path_to_slack(v) else {
                self.stats.failures += 1;
                return Err(QueueError::OrientationInfeasible { vertex: v, bound: self.bound });
            };
            for e in path {
                self.flip(e);
                flips.push(e);
            }
        }
        Ok(flips)
    }

    fn path_to_slack(&mut self, v: VertexId) -> Option<Vec<EdgeId>> {
        self.seen_gen += 1;
        if self.seen.len() < self.category.len() {
            self.seen.resize(self.category.len(), 0);
        }
        let gen = self.seen_gen;
        self.seen[v.index()] = gen;
        let mut queue = vec![(v, None::<usize>, None::<EdgeId>)];
        let mut i = 0;
        while i < queue.len() {
            if self.budget.is_some_and(|b| i >= b) {
                return None;
            }
            let (x, _, _) = queue[i];
            if x != v && self.out[x.index()].len() < self.bound {
                let mut path = Vec::new();
                let mut j = i;
                while let (_, Some(p), Some(e)) = queue[j] {
                    path.push(e);
                    j = p;
                }
                path.reverse();
                return Some(path);
            }
            for k in 0..self.out[x.index()].len() {
                let e = self.out[x.index()][k];
                let y = self.edges[e.index()].head;
                let y = self.resolve(y);
                if self.seen[y.index()] != gen {
                    self.seen[y.index()] = gen;
                    queue.push((y, Some(i), Some(e)));
                }
            }
            i += 1;
        }
        None
    }

    fn live_vertex(&self, v: VertexId) -> Result<Category, QueueError> {
        self.category.get(v.index()).copied().flatten().ok_or(QueueError::UnknownVertex(v))
    }

    fn kill(&mut self, e: EdgeId) {
        let t = self.edges[e.index()].tail;
        let t = self.resolve(t);
        self.remove_out(t, e);
        self.edges[e.index()].live = false;
    }

    /// Checks the representation against its invariants: every live edge is
    /// in its tail's out-list and in the heap of its head and tail category,
    /// and every nonempty heap is filed under a key not above its minimum.
    pub fn check_invariants(&mut self) -> Result<(), String> {
        for i in 0..self.edges.len() {
            let e = EdgeId(i as u32);
            if !self.edges[i].live {
                continue;
            }
            let rec = self.edges[i].clone();
            let (t, hd) = (self.resolve(rec.tail), self.resolve(rec.head));
            if t == hd {
                return Err(format!("{e} is a live self-loop"));
            }
            if self.out[t.index()].get(rec.out_pos) != Some(&e) {
                return Err(format!("{e} missing from the out-list of {t}"));
            }
            if self.arena.edge(rec.node) != e {
                return Err(format!("{e} points at a foreign heap node"));
            }
            let h = self.heap_of_node(rec.node);
            let heap = &self.heaps[h];
            if heap.vertex != hd || Some(heap.cat) != self.category[t.index()] {
                return Err(format!("{e} is filed in the wrong heap"));
            }
            let Some((idx, key, _)) = heap.filed else {
                return Err(format!("heap holding {e} is not filed"));
            };
            if idx != self.bidx(h) {
                return Err(format!("heap holding {e} is filed under the wrong bicategory"));
            }
            let own = self.heaps[h].label + self.arena.key(rec.node);
            if key > own {
                return Err(format!("filed key of the heap holding {e} exceeds its entry"));
            }
        }
        Ok(())
    }
}

impl EdgeQueue for CategoryQueue {
    fn decrease_cost(&mut self, b: Bicategory, delta: Length) -> Result<(), QueueError> {
        check_bicategory(b, self.k)?;
        if delta < Length::from_integer(0) {
            return Err(QueueError::NegativeDecrease);
        }
        self.b_label[b.index(self.k)] -= delta;
        Ok(())
    }

    fn find_min(&mut self, b: Bicategory) -> Result<(EdgeId, Length), QueueError> {
        check_bicategory(b, self.k)?;
        let idx = b.index(self.k);
        loop {
            let Some(&(key, edge, h)) = self.b_set[idx].first() else {
                return Err(QueueError::Empty(b));
            };
            self.clean(h);
            let actual = match self.heaps[h].root {
                Some(r) => Some((self.heaps[h].label + self.arena.key(r), self.arena.edge(r))),
                None => None,
            };
            if actual == Some((key, edge)) {
                return Ok((edge, key + self.b_label[idx]));
            }
            self.refile(h);
        }
    }

    fn change_category(&mut self, v: VertexId, c: Category) -> Result<(), QueueError> {
        let c0 = self.live_vertex(v)?;
        if c >= self.k {
            return Err(QueueError::UnknownCategory(c));
        }
        if c0 == c {
            return Ok(());
        }
        let outs = self.out[v.index()].clone();
        let costs: Vec<Length> = outs.iter().map(|&e| self.edge_cost(e)).collect();
        self.category[v.index()] = Some(c);
        for cp in 0..self.k {
            if let Some(h) = self.in_heap[v.index()][cp] {
                let old = self.b_label[Bicategory::new(c0, cp).index(self.k)];
                let new = self.b_label[Bicategory::new(c, cp).index(self.k)];
                self.heaps[h].label += old - new;
                self.refile(h);
            }
        }
        for (e, cost) in outs.into_iter().zip(costs) {
            self.place(e, cost);
        }
        Ok(())
    }

    fn contract_edge(&mut self, e: EdgeId, c: Category) -> Result<VertexId, QueueError> {
        if c >= self.k {
            return Err(QueueError::UnknownCategory(c));
        }
        let rec = self.edges.get(e.index()).filter(|r| r.live).cloned().ok_or(QueueError::UnknownEdge(e))?;
        let (x, y) = (self.resolve(rec.tail), self.resolve(rec.head));
        if x == y {
            return Err(QueueError::SelfLoop(e));
        }
        self.change_category(x, c)?;
        self.change_category(y, c)?;
        for t in [x, y] {
            let loops: Vec<EdgeId> = self.out[t.index()]
                .clone()
                .into_iter()
                .filter(|&f| {
                    let hd = self.edges[f.index()].head;
                    let hd = self.resolve(hd);
                    hd == x || hd == y
                })
                .collect();
            for f in loops {
                self.kill(f);
            }
        }
        let w = VertexId(self.category.len() as u32);
        self.category.push(Some(c));
        self.category[x.index()] = None;
        self.category[y.index()] = None;
        self.alias.grow(w.index() + 1);
        self.alias.union(x.index(), y.index());
        self.alias.union(x.index(), w.index());
        let root = self.alias.find(w.index());
        self.alias_cur.push(w);
        self.alias_cur[root] = w;
        let mut outs = std::mem::take(&mut self.out[x.index()]);
        outs.extend(std::mem::take(&mut self.out[y.index()]));
        for (i, &f) in outs.iter().enumerate() {
            self.edges[f.index()].out_pos = i;
        }
        self.out.push(outs);
        self.stats.max_outdegree = self.stats.max_outdegree.max(self.out[w.index()].len());
        let hx = std::mem::take(&mut self.in_heap[x.index()]);
        let hy = std::mem::take(&mut self.in_heap[y.index()]);
        let mut hw = vec![None; self.k];
        for cp in 0..self.k {
            let merged = match (hx[cp], hy[cp]) {
                (Some(a), Some(b)) => {
                    self.unfile(a);
                    self.unfile(b);
                    let (ga, _) = self.arena.find(self.heaps[a].group);
                    let (gb, _) = self.arena.find(self.heaps[b].group);
                    let shift = self.heaps[b].label - self.heaps[a].label;
                    let ga = self.arena.union_groups(ga, gb, shift);
                    let root = self.arena.meld(self.heaps[a].root, self.heaps[b].root);
                    self.heaps[a].root = root;
                    self.heaps[a].group = ga;
                    self.heap_of_group[ga.0 as usize] = a;
                    self.heaps[b].root = None;
                    Some(a)
                }
                (a, b) => a.or(b),
            };
            if let Some(h) = merged {
                self.heaps[h].vertex = w;
                self.refile(h);
            }
            hw[cp] = merged;
        }
        self.in_heap.push(hw);
        if self.out[w.index()].len() > self.bound {
            let _ = self.reorient_for_insertion(w);
        }
        Ok(w)
    }

    fn category(&self, v: VertexId) -> Option<Category> {
        self.category.get(v.index()).copied().flatten()
    }

    fn cost(&mut self, e: EdgeId) -> Option<Length> {
        if self.edges.get(e.index()).is_some_and(|r| r.live) {
            Some(self.edge_cost(e))
        } else {
            None
        }
    }

    fn endpoints(&mut self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        let rec = self.edges.get(e.index()).filter(|r| r.live)?;
        let (t, h) = (rec.tail, rec.head);
        Some((self.resolve(t), self.resolve(h)))
    }

    fn live_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&i| self.edges[i].live).map(|i| EdgeId(i as u32)).collect()
    }

    fn live_vertices(&self) -> Vec<VertexId> {
        (0..self.category.len()).filter(|&i| self.category[i].is_some()).map(|i| VertexId(i as u32)).collect()
    }

    fn categories(&self) -> usize {
        self.k
    }
}
