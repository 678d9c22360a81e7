//! Undirected multigraph with exact rational lengths and stable edge ids.
//!
//! Vertices and edges live in id-indexed slots, so subgraphs and contracted
//! graphs keep the ids of the graph they came from. Contraction coalesces the
//! two endpoints of an edge into a fresh vertex; edges that become self-loops
//! are dropped, parallel edges are kept.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSets;

/// Exact edge length. Input lengths are integers; halving during the
/// primal-dual simulation needs exact fractions.
pub type Length = Ratio<i128>;

pub fn length(n: i64) -> Length {
    Length::from_integer(n as i128)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("edge {0} would be a self-loop")]
    SelfLoop(VertexId),
    #[error("negative length on edge between {0} and {1}")]
    NegativeLength(VertexId, VertexId),
    #[error("demand endpoints coincide at {0}")]
    DegenerateDemand(VertexId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub len: Length,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

/// A terminal pair that a feasible forest must connect.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Demand {
    pub s: VertexId,
    pub t: VertexId,
}

impl Demand {
    pub fn new(s: VertexId, t: VertexId) -> Result<Self, GraphError> {
        if s == t {
            return Err(GraphError::DegenerateDemand(s));
        }
        Ok(Self { s, t })
    }
}

/// Sorted set of edge ids of some reference graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forest {
    pub edges: Vec<EdgeId>,
}

impl Forest {
    pub fn new(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn length(&self, g: &Graph) -> Length {
        g.length_of(&self.edges)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Graph {
    alive: Vec<bool>,
    adj: Vec<Vec<EdgeId>>,
    edges: Vec<Option<Edge>>,
    live_vertices: usize,
    live_edges: usize,
}

/// Result of contracting one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub edge: EdgeId,
    pub merged: VertexId,
    pub children: (VertexId, VertexId),
    /// Parallel copies of the contracted edge, now self-loops and removed.
    pub dropped_loops: Vec<EdgeId>,
}

/// Provenance of a sequence of contractions: the contraction forest and the
/// set of original vertices behind every vertex.
#[derive(Clone, Debug, Default)]
pub struct ContractionRecord {
    parent: BTreeMap<VertexId, VertexId>,
    children: BTreeMap<VertexId, (VertexId, VertexId)>,
    members: BTreeMap<VertexId, Vec<VertexId>>,
}

impl ContractionRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply(&mut self, c: &Contraction) {
        let (a, b) = c.children;
        let mut set = self.members(a);
        set.extend(self.members(b));
        set.sort_unstable();
        self.parent.insert(a, c.merged);
        self.parent.insert(b, c.merged);
        self.children.insert(c.merged, c.children);
        self.members.insert(c.merged, set);
    }

    /// The original vertices coalesced into `v` (`{v}` for an original vertex).
    pub fn members(&self, v: VertexId) -> Vec<VertexId> {
        self.members.get(&v).cloned().unwrap_or_else(|| vec![v])
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(&v).copied()
    }

    pub fn children(&self, v: VertexId) -> Option<(VertexId, VertexId)> {
        self.children.get(&v).copied()
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.alive.len() as u32);
        self.alive.push(true);
        self.adj.push(Vec::new());
        self.live_vertices += 1;
        id
    }

    /// Makes sure vertex slot `v` exists and is live.
    pub fn ensure_vertex(&mut self, v: VertexId) {
        while self.alive.len() <= v.index() {
            self.alive.push(false);
            self.adj.push(Vec::new());
        }
        if !self.alive[v.index()] {
            self.alive[v.index()] = true;
            self.live_vertices += 1;
        }
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, len: Length) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.edges.len() as u32);
        self.insert_edge(id, u, v, len)?;
        Ok(id)
    }

    /// Inserts an edge under a caller-chosen id (used to build subgraphs that
    /// share ids with their parent graph).
    pub fn insert_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId, len: Length) -> Result<(), GraphError> {
        for x in [u, v] {
            if !self.has_vertex(x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if len < Length::zero() {
            return Err(GraphError::NegativeLength(u, v));
        }
        while self.edges.len() <= id.index() {
            self.edges.push(None);
        }
        assert!(self.edges[id.index()].is_none(), "edge id {id} reused");
        self.edges[id.index()] = Some(Edge { id, u, v, len });
        self.adj[u.index()].push(id);
        self.adj[v.index()].push(id);
        self.live_edges += 1;
        Ok(())
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(e.index()), Some(Some(_)))
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(e.index()).and_then(|x| x.as_ref())
    }

    /// Panicking accessor for ids known to be live.
    pub fn e(&self, e: EdgeId) -> &Edge {
        self.edge(e).unwrap_or_else(|| panic!("edge {e} not in graph"))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| VertexId(i as u32))
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter_map(|e| e.as_ref())
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges().map(|e| e.id).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.live_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.live_edges
    }

    /// One past the largest vertex id ever allocated.
    pub fn vertex_bound(&self) -> usize {
        self.alive.len()
    }

    pub fn edge_bound(&self) -> usize {
        self.edges.len()
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.adj.get(v.index()).map(|a| a.as_slice()).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v).len()
    }

    pub fn total_length(&self) -> Length {
        self.edges().map(|e| e.len).sum()
    }

    pub fn length_of(&self, edges: &[EdgeId]) -> Length {
        edges.iter().map(|&e| self.e(e).len).sum()
    }

    /// Coalesces the endpoints of `e` into a fresh vertex.
    pub fn contract_edge(&mut self, e: EdgeId) -> Result<Contraction, GraphError> {
        let edge = self.edge(e).cloned().ok_or(GraphError::UnknownEdge(e))?;
        let (a, b) = (edge.u, edge.v);
        let w = self.add_vertex();
        let mut dropped = Vec::new();
        let mut merged = Vec::new();
        for x in [a, b] {
            for id in std::mem::take(&mut self.adj[x.index()]) {
                let Some(ed) = self.edges[id.index()].as_mut() else { continue };
                let is_loop = (ed.u == a || ed.u == b) && (ed.v == a || ed.v == b);
                if is_loop {
                    if x == a {
                        if id != e {
                            dropped.push(id);
                        }
                        self.edges[id.index()] = None;
                        self.live_edges -= 1;
                    }
                    continue;
                }
                if ed.u == x {
                    ed.u = w;
                } else {
                    ed.v = w;
                }
                merged.push(id);
            }
            self.alive[x.index()] = false;
            self.live_vertices -= 1;
        }
        self.adj[w.index()] = merged;
        dropped.sort_unstable();
        Ok(Contraction { edge: e, merged: w, children: (a, b), dropped_loops: dropped })
    }

    /// Subgraph on the given edges. Vertex and edge ids are preserved; only
    /// vertices touched by the edges are present.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Graph {
        let mut g = Graph::new();
        for &id in edges {
            let ed = self.e(id);
            g.ensure_vertex(ed.u);
            g.ensure_vertex(ed.v);
            g.insert_edge(id, ed.u, ed.v, ed.len).expect("valid edge");
        }
        g
    }

    /// Subgraph induced by `vertices`, ids preserved.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Graph {
        let mut inside = vec![false; self.vertex_bound()];
        let mut g = Graph::new();
        for &v in vertices {
            inside[v.index()] = true;
            g.ensure_vertex(v);
        }
        for ed in self.edges() {
            if inside[ed.u.index()] && inside[ed.v.index()] {
                g.insert_edge(ed.id, ed.u, ed.v, ed.len).expect("valid edge");
            }
        }
        g
    }

    /// Contracts every edge of `edges` at once. Each class of coalesced
    /// vertices is represented by its smallest member; other edges keep their
    /// ids and lengths, loops are dropped.
    pub fn quotient(&self, edges: &[EdgeId]) -> Quotient {
        let mut dsu = DisjointSets::new(self.vertex_bound());
        for &id in edges {
            let ed = self.e(id);
            dsu.union(ed.u.index(), ed.v.index());
        }
        let mut rep = vec![None; self.vertex_bound()];
        let mut min_of_root: Vec<Option<VertexId>> = vec![None; self.vertex_bound()];
        for v in self.vertices() {
            let r = dsu.find(v.index());
            if min_of_root[r].is_none() {
                min_of_root[r] = Some(v);
            }
        }
        let mut g = Graph::new();
        for v in self.vertices() {
            let r = min_of_root[dsu.find(v.index())].unwrap();
            rep[v.index()] = Some(r);
            g.ensure_vertex(r);
        }
        for ed in self.edges() {
            let (u, v) = (rep[ed.u.index()].unwrap(), rep[ed.v.index()].unwrap());
            if u != v {
                g.insert_edge(ed.id, u, v, ed.len).expect("valid edge");
            }
        }
        Quotient { graph: g, rep }
    }

    /// Shortest-path forest rooted at `roots`. Among the edges that realise a
    /// vertex's distance, the one with the smallest id becomes its parent edge.
    pub fn shortest_path_forest(&self, roots: &[VertexId]) -> ShortestPathForest {
        let n = self.vertex_bound();
        let mut dist: Vec<Option<Length>> = vec![None; n];
        let mut rank = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        for &r in roots {
            if self.has_vertex(r) && dist[r.index()].is_none() {
                dist[r.index()] = Some(Length::zero());
                heap.push(Reverse((Length::zero(), r)));
            }
        }
        let mut order = Vec::new();
        while let Some(Reverse((d, v))) = heap.pop() {
            if rank[v.index()] != usize::MAX || dist[v.index()] != Some(d) {
                continue;
            }
            rank[v.index()] = order.len();
            order.push(v);
            for &id in self.incident(v) {
                let ed = self.e(id);
                let w = ed.other(v);
                let nd = d + ed.len;
                if dist[w.index()].is_none_or(|old| nd < old) {
                    dist[w.index()] = Some(nd);
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        let mut parent = vec![None; n];
        let mut is_root = vec![false; n];
        for &r in roots {
            if self.has_vertex(r) {
                is_root[r.index()] = true;
            }
        }
        for &v in &order {
            if is_root[v.index()] {
                continue;
            }
            let dv = dist[v.index()].unwrap();
            let best = self
                .incident(v)
                .iter()
                .copied()
                .filter(|&id| {
                    let ed = self.e(id);
                    let u = ed.other(v);
                    rank[u.index()] < rank[v.index()] && dist[u.index()].unwrap() + ed.len == dv
                })
                .min();
            parent[v.index()] = best;
        }
        ShortestPathForest { dist, parent, order }
    }

    /// Edges of the shortest-path forest lying on root paths of length at most `k`.
    pub fn shortest_path_forest_truncated(&self, roots: &[VertexId], k: Length) -> Forest {
        if k < Length::zero() {
            return Forest::default();
        }
        self.shortest_path_forest(roots).truncated(k)
    }

    /// Components of the subgraph formed by `edges`, as sorted vertex lists
    /// ordered by smallest member. Untouched vertices are omitted.
    pub fn connected_components(&self, edges: &[EdgeId]) -> Vec<Vec<VertexId>> {
        let mut dsu = DisjointSets::new(self.vertex_bound());
        let mut touched = vec![false; self.vertex_bound()];
        for &id in edges {
            let ed = self.e(id);
            dsu.union(ed.u.index(), ed.v.index());
            touched[ed.u.index()] = true;
            touched[ed.v.index()] = true;
        }
        let mut blocks: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for (i, &t) in touched.iter().enumerate() {
            if t {
                blocks.entry(dsu.find(i)).or_default().push(VertexId(i as u32));
            }
        }
        let mut out: Vec<Vec<VertexId>> = blocks.into_values().collect();
        out.sort_by_key(|b| b[0]);
        out
    }

    /// True iff every demand is connected by `forest`.
    pub fn is_feasible(&self, forest: &[EdgeId], demands: &[Demand]) -> bool {
        let mut dsu = DisjointSets::new(self.vertex_bound());
        for &id in forest {
            match self.edge(id) {
                Some(ed) => {
                    dsu.union(ed.u.index(), ed.v.index());
                }
                None => return false,
            }
        }
        demands.iter().all(|d| d.s.index() < dsu.len() && d.t.index() < dsu.len() && dsu.same(d.s.index(), d.t.index()))
    }

    /// True iff every demand's endpoints lie in one component of the whole graph.
    pub fn demands_connected(&self, demands: &[Demand]) -> bool {
        self.first_disconnected(demands).is_none()
    }

    /// First demand whose endpoints lie in different components, or that
    /// names a missing vertex.
    pub fn first_disconnected(&self, demands: &[Demand]) -> Option<Demand> {
        let mut dsu = DisjointSets::new(self.vertex_bound());
        for ed in self.edges() {
            dsu.union(ed.u.index(), ed.v.index());
        }
        demands
            .iter()
            .copied()
            .find(|d| !self.has_vertex(d.s) || !self.has_vertex(d.t) || !dsu.same(d.s.index(), d.t.index()))
    }

    /// True iff `edges` contains no cycle.
    pub fn is_acyclic(&self, edges: &[EdgeId]) -> bool {
        let mut dsu = DisjointSets::new(self.vertex_bound());
        edges.iter().all(|&id| {
            let ed = self.e(id);
            dsu.union(ed.u.index(), ed.v.index())
        })
    }

    /// Removes every edge that is not on the path between some demand pair.
    /// `edges` must be acyclic.
    pub fn prune_to_demands(&self, edges: &[EdgeId], demands: &[Demand]) -> Vec<EdgeId> {
        let sub = self.edge_subgraph(edges);
        let n = self.vertex_bound();
        // root each tree, push +1 at both endpoints and -2 at the lca
        let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
        let mut parent: Vec<Option<VertexId>> = vec![None; n];
        let mut depth = vec![0usize; n];
        let mut seen = vec![false; n];
        let mut order = Vec::new();
        for r in sub.vertices() {
            if seen[r.index()] {
                continue;
            }
            seen[r.index()] = true;
            let mut stack = vec![r];
            while let Some(v) = stack.pop() {
                order.push(v);
                for &id in sub.incident(v) {
                    let w = sub.e(id).other(v);
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        parent[w.index()] = Some(v);
                        parent_edge[w.index()] = Some(id);
                        depth[w.index()] = depth[v.index()] + 1;
                        stack.push(w);
                    }
                }
            }
        }
        let mut weight = vec![0i64; n];
        for d in demands {
            if !sub.has_vertex(d.s) || !sub.has_vertex(d.t) {
                continue;
            }
            let (mut a, mut b) = (d.s, d.t);
            while depth[a.index()] > depth[b.index()] {
                a = parent[a.index()].unwrap();
            }
            while depth[b.index()] > depth[a.index()] {
                b = parent[b.index()].unwrap();
            }
            while a != b {
                match (parent[a.index()], parent[b.index()]) {
                    (Some(pa), Some(pb)) => {
                        a = pa;
                        b = pb;
                    }
                    _ => break,
                }
            }
            if a != b {
                continue;
            }
            weight[d.s.index()] += 1;
            weight[d.t.index()] += 1;
            weight[a.index()] -= 2;
        }
        let mut keep = Vec::new();
        for &v in order.iter().rev() {
            if let Some(p) = parent[v.index()] {
                if weight[v.index()] > 0 {
                    keep.push(parent_edge[v.index()].unwrap());
                }
                weight[p.index()] += weight[v.index()];
            }
        }
        keep.sort_unstable();
        keep
    }

    /// Minimum spanning forest of the subgraph on `edges` (ties by id).
    pub fn spanning_forest(&self, edges: &[EdgeId]) -> Vec<EdgeId> {
        let mut sorted = edges.to_vec();
        sorted.sort_by(|&a, &b| self.e(a).len.cmp(&self.e(b).len).then(a.cmp(&b)));
        let mut dsu = DisjointSets::new(self.vertex_bound());
        let mut out: Vec<EdgeId> = sorted
            .into_iter()
            .filter(|&id| {
                let ed = self.e(id);
                dsu.union(ed.u.index(), ed.v.index())
            })
            .collect();
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: Graph,
    /// Image of each vertex of the source graph (`None` for dead slots).
    pub rep: Vec<Option<VertexId>>,
}

impl Quotient {
    pub fn image(&self, v: VertexId) -> VertexId {
        self.rep[v.index()].expect("vertex of the source graph")
    }
}

#[derive(Clone, Debug)]
pub struct ShortestPathForest {
    /// Distance from the root set, `None` when unreachable.
    pub dist: Vec<Option<Length>>,
    pub parent: Vec<Option<EdgeId>>,
    /// Vertices in settling order.
    pub order: Vec<VertexId>,
}

impl ShortestPathForest {
    pub fn dist(&self, v: VertexId) -> Option<Length> {
        self.dist.get(v.index()).copied().flatten()
    }

    pub fn forest(&self) -> Forest {
        Forest::new(self.parent.iter().flatten().copied().collect())
    }

    pub fn truncated(&self, k: Length) -> Forest {
        Forest::new(
            self.order
                .iter()
                .filter(|v| self.dist[v.index()].unwrap() <= k)
                .filter_map(|v| self.parent[v.index()])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn e(i: u32) -> EdgeId {
        EdgeId(i)
    }

    fn path(n: usize) -> Graph {
        let mut g = Graph::with_vertices(n);
        for i in 0..n - 1 {
            g.add_edge(v(i as u32), v(i as u32 + 1), length(1)).unwrap();
        }
        g
    }

    #[test]
    fn contract_triangle_keeps_parallel_edges() {
        let mut g = Graph::with_vertices(3);
        g.add_edge(v(0), v(1), length(1)).unwrap();
        g.add_edge(v(1), v(2), length(1)).unwrap();
        g.add_edge(v(2), v(0), length(1)).unwrap();
        let c = g.contract_edge(e(0)).unwrap();
        let mut rec = ContractionRecord::new();
        rec.apply(&c);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 2);
        assert!(g.edges().all(|ed| ed.touches(c.merged) && ed.touches(v(2))));
        assert_eq!(rec.members(c.merged), vec![v(0), v(1)]);
        assert_eq!(rec.members(v(2)), vec![v(2)]);
    }

    #[test]
    fn contract_path_edge() {
        let mut g = path(3);
        let c = g.contract_edge(e(0)).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.edge_ids(), vec![e(1)]);
        assert!(g.e(e(1)).touches(c.merged));
    }

    #[test]
    fn contract_drops_parallel_copy_as_loop() {
        let mut g = Graph::with_vertices(2);
        g.add_edge(v(0), v(1), length(1)).unwrap();
        g.add_edge(v(0), v(1), length(3)).unwrap();
        let c = g.contract_edge(e(0)).unwrap();
        assert_eq!(c.dropped_loops, vec![e(1)]);
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.num_vertices(), 1);
    }

    #[test]
    fn contract_unknown_edge_rejected() {
        let mut g = path(2);
        assert_eq!(g.contract_edge(e(7)), Err(GraphError::UnknownEdge(e(7))));
    }

    #[test]
    fn star_forest() {
        let mut g = Graph::with_vertices(4);
        for i in 1..4 {
            g.add_edge(v(0), v(i), length(1)).unwrap();
        }
        let sp = g.shortest_path_forest(&[v(0)]);
        assert_eq!(sp.forest().edges, vec![e(0), e(1), e(2)]);
        for i in 1..4 {
            assert_eq!(sp.dist(v(i)), Some(length(1)));
        }
    }

    #[test]
    fn two_roots_on_path_break_tie_by_edge_id() {
        let g = path(3);
        let sp = g.shortest_path_forest(&[v(0), v(2)]);
        assert_eq!(sp.dist(v(1)), Some(length(1)));
        assert_eq!(sp.parent[1], Some(e(0)));
        assert_eq!(sp.forest().edges, vec![e(0)]);
    }

    #[test]
    fn four_cycle_excludes_larger_antipodal_edge() {
        let mut g = Graph::with_vertices(4);
        for i in 0..4u32 {
            g.add_edge(v(i), v((i + 1) % 4), length(1)).unwrap();
        }
        let sp = g.shortest_path_forest(&[v(0)]);
        // vertex 2 is reached through e1 (from 1) or e2 (from 3); e2 loses
        assert_eq!(sp.forest().edges, vec![e(0), e(1), e(3)]);
    }

    #[test]
    fn truncation_examples() {
        let g = path(3);
        assert_eq!(g.shortest_path_forest_truncated(&[v(0)], length(1)).edges, vec![e(0)]);
        assert_eq!(g.shortest_path_forest_truncated(&[v(0)], length(2)).edges, vec![e(0), e(1)]);
        assert!(g.shortest_path_forest_truncated(&[v(0)], length(-1)).is_empty());
        assert!(g.shortest_path_forest_truncated(&[], length(5)).is_empty());

        let mut star = Graph::with_vertices(4);
        for i in 1..4 {
            star.add_edge(v(0), v(i), length(i as i64)).unwrap();
        }
        assert_eq!(star.shortest_path_forest_truncated(&[v(0)], length(2)).edges, vec![e(0), e(1)]);
    }

    #[test]
    fn components_and_feasibility() {
        let g = path(4);
        assert_eq!(g.connected_components(&[e(0), e(1)]), vec![vec![v(0), v(1), v(2)]]);
        assert!(g.connected_components(&[]).is_empty());
        assert_eq!(g.connected_components(&[e(0), e(2)]), vec![vec![v(0), v(1)], vec![v(2), v(3)]]);

        let d = [Demand::new(v(0), v(2)).unwrap()];
        assert!(g.is_feasible(&[e(0), e(1)], &d));
        assert!(!g.is_feasible(&[e(0)], &d));
        assert!(g.is_feasible(&[], &[]));
    }

    #[test]
    fn prune_keeps_demand_paths_only() {
        let g = path(4);
        let d = [Demand::new(v(0), v(2)).unwrap()];
        assert_eq!(g.prune_to_demands(&[e(0), e(1), e(2)], &d), vec![e(0), e(1)]);
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize, maxlen: i64) -> Graph {
        let mut g = Graph::with_vertices(n);
        for _ in 0..m {
            let a = rng.gen_range(0..n as u32);
            let b = rng.gen_range(0..n as u32);
            if a != b {
                g.add_edge(v(a), v(b), length(rng.gen_range(1..=maxlen))).unwrap();
            }
        }
        g
    }

    fn bellman_ford(g: &Graph, roots: &[VertexId]) -> Vec<Option<Length>> {
        let mut d: Vec<Option<Length>> = vec![None; g.vertex_bound()];
        for r in roots {
            d[r.index()] = Some(Length::zero());
        }
        for _ in 0..g.vertex_bound() {
            for ed in g.edges() {
                for (a, b) in [(ed.u, ed.v), (ed.v, ed.u)] {
                    if let Some(da) = d[a.index()] {
                        if d[b.index()].is_none_or(|db| da + ed.len < db) {
                            d[b.index()] = Some(da + ed.len);
                        }
                    }
                }
            }
        }
        d
    }

    #[test]
    fn distances_match_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = random_graph(&mut rng, 12, 20, 5);
            let roots = [v(rng.gen_range(0..12)), v(rng.gen_range(0..12))];
            let sp = g.shortest_path_forest(&roots);
            assert_eq!(sp.dist, bellman_ford(&g, &roots));
            assert!(g.is_acyclic(&sp.forest().edges));
        }
    }

    #[test]
    fn contraction_preserves_connectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let orig = random_graph(&mut rng, 10, 12, 3);
            let mut g = orig.clone();
            let mut rec = ContractionRecord::new();
            let mut image: Vec<VertexId> = (0..10).map(v).collect();
            for _ in 0..4 {
                let ids = g.edge_ids();
                if ids.is_empty() {
                    break;
                }
                let c = g.contract_edge(ids[rng.gen_range(0..ids.len())]).unwrap();
                rec.apply(&c);
                for x in image.iter_mut() {
                    if *x == c.children.0 || *x == c.children.1 {
                        *x = c.merged;
                    }
                }
            }
            let all = orig.edge_ids();
            let now = g.edge_ids();
            for a in 0..10u32 {
                for b in 0..10u32 {
                    if a == b {
                        continue;
                    }
                    let d = [Demand::new(v(a), v(b)).unwrap()];
                    let before = orig.is_feasible(&all, &d);
                    let (ia, ib) = (image[a as usize], image[b as usize]);
                    let after = ia == ib || g.is_feasible(&now, &[Demand::new(ia, ib).unwrap()]);
                    assert_eq!(before, after);
                    assert!(rec.members(ia).contains(&v(a)));
                }
            }
        }
    }

    #[test]
    fn truncation_decomposes_through_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = random_graph(&mut rng, 14, 24, 1);
            let roots = vec![v(0), v(rng.gen_range(1..14))];
            let k1 = rng.gen_range(0..3i64);
            let k2 = rng.gen_range(0..3i64);
            let whole = g.shortest_path_forest_truncated(&roots, length(k1 + k2));
            let first = g.shortest_path_forest_truncated(&roots, length(k1));
            let q = g.quotient(&first.edges);
            let qroots: Vec<VertexId> = roots.iter().map(|&r| q.image(r)).collect();
            let second = q.graph.shortest_path_forest_truncated(&qroots, length(k2));
            let mut union = first.edges.clone();
            union.extend(second.edges.iter().copied());
            assert_eq!(union.len(), first.len() + second.len());
            assert_eq!(Forest::new(union), whole);
        }
    }
}
