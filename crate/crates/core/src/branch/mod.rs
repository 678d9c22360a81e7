//! Branch decompositions: binary trees whose leaves are the edges of a graph
//! and whose nodes stand for the edge set below them.

mod balance;
mod heuristic;
mod text;

pub use balance::{balance, complete, per_edge_bound, BalanceStats};
pub use heuristic::heuristic_decompose;
pub use text::{parse_decomposition, TextError};

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf(EdgeId),
    Join(NodeId, NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub kind: NodeKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BranchError {
    #[error("decomposition has no root but the graph has edges")]
    NoRoot,
    #[error("root {0} has a parent")]
    RootHasParent(NodeId),
    #[error("node {0} is referenced more than once or lies on a cycle")]
    Shared(NodeId),
    #[error("node {0} does not point back to its parent")]
    BadParent(NodeId),
    #[error("node {0} is not reachable from the root")]
    Unreachable(NodeId),
    #[error("leaf edge {0} is not in the graph")]
    UnknownEdge(EdgeId),
    #[error("edge {0} appears on more than one leaf")]
    DuplicateEdge(EdgeId),
    #[error("edge {0} appears on no leaf")]
    MissingEdge(EdgeId),
    #[error("node {0} is out of range")]
    DanglingChild(NodeId),
}

/// Arena-backed rooted binary tree with one leaf per edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchDecomposition {
    nodes: Vec<Node>,
    root: Option<NodeId>,
}

impl BranchDecomposition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leaf(&mut self, e: EdgeId) -> NodeId {
        self.push(NodeKind::Leaf(e))
    }

    /// New node whose cluster is the union of `a` and `b`; it becomes the root.
    pub fn add_join(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let n = self.push(NodeKind::Join(a, b));
        self.nodes[a.index()].parent = Some(n);
        self.nodes[b.index()].parent = Some(n);
        n
    }

    fn push(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node { parent: None, kind });
        self.root = Some(id);
        id
    }

    pub fn set_root(&mut self, r: Option<NodeId>) {
        self.root = r;
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn children(&self, n: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[n.index()].kind {
            NodeKind::Join(a, b) => Some((a, b)),
            NodeKind::Leaf(_) => None,
        }
    }

    pub fn leaf_edge(&self, n: NodeId) -> Option<EdgeId> {
        match self.nodes[n.index()].kind {
            NodeKind::Leaf(e) => Some(e),
            NodeKind::Join(..) => None,
        }
    }

    /// Leaf-per-edge chain: each join adds one more edge to the cluster
    /// built so far.
    pub fn caterpillar(edges: &[EdgeId]) -> Self {
        let mut bd = Self::new();
        let mut acc = None;
        for &e in edges {
            let l = bd.add_leaf(e);
            acc = Some(match acc {
                None => l,
                Some(a) => bd.add_join(a, l),
            });
        }
        bd.root = acc;
        bd
    }

    /// Uniformly random merge order over the given edges.
    pub fn random<R: Rng>(edges: &[EdgeId], rng: &mut R) -> Self {
        let mut bd = Self::new();
        let mut pool: Vec<NodeId> = edges.iter().map(|&e| bd.add_leaf(e)).collect();
        pool.shuffle(rng);
        while pool.len() > 1 {
            let i = rng.gen_range(0..pool.len());
            let a = pool.swap_remove(i);
            let j = rng.gen_range(0..pool.len());
            let b = pool.swap_remove(j);
            pool.push(bd.add_join(a, b));
        }
        bd.root = pool.pop();
        bd
    }

    /// Nodes reachable from the root, children before parents.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let Some(r) = self.root else { return out };
        let mut stack = vec![(r, false)];
        while let Some((n, expanded)) = stack.pop() {
            match (self.children(n), expanded) {
                (Some((a, b)), false) => {
                    stack.push((n, true));
                    stack.push((b, false));
                    stack.push((a, false));
                }
                _ => out.push(n),
            }
        }
        out
    }

    /// Number of edges under each node.
    pub fn sizes(&self) -> Vec<usize> {
        let mut size = vec![0; self.nodes.len()];
        for n in self.postorder() {
            size[n.index()] = match self.children(n) {
                Some((a, b)) => size[a.index()] + size[b.index()],
                None => 1,
            };
        }
        size
    }

    pub fn cluster(&self, n: NodeId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut stack = vec![n];
        while let Some(x) = stack.pop() {
            match self.nodes[x.index()].kind {
                NodeKind::Leaf(e) => out.push(e),
                NodeKind::Join(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Every cluster as a sorted edge list.
    pub fn cluster_family(&self) -> BTreeSet<Vec<EdgeId>> {
        self.postorder().into_iter().map(|n| self.cluster(n)).collect()
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        self.root.map(|r| self.cluster(r)).unwrap_or_default()
    }

    /// For every leaf edge, how many clusters contain it.
    pub fn clusters_per_edge(&self) -> Vec<(EdgeId, usize)> {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut out = Vec::new();
        let order = self.postorder();
        for &n in order.iter().rev() {
            if let Some((a, b)) = self.children(n) {
                depth[a.index()] = depth[n.index()] + 1;
                depth[b.index()] = depth[n.index()] + 1;
            } else {
                out.push((self.leaf_edge(n).unwrap(), depth[n.index()] + 1));
            }
        }
        out.sort_unstable();
        out
    }

    /// Nodes on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.clusters_per_edge().into_iter().map(|(_, c)| c).max().unwrap_or(0)
    }

    pub fn validate(&self, g: &Graph) -> Result<(), BranchError> {
        let Some(root) = self.root else {
            return match g.edge_ids().first() {
                Some(_) => Err(BranchError::NoRoot),
                None => Ok(()),
            };
        };
        if root.index() >= self.nodes.len() {
            return Err(BranchError::DanglingChild(root));
        }
        if self.nodes[root.index()].parent.is_some() {
            return Err(BranchError::RootHasParent(root));
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut on_leaf = vec![false; g.edge_bound()];
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                return Err(BranchError::Shared(n));
            }
            match self.nodes[n.index()].kind {
                NodeKind::Leaf(e) => {
                    if !g.has_edge(e) {
                        return Err(BranchError::UnknownEdge(e));
                    }
                    if std::mem::replace(&mut on_leaf[e.index()], true) {
                        return Err(BranchError::DuplicateEdge(e));
                    }
                }
                NodeKind::Join(a, b) => {
                    for c in [a, b] {
                        if c.index() >= self.nodes.len() {
                            return Err(BranchError::DanglingChild(c));
                        }
                        if self.nodes[c.index()].parent != Some(n) {
                            return Err(BranchError::BadParent(c));
                        }
                        stack.push(c);
                    }
                }
            }
        }
        if let Some(e) = g.edge_ids().into_iter().find(|e| !on_leaf[e.index()]) {
            return Err(BranchError::MissingEdge(e));
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(BranchError::Unreachable(NodeId(i as u32)));
        }
        Ok(())
    }

    /// Boundary of every node's cluster, indexed by node. Built bottom-up by
    /// merging per-vertex incidence counts, smaller map into larger.
    pub fn boundaries(&self, g: &Graph) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        type Counts = (HashMap<VertexId, usize>, BTreeSet<VertexId>);
        let mut state: Vec<Option<Counts>> = vec![None; self.nodes.len()];
        let touch = |counts: &mut HashMap<VertexId, usize>, bd: &mut BTreeSet<VertexId>, v: VertexId, k: usize| {
            let c = counts.entry(v).or_default();
            *c += k;
            if *c < g.degree(v) {
                bd.insert(v);
            } else {
                bd.remove(&v);
            }
        };
        for n in self.postorder() {
            let (mut counts, mut bd) = match self.nodes[n.index()].kind {
                NodeKind::Leaf(e) => {
                    let ed = g.e(e);
                    let mut counts = HashMap::new();
                    let mut bd = BTreeSet::new();
                    touch(&mut counts, &mut bd, ed.u, 1);
                    touch(&mut counts, &mut bd, ed.v, 1);
                    (counts, bd)
                }
                NodeKind::Join(a, b) => {
                    let mut big = state[a.index()].take().unwrap();
                    let mut small = state[b.index()].take().unwrap();
                    if big.0.len() < small.0.len() {
                        std::mem::swap(&mut big, &mut small);
                    }
                    let (mut counts, mut bd) = big;
                    for (v, k) in small.0 {
                        touch(&mut counts, &mut bd, v, k);
                    }
                    (counts, bd)
                }
            };
            out[n.index()] = bd.iter().copied().collect();
            state[n.index()] = Some((std::mem::take(&mut counts), std::mem::take(&mut bd)));
        }
        out
    }

    pub fn width(&self, g: &Graph) -> usize {
        self.boundaries(g).iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Graphviz rendering; each node shows its cluster size and boundary size.
    pub fn to_dot(&self, g: &Graph) -> String {
        let bds = self.boundaries(g);
        let sizes = self.sizes();
        let mut s = String::from("digraph decomposition {\n  node [shape=box];\n");
        for n in self.postorder() {
            let label = match self.leaf_edge(n) {
                Some(e) => format!("{e}\\n|C|={} |dC|={}", sizes[n.index()], bds[n.index()].len()),
                None => format!("|C|={} |dC|={}", sizes[n.index()], bds[n.index()].len()),
            };
            let _ = writeln!(s, "  {n} [label=\"{label}\"];");
            if let Some((a, b)) = self.children(n) {
                let _ = writeln!(s, "  {n} -> {a};\n  {n} -> {b};");
            }
        }
        s.push_str("}\n");
        s
    }

    /// Nested-parentheses text form with 0-based edge ids, e.g. `((0 1) 2)`.
    pub fn to_text(&self) -> String {
        fn go(bd: &BranchDecomposition, n: NodeId, s: &mut String) {
            match bd.nodes[n.index()].kind {
                NodeKind::Leaf(e) => {
                    let _ = write!(s, "{}", e.0);
                }
                NodeKind::Join(a, b) => {
                    s.push('(');
                    go(bd, a, s);
                    s.push(' ');
                    go(bd, b, s);
                    s.push(')');
                }
            }
        }
        let mut s = String::new();
        match self.root {
            Some(r) => go(self, r, &mut s),
            None => s.push_str("()"),
        }
        s
    }
}

/// Vertices incident to some but not all of their edges inside `cluster`.
pub fn boundary(g: &Graph, cluster: &[EdgeId]) -> Vec<VertexId> {
    let mut counts: HashMap<VertexId, usize> = HashMap::new();
    for &e in cluster {
        let ed = g.e(e);
        *counts.entry(ed.u).or_default() += 1;
        *counts.entry(ed.v).or_default() += 1;
    }
    let mut out: Vec<VertexId> = counts.into_iter().filter(|&(v, c)| c < g.degree(v)).map(|(v, _)| v).collect();
    out.sort_unstable();
    out
}
