//! The forest of isolated dead vertices and the trees and subgraphs hanging
//! off its nodes.

use super::phase2::crossing_counts;
use super::tree::ContractionTree;
use super::Phase1Output;
use crate::dsu::DisjointSets;
use crate::graph::{EdgeId, Graph, Length, VertexId};

#[derive(Clone, Debug)]
pub struct IsolatedNode {
    /// Contraction-forest vertex.
    pub vertex: VertexId,
    /// Index of the parent node in [`IsolatedForest::nodes`].
    pub parent: Option<usize>,
    pub depth: usize,
    /// Input vertices coalesced into this vertex.
    pub members: Vec<VertexId>,
    /// Vertices of the tree `T_v`: members not owned by a descendant node.
    pub tree_vertices: Vec<VertexId>,
    pub tree_edges: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct IsolatedForest {
    pub nodes: Vec<IsolatedNode>,
    /// For every input edge, the number of node subgraphs containing it.
    pub multiplicity: Vec<usize>,
}

impl IsolatedForest {
    pub fn build(g0: &Graph, p1: &Phase1Output, f2: &[EdgeId]) -> Self {
        let tree = ContractionTree::new(p1);
        let counts = crossing_counts(g0, &tree, f2);
        let n = tree.len();
        let isolated = |x: usize| counts[x] == 0 && p1.is_dead(VertexId(x as u32));
        // nearest isolated dead ancestor-or-self, top-down (parents have larger ids)
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut node_of: Vec<Option<usize>> = vec![None; n];
        let mut nodes: Vec<IsolatedNode> = Vec::new();
        for x in (0..n).rev() {
            let above = tree.parent[x].and_then(|p| owner[p]);
            if isolated(x) {
                let parent = above.map(|a| node_of[a].unwrap());
                let depth = parent.map_or(0, |p| nodes[p].depth + 1);
                node_of[x] = Some(nodes.len());
                nodes.push(IsolatedNode {
                    vertex: VertexId(x as u32),
                    parent,
                    depth,
                    members: tree.leaves(x),
                    tree_vertices: Vec::new(),
                    tree_edges: Vec::new(),
                });
                owner[x] = Some(x);
            } else {
                owner[x] = above;
            }
        }
        for (v, o) in owner.iter().enumerate().take(p1.n0) {
            if let Some(o) = *o {
                nodes[node_of[o].unwrap()].tree_vertices.push(VertexId(v as u32));
            }
        }
        for &e in f2 {
            let ed = g0.e(e);
            let (a, b) = (owner[ed.u.index()], owner[ed.v.index()]);
            if a == b {
                if let Some(o) = a {
                    nodes[node_of[o].unwrap()].tree_edges.push(e);
                }
            }
        }
        for node in nodes.iter_mut() {
            node.tree_edges.sort_unstable();
        }
        // g0 edge (a, b) lies in the subgraph of every node that is an ancestor of lca(a, b)
        let multiplicity = g0
            .edges()
            .map(|e| {
                let m = tree
                    .lca(e.u.index(), e.v.index())
                    .and_then(|w| owner[w])
                    .map_or(0, |o| nodes[node_of[o].unwrap()].depth + 1);
                (e.id, m)
            })
            .fold(vec![0usize; g0.edge_bound()], |mut acc, (e, m)| {
                acc[e.index()] = m;
                acc
            });
        // nodes were created parents first; list them by vertex id instead
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| nodes[i].vertex);
        let mut new_index = vec![0usize; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut slots: Vec<Option<IsolatedNode>> = nodes.into_iter().map(Some).collect();
        let nodes: Vec<IsolatedNode> = order
            .iter()
            .map(|&old| {
                let mut nd = slots[old].take().unwrap();
                nd.parent = nd.parent.map(|p| new_index[p]);
                nd
            })
            .collect();
        Self { nodes, multiplicity }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest node depth, counted in edges.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Subgraph of the input induced by the node's members.
    pub fn subgraph(&self, g0: &Graph, i: usize) -> Graph {
        g0.induced_subgraph(&self.nodes[i].members)
    }

    /// Checks that each node's tree is one component of `f2` spanning exactly
    /// its tree vertices, and that those vertex sets partition the input.
    pub fn check_components(&self, g0: &Graph, f2: &[EdgeId]) -> Result<(), String> {
        let mut owner = vec![usize::MAX; g0.vertex_bound()];
        for (i, nd) in self.nodes.iter().enumerate() {
            for v in &nd.tree_vertices {
                if owner[v.index()] != usize::MAX {
                    return Err(format!("{v} lies in two trees"));
                }
                owner[v.index()] = i;
            }
        }
        if let Some(v) = g0.vertices().find(|v| owner[v.index()] == usize::MAX) {
            return Err(format!("{v} lies in no tree"));
        }
        let mut dsu = DisjointSets::new(g0.vertex_bound());
        for &e in f2 {
            let ed = g0.e(e);
            if owner[ed.u.index()] != owner[ed.v.index()] {
                return Err(format!("{e} joins two trees"));
            }
            dsu.union(ed.u.index(), ed.v.index());
        }
        for nd in &self.nodes {
            let Some(first) = nd.tree_vertices.first() else {
                return Err(format!("tree of {} is empty", nd.vertex));
            };
            let r = dsu.find(first.index());
            if nd.tree_vertices.iter().any(|v| dsu.find(v.index()) != r) {
                return Err(format!("tree of {} is disconnected", nd.vertex));
            }
            let expect: Vec<VertexId> = {
                let mut s = nd.members.clone();
                for other in self.nodes.iter().filter(|o| o.parent.is_some_and(|p| self.nodes[p].vertex == nd.vertex)) {
                    s.retain(|v| !other.members.contains(v));
                }
                s
            };
            if expect != nd.tree_vertices {
                return Err(format!("tree of {} does not equal its members minus its children", nd.vertex));
            }
        }
        Ok(())
    }
}

/// `1 + log_{1+δ}(Σφ0 / min positive φ0)`, or `None` when no energy is positive.
pub fn depth_bound(phi0: &[Length], delta: f64) -> Option<f64> {
    let total: Length = phi0.iter().copied().sum();
    let min = phi0.iter().copied().filter(|p| *p > Length::from_integer(0)).min()?;
    let ratio = crate::io::to_f64(total / min);
    Some(1.0 + ratio.ln() / (1.0 + delta).ln())
}
