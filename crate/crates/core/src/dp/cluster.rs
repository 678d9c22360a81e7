//! Per-cluster vertex data: boundary, active vertices, and the demands whose
//! endpoints stop being active at each cluster.

use crate::branch::{BranchDecomposition, NodeId};
use crate::graph::{Demand, EdgeId, Graph, VertexId};

#[derive(Clone, Debug, Default)]
pub struct ClusterInfo {
    pub edges: Vec<EdgeId>,
    /// Endpoints of the cluster's edges.
    pub vertices: Vec<VertexId>,
    pub boundary: Vec<VertexId>,
    pub active: Vec<VertexId>,
    /// Position of each boundary vertex inside `active`.
    pub boundary_pos: Vec<usize>,
}

impl ClusterInfo {
    pub fn new(g: &Graph, edges: Vec<EdgeId>, boundary: Vec<VertexId>, demands: &[Demand]) -> Self {
        let mut vertices: Vec<VertexId> = edges
            .iter()
            .flat_map(|&e| {
                let ed = g.e(e);
                [ed.u, ed.v]
            })
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        let interior = |v: VertexId| vertices.binary_search(&v).is_ok() && boundary.binary_search(&v).is_err();
        let mut active = boundary.clone();
        for d in demands {
            for (u, w) in [(d.s, d.t), (d.t, d.s)] {
                if vertices.binary_search(&u).is_ok() && !interior(w) {
                    active.push(u);
                }
            }
        }
        active.sort_unstable();
        active.dedup();
        let boundary_pos = boundary.iter().map(|b| active.binary_search(b).unwrap()).collect();
        Self { edges, vertices, boundary, active, boundary_pos }
    }

    pub fn is_active(&self, v: VertexId) -> bool {
        self.active.binary_search(&v).is_ok()
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok() && self.boundary.binary_search(&v).is_err()
    }

    pub fn active_index(&self, v: VertexId) -> Option<usize> {
        self.active.binary_search(&v).ok()
    }

    /// Some endpoint lies in the cluster while the other is not interior.
    pub fn demand_active(&self, d: &Demand) -> bool {
        let inside = |v: VertexId| self.vertices.binary_search(&v).is_ok();
        (inside(d.s) && !self.is_interior(d.t)) || (inside(d.t) && !self.is_interior(d.s))
    }
}

/// Cluster data for every node of a decomposition, plus, per node, the
/// demands that must be settled there.
#[derive(Clone, Debug)]
pub struct ClusterTable {
    pub infos: Vec<ClusterInfo>,
    /// Demand indices active for both children but not for the node; at a
    /// leaf, demands with both endpoints interior to it.
    pub settled_at: Vec<Vec<usize>>,
}

impl ClusterTable {
    pub fn build(g: &Graph, bd: &BranchDecomposition, demands: &[Demand]) -> Self {
        let boundaries = bd.boundaries(g);
        let mut infos = vec![ClusterInfo::default(); bd.len()];
        for n in bd.postorder() {
            infos[n.index()] = ClusterInfo::new(g, bd.cluster(n), boundaries[n.index()].clone(), demands);
        }
        let mut settled_at = vec![Vec::new(); bd.len()];
        for n in bd.postorder() {
            let i0 = &infos[n.index()];
            for (k, d) in demands.iter().enumerate() {
                let settles = match bd.children(n) {
                    Some((a, b)) => {
                        !i0.demand_active(d) && infos[a.index()].demand_active(d) && infos[b.index()].demand_active(d)
                    }
                    None => i0.is_interior(d.s) && i0.is_interior(d.t),
                };
                if settles {
                    settled_at[n.index()].push(k);
                }
            }
        }
        Self { infos, settled_at }
    }

    pub fn info(&self, n: NodeId) -> &ClusterInfo {
        &self.infos[n.index()]
    }
}
