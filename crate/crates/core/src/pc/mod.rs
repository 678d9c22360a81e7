//! Primal-dual clustering: energy-based moat growing, pruning, the forest of
//! isolated dead vertices, and the Steiner-forest decomposition built on it.

pub mod decompose;
pub mod gw;
pub mod isolated;
pub mod phase1;
pub mod phase2;
mod segtree;
pub mod tree;

pub use decompose::{decompose_instance, DecomposedInstance, LocalPart, Subinstance};
pub use gw::{gw_steiner_forest, gw_steiner_forest_naive, GwError, GwResult};
pub use isolated::{depth_bound, IsolatedForest, IsolatedNode};
pub use phase1::{phase1, phase1_naive, Phase1Output};
pub use phase2::{crossing_counts, phase2, phase2_naive};
pub use tree::ContractionTree;

use crate::graph::{EdgeId, Graph, Length};

/// Result of both phases on one energy assignment.
#[derive(Clone, Debug)]
pub struct Clustering {
    pub phase1: Phase1Output,
    pub f2: Vec<EdgeId>,
    pub forest: IsolatedForest,
}

/// Runs both phases and builds the isolated-dead-vertex forest. Vertex ids of
/// `g` must be `0..n`.
pub fn cluster(g: &Graph, phi: &[Length], delta: Length) -> Clustering {
    assert_eq!(g.num_vertices(), g.vertex_bound(), "vertex ids must be contiguous");
    let p1 = phase1(g, phi, delta);
    let f2 = phase2(g, &p1);
    let forest = IsolatedForest::build(g, &p1, &f2);
    Clustering { phase1: p1, f2, forest }
}
