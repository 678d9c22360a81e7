//! Bottom-up contraction of the area near each cluster's boundary, sized so
//! that what remains grows at most linearly with distance.

use num_traits::{ToPrimitive, Zero};

use crate::branch::BranchDecomposition;
use crate::graph::{EdgeId, Graph, Length, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClusterContraction {
    pub rho: u64,
    /// Union of the children's contracted sets.
    pub a: Vec<EdgeId>,
    /// `a` plus the shortest-path edges within `rho` of the boundary.
    pub b: Vec<EdgeId>,
}

/// Contraction data for every node of a decomposition.
#[derive(Clone, Debug)]
pub struct ContractionLayers {
    pub alpha: Length,
    pub clusters: Vec<ClusterContraction>,
}

/// Layer sizes of the shortest-path forest of `edges / contracted` rooted at
/// `roots`: entry `i` counts forest edges entering distance `i + 1`, and the
/// forest edges are returned with their far-end distance.
pub fn layers(
    g: &Graph,
    edges: &[EdgeId],
    contracted: &[EdgeId],
    roots: &[VertexId],
) -> (Vec<u64>, Vec<(EdgeId, u64)>) {
    let sub = g.edge_subgraph(edges);
    let q = sub.quotient(contracted);
    let roots: Vec<VertexId> = roots.iter().filter(|r| sub.has_vertex(**r)).map(|&r| q.image(r)).collect();
    let sp = q.graph.shortest_path_forest(&roots);
    let mut s: Vec<u64> = Vec::new();
    let mut tree = Vec::new();
    for v in q.graph.vertices() {
        if let (Some(e), Some(d)) = (sp.parent[v.index()], sp.dist(v)) {
            let d = d.to_integer().to_u64().expect("unit lengths");
            if s.len() < d as usize {
                s.resize(d as usize, 0);
            }
            s[d as usize - 1] += 1;
            tree.push((e, d));
        }
    }
    (s, tree)
}

/// Largest `i` with `s_1 + ... + s_i >= alpha * i`, zero if none.
pub fn radius(s: &[u64], alpha: Length) -> u64 {
    let mut best = 0;
    let mut prefix = 0u64;
    for (i, &x) in s.iter().enumerate() {
        prefix += x;
        if Length::from_integer(prefix as i128) >= alpha * Length::from_integer(i as i128 + 1) {
            best = i as u64 + 1;
        }
    }
    if alpha > Length::zero() {
        let beyond = (Length::from_integer(prefix as i128) / alpha).floor().to_integer().to_u64().unwrap_or(0);
        // past the last layer the prefix sum stays constant
        if beyond > s.len() as u64 {
            best = beyond;
        }
    }
    best
}

pub fn contract_alpha(g: &Graph, bd: &BranchDecomposition, alpha: Length) -> ContractionLayers {
    let boundaries = bd.boundaries(g);
    let mut clusters = vec![ClusterContraction::default(); bd.len()];
    for n in bd.postorder() {
        let mut a: Vec<EdgeId> = match bd.children(n) {
            Some((x, y)) => clusters[x.index()].b.iter().chain(&clusters[y.index()].b).copied().collect(),
            None => Vec::new(),
        };
        a.sort_unstable();
        let (s, tree) = layers(g, &bd.cluster(n), &a, &boundaries[n.index()]);
        let rho = radius(&s, alpha);
        let mut b = a.clone();
        b.extend(tree.iter().filter(|&&(_, d)| d <= rho).map(|&(e, _)| e));
        b.sort_unstable();
        clusters[n.index()] = ClusterContraction { rho, a, b };
    }
    ContractionLayers { alpha, clusters }
}

impl ContractionLayers {
    /// Growth of the contracted cluster stays within `alpha * r` for every
    /// radius `r`; returns the first offending node and radius.
    pub fn check_growth(&self, g: &Graph, bd: &BranchDecomposition) -> Result<(), (usize, u64)> {
        let boundaries = bd.boundaries(g);
        for n in bd.postorder() {
            let (s, _) = layers(g, &bd.cluster(n), &self.clusters[n.index()].b, &boundaries[n.index()]);
            let mut prefix = 0u64;
            for (i, &x) in s.iter().enumerate() {
                prefix += x;
                if Length::from_integer(prefix as i128) > self.alpha * Length::from_integer(i as i128 + 1) {
                    return Err((n.index(), i as u64 + 1));
                }
            }
        }
        Ok(())
    }

    pub fn total_radius(&self) -> u64 {
        self.clusters.iter().map(|c| c.rho).sum()
    }

    /// Sum of radii is at most `len(G) / alpha`.
    pub fn check_total(&self, g: &Graph) -> bool {
        Length::from_integer(self.total_radius() as i128) * self.alpha <= g.total_length()
    }
}
