//! Splits a Steiner-forest instance into nested subinstances whose optima sum
//! to at most `1 + ε` times the original optimum.

use num_traits::{One, Zero};

use crate::graph::{Demand, EdgeId, Graph, Length, VertexId};
use crate::pc::{cluster, gw_steiner_forest, Clustering, GwError};

/// One piece of the decomposition, expressed in the input graph.
#[derive(Clone, Debug)]
pub struct Subinstance {
    /// Input vertices the node covers, sorted.
    pub members: Vec<VertexId>,
    /// Input edges with both endpoints among the members, sorted.
    pub edges: Vec<EdgeId>,
    /// The node's tree with the approximate forest's components expanded.
    pub tree: Vec<EdgeId>,
    pub tree_vertices: Vec<VertexId>,
    pub demands: Vec<Demand>,
    /// Parent subinstance in the nesting forest.
    pub parent: Option<usize>,
    pub depth: usize,
}

/// A subinstance renumbered densely, with the way back to input ids.
#[derive(Clone, Debug)]
pub struct LocalPart {
    pub graph: Graph,
    pub demands: Vec<Demand>,
    /// Input vertex of each local vertex.
    pub vertex: Vec<VertexId>,
    /// Input edge of each local edge.
    pub edge: Vec<EdgeId>,
}

impl LocalPart {
    pub fn to_input(&self, edges: &[EdgeId]) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = edges.iter().map(|e| self.edge[e.index()]).collect();
        out.sort_unstable();
        out
    }
}

impl Subinstance {
    /// Subgraph of `g` induced by the members, ids preserved.
    pub fn graph(&self, g: &Graph) -> Graph {
        let mut h = Graph::new();
        for &v in &self.members {
            h.ensure_vertex(v);
        }
        for &e in &self.edges {
            let ed = g.e(e);
            h.insert_edge(e, ed.u, ed.v, ed.len).expect("edge between members");
        }
        h
    }

    /// Same subgraph with vertices and edges numbered from zero.
    pub fn local(&self, g: &Graph) -> LocalPart {
        let at = |v: VertexId| VertexId(self.members.binary_search(&v).expect("member") as u32);
        let mut h = Graph::with_vertices(self.members.len());
        for &e in &self.edges {
            let ed = g.e(e);
            h.add_edge(at(ed.u), at(ed.v), ed.len).expect("edge between members");
        }
        let demands = self.demands.iter().map(|d| Demand::new(at(d.s), at(d.t)).expect("distinct endpoints")).collect();
        LocalPart { graph: h, demands, vertex: self.members.clone(), edge: self.edges.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct DecomposedInstance {
    pub parts: Vec<Subinstance>,
    /// The 2-approximate forest the decomposition was built from.
    pub approx: Vec<EdgeId>,
    /// Number of its components.
    pub components: usize,
    /// Energy handed to each contracted vertex, indexed by compact id.
    pub energy: Vec<Length>,
    /// Compact vertex of each original vertex.
    pub image: Vec<Option<VertexId>>,
    pub clustering: Clustering,
}

impl DecomposedInstance {
    /// Index of the part each demand was assigned to.
    pub fn owner_of(&self, d: Demand) -> Option<usize> {
        self.parts.iter().position(|p| p.demands.contains(&d))
    }

    /// Largest number of parts sharing one input edge.
    pub fn max_edge_multiplicity(&self) -> usize {
        let mut count = std::collections::BTreeMap::<EdgeId, usize>::new();
        for p in &self.parts {
            for &e in &p.edges {
                *count.entry(e).or_default() += 1;
            }
        }
        count.into_values().max().unwrap_or(0)
    }

    pub fn nesting_depth(&self) -> usize {
        self.clustering.forest.depth()
    }
}

/// Quotient of `g` by `edges` with vertices renumbered `0..n'`, edge ids kept.
fn compact_quotient(g: &Graph, edges: &[EdgeId]) -> (Graph, Vec<Option<VertexId>>, Vec<Vec<VertexId>>) {
    let q = g.quotient(edges);
    let mut compact = vec![None; g.vertex_bound()];
    let mut preimage: Vec<Vec<VertexId>> = Vec::new();
    let mut by_rep = vec![None; g.vertex_bound()];
    for v in g.vertices() {
        let r = q.image(v).index();
        let id = *by_rep[r].get_or_insert_with(|| {
            preimage.push(Vec::new());
            VertexId((preimage.len() - 1) as u32)
        });
        compact[v.index()] = Some(id);
        preimage[id.index()].push(v);
    }
    let mut h = Graph::with_vertices(preimage.len());
    for ed in q.graph.edges() {
        let (u, v) = (compact[ed.u.index()].unwrap(), compact[ed.v.index()].unwrap());
        h.insert_edge(ed.id, u, v, ed.len).expect("valid edge");
    }
    (h, compact, preimage)
}

pub fn decompose_instance(
    g: &Graph,
    demands: &[Demand],
    epsilon: Length,
    delta: Length,
) -> Result<DecomposedInstance, GwError> {
    assert!(epsilon > Length::zero() && epsilon <= Length::one(), "epsilon must lie in (0, 1]");
    assert!(delta > Length::zero(), "delta must be positive");
    let gw = gw_steiner_forest(g, demands)?;
    let approx = gw.forest;
    let (h, image, preimage) = compact_quotient(g, &approx);

    let mut comp_len = vec![Length::zero(); h.num_vertices()];
    let mut has_edge = vec![false; h.num_vertices()];
    for &e in &approx {
        let ed = g.e(e);
        let c = image[ed.u.index()].unwrap().index();
        comp_len[c] += ed.len;
        has_edge[c] = true;
    }
    let k = has_edge.iter().filter(|&&b| b).count();
    let total = g.length_of(&approx);
    let mut energy = vec![Length::zero(); h.num_vertices()];
    if k > 0 {
        let threshold = epsilon / Length::from_integer(2 * k as i128) * total;
        let scale = Length::from_integer(2) / epsilon;
        for c in 0..h.num_vertices() {
            if has_edge[c] && comp_len[c] >= threshold {
                energy[c] = scale * comp_len[c];
            }
        }
    }

    let clustering = cluster(&h, &energy, delta);
    let mut approx_of = vec![Vec::new(); h.num_vertices()];
    for &e in &approx {
        approx_of[image[g.e(e).u.index()].unwrap().index()].push(e);
    }
    let expand = |vs: &[VertexId]| -> Vec<VertexId> {
        let mut out: Vec<VertexId> = vs.iter().flat_map(|c| preimage[c.index()].iter().copied()).collect();
        out.sort_unstable();
        out
    };
    let nodes = &clustering.forest.nodes;
    // tree vertex sets partition the input, so each demand has one candidate
    let mut tree_of = vec![usize::MAX; g.vertex_bound()];
    let mut tree_vertices = Vec::with_capacity(nodes.len());
    for (i, nd) in nodes.iter().enumerate() {
        let tv = expand(&nd.tree_vertices);
        for v in &tv {
            tree_of[v.index()] = i;
        }
        tree_vertices.push(tv);
    }
    let mut part_demands = vec![Vec::new(); nodes.len()];
    for &d in demands {
        let i = tree_of[d.s.index()];
        if i != usize::MAX && i == tree_of[d.t.index()] {
            part_demands[i].push(d);
        }
    }
    let mut stamp = vec![usize::MAX; g.vertex_bound()];
    let mut parts = Vec::with_capacity(nodes.len());
    for (i, (nd, (tv, ds))) in nodes.iter().zip(tree_vertices.into_iter().zip(part_demands)).enumerate() {
        let members = expand(&nd.members);
        for v in &members {
            stamp[v.index()] = i;
        }
        let mut edges: Vec<EdgeId> = members
            .iter()
            .flat_map(|&v| g.incident(v).iter().copied().filter(move |&e| g.e(e).u == v))
            .filter(|&e| stamp[g.e(e).v.index()] == i)
            .collect();
        edges.sort_unstable();
        let mut tree = nd.tree_edges.clone();
        for c in &nd.tree_vertices {
            tree.extend_from_slice(&approx_of[c.index()]);
        }
        tree.sort_unstable();
        parts.push(Subinstance {
            members,
            edges,
            tree,
            tree_vertices: tv,
            demands: ds,
            parent: nd.parent,
            depth: nd.depth,
        });
    }
    Ok(DecomposedInstance { parts, approx, components: k, energy, image, clustering })
}
