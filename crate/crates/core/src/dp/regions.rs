//! Covers of each contracted cluster by short subpaths of Euler tours of its
//! shortest-path forest, one cover per distance scale.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::cluster::ClusterTable;
use super::contract::ContractionLayers;
use crate::branch::BranchDecomposition;
use crate::graph::{EdgeId, Graph, Length, VertexId};

/// All regions of one scale `i`: subpaths of at most `floor(beta * 2^i)` tour
/// steps, listed as the cluster vertices they uncontract to.
#[derive(Clone, Debug, Default)]
pub struct Scale {
    pub i: u32,
    pub regions: Vec<Vec<VertexId>>,
    /// Regions emitted before duplicates were merged.
    pub emitted: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ClusterRegions {
    pub mu: u32,
    /// Distance from the boundary in the contracted cluster, per cluster vertex.
    pub dist: BTreeMap<VertexId, u64>,
    /// Scales `1..=mu`.
    pub scales: Vec<Scale>,
    /// Vertices of the contracted cluster within `2^i` of the boundary,
    /// uncontracted, per scale.
    pub balls: Vec<Vec<VertexId>>,
}

impl ClusterRegions {
    pub fn scale(&self, i: u32) -> &Scale {
        &self.scales[i as usize - 1]
    }
}

#[derive(Clone, Debug)]
pub struct RegionCover {
    pub beta: Length,
    pub clusters: Vec<ClusterRegions>,
}

fn pow2(i: u32) -> Length {
    Length::from_integer(1i128 << i)
}

/// Smallest `mu` with `2^mu > d`.
fn scale_above(d: u64) -> u32 {
    64 - d.leading_zeros()
}

pub fn build_regions(
    g: &Graph,
    bd: &BranchDecomposition,
    clusters: &ClusterTable,
    layers: &ContractionLayers,
    beta: Length,
) -> RegionCover {
    let mut out = vec![ClusterRegions::default(); bd.len()];
    for n in bd.postorder() {
        let info = clusters.info(n);
        let sub = g.edge_subgraph(&info.edges);
        let q = sub.quotient(&layers.clusters[n.index()].b);
        let mut roots: Vec<VertexId> = info.boundary.iter().map(|&v| q.image(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        let sp = q.graph.shortest_path_forest(&roots);
        let d = |x: VertexId| sp.dist(x).map(|l| l.to_integer().to_u64().expect("unit lengths"));
        let mut members: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        let mut dist = BTreeMap::new();
        for &v in &info.vertices {
            let img = q.image(v);
            members.entry(img).or_default().push(v);
            if let Some(x) = d(img) {
                dist.insert(v, x);
            }
        }
        let far = info.active.iter().filter_map(|v| dist.get(v)).copied().max().unwrap_or(0);
        let mut mu = scale_above(far);
        if mu == 0 && info.active.iter().any(|v| !info.boundary.contains(v)) {
            mu = 1;
        }
        let reach = 1u64 << mu;
        let mut children: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
        for x in q.graph.vertices() {
            if let (Some(e), Some(dx)) = (sp.parent[x.index()], d(x)) {
                if dx <= reach {
                    children.entry(q.graph.e(e).other(x)).or_default().push((e, x));
                }
            }
        }
        let tours: Vec<Vec<VertexId>> = roots.iter().map(|&r| euler_tour(r, &mut children)).collect();
        let uncontract = |imgs: &[VertexId]| {
            let mut vs: Vec<VertexId> = imgs.iter().flat_map(|x| members.get(x).cloned().unwrap_or_default()).collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        };
        let mut scales = Vec::new();
        let mut balls = Vec::new();
        for i in 1..=mu {
            let lambda = (beta * pow2(i)).floor().to_integer().to_usize().unwrap_or(0);
            let limit = (Length::from_integer(1) + beta) * pow2(i);
            let mut emitted = 0;
            let mut regions = Vec::new();
            for tour in &tours {
                // the final position repeats the root, already covered at position 0
                for x in (0..tour.len().saturating_sub(1).max(1)).step_by(lambda.max(1)) {
                    let start = tour[x];
                    if Length::from_integer(d(start).unwrap() as i128) <= limit {
                        emitted += 1;
                        regions.push(uncontract(&tour[x..=(x + lambda).min(tour.len() - 1)]));
                    }
                }
            }
            regions.sort();
            regions.dedup();
            scales.push(Scale { i, regions, emitted });
            let ball: Vec<VertexId> = q.graph.vertices().filter(|&x| d(x).is_some_and(|dx| dx <= 1 << i)).collect();
            balls.push(uncontract(&ball));
        }
        out[n.index()] = ClusterRegions { mu, dist, scales, balls };
    }
    RegionCover { beta, clusters: out }
}

/// Vertex sequence of a depth-first walk, children in edge-id order.
fn euler_tour(root: VertexId, children: &mut BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>) -> Vec<VertexId> {
    let mut tour = vec![root];
    let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
    for list in children.values_mut() {
        list.sort_unstable();
    }
    while let Some((v, k)) = stack.pop() {
        let next = children.get(&v).and_then(|c| c.get(k)).map(|&(_, w)| w);
        match next {
            Some(w) => {
                stack.push((v, k + 1));
                stack.push((w, 0));
                tour.push(w);
            }
            None => {
                if let Some(&(p, _)) = stack.last() {
                    tour.push(p);
                }
            }
        }
    }
    tour
}

impl RegionCover {
    /// Every vertex within `2^i` of the boundary lies in a region of scale
    /// `i`; returns the first uncovered (node, scale, vertex).
    pub fn check_covering(&self) -> Result<(), (usize, u32, VertexId)> {
        for (n, c) in self.clusters.iter().enumerate() {
            for s in &c.scales {
                let covered: std::collections::BTreeSet<VertexId> = s.regions.iter().flatten().copied().collect();
                if let Some(&v) = c.balls[s.i as usize - 1].iter().find(|v| !covered.contains(v)) {
                    return Err((n, s.i, v));
                }
            }
        }
        Ok(())
    }

    /// `|L_i| <= 2 alpha (1 + 2 beta) / beta + |boundary|` at every scale.
    pub fn check_cardinality(&self, clusters: &ClusterTable, alpha: Length) -> Result<(), (usize, u32, usize)> {
        let two = Length::from_integer(2);
        for (n, c) in self.clusters.iter().enumerate() {
            let bound = two * alpha * (Length::from_integer(1) + two * self.beta) / self.beta
                + Length::from_integer(clusters.infos[n].boundary.len() as i128);
            for s in &c.scales {
                if Length::from_integer(s.emitted as i128) > bound {
                    return Err((n, s.i, s.emitted));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{heuristic_decompose, parse_decomposition};
    use crate::dp::contract::contract_alpha;
    use crate::graph::{length, Demand};
    use crate::io::{generate_grid_instance, generate_planar_instance, LengthDist};
    use num_rational::Ratio;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn tour_of_a_path() {
        let mut ch = BTreeMap::new();
        ch.insert(v(0), vec![(EdgeId(0), v(1))]);
        ch.insert(v(1), vec![(EdgeId(1), v(2))]);
        assert_eq!(euler_tour(v(0), &mut ch), vec![v(0), v(1), v(2), v(1), v(0)]);
    }

    #[test]
    fn one_edge_with_one_boundary_vertex() {
        // edge 0-1 in a cluster whose boundary is {0}; vertex 1 is a terminal
        let mut g = Graph::with_vertices(3);
        g.add_edge(v(0), v(1), length(1)).unwrap();
        g.add_edge(v(0), v(2), length(1)).unwrap();
        let bd = parse_decomposition("(0 1)").unwrap();
        let d = [Demand::new(v(1), v(2)).unwrap()];
        let ct = ClusterTable::build(&g, &bd, &d);
        let layers = contract_alpha(&g, &bd, length(100));
        let cover = build_regions(&g, &bd, &ct, &layers, length(1));
        let leaf = bd.node_ids().find(|&n| bd.leaf_edge(n) == Some(EdgeId(0))).unwrap();
        let c = &cover.clusters[leaf.index()];
        assert_eq!(c.mu, 1);
        assert_eq!(c.scale(1).regions, vec![vec![v(0), v(1)]]);
    }

    #[test]
    fn singletons_when_beta_is_small() {
        let inst = generate_grid_instance(3, 3, 2, LengthDist::Constant(1), 1).unwrap();
        let bd = heuristic_decompose(&inst.graph);
        let ct = ClusterTable::build(&inst.graph, &bd, &inst.demands);
        let layers = contract_alpha(&inst.graph, &bd, length(50));
        let cover = build_regions(&inst.graph, &bd, &ct, &layers, Ratio::new(1, 100));
        for c in &cover.clusters {
            for s in &c.scales {
                assert!(s.regions.iter().all(|r| r.len() == 1));
            }
        }
        assert_eq!(cover.check_covering(), Ok(()));
    }

    #[test]
    fn covering_and_cardinality_on_random_clusters() {
        for seed in 0..40 {
            let inst = generate_planar_instance(4, 5, 3, 0.3, LengthDist::Constant(1), seed).unwrap();
            let g = &inst.graph;
            let bd = heuristic_decompose(g);
            let ct = ClusterTable::build(g, &bd, &inst.demands);
            let alpha = length(1 + (seed % 4) as i64);
            let beta = [Ratio::new(1, 8), Ratio::new(1, 2), length(1)][seed as usize % 3];
            let layers = contract_alpha(g, &bd, alpha);
            let cover = build_regions(g, &bd, &ct, &layers, beta);
            assert_eq!(cover.check_covering(), Ok(()), "seed {seed}");
            assert_eq!(cover.check_cardinality(&ct, alpha), Ok(()), "seed {seed}");
        }
    }
}
