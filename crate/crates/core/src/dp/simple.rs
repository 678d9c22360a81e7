//! Simple configurations: those whose overall partition is explained by the
//! boundary partitions plus a short prioritized list of region unions.

use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::RangeInclusive;

use super::cluster::{ClusterInfo, ClusterTable};
use super::config::Configuration;
use super::partition::Partition;
use super::regions::{ClusterRegions, RegionCover};
use super::solve::ConfigFilter;
use crate::branch::NodeId;
use crate::dsu::DisjointSets;

/// One prioritized part: a scale and a set of regions of that scale, by
/// index into the cluster's region list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPart {
    pub scale: u32,
    pub regions: Vec<usize>,
}

/// `d` parts in priority order.
pub type Witness = Vec<WitnessPart>;

/// Scales admitted for a cluster: from `mu - ceil(log2 gamma) - 1` (at least
/// one) up to `mu`.
pub fn scale_range(mu: u32, gamma: f64) -> RangeInclusive<u32> {
    let lg = gamma.max(1.0).log2().ceil() as u32;
    let lo = mu.saturating_sub(lg + 1).max(1);
    lo..=mu
}

fn act_mask(info: &ClusterInfo, vertices: &[crate::graph::VertexId]) -> u128 {
    vertices.iter().filter_map(|&v| info.active_index(v)).fold(0, |m, i| m | 1 << i)
}

/// Active-vertex subpartition of a witness: part `j` is the active vertices
/// of its regions not claimed by an earlier part.
pub fn witness_parts(info: &ClusterInfo, regions: &ClusterRegions, w: &Witness) -> Vec<u128> {
    let mut taken = 0u128;
    w.iter()
        .map(|p| {
            let m = p.regions.iter().fold(0, |m, &r| m | act_mask(info, &regions.scale(p.scale).regions[r]));
            let part = m & !taken;
            taken |= part;
            part
        })
        .collect()
}

/// Joint partition of the boundary partitions and the given parts, on the
/// active vertices.
pub fn explained(config: &Configuration, info: &ClusterInfo, parts: &[u128]) -> Partition {
    let n = info.active.len();
    let mut uf = DisjointSets::new(n);
    for p in [&config.inner, &config.outer] {
        let mut first = vec![usize::MAX; p.num_blocks()];
        for (k, &pos) in info.boundary_pos.iter().enumerate() {
            let l = p.label(k);
            if first[l] == usize::MAX {
                first[l] = pos;
            } else {
                uf.union(first[l], pos);
            }
        }
    }
    for &part in parts {
        let members: Vec<usize> = (0..n).filter(|&i| part >> i & 1 == 1).collect();
        for w in members.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    Partition::from_labels(&roots)
}

/// Checks a given witness exactly.
pub fn is_simple_with(
    config: &Configuration,
    info: &ClusterInfo,
    regions: &ClusterRegions,
    range: &RangeInclusive<u32>,
    w: &Witness,
) -> bool {
    w.len() <= info.boundary.len()
        && w.iter()
            .all(|p| range.contains(&p.scale) && p.regions.iter().all(|&r| r < regions.scale(p.scale).regions.len()))
        && explained(config, info, &witness_parts(info, regions, w)) == config.all
}

/// Searches for a witness. Each step picks a block of the overall partition
/// and a scale and claims every region whose unclaimed active vertices stay
/// inside that block. A returned witness is always valid; a configuration
/// may be simple through a witness this search does not reach.
pub fn find_witness(
    config: &Configuration,
    info: &ClusterInfo,
    regions: &ClusterRegions,
    range: &RangeInclusive<u32>,
) -> Option<Witness> {
    let n = info.active.len();
    assert!(n <= 128, "too many active vertices for the simplicity search");
    let start = explained(config, info, &[]);
    if start == config.all {
        return Some(Vec::new());
    }
    if regions.scales.is_empty() || info.boundary.is_empty() {
        return None;
    }
    let blocks: Vec<u128> = config.all.blocks().iter().map(|b| b.iter().fold(0, |m, &i| m | 1 << i)).collect();
    let masks: Vec<(u32, Vec<u128>)> =
        range.clone().map(|i| (i, regions.scale(i).regions.iter().map(|r| act_mask(info, r)).collect())).collect();
    let mut seen: HashSet<(u128, Vec<u128>)> = HashSet::new();
    let mut queue: VecDeque<(u128, Vec<u128>, Witness)> = VecDeque::new();
    queue.push_back((0, Vec::new(), Vec::new()));
    while let Some((taken, parts, w)) = queue.pop_front() {
        if w.len() == info.boundary.len() {
            continue;
        }
        for &block in &blocks {
            for (scale, rmasks) in &masks {
                let mut part = 0u128;
                let mut chosen = Vec::new();
                for (k, &m) in rmasks.iter().enumerate() {
                    let fresh = m & !taken;
                    if fresh != 0 && fresh & !block == 0 {
                        part |= fresh;
                        chosen.push(k);
                    }
                }
                if part == 0 {
                    continue;
                }
                let mut next_parts = parts.clone();
                next_parts.push(part);
                let mut next_w = w.clone();
                next_w.push(WitnessPart { scale: *scale, regions: chosen });
                if explained(config, info, &next_parts) == config.all {
                    return Some(next_w);
                }
                let mut key_parts = next_parts.clone();
                key_parts.sort_unstable();
                if seen.insert((taken | part, key_parts)) {
                    queue.push_back((taken | part, next_parts, next_w));
                }
            }
        }
    }
    None
}

/// Every outgoing configuration of the cluster for which a witness is
/// found, in enumeration order.
pub fn enumerate_simple_configs(
    info: &ClusterInfo,
    regions: &ClusterRegions,
    range: &RangeInclusive<u32>,
) -> Vec<Configuration> {
    let nb = info.boundary.len();
    let free: Vec<usize> = (0..info.active.len()).filter(|i| !info.boundary_pos.contains(i)).collect();
    let mut out = Vec::new();
    for inner in Partition::all(nb) {
        for outer in Partition::all(nb) {
            let joint = inner.join(&outer);
            let k = joint.num_blocks();
            if k == 0 && !free.is_empty() {
                continue;
            }
            let total = (k as u64).pow(free.len() as u32);
            for code in 0..total {
                let mut labels = vec![0usize; info.active.len()];
                for (j, &p) in info.boundary_pos.iter().enumerate() {
                    labels[p] = joint.label(j);
                }
                let mut c = code;
                for &f in &free {
                    labels[f] = (c % k as u64) as usize;
                    c /= k as u64;
                }
                let config =
                    Configuration { inner: inner.clone(), outer: outer.clone(), all: Partition::from_labels(&labels) };
                if find_witness(&config, info, regions, range).is_some() {
                    out.push(config);
                }
            }
        }
    }
    out
}

/// Admits only configurations for which a simplicity witness is found.
pub struct SimpleFilter<'a> {
    clusters: &'a ClusterTable,
    cover: &'a RegionCover,
    gamma: f64,
    cache: HashMap<(NodeId, Configuration), bool>,
    pub checked: usize,
    pub rejected: usize,
}

impl<'a> SimpleFilter<'a> {
    pub fn new(clusters: &'a ClusterTable, cover: &'a RegionCover, gamma: f64) -> Self {
        Self { clusters, cover, gamma, cache: HashMap::new(), checked: 0, rejected: 0 }
    }
}

impl ConfigFilter for SimpleFilter<'_> {
    fn allows(&mut self, node: NodeId, config: &Configuration) -> bool {
        if let Some(&b) = self.cache.get(&(node, config.clone())) {
            return b;
        }
        let regions = &self.cover.clusters[node.index()];
        let range = scale_range(regions.mu, self.gamma);
        let ok = find_witness(config, self.clusters.info(node), regions, &range).is_some();
        self.checked += 1;
        if !ok {
            self.rejected += 1;
        }
        self.cache.insert((node, config.clone()), ok);
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{heuristic_decompose, BranchDecomposition};
    use crate::dp::contract::contract_alpha;
    use crate::dp::regions::{build_regions, Scale};
    use crate::dp::solve::{dp_solve, AllConfigs, DpOptions};
    use crate::graph::{length, EdgeId, Graph, VertexId};
    use crate::io::{generate_planar_instance, LengthDist};
    use crate::oracle::opt_by_subsets;
    use num_rational::Ratio;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn scale_window() {
        assert_eq!(scale_range(10, 16.0), 5..=10);
        assert_eq!(scale_range(10, 17.0), 4..=10);
        assert_eq!(scale_range(2, 16.0), 1..=2);
        assert!(scale_range(0, 4.0).is_empty());
    }

    /// Cluster: path 0-1-2 with boundary {0, 2}; vertex 1 is a terminal.
    fn path_cluster() -> (ClusterInfo, ClusterRegions) {
        let mut g = Graph::with_vertices(3);
        g.add_edge(v(0), v(1), length(1)).unwrap();
        g.add_edge(v(1), v(2), length(1)).unwrap();
        let d = [crate::graph::Demand::new(v(1), v(7)).unwrap()];
        let info = ClusterInfo::new(&g, vec![EdgeId(0), EdgeId(1)], vec![v(0), v(2)], &d);
        let regions = ClusterRegions {
            mu: 1,
            scales: vec![Scale {
                i: 1,
                regions: vec![vec![v(0)], vec![v(0), v(1)], vec![v(1), v(2)], vec![v(2)]],
                emitted: 4,
            }],
            ..Default::default()
        };
        (info, regions)
    }

    #[test]
    fn connected_cluster_claims_every_region() {
        let (info, regions) = path_cluster();
        let c = Configuration { inner: Partition::single(2), outer: Partition::discrete(2), all: Partition::single(3) };
        let w = find_witness(&c, &info, &regions, &(1..=1)).unwrap();
        assert_eq!(w, vec![WitnessPart { scale: 1, regions: vec![0, 1, 2, 3] }]);
        let bare = ClusterInfo { active: vec![v(0), v(2)], boundary_pos: vec![0, 1], ..info };
        let c = Configuration { all: Partition::single(2), ..c };
        assert_eq!(find_witness(&c, &bare, &regions, &(1..=1)), Some(Vec::new()));
    }

    #[test]
    fn terminal_needs_one_part() {
        let (info, regions) = path_cluster();
        // 1 hangs off 0 only: {0,1} {2}
        let c = Configuration {
            inner: Partition::discrete(2),
            outer: Partition::discrete(2),
            all: Partition::from_labels(&[0, 0, 1]),
        };
        let w = find_witness(&c, &info, &regions, &(1..=1)).unwrap();
        assert_eq!(w.len(), 1);
        assert!(is_simple_with(&c, &info, &regions, &(1..=1), &w));
        assert!(!is_simple_with(&c, &info, &regions, &(1..=1), &vec![WitnessPart { scale: 1, regions: vec![2] }]));
        assert!(find_witness(&c, &info, &regions, &std::ops::RangeInclusive::new(2, 1)).is_none());
    }

    #[test]
    fn no_regions_means_no_terminal_attachment() {
        let (info, mut regions) = path_cluster();
        regions.scales[0].regions = vec![vec![v(0), v(1), v(2)]];
        let c = Configuration {
            inner: Partition::discrete(2),
            outer: Partition::discrete(2),
            all: Partition::from_labels(&[0, 0, 1]),
        };
        // the only region straddles two blocks
        assert!(find_witness(&c, &info, &regions, &(1..=1)).is_none());
    }

    #[test]
    fn boundary_free_cluster_has_one_configuration() {
        let (info, regions) = path_cluster();
        let root = ClusterInfo { boundary: vec![], boundary_pos: vec![], active: vec![], ..info };
        let all = enumerate_simple_configs(&root, &regions, &(1..=1));
        assert_eq!(all.len(), 1);
        assert!(all[0].all.is_empty());
    }

    #[test]
    fn enumeration_matches_hand_count() {
        // boundary {0, 2}; vertex 1 joins either boundary block, and only a
        // region avoiding the other block can say so
        let (info, regions) = path_cluster();
        let found = enumerate_simple_configs(&info, &regions, &(1..=1));
        // 4 (inner, outer) pairs; joint one block -> 1 choice, two blocks -> 2
        assert_eq!(found.len(), 3 + 2);
        let (info, mut coarse) = path_cluster();
        coarse.scales[0].regions = vec![vec![v(0), v(1), v(2)]];
        assert_eq!(enumerate_simple_configs(&info, &coarse, &(1..=1)).len(), 3);
    }

    #[test]
    fn counts_grow_with_gamma() {
        for seed in 0..10 {
            let inst = generate_planar_instance(3, 4, 3, 0.3, LengthDist::Constant(1), seed).unwrap();
            let g = &inst.graph;
            let bd = heuristic_decompose(g);
            let ct = ClusterTable::build(g, &bd, &inst.demands);
            let layers = contract_alpha(g, &bd, length(2));
            let cover = build_regions(g, &bd, &ct, &layers, Ratio::new(1, 2));
            for n in bd.postorder() {
                let (info, regions) = (ct.info(n), &cover.clusters[n.index()]);
                if info.active.len() > 7 {
                    continue;
                }
                let gamma = 2.0;
                let a = enumerate_simple_configs(info, regions, &scale_range(regions.mu, gamma)).len();
                let b = enumerate_simple_configs(info, regions, &scale_range(regions.mu, gamma * 2.0)).len();
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn filter_keeps_exactness_with_fine_regions() {
        for seed in 0..15 {
            let inst = generate_planar_instance(3, 3, 2, 0.3, LengthDist::Constant(1), seed).unwrap();
            let g = &inst.graph;
            let bd: BranchDecomposition = heuristic_decompose(g);
            let ct = ClusterTable::build(g, &bd, &inst.demands);
            let layers = contract_alpha(g, &bd, length(1000));
            let cover = build_regions(g, &bd, &ct, &layers, Ratio::new(1, 100));
            let mut f = SimpleFilter::new(&ct, &cover, 8.0);
            let simple = dp_solve(g, &bd, &inst.demands, &mut f, DpOptions::default()).unwrap();
            let full = dp_solve(g, &bd, &inst.demands, &mut AllConfigs, DpOptions::default()).unwrap();
            assert_eq!(simple.cost, full.cost);
            assert_eq!(full.cost, opt_by_subsets(g, &inst.demands).unwrap().opt);
        }
    }
}
