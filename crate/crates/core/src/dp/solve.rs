//! Bottom-up table computation over a branch decomposition and recovery of
//! an optimal edge set from the tables.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use super::cluster::{ClusterInfo, ClusterTable};
use super::config::Configuration;
use super::partition::Partition;
use crate::branch::{BranchDecomposition, BranchError, NodeId};
use crate::graph::{Demand, EdgeId, Graph, Length, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DpError {
    #[error("invalid decomposition: {0}")]
    Decomposition(#[from] BranchError),
    #[error("demand {0:?} has an endpoint without incident edges")]
    IsolatedTerminal(Demand),
    #[error("no configuration assignment satisfies every demand")]
    Infeasible,
    #[error("cluster {node} exceeded {limit} table entries")]
    TableLimit { node: NodeId, limit: usize },
}

/// Decides which configurations a cluster's table may hold.
pub trait ConfigFilter {
    fn allows(&mut self, node: NodeId, config: &Configuration) -> bool;
}

/// Keeps every configuration.
pub struct AllConfigs;

impl ConfigFilter for AllConfigs {
    fn allows(&mut self, _: NodeId, _: &Configuration) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Back {
    Leaf { taken: bool },
    Join(u32, u32),
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub config: Configuration,
    pub cost: Length,
    pub back: Back,
}

#[derive(Clone, Debug)]
pub struct DpTable {
    pub clusters: ClusterTable,
    pub tables: Vec<Vec<Entry>>,
    pub root: Option<NodeId>,
    pub cost: Length,
    root_entry: Option<usize>,
}

#[derive(Default)]
struct Builder {
    entries: Vec<Entry>,
    index: HashMap<Configuration, usize>,
}

impl Builder {
    fn offer(&mut self, config: Configuration, cost: Length, back: Back) {
        match self.index.get(&config) {
            Some(&i) => {
                if cost < self.entries[i].cost {
                    self.entries[i].cost = cost;
                    self.entries[i].back = back;
                }
            }
            None => {
                self.index.insert(config.clone(), self.entries.len());
                self.entries.push(Entry { config, cost, back });
            }
        }
    }
}

/// Small union-find on a fixed-size ground set.
struct Uf(Vec<u8>);

impl Uf {
    fn new(n: usize) -> Self {
        Uf((0..n as u8).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] as usize != x {
            self.0[x] = self.0[self.0[x] as usize];
            x = self.0[x] as usize;
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b) as u8;
        }
    }
    /// Merges elements of `pos` that share a block of `p`.
    fn absorb(&mut self, p: &Partition, pos: &[usize]) {
        let mut first = [usize::MAX; 64];
        for (i, &x) in pos.iter().enumerate() {
            let l = p.label(i);
            if first[l] == usize::MAX {
                first[l] = x;
            } else {
                self.union(first[l], x);
            }
        }
    }
    fn partition_on(&mut self, pos: &[usize]) -> Partition {
        let roots: Vec<usize> = pos.iter().map(|&x| self.find(x)).collect();
        Partition::from_labels(&roots)
    }
}

fn is_outgoing(all: &Partition, boundary_pos: &[usize]) -> bool {
    let mut hit = [false; 64];
    for &p in boundary_pos {
        hit[all.label(p)] = true;
    }
    (0..all.num_blocks()).all(|b| hit[b])
}

fn positions(ground: &[VertexId], verts: &[VertexId]) -> Vec<usize> {
    verts.iter().map(|v| ground.binary_search(v).expect("vertex in ground")).collect()
}

fn leaf_table(
    g: &Graph,
    node: NodeId,
    e: EdgeId,
    info: &ClusterInfo,
    settled: bool,
    filter: &mut dyn ConfigFilter,
) -> Builder {
    let ed = g.e(e);
    let nb = info.boundary.len();
    let mut out = Builder::default();
    for taken in [false, true] {
        if settled && !taken {
            continue;
        }
        let inner = if taken && nb == 2 { Partition::single(2) } else { Partition::discrete(nb) };
        for outer in Partition::all(nb) {
            let mut uf = Uf::new(info.active.len());
            uf.absorb(&outer, &info.boundary_pos);
            if taken {
                if let (Some(a), Some(b)) = (info.active_index(ed.u), info.active_index(ed.v)) {
                    uf.union(a, b);
                }
            }
            let all = uf.partition_on(&(0..info.active.len()).collect::<Vec<_>>());
            if !is_outgoing(&all, &info.boundary_pos) {
                continue;
            }
            let config = Configuration { inner: inner.clone(), outer, all };
            if filter.allows(node, &config) {
                let cost = if taken { ed.len } else { Length::zero() };
                out.offer(config, cost, Back::Leaf { taken });
            }
        }
    }
    out
}

struct JoinPlan {
    n: usize,
    pos_a: Vec<usize>,
    pos_b: Vec<usize>,
    pos_0: Vec<usize>,
    bnd_a: Vec<usize>,
    bnd_b: Vec<usize>,
    bnd_0: Vec<usize>,
    /// Positions of the shared active vertices inside each child's list.
    shared_a: Vec<usize>,
    shared_b: Vec<usize>,
    settled: Vec<(usize, usize)>,
    unsatisfiable: bool,
}

impl JoinPlan {
    fn new(i0: &ClusterInfo, ia: &ClusterInfo, ib: &ClusterInfo, settled: &[Demand]) -> Self {
        let mut ground: Vec<VertexId> = ia.active.iter().chain(&ib.active).copied().collect();
        ground.sort_unstable();
        ground.dedup();
        let pos_a = positions(&ground, &ia.active);
        let pos_b = positions(&ground, &ib.active);
        let bnd_a = ia.boundary_pos.iter().map(|&p| pos_a[p]).collect();
        let bnd_b = ib.boundary_pos.iter().map(|&p| pos_b[p]).collect();
        let mut shared_a = Vec::new();
        let mut shared_b = Vec::new();
        for (i, v) in ia.active.iter().enumerate() {
            if let Some(j) = ib.active_index(*v) {
                shared_a.push(i);
                shared_b.push(j);
            }
        }
        let mut unsatisfiable = false;
        let settled = settled
            .iter()
            .filter_map(|d| match (ground.binary_search(&d.s), ground.binary_search(&d.t)) {
                (Ok(a), Ok(b)) => Some((a, b)),
                _ => {
                    unsatisfiable = true;
                    None
                }
            })
            .collect();
        Self {
            n: ground.len(),
            pos_0: positions(&ground, &i0.active),
            bnd_0: positions(&ground, &i0.boundary),
            pos_a,
            pos_b,
            bnd_a,
            bnd_b,
            shared_a,
            shared_b,
            settled,
            unsatisfiable,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn join_table(
    node: NodeId,
    i0: &ClusterInfo,
    ia: &ClusterInfo,
    ib: &ClusterInfo,
    ta: &[Entry],
    tb: &[Entry],
    settled: &[Demand],
    filter: &mut dyn ConfigFilter,
    limit: usize,
) -> Result<Builder, DpError> {
    let plan = JoinPlan::new(i0, ia, ib, settled);
    let mut out = Builder::default();
    if plan.unsatisfiable {
        return Ok(out);
    }
    let mut buckets: HashMap<Partition, Vec<usize>> = HashMap::new();
    for (j, eb) in tb.iter().enumerate() {
        buckets.entry(eb.config.all.restrict(&plan.shared_b)).or_default().push(j);
    }
    let outers: Vec<Partition> = Partition::all(plan.bnd_0.len()).collect();
    let mut outer_cache: HashMap<[&Partition; 4], Vec<usize>> = HashMap::new();
    for (i, ea) in ta.iter().enumerate() {
        let Some(bucket) = buckets.get(&ea.config.all.restrict(&plan.shared_a)) else { continue };
        for &j in bucket {
            let eb = &tb[j];
            let key = [&ea.config.inner, &ea.config.outer, &eb.config.inner, &eb.config.outer];
            let valid = outer_cache.entry(key).or_insert_with(|| {
                (0..outers.len())
                    .filter(|&k| {
                        let x = &outers[k];
                        [
                            (&plan.bnd_a, &eb.config.inner, &plan.bnd_b, &ea.config.outer),
                            (&plan.bnd_b, &ea.config.inner, &plan.bnd_a, &eb.config.outer),
                        ]
                        .iter()
                        .all(|(own, sib_inner, sib_pos, own_outer)| {
                            let mut u = Uf::new(plan.n);
                            u.absorb(x, &plan.bnd_0);
                            u.absorb(sib_inner, sib_pos);
                            u.partition_on(own) == **own_outer
                        })
                    })
                    .collect()
            });
            if valid.is_empty() {
                continue;
            }
            let mut base = Uf::new(plan.n);
            base.absorb(&ea.config.all, &plan.pos_a);
            base.absorb(&eb.config.all, &plan.pos_b);
            let mut inner_uf = Uf::new(plan.n);
            inner_uf.absorb(&ea.config.inner, &plan.bnd_a);
            inner_uf.absorb(&eb.config.inner, &plan.bnd_b);
            let inner0 = inner_uf.partition_on(&plan.bnd_0);
            let cost = ea.cost + eb.cost;
            for &k in valid.iter() {
                let x = &outers[k];
                let mut uf = Uf(base.0.clone());
                uf.absorb(x, &plan.bnd_0);
                if uf.partition_on(&plan.pos_a) != ea.config.all || uf.partition_on(&plan.pos_b) != eb.config.all {
                    continue;
                }
                if !plan.settled.iter().all(|&(s, t)| uf.find(s) == uf.find(t)) {
                    continue;
                }
                let all0 = uf.partition_on(&plan.pos_0);
                if !is_outgoing(&all0, &i0.boundary_pos) {
                    continue;
                }
                let config = Configuration { inner: inner0.clone(), outer: x.clone(), all: all0 };
                if filter.allows(node, &config) {
                    out.offer(config, cost, Back::Join(i as u32, j as u32));
                    if out.entries.len() > limit {
                        return Err(DpError::TableLimit { node, limit });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct DpOptions {
    /// Largest table any single cluster may hold.
    pub table_limit: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self { table_limit: 2_000_000 }
    }
}

/// Shortest forest whose canonical configurations all pass `filter`.
pub fn dp_solve(
    g: &Graph,
    bd: &BranchDecomposition,
    demands: &[Demand],
    filter: &mut dyn ConfigFilter,
    opts: DpOptions,
) -> Result<DpTable, DpError> {
    bd.validate(g)?;
    for d in demands {
        if g.degree(d.s) == 0 || g.degree(d.t) == 0 {
            return Err(DpError::IsolatedTerminal(*d));
        }
    }
    let clusters = ClusterTable::build(g, bd, demands);
    let mut tables: Vec<Vec<Entry>> = vec![Vec::new(); bd.len()];
    for n in bd.postorder() {
        let settled: Vec<Demand> = clusters.settled_at[n.index()].iter().map(|&k| demands[k]).collect();
        let built = match bd.children(n) {
            None => leaf_table(g, n, bd.leaf_edge(n).unwrap(), clusters.info(n), !settled.is_empty(), filter),
            Some((a, b)) => join_table(
                n,
                clusters.info(n),
                clusters.info(a),
                clusters.info(b),
                &tables[a.index()],
                &tables[b.index()],
                &settled,
                filter,
                opts.table_limit,
            )?,
        };
        if built.entries.is_empty() {
            return Err(DpError::Infeasible);
        }
        tables[n.index()] = built.entries;
    }
    let root = bd.root();
    let (cost, root_entry) = match root {
        None => (Length::zero(), None),
        Some(r) => {
            let (i, e) = tables[r.index()]
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.cost.cmp(&y.1.cost))
                .ok_or(DpError::Infeasible)?;
            (e.cost, Some(i))
        }
    };
    Ok(DpTable { clusters, tables, root, cost, root_entry })
}

impl DpTable {
    /// Edge set realising the optimal root entry.
    pub fn reconstruct(&self, bd: &BranchDecomposition) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let (Some(r), Some(i)) = (self.root, self.root_entry) else { return out };
        let mut stack = vec![(r, i)];
        while let Some((n, i)) = stack.pop() {
            match self.tables[n.index()][i].back {
                Back::Leaf { taken } => {
                    if taken {
                        out.push(bd.leaf_edge(n).unwrap());
                    }
                }
                Back::Join(x, y) => {
                    let (a, b) = bd.children(n).unwrap();
                    stack.push((a, x as usize));
                    stack.push((b, y as usize));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn max_table(&self) -> usize {
        self.tables.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// One line per cluster: size, boundary and active counts, table size
    /// and cheapest entry.
    pub fn dump(&self, bd: &BranchDecomposition) -> String {
        let mut s = String::new();
        for n in bd.postorder() {
            let info = self.clusters.info(n);
            let t = &self.tables[n.index()];
            let best = t.iter().map(|e| e.cost).min();
            let _ = writeln!(
                s,
                "cluster={} edges={} boundary={} active={} configs={} best={}",
                n,
                info.edges.len(),
                info.boundary.len(),
                info.active.len(),
                t.len(),
                best.map_or("-".to_string(), |c| c.to_string()),
            );
        }
        s
    }
}
