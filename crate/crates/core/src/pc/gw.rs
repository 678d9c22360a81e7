//! Moat-growing 2-approximation for Steiner forest, driven by the category
//! queue with categories active and inactive.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::graph::{Demand, EdgeId, Graph, Length, VertexId};
use crate::priority::{Bicategory, CategoryQueue, EdgeQueue, NaiveQueue};

const ACTIVE: usize = 0;
const INACTIVE: usize = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GwError {
    #[error("demand {0:?} has endpoints in different components")]
    Infeasible(Demand),
    #[error("demand {0:?} names a vertex outside the graph")]
    UnknownVertex(Demand),
}

#[derive(Clone, Debug)]
pub struct GwResult {
    /// Pruned forest: only edges on some demand path.
    pub forest: Vec<EdgeId>,
    /// Every edge contracted during growth, in order.
    pub grown: Vec<EdgeId>,
    /// Sum of moat radii, a lower bound on the optimum.
    pub dual: Length,
}

pub fn gw_steiner_forest(g: &Graph, demands: &[Demand]) -> Result<GwResult, GwError> {
    run(g, demands, |cats, edges| CategoryQueue::new(cats, 2, edges))
}

/// Same algorithm on the reference queue.
pub fn gw_steiner_forest_naive(g: &Graph, demands: &[Demand]) -> Result<GwResult, GwError> {
    run(g, demands, |cats, edges| NaiveQueue::new(cats, 2, edges))
}

fn run<Q: EdgeQueue>(
    g: &Graph,
    demands: &[Demand],
    make: impl FnOnce(Vec<usize>, &[(VertexId, VertexId, Length)]) -> Q,
) -> Result<GwResult, GwError> {
    for d in demands {
        if !g.has_vertex(d.s) || !g.has_vertex(d.t) {
            return Err(GwError::UnknownVertex(*d));
        }
    }
    if let Some(d) = g.first_disconnected(demands) {
        return Err(GwError::Infeasible(d));
    }
    let n = g.vertex_bound();
    // demand ids seen an odd number of times inside each component
    let mut open: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, d) in demands.iter().enumerate() {
        for x in [d.s, d.t] {
            if !open[x.index()].remove(&i) {
                open[x.index()].insert(i);
            }
        }
    }
    let cats: Vec<usize> = open.iter().map(|s| if s.is_empty() { INACTIVE } else { ACTIVE }).collect();
    let mut edges = Vec::with_capacity(g.edge_bound());
    for i in 0..g.edge_bound() {
        match g.edge(EdgeId(i as u32)) {
            Some(e) => edges.push((e.u, e.v, e.len)),
            None => edges.push((VertexId(0), VertexId(0), Length::zero())),
        }
    }
    let mut q = make(cats.clone(), &edges);
    let mut active = cats.iter().filter(|&&c| c == ACTIVE).count();
    let aa = Bicategory::new(ACTIVE, ACTIVE);
    let ai = Bicategory::new(ACTIVE, INACTIVE);
    let two = Length::from_integer(2);
    let mut grown = Vec::new();
    let mut dual = Length::zero();
    while active > 0 {
        let mut step: Option<Length> = None;
        if let Ok((_, c)) = q.find_min(aa) {
            step = Some(c / two);
        }
        if let Ok((_, c)) = q.find_min(ai) {
            step = Some(step.map_or(c, |s| s.min(c)));
        }
        let step = step.expect("active moats with no outgoing edge contradict feasibility");
        dual += step * Length::from_integer(active as i128);
        q.decrease_cost(aa, step * two).unwrap();
        q.decrease_cost(ai, step).unwrap();
        loop {
            let mut next: Option<EdgeId> = None;
            for b in [aa, ai] {
                if let Ok((e, c)) = q.find_min(b) {
                    if c.is_zero() && next.is_none_or(|x| e < x) {
                        next = Some(e);
                    }
                }
            }
            let Some(e) = next else { break };
            let (a, b) = q.endpoints(e).unwrap();
            active -= [a, b].iter().filter(|x| q.category(**x) == Some(ACTIVE)).count();
            let (mut sa, mut sb) = (std::mem::take(&mut open[a.index()]), std::mem::take(&mut open[b.index()]));
            if sa.len() < sb.len() {
                std::mem::swap(&mut sa, &mut sb);
            }
            for i in sb {
                if !sa.remove(&i) {
                    sa.insert(i);
                }
            }
            let cat = if sa.is_empty() { INACTIVE } else { ACTIVE };
            if cat == ACTIVE {
                active += 1;
            }
            let w = q.contract_edge(e, cat).unwrap();
            debug_assert_eq!(w.index(), open.len());
            open.push(sa);
            grown.push(e);
        }
    }
    let forest = g.prune_to_demands(&grown, demands);
    Ok(GwResult { forest, grown, dual })
}
