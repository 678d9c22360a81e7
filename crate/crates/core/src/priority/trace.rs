//! Random operation traces for comparing two queues step by step.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Bicategory, Category, EdgeQueue, QueueError};
use crate::graph::{EdgeId, Length, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Decrease(Bicategory, Length),
    FindMin(Bicategory),
    ChangeCategory(VertexId, Category),
    Contract(EdgeId, Category),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Unit(Result<(), QueueError>),
    Min(Result<(EdgeId, Length), QueueError>),
    Vertex(Result<VertexId, QueueError>),
}

pub fn apply<Q: EdgeQueue>(q: &mut Q, op: &Op) -> Outcome {
    match *op {
        Op::Decrease(b, d) => Outcome::Unit(q.decrease_cost(b, d)),
        Op::FindMin(b) => Outcome::Min(q.find_min(b)),
        Op::ChangeCategory(v, c) => Outcome::Unit(q.change_category(v, c)),
        Op::Contract(e, c) => Outcome::Vertex(q.contract_edge(e, c)),
    }
}

/// Draws an operation valid for the current state of `q`.
pub fn random_op<Q: EdgeQueue, R: Rng>(q: &Q, rng: &mut R) -> Op {
    let k = q.categories();
    let b = Bicategory::new(rng.gen_range(0..k), rng.gen_range(0..k));
    match rng.gen_range(0..10) {
        0..=2 => Op::Decrease(b, Length::new(rng.gen_range(0..4), rng.gen_range(1..3))),
        3..=5 => Op::FindMin(b),
        6..=7 => match q.live_vertices().choose(rng) {
            Some(&v) => Op::ChangeCategory(v, rng.gen_range(0..k)),
            None => Op::FindMin(b),
        },
        _ => match q.live_edges().choose(rng) {
            Some(&e) => Op::Contract(e, rng.gen_range(0..k)),
            None => Op::FindMin(b),
        },
    }
}

/// Costs of all live edges, keyed by id.
pub fn all_costs<Q: EdgeQueue>(q: &mut Q) -> Vec<(EdgeId, Length)> {
    q.live_edges().into_iter().map(|e| (e, q.cost(e).unwrap())).collect()
}
