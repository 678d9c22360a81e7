//! Edge priority structures for primal-dual simulations.
//!
//! Vertices carry categories; an edge's bicategory is the unordered pair of
//! its endpoints' categories. Supported operations: lower the cost of every
//! edge in a bicategory, find the cheapest edge of a bicategory, recategorize
//! a vertex, and contract an edge. [`CategoryQueue`] is the fast structure;
//! [`NaiveQueue`] stores costs explicitly and serves as its reference.

mod heap;
mod naive;
mod structure;
pub mod trace;

use thiserror::Error;

use crate::graph::{EdgeId, Length, VertexId};

pub use heap::{GroupId, MeldArena, NodeId};
pub use naive::NaiveQueue;
pub use structure::{CategoryQueue, OrientationStats};

pub type Category = usize;

/// Unordered pair of categories, stored with the smaller one first.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bicategory(Category, Category);

impl Bicategory {
    pub fn new(a: Category, b: Category) -> Self {
        if a <= b {
            Self(a, b)
        } else {
            Self(b, a)
        }
    }

    pub fn parts(self) -> (Category, Category) {
        (self.0, self.1)
    }

    fn index(self, k: usize) -> usize {
        self.0 * k + self.1
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QueueError {
    #[error("bicategory {0:?} is outside the category set")]
    UnknownBicategory(Bicategory),
    #[error("category {0} is outside the category set")]
    UnknownCategory(Category),
    #[error("vertex {0} is not live")]
    UnknownVertex(VertexId),
    #[error("edge {0} is not live")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("cost decrease must be nonnegative")]
    NegativeDecrease,
    #[error("bicategory {0:?} has no edges")]
    Empty(Bicategory),
    #[error("no orientation with outdegree at most {bound} reachable from {vertex}")]
    OrientationInfeasible { vertex: VertexId, bound: usize },
}

/// Operations shared by the fast structure and its naive reference.
pub trait EdgeQueue {
    fn decrease_cost(&mut self, b: Bicategory, delta: Length) -> Result<(), QueueError>;
    fn find_min(&mut self, b: Bicategory) -> Result<(EdgeId, Length), QueueError>;
    fn change_category(&mut self, v: VertexId, c: Category) -> Result<(), QueueError>;
    /// Contracts `e` into a fresh vertex of category `c` and returns it.
    fn contract_edge(&mut self, e: EdgeId, c: Category) -> Result<VertexId, QueueError>;
    fn category(&self, v: VertexId) -> Option<Category>;
    /// Current cost of a live edge.
    fn cost(&mut self, e: EdgeId) -> Option<Length>;
    fn endpoints(&mut self, e: EdgeId) -> Option<(VertexId, VertexId)>;
    fn live_edges(&self) -> Vec<EdgeId>;
    fn live_vertices(&self) -> Vec<VertexId>;
    fn categories(&self) -> usize;
}

fn check_bicategory(b: Bicategory, k: usize) -> Result<(), QueueError> {
    if b.1 >= k {
        return Err(QueueError::UnknownBicategory(b));
    }
    Ok(())
}
