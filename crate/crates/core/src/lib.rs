//! Steiner forest on planar graphs, from primal-dual clustering down to a
//! dynamic program over branch decompositions.

pub mod branch;
pub mod dp;
pub mod dsu;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pc;
pub mod pipeline;
pub mod priority;

pub use graph::{Demand, EdgeId, Forest, Graph, GraphError, Length, VertexId};
