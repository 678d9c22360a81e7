use super::{check_bicategory, Bicategory, Category, EdgeQueue, QueueError};
use crate::graph::{EdgeId, Length, VertexId};

#[derive(Clone, Debug)]
struct NaiveEdge {
    u: VertexId,
    v: VertexId,
    cost: Length,
}

/// Reference queue: explicit costs, linear scans.
#[derive(Clone, Debug)]
pub struct NaiveQueue {
    k: usize,
    category: Vec<Option<Category>>,
    edges: Vec<Option<NaiveEdge>>,
}

impl NaiveQueue {
    /// Edge `i` of `edges` gets id `i`.
    pub fn new(categories: Vec<Category>, k: usize, edges: &[(VertexId, VertexId, Length)]) -> Self {
        assert!(categories.iter().all(|&c| c < k));
        Self {
            k,
            category: categories.into_iter().map(Some).collect(),
            edges: edges.iter().map(|&(u, v, cost)| (u != v).then_some(NaiveEdge { u, v, cost })).collect(),
        }
    }

    fn bicat(&self, e: &NaiveEdge) -> Bicategory {
        Bicategory::new(self.category[e.u.index()].unwrap(), self.category[e.v.index()].unwrap())
    }

    fn live_vertex(&self, v: VertexId) -> Result<Category, QueueError> {
        self.category.get(v.index()).copied().flatten().ok_or(QueueError::UnknownVertex(v))
    }
}

impl EdgeQueue for NaiveQueue {
    fn decrease_cost(&mut self, b: Bicategory, delta: Length) -> Result<(), QueueError> {
        check_bicategory(b, self.k)?;
        if delta < Length::from_integer(0) {
            return Err(QueueError::NegativeDecrease);
        }
        for i in 0..self.edges.len() {
            if let Some(e) = &self.edges[i] {
                if self.bicat(e) == b {
                    self.edges[i].as_mut().unwrap().cost -= delta;
                }
            }
        }
        Ok(())
    }

    fn find_min(&mut self, b: Bicategory) -> Result<(EdgeId, Length), QueueError> {
        check_bicategory(b, self.k)?;
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
            .filter(|(_, e)| self.bicat(e) == b)
            .map(|(i, e)| (e.cost, EdgeId(i as u32)))
            .min()
            .map(|(c, e)| (e, c))
            .ok_or(QueueError::Empty(b))
    }

    fn change_category(&mut self, v: VertexId, c: Category) -> Result<(), QueueError> {
        self.live_vertex(v)?;
        if c >= self.k {
            return Err(QueueError::UnknownCategory(c));
        }
        self.category[v.index()] = Some(c);
        Ok(())
    }

    fn contract_edge(&mut self, e: EdgeId, c: Category) -> Result<VertexId, QueueError> {
        if c >= self.k {
            return Err(QueueError::UnknownCategory(c));
        }
        let ed = self.edges.get(e.index()).cloned().flatten().ok_or(QueueError::UnknownEdge(e))?;
        let w = VertexId(self.category.len() as u32);
        self.category[ed.u.index()] = None;
        self.category[ed.v.index()] = None;
        self.category.push(Some(c));
        for slot in self.edges.iter_mut() {
            let Some(x) = slot else { continue };
            for end in [&mut x.u, &mut x.v] {
                if *end == ed.u || *end == ed.v {
                    *end = w;
                }
            }
            if x.u == x.v {
                *slot = None;
            }
        }
        Ok(w)
    }

    fn category(&self, v: VertexId) -> Option<Category> {
        self.category.get(v.index()).copied().flatten()
    }

    fn cost(&mut self, e: EdgeId) -> Option<Length> {
        self.edges.get(e.index()).and_then(|x| x.as_ref()).map(|x| x.cost)
    }

    fn endpoints(&mut self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.edges.get(e.index()).and_then(|x| x.as_ref()).map(|x| (x.u, x.v))
    }

    fn live_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&i| self.edges[i].is_some()).map(|i| EdgeId(i as u32)).collect()
    }

    fn live_vertices(&self) -> Vec<VertexId> {
        (0..self.category.len()).filter(|&i| self.category[i].is_some()).map(|i| VertexId(i as u32)).collect()
    }

    fn categories(&self) -> usize {
        self.k
    }
}
