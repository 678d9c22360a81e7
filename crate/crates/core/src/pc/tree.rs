//! The contraction forest with heavy-light decomposition.

use super::Phase1Output;
use crate::graph::VertexId;

/// Contraction forest laid out so that every subtree occupies a contiguous
/// range of positions and every heavy path is contiguous as well.
#[derive(Clone, Debug)]
pub struct ContractionTree {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Option<(usize, usize)>>,
    pub depth: Vec<usize>,
    pub size: Vec<usize>,
    pub pos: Vec<usize>,
    pub head: Vec<usize>,
    /// Node at each position.
    pub at: Vec<usize>,
    pub roots: Vec<usize>,
}

impl ContractionTree {
    pub fn new(p1: &Phase1Output) -> Self {
        let n = p1.num_vertices();
        let parent: Vec<Option<usize>> = p1.parent.iter().map(|p| p.map(|v| v.index())).collect();
        let children: Vec<Option<(usize, usize)>> =
            p1.children.iter().map(|c| c.map(|(a, b)| (a.index(), b.index()))).collect();
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        // children always have smaller ids than their parent
        let mut size = vec![1usize; n];
        for x in 0..n {
            if let Some((a, b)) = children[x] {
                size[x] += size[a] + size[b];
            }
        }
        let mut depth = vec![0usize; n];
        for x in (0..n).rev() {
            if let Some((a, b)) = children[x] {
                depth[a] = depth[x] + 1;
                depth[b] = depth[x] + 1;
            }
        }
        let mut pos = vec![0usize; n];
        let mut head = vec![0usize; n];
        let mut at = Vec::with_capacity(n);
        for &r in &roots {
            let mut stack = vec![(r, r)];
            while let Some((x, h)) = stack.pop() {
                pos[x] = at.len();
                head[x] = h;
                at.push(x);
                if let Some((a, b)) = children[x] {
                    let (heavy, light) = if size[a] >= size[b] { (a, b) } else { (b, a) };
                    stack.push((light, light));
                    stack.push((heavy, h));
                }
            }
        }
        Self { parent, children, depth, size, pos, head, at, roots }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Position range of the subtree of `x`.
    pub fn subtree(&self, x: usize) -> std::ops::Range<usize> {
        self.pos[x]..self.pos[x] + self.size[x]
    }

    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.subtree(a).contains(&self.pos[b])
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> Option<usize> {
        while self.head[a] != self.head[b] {
            if self.depth[self.head[a]] < self.depth[self.head[b]] {
                std::mem::swap(&mut a, &mut b);
            }
            a = self.parent[self.head[a]]?;
        }
        Some(if self.depth[a] < self.depth[b] { a } else { b })
    }

    /// Position ranges covering the path from `a` up to, but excluding, its
    /// ancestor `top`.
    pub fn path_ranges(&self, mut a: usize, top: usize) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        while self.head[a] != self.head[top] {
            let h = self.head[a];
            out.push(self.pos[h]..self.pos[a] + 1);
            a = self.parent[h].expect("top is an ancestor");
        }
        if a != top {
            out.push(self.pos[top] + 1..self.pos[a] + 1);
        }
        out
    }

    /// Original vertices in the subtree of `x`.
    pub fn leaves(&self, x: usize) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .subtree(x)
            .map(|p| self.at[p])
            .filter(|&y| self.children[y].is_none())
            .map(|y| VertexId(y as u32))
            .collect();
        out.sort_unstable();
        out
    }
}
