//! Arena of leftist heaps whose keys carry group offsets.
//!
//! Every node belongs to an offset group. Groups form a weighted union-find:
//! the effective key of a node is its raw key plus the accumulated offset from
//! its group to the group root. Shifting a whole heap relative to another is
//! one union, which is how heaps with different labels are melded in O(log n).

use crate::graph::{EdgeId, Length};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupId(pub u32);

#[derive(Clone, Debug)]
struct Node {
    raw: Length,
    group: GroupId,
    edge: EdgeId,
    stamp: u32,
    rank: u32,
    left: Option<NodeId>,
    right: Option<NodeId>,
}

#[derive(Clone, Debug, Default)]
pub struct MeldArena {
    nodes: Vec<Node>,
    parent: Vec<u32>,
    size: Vec<u32>,
    offset: Vec<Length>,
    // offset of a root group's whole tree
    base: Vec<Length>,
}

impl MeldArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_group(&mut self) -> GroupId {
        let g = self.parent.len() as u32;
        self.parent.push(g);
        self.size.push(1);
        self.offset.push(Length::from_integer(0));
        self.base.push(Length::from_integer(0));
        GroupId(g)
    }

    /// Root of `g` and the offset that turns raw keys of `g` into effective keys.
    pub fn find(&mut self, g: GroupId) -> (GroupId, Length) {
        let mut x = g.0;
        let mut total = Length::from_integer(0);
        while self.parent[x as usize] != x {
            total += self.offset[x as usize];
            x = self.parent[x as usize];
        }
        let root = x;
        let mut rem = total;
        let mut y = g.0;
        while y != root {
            let next = self.parent[y as usize];
            let own = self.offset[y as usize];
            self.offset[y as usize] = rem;
            self.parent[y as usize] = root;
            rem -= own;
            y = next;
        }
        (GroupId(root), total + self.base[root as usize])
    }

    /// Joins root groups `keep` and `absorb`, adding `shift` to every key of
    /// `absorb`. Returns the root of the joined group.
    pub fn union_groups(&mut self, keep: GroupId, absorb: GroupId, shift: Length) -> GroupId {
        let (k, a) = (keep.0 as usize, absorb.0 as usize);
        debug_assert_eq!(self.parent[k], keep.0);
        debug_assert_eq!(self.parent[a], absorb.0);
        if k == a {
            return keep;
        }
        if self.size[k] >= self.size[a] {
            self.parent[a] = keep.0;
            self.offset[a] = self.base[a] + shift - self.base[k];
            self.size[k] += self.size[a];
            keep
        } else {
            let new_base = self.base[a] + shift;
            self.parent[k] = absorb.0;
            self.offset[k] = self.base[k] - new_base;
            self.base[a] = new_base;
            self.size[a] += self.size[k];
            absorb
        }
    }

    pub fn key(&mut self, n: NodeId) -> Length {
        let node = &self.nodes[n.0 as usize];
        let (raw, g) = (node.raw, node.group);
        raw + self.find(g).1
    }

    pub fn edge(&self, n: NodeId) -> EdgeId {
        self.nodes[n.0 as usize].edge
    }

    pub fn stamp(&self, n: NodeId) -> u32 {
        self.nodes[n.0 as usize].stamp
    }

    pub fn group_of(&mut self, n: NodeId) -> GroupId {
        let g = self.nodes[n.0 as usize].group;
        self.find(g).0
    }

    /// Inserts `(key, edge)` into the heap rooted at `root` whose root group is `group`.
    pub fn insert(
        &mut self,
        root: Option<NodeId>,
        group: GroupId,
        key: Length,
        edge: EdgeId,
        stamp: u32,
    ) -> (NodeId, NodeId) {
        let (g, off) = self.find(group);
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node { raw: key - off, group: g, edge, stamp, rank: 1, left: None, right: None });
        (self.meld(root, Some(id)).unwrap(), id)
    }

    fn less(&mut self, a: NodeId, b: NodeId) -> bool {
        let ka = (self.key(a), self.edge(a));
        let kb = (self.key(b), self.edge(b));
        ka < kb
    }

    fn rank(&self, n: Option<NodeId>) -> u32 {
        n.map_or(0, |n| self.nodes[n.0 as usize].rank)
    }

    /// Melds two heaps. Both must already share a root group.
    pub fn meld(&mut self, a: Option<NodeId>, b: Option<NodeId>) -> Option<NodeId> {
        let (mut a, mut b) = match (a, b) {
            (None, x) | (x, None) => return x,
            (Some(a), Some(b)) => (a, b),
        };
        if self.less(b, a) {
            std::mem::swap(&mut a, &mut b);
        }
        let right = self.nodes[a.0 as usize].right;
        let merged = self.meld(right, Some(b));
        let left = self.nodes[a.0 as usize].left;
        let (l, r) = if self.rank(left) < self.rank(merged) { (merged, left) } else { (left, merged) };
        let rank = self.rank(r) + 1;
        let node = &mut self.nodes[a.0 as usize];
        node.left = l;
        node.right = r;
        node.rank = rank;
        Some(a)
    }

    /// Removes the root, returning the new root.
    pub fn pop(&mut self, root: NodeId) -> Option<NodeId> {
        let node = &self.nodes[root.0 as usize];
        let (l, r) = (node.left, node.right);
        self.meld(l, r)
    }

    /// Every node of the heap rooted at `root`.
    pub fn collect(&self, root: Option<NodeId>) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = root.into_iter().collect();
        while let Some(n) = stack.pop() {
            out.push(n);
            let node = &self.nodes[n.0 as usize];
            stack.extend(node.left);
            stack.extend(node.right);
        }
        out
    }
}
