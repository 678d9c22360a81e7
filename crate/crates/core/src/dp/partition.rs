//! Set partitions of a small ordered ground set `0..n`, stored as canonical
//! restricted-growth label strings.

use std::fmt;

/// Labels are canonical: the first element has label 0 and each new block
/// gets the next unused label, so equal partitions compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    labels: Vec<u8>,
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self.blocks();
        write!(f, "{{")?;
        for (i, b) in blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{b:?}")?;
        }
        write!(f, "}}")
    }
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

impl Partition {
    pub fn discrete(n: usize) -> Self {
        Self { labels: (0..n as u8).collect() }
    }

    pub fn single(n: usize) -> Self {
        Self { labels: vec![0; n] }
    }

    /// Canonicalizes arbitrary block labels.
    pub fn from_labels<T: Copy + Eq>(raw: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let labels = raw
            .iter()
            .map(|x| match seen.iter().position(|y| y == x) {
                Some(i) => i as u8,
                None => {
                    seen.push(*x);
                    (seen.len() - 1) as u8
                }
            })
            .collect();
        Self { labels }
    }

    /// Blocks must be disjoint; uncovered elements become singletons.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut raw: Vec<usize> = (0..n).map(|i| n + i).collect();
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                raw[x] = b;
            }
        }
        Self::from_labels(&raw)
    }

    /// Partition induced by a union-find parent array.
    pub fn from_parents(parent: &mut [usize]) -> Self {
        let roots: Vec<usize> = (0..parent.len()).map(|i| find(parent, i)).collect();
        Self::from_labels(&roots)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i] as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Finest partition coarser than both.
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.len(), other.len(), "join needs a common ground set");
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut first = [usize::MAX; 256];
        let mut first_other = [usize::MAX; 256];
        for i in 0..n {
            for (labels, firsts) in [(&self.labels, &mut first), (&other.labels, &mut first_other)] {
                let l = labels[i] as usize;
                if firsts[l] == usize::MAX {
                    firsts[l] = i;
                } else {
                    let (a, b) = (find(&mut parent, firsts[l]), find(&mut parent, i));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        Self::from_parents(&mut parent)
    }

    /// Restriction to the elements at `idx`, in that order.
    pub fn restrict(&self, idx: &[usize]) -> Partition {
        let raw: Vec<u8> = idx.iter().map(|&i| self.labels[i]).collect();
        Self::from_labels(&raw)
    }

    /// Copies this partition onto positions `pos` of a ground set of size
    /// `n`; other elements become singletons.
    pub fn embed(&self, pos: &[usize], n: usize) -> Partition {
        assert_eq!(pos.len(), self.len());
        let mut raw: Vec<usize> = (0..n).map(|i| 256 + i).collect();
        for (i, &p) in pos.iter().enumerate() {
            raw[p] = self.labels[i] as usize;
        }
        Self::from_labels(&raw)
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let mut map = [u8::MAX; 256];
        for (a, b) in self.labels.iter().zip(&other.labels) {
            let m = &mut map[*a as usize];
            if *m == u8::MAX {
                *m = *b;
            } else if *m != *b {
                return false;
            }
        }
        true
    }

    /// All partitions of `0..n` in lexicographic label order.
    pub fn all(n: usize) -> AllPartitions {
        AllPartitions { cur: Some(vec![0; n]), max: vec![0; n] }
    }

    /// All partitions finer than or equal to `self`.
    pub fn refinements(&self) -> Vec<Partition> {
        let blocks = self.blocks();
        let mut out = vec![vec![0usize; self.len()]];
        let mut next_label = 0;
        for block in &blocks {
            let mut grown = Vec::new();
            for sub in Partition::all(block.len()) {
                for base in &out {
                    let mut raw = base.clone();
                    for (k, &x) in block.iter().enumerate() {
                        raw[x] = next_label + sub.label(k);
                    }
                    grown.push(raw);
                }
            }
            next_label += block.len();
            out = grown;
        }
        out.iter().map(|raw| Partition::from_labels(raw)).collect()
    }
}

/// Restricted-growth string enumerator.
pub struct AllPartitions {
    cur: Option<Vec<u8>>,
    max: Vec<u8>,
}

impl Iterator for AllPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cur = self.cur.as_mut()?;
        let out = Partition { labels: cur.clone() };
        let n = cur.len();
        // max[i] = largest label among cur[..i]
        for i in 1..n {
            self.max[i] = self.max[i - 1].max(cur[i - 1]);
        }
        let mut i = n;
        loop {
            if i <= 1 {
                self.cur = None;
                break;
            }
            i -= 1;
            if cur[i] <= self.max[i] {
                cur[i] += 1;
                for x in cur.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Number of partitions of an `n`-set.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    row[0]
}
