//! Segment trees used by the pruning phase.

/// Range add, and search for the leftmost value at most a threshold.
#[derive(Clone, Debug)]
pub struct AddMinTree {
    n: usize,
    min: Vec<i64>,
    lazy: Vec<i64>,
}

impl AddMinTree {
    pub fn new(values: &[i64]) -> Self {
        let n = values.len().max(1);
        let mut t = Self { n, min: vec![i64::MAX / 4; 4 * n], lazy: vec![0; 4 * n] };
        if !values.is_empty() {
            t.build(1, 0, n, values);
        }
        t
    }

    fn build(&mut self, node: usize, l: usize, r: usize, values: &[i64]) {
        if r - l == 1 {
            self.min[node] = values[l];
            return;
        }
        let m = (l + r) / 2;
        self.build(2 * node, l, m, values);
        self.build(2 * node + 1, m, r, values);
        self.min[node] = self.min[2 * node].min(self.min[2 * node + 1]);
    }

    fn push(&mut self, node: usize) {
        let z = self.lazy[node];
        if z != 0 {
            for c in [2 * node, 2 * node + 1] {
                self.min[c] += z;
                self.lazy[c] += z;
            }
            self.lazy[node] = 0;
        }
    }

    pub fn add(&mut self, range: std::ops::Range<usize>, delta: i64) {
        if range.start < range.end {
            self.add_rec(1, 0, self.n, range.start, range.end, delta);
        }
    }

    fn add_rec(&mut self, node: usize, l: usize, r: usize, ql: usize, qr: usize, delta: i64) {
        if qr <= l || r <= ql {
            return;
        }
        if ql <= l && r <= qr {
            self.min[node] += delta;
            self.lazy[node] += delta;
            return;
        }
        self.push(node);
        let m = (l + r) / 2;
        self.add_rec(2 * node, l, m, ql, qr, delta);
        self.add_rec(2 * node + 1, m, r, ql, qr, delta);
        self.min[node] = self.min[2 * node].min(self.min[2 * node + 1]);
    }

    /// Leftmost position whose value is at most `k`, with that value.
    pub fn find_at_most(&mut self, k: i64) -> Option<(usize, i64)> {
        if self.min[1] > k {
            return None;
        }
        let (mut node, mut l, mut r) = (1, 0, self.n);
        while r - l > 1 {
            self.push(node);
            let m = (l + r) / 2;
            if self.min[2 * node] <= k {
                node *= 2;
                r = m;
            } else {
                node = 2 * node + 1;
                l = m;
            }
        }
        Some((l, self.min[node]))
    }
}

/// Point assignment, range minimum.
#[derive(Clone, Debug)]
pub struct MinTree<T: Ord + Copy> {
    n: usize,
    t: Vec<Option<T>>,
}

impl<T: Ord + Copy> MinTree<T> {
    pub fn new(n: usize) -> Self {
        let n = n.max(1).next_power_of_two();
        Self { n, t: vec![None; 2 * n] }
    }

    pub fn set(&mut self, i: usize, v: Option<T>) {
        let mut i = i + self.n;
        self.t[i] = v;
        while i > 1 {
            i /= 2;
            self.t[i] = min_opt(self.t[2 * i], self.t[2 * i + 1]);
        }
    }

    pub fn min(&self, range: std::ops::Range<usize>) -> Option<T> {
        let (mut l, mut r) = (range.start + self.n, range.end + self.n);
        let mut acc = None;
        while l < r {
            if l & 1 == 1 {
                acc = min_opt(acc, self.t[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                acc = min_opt(acc, self.t[r]);
            }
            l /= 2;
            r /= 2;
        }
        acc
    }
}

fn min_opt<T: Ord + Copy>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trees_match_arrays() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let mut arr: Vec<i64> = (0..n).map(|_| rng.gen_range(0..6)).collect();
            let mut t = AddMinTree::new(&arr);
            let mut m = MinTree::new(n);
            let mut marr: Vec<Option<(i64, u32)>> = vec![None; n];
            for _ in 0..100 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(a..=n);
                let d = rng.gen_range(-2..3);
                t.add(a..b, d);
                arr[a..b].iter_mut().for_each(|x| *x += d);
                let k = rng.gen_range(-2..4);
                let want = arr.iter().position(|&x| x <= k).map(|i| (i, arr[i]));
                assert_eq!(t.find_at_most(k), want);
                let v = rng.gen_bool(0.7).then(|| (rng.gen_range(0..5), rng.gen_range(0..9)));
                m.set(a, v);
                marr[a] = v;
                assert_eq!(m.min(a..b), marr[a..b].iter().flatten().min().copied());
            }
        }
    }
}
