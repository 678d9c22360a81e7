use num_traits::ToPrimitive;

use crate::branch::per_edge_bound;
use crate::graph::Length;

/// Contraction threshold `alpha`, region granularity `beta`, and radius
/// window `gamma` for decomposition width `w` over `m` unit edges.
#[derive(Clone, Debug, PartialEq)]
pub struct DpParameters {
    pub alpha: Length,
    pub beta: Length,
    pub gamma: f64,
    pub w: usize,
    pub m: usize,
}

impl DpParameters {
    /// `gamma = 3 log2 m + 1`, `beta = eps / (8 (2w - 1))`,
    /// `alpha = 2 c (2w - 1) / eps`.
    pub fn for_epsilon(eps: Length, c: Length, w: usize, m: usize) -> Self {
        let k = Length::from_integer(2 * w.max(1) as i128 - 1);
        Self {
            alpha: Length::from_integer(2) * c * k / eps,
            beta: eps / (Length::from_integer(8) * k),
            gamma: per_edge_bound(m).max(1.0),
            w,
            m,
        }
    }

    /// Largest admissible length of an augmented solution.
    pub fn augmentation_bound(&self, len_f: Length, len_g: Length) -> f64 {
        let k = (2 * self.w.max(1) - 1) as f64;
        let f = len_f.to_f64().unwrap_or(f64::INFINITY);
        let g = len_g.to_f64().unwrap_or(f64::INFINITY);
        let beta = self.beta.to_f64().unwrap_or(0.0);
        let alpha = self.alpha.to_f64().unwrap_or(f64::INFINITY);
        f + 4.0 * beta * k * (1.0 + per_edge_bound(self.m) / self.gamma) * f + 2.0 * k * g / alpha
    }
}
