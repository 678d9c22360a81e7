//! Phase 1: energy-driven moat growing with contractions.
//!
//! Every living vertex spends energy at unit rate and shortens its incident
//! edges at the same rate. An edge whose residual length reaches zero is
//! contracted; the new vertex pools the energy of its endpoints. Events at
//! the same instant are processed as: contractions in increasing edge id,
//! then deaths.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::graph::{EdgeId, Graph, Length, VertexId};
use crate::priority::{Bicategory, CategoryQueue, EdgeQueue};

const LIVING: usize = 0;
const DEAD: usize = 1;

/// Everything Phase 1 records about the run. Vertex ids `0..n0` are the
/// input vertices; each contraction appends one new id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase1Output {
    pub n0: usize,
    /// Contracted edges in contraction order.
    pub f1: Vec<EdgeId>,
    pub save: BTreeSet<EdgeId>,
    /// Vertices whose energy ran out at the very instant they were merged.
    /// They count as living at the merge and are not dead afterwards.
    pub expired_at_merge: BTreeSet<VertexId>,
    /// Children of each created vertex, smaller id first.
    pub children: Vec<Option<(VertexId, VertexId)>>,
    /// Edge contracted to create each vertex.
    pub formed_by: Vec<Option<EdgeId>>,
    pub parent: Vec<Option<VertexId>>,
    /// Energy when the vertex was first assigned one.
    pub phi0: Vec<Length>,
    /// Energy left when the vertex was merged away or the run ended.
    pub phi_final: Vec<Length>,
    /// Lifetime: time of death for dead vertices.
    pub d: Vec<Length>,
    pub t_end: Length,
    pub iterations: usize,
}

impl Phase1Output {
    fn new(n0: usize, phi: &[Length]) -> Self {
        Self {
            n0,
            f1: Vec::new(),
            save: BTreeSet::new(),
            expired_at_merge: BTreeSet::new(),
            children: vec![None; n0],
            formed_by: vec![None; n0],
            parent: vec![None; n0],
            phi0: phi.to_vec(),
            phi_final: phi.to_vec(),
            d: vec![Length::zero(); n0],
            t_end: Length::zero(),
            iterations: 0,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.children.len()
    }

    /// A vertex is dead if it ran out of energy before being merged away.
    pub fn is_dead(&self, v: VertexId) -> bool {
        self.phi_final[v.index()].is_zero() && !self.expired_at_merge.contains(&v)
    }

    pub fn roots(&self) -> Vec<VertexId> {
        (0..self.num_vertices()).filter(|&i| self.parent[i].is_none()).map(|i| VertexId(i as u32)).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn record_merge(
        &mut self,
        e: EdgeId,
        a: VertexId,
        b: VertexId,
        t: Length,
        delta: Length,
        phi_a: Length,
        phi_b: Length,
        d_a: Length,
        d_b: Length,
    ) -> VertexId {
        let w = VertexId(self.children.len() as u32);
        let (a, b, phi_a, phi_b, d_a, d_b) =
            if a < b { (a, b, phi_a, phi_b, d_a, d_b) } else { (b, a, phi_b, phi_a, d_b, d_a) };
        let one = Length::from_integer(1);
        // contractions come before deaths at the same instant
        for (x, phi, d) in [(a, phi_a, d_a), (b, phi_b, d_b)] {
            if !phi.is_zero() {
                continue;
            }
            if d == t && !t.is_zero() {
                self.expired_at_merge.insert(x);
            } else if t < (one + delta) * d {
                self.save.insert(e);
            }
        }
        self.f1.push(e);
        self.children.push(Some((a, b)));
        self.formed_by.push(Some(e));
        self.parent.push(None);
        self.parent[a.index()] = Some(w);
        self.parent[b.index()] = Some(w);
        self.phi_final[a.index()] = phi_a;
        self.phi_final[b.index()] = phi_b;
        self.d[a.index()] = d_a;
        self.d[b.index()] = d_b;
        let phi_w = phi_a + phi_b;
        self.phi0.push(phi_w);
        self.phi_final.push(phi_w);
        self.d.push(if d_a > d_b { d_a } else { d_b });
        w
    }
}

/// Reference implementation scanning all vertices and edges per event.
pub fn phase1_naive(g0: &Graph, phi: &[Length], delta: Length) -> Phase1Output {
    let n0 = g0.vertex_bound();
    assert_eq!(phi.len(), n0);
    let mut out = Phase1Output::new(n0, phi);
    let mut g = g0.clone();
    let mut res: Vec<Length> =
        (0..g0.edge_bound()).map(|i| g0.edge(EdgeId(i as u32)).map_or(Length::zero(), |e| e.len)).collect();
    let mut phi: Vec<Length> = phi.to_vec();
    let mut living: Vec<bool> = phi.iter().map(|p| *p > Length::zero()).collect();
    let mut d: Vec<Length> = vec![Length::zero(); n0];
    let mut t = Length::zero();
    let two = Length::from_integer(2);
    while g.vertices().any(|v| living[v.index()]) {
        out.iterations += 1;
        let d1 = g.vertices().filter(|v| living[v.index()]).map(|v| phi[v.index()]).min().unwrap();
        let d2 = g
            .edges()
            .filter_map(|e| match (living[e.u.index()], living[e.v.index()]) {
                (true, true) => Some(res[e.id.index()] / two),
                (false, false) => None,
                _ => Some(res[e.id.index()]),
            })
            .min();
        let step = d2.map_or(d1, |d2| d1.min(d2));
        t += step;
        for v in g.vertices().collect::<Vec<_>>() {
            if living[v.index()] {
                phi[v.index()] -= step;
                d[v.index()] = t;
            }
        }
        for e in g.edges() {
            let k = living[e.u.index()] as i128 + living[e.v.index()] as i128;
            res[e.id.index()] -= step * Length::from_integer(k);
        }
        loop {
            let next = g
                .edges()
                .filter(|e| res[e.id.index()].is_zero() && (living[e.u.index()] || living[e.v.index()]))
                .map(|e| e.id)
                .min();
            let Some(e) = next else { break };
            let c = g.contract_edge(e).unwrap();
            let (a, b) = c.children;
            let w = out.record_merge(e, a, b, t, delta, phi[a.index()], phi[b.index()], d[a.index()], d[b.index()]);
            assert_eq!(w, c.merged);
            phi.push(phi[a.index()] + phi[b.index()]);
            living.push(living[a.index()] || living[b.index()]);
            d.push(out.d[w.index()]);
        }
        for v in g.vertices().collect::<Vec<_>>() {
            if living[v.index()] && phi[v.index()].is_zero() {
                living[v.index()] = false;
            }
        }
    }
    for v in g.vertices() {
        out.phi_final[v.index()] = phi[v.index()];
        out.d[v.index()] = d[v.index()];
    }
    out.t_end = t;
    out
}

/// Event loop on the category queue: residual lengths are edge costs,
/// living-living edges shrink at rate two and living-dead edges at rate one.
pub fn phase1(g0: &Graph, phi: &[Length], delta: Length) -> Phase1Output {
    let n0 = g0.vertex_bound();
    assert_eq!(phi.len(), n0);
    let mut out = Phase1Output::new(n0, phi);
    let cats: Vec<usize> = (0..n0)
        .map(|i| if g0.has_vertex(VertexId(i as u32)) && phi[i] > Length::zero() { LIVING } else { DEAD })
        .collect();
    let mut edges: Vec<(VertexId, VertexId, Length)> = Vec::with_capacity(g0.edge_bound());
    for i in 0..g0.edge_bound() {
        match g0.edge(EdgeId(i as u32)) {
            Some(e) => edges.push((e.u, e.v, e.len)),
            None => edges.push((VertexId(0), VertexId(0), Length::zero())),
        }
    }
    let mut q = CategoryQueue::new(cats.clone(), 2, &edges);
    let ll = Bicategory::new(LIVING, LIVING);
    let ld = Bicategory::new(LIVING, DEAD);
    // living vertices keyed by the time their energy runs out
    let mut deaths: BTreeSet<(Length, VertexId)> = BTreeSet::new();
    let mut death_at: Vec<Length> = vec![Length::zero(); n0];
    for (i, &c) in cats.iter().enumerate() {
        if c == LIVING {
            deaths.insert((phi[i], VertexId(i as u32)));
            death_at[i] = phi[i];
        }
    }
    let mut t = Length::zero();
    let two = Length::from_integer(2);
    while let Some(&(first, _)) = deaths.first() {
        out.iterations += 1;
        let mut step = first - t;
        if let Ok((_, c)) = q.find_min(ll) {
            step = step.min(c / two);
        }
        if let Ok((_, c)) = q.find_min(ld) {
            step = step.min(c);
        }
        t += step;
        q.decrease_cost(ll, step * two).unwrap();
        q.decrease_cost(ld, step).unwrap();
        loop {
            let mut next: Option<EdgeId> = None;
            for b in [ll, ld] {
                if let Ok((e, c)) = q.find_min(b) {
                    if c.is_zero() && next.is_none_or(|n| e < n) {
                        next = Some(e);
                    }
                }
            }
            let Some(e) = next else { break };
            let (a, b) = q.endpoints(e).unwrap();
            let state = |x: VertexId, q: &CategoryQueue, out: &Phase1Output| {
                if q.category(x) == Some(LIVING) {
                    (death_at[x.index()] - t, t)
                } else {
                    (Length::zero(), out.d[x.index()])
                }
            };
            let (pa, da) = state(a, &q, &out);
            let (pb, db) = state(b, &q, &out);
            for (x, p) in [(a, pa), (b, pb)] {
                if q.category(x) == Some(LIVING) {
                    deaths.remove(&(p + t, x));
                }
            }
            let w = q.contract_edge(e, LIVING).unwrap();
            let w2 = out.record_merge(e, a, b, t, delta, pa, pb, da, db);
            assert_eq!(w, w2);
            let pw = pa + pb;
            death_at.push(t + pw);
            deaths.insert((t + pw, w));
        }
        while let Some(&(when, x)) = deaths.first() {
            if when != t {
                break;
            }
            deaths.pop_first();
            q.change_category(x, DEAD).unwrap();
            out.phi_final[x.index()] = Length::zero();
            out.d[x.index()] = t;
        }
    }
    out.t_end = t;
    out
}
