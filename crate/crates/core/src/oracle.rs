//! Brute-force references: bounds from simple paths and simple cycles, and
//! discounted distances by plain dynamic programming. Exponential; only for
//! checking the real solvers on small inputs.

use crate::graph::{EdgeId, Graph, VertexId};
use crate::rational::{ExtRational, Rational};
use crate::walk::{phi, Walk, WalkSummary};

/// Largest vertex count [`shostak_enumerate`] accepts.
pub const ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("instance with n = {n}, m = {m} is too large to enumerate")]
pub struct SizeLimitExceeded {
    pub n: usize,
    pub m: usize,
}

/// A simple path followed by a simple cycle at its far end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCycle {
    pub path: Walk,
    pub cycle: Walk,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShostakResult {
    /// Tightest upper bound: `min c(P) + g(P) phi(C)` over `P: v -> w`, `C` at `w`, `g(C) < 1`.
    pub x_le: Vec<ExtRational>,
    /// Tightest lower bound: `max (phi(C) - c(P)) / g(P)` over `P: w -> v`, `C` at `w`, `g(C) > 1`.
    pub x_ge: Vec<ExtRational>,
    pub le_witness: Vec<Option<PathCycle>>,
    pub ge_witness: Vec<Option<PathCycle>>,
    /// Some simple cycle with unit gain and negative cost, if any.
    pub neg_unit_cycle: Option<Walk>,
}

impl ShostakResult {
    pub fn feasible(&self) -> bool {
        self.neg_unit_cycle.is_none() && self.x_le.iter().zip(&self.x_ge).all(|(le, ge)| le >= ge)
    }
}

/// Calls `f(end, edges, summary)` for every vertex-simple path out of `s`,
/// including the empty one.
fn simple_paths(g: &Graph, s: VertexId, f: &mut impl FnMut(VertexId, &[EdgeId], &WalkSummary)) {
    fn go(
        g: &Graph,
        at: VertexId,
        seen: &mut Vec<bool>,
        edges: &mut Vec<EdgeId>,
        sum: &WalkSummary,
        f: &mut impl FnMut(VertexId, &[EdgeId], &WalkSummary),
    ) {
        f(at, edges, sum);
        for &id in g.out_edges(at) {
            let e = g.edge(id);
            if seen[e.head] {
                continue;
            }
            seen[e.head] = true;
            edges.push(id);
            go(g, e.head, seen, edges, &sum.then(&WalkSummary::of_edge(e)), f);
            edges.pop();
            seen[e.head] = false;
        }
    }
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    go(g, s, &mut seen, &mut Vec::new(), &WalkSummary::empty(), f);
}

/// Every simple cycle through `w`, as a closed walk starting at `w`.
fn simple_cycles_at(g: &Graph, w: VertexId, f: &mut impl FnMut(&[EdgeId], &WalkSummary)) {
    simple_paths(g, w, &mut |end, edges, sum| {
        for &id in g.out_edges(end) {
            let e = g.edge(id);
            if e.head == w {
                let mut all = edges.to_vec();
                all.push(id);
                f(&all, &sum.then(&WalkSummary::of_edge(e)));
            }
        }
    });
}

pub fn shostak_enumerate(g: &Graph) -> Result<ShostakResult, SizeLimitExceeded> {
    let n = g.n();
    if n > ENUMERATION_LIMIT || g.m() > 2 * ENUMERATION_LIMIT * ENUMERATION_LIMIT {
        return Err(SizeLimitExceeded { n, m: g.m() });
    }
    let one = Rational::one();
    // best upper and lower cycle bounds at each vertex
    let mut best_le: Vec<Option<(Rational, Vec<EdgeId>)>> = vec![None; n];
    let mut best_ge: Vec<Option<(Rational, Vec<EdgeId>)>> = vec![None; n];
    let mut neg_unit_cycle = None;
    for w in 0..n {
        simple_cycles_at(g, w, &mut |edges, sum| match sum.gain.cmp(&one) {
            std::cmp::Ordering::Less => {
                let p = phi(sum);
                if best_le[w].as_ref().is_none_or(|(b, _)| p < *b) {
                    best_le[w] = Some((p, edges.to_vec()));
                }
            }
            std::cmp::Ordering::Greater => {
                let p = phi(sum);
                if best_ge[w].as_ref().is_none_or(|(b, _)| p > *b) {
                    best_ge[w] = Some((p, edges.to_vec()));
                }
            }
            std::cmp::Ordering::Equal => {
                if sum.cost.is_negative() && neg_unit_cycle.is_none() {
                    neg_unit_cycle = Some(Walk::from_edges(g, w, edges.to_vec()).expect("cycle"));
                }
            }
        });
    }

    let mut x_le = vec![ExtRational::PosInf; n];
    let mut le_witness: Vec<Option<PathCycle>> = vec![None; n];
    for v in 0..n {
        let mut best: Option<(Rational, Vec<EdgeId>, VertexId)> = None;
        simple_paths(g, v, &mut |end, edges, sum| {
            if let Some((p, _)) = &best_le[end] {
                let val = sum.apply_finite(p);
                if best.as_ref().is_none_or(|(b, _, _)| val < *b) {
                    best = Some((val, edges.to_vec(), end));
                }
            }
        });
        if let Some((val, edges, end)) = best {
            x_le[v] = ExtRational::Finite(val);
            le_witness[v] = Some(PathCycle {
                path: Walk::from_edges(g, v, edges).expect("path"),
                cycle: Walk::from_edges(g, end, best_le[end].as_ref().unwrap().1.clone()).expect("cycle"),
            });
        }
    }

    let mut x_ge = vec![ExtRational::NegInf; n];
    let mut ge_witness: Vec<Option<PathCycle>> = vec![None; n];
    for w in 0..n {
        let Some((p, cyc)) = &best_ge[w] else { continue };
        simple_paths(g, w, &mut |end, edges, sum| {
            let val = ExtRational::Finite((p - &sum.cost) / &sum.gain);
            if val > x_ge[end] {
                x_ge[end] = val;
                ge_witness[end] = Some(PathCycle {
                    path: Walk::from_edges(g, w, edges.to_vec()).expect("path"),
                    cycle: Walk::from_edges(g, w, cyc.clone()).expect("cycle"),
                });
            }
        });
    }
    Ok(ShostakResult { x_le, x_ge, le_witness, ge_witness, neg_unit_cycle })
}

/// `delta[s][t]`: the least `sum_i gamma^i c(e_{i+1})` over `s -> t` walks with
/// at most `n` edges, by the backward recursion per target. `None` is `+inf`.
pub fn naive_dapsp(g: &Graph, gamma: &Rational) -> Vec<Vec<Option<Rational>>> {
    assert!(gamma.is_positive() && *gamma < Rational::one());
    let n = g.n();
    let mut out = vec![vec![None; n]; n];
    for t in 0..n {
        let mut d: Vec<Option<Rational>> = vec![None; n];
        d[t] = Some(Rational::zero());
        for _ in 0..n {
            let mut next = d.clone();
            for e in g.edges() {
                if let Some(du) = &d[e.head] {
                    let cand = &e.cost + gamma * du;
                    if next[e.tail].as_ref().is_none_or(|old| cand < *old) {
                        next[e.tail] = Some(cand);
                    }
                }
            }
            d = next;
        }
        for s in 0..n {
            out[s][t] = d[s].take();
        }
    }
    out
}
