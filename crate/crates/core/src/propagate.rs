//! Synchronous bound propagation and solution checks.

use crate::counters;
use crate::graph::{EdgeId, Graph};
use crate::rational::ExtRational;

/// Per-vertex upper bounds.
pub type BoundVector = Vec<ExtRational>;

/// One synchronous pass: every edge relaxes against the bounds from the
/// previous pass, never against values written during this pass.
pub fn propagate_step(g: &Graph, y: &[ExtRational]) -> BoundVector {
    let mut next = y.to_vec();
    for e in g.edges() {
        if let ExtRational::Finite(yv) = &y[e.head] {
            let cand = &e.cost + &e.gain * yv;
            if next[e.tail] > ExtRational::Finite(cand.clone()) {
                next[e.tail] = ExtRational::Finite(cand);
            }
        } else if y[e.head].is_neg_inf() {
            next[e.tail] = ExtRational::NegInf;
        }
    }
    counters::add_relaxations(g.m() as u64);
    next
}

/// `result_s = min over walks P from s with at most k edges of c(P) + g(P) bounds_t`.
pub fn propagate(g: &Graph, bounds: &[ExtRational], k: usize) -> BoundVector {
    assert_eq!(bounds.len(), g.n());
    let mut y = bounds.to_vec();
    for _ in 0..k {
        y = propagate_step(g, &y);
    }
    y
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Feasible,
    /// The first violated constraint in edge order.
    Violated(EdgeId),
}

/// Checks every constraint exactly. Infinite values follow the extended
/// order, so `x_u = inf` only satisfies a constraint whose head is `inf`.
pub fn evaluate_solution(g: &Graph, x: &[ExtRational]) -> Evaluation {
    assert_eq!(x.len(), g.n());
    for e in g.edges() {
        if x[e.tail] > x[e.head].affine(&e.cost, &e.gain) {
            return Evaluation::Violated(e.id);
        }
    }
    Evaluation::Feasible
}
