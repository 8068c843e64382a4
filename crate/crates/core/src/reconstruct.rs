//! Linear-space reconstruction of a lexicographically optimal walk.
//!
//! Among `s -> t` walks `Q` with at most `k` edges, find one minimizing the
//! pair `(c(Q) + g(Q) * alpha, g(Q))` lexicographically. Only the optimal
//! pair is known up front; the walk is rebuilt by splitting at a midpoint
//! vertex and recursing on both halves, so at any time only `O(n)` scratch
//! values plus `O(1)` values per recursion level are live.

use crate::counters::{self, AuxGuard};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::rational::{Fraction, Rational};
use crate::walk::Walk;

/// A lexicographic objective value `(c + g * alpha, g)`.
pub type LexPair = (Rational, Rational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no walk from {s} to {t} with at most {k} edges")]
pub struct NoWalk {
    pub s: VertexId,
    pub t: VertexId,
    pub k: usize,
}

/// The optimum a reconstruction aims for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexTarget {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

/// For every vertex `v`, the lexicographic minimum of `(c(P) + g(P) alpha, g(P))`
/// over `v -> t` walks with at most `k` edges (`None` when there is none).
pub fn lex_toward(g: &Graph, t: VertexId, k: usize, alpha: &Rational) -> Vec<Option<LexPair>> {
    let n = g.n();
    let _scratch = AuxGuard::new(4 * n);
    let mut cur: Vec<Option<(Fraction, Fraction)>> = vec![None; n];
    cur[t] = Some((alpha.clone().into(), Rational::one().into()));
    for _ in 0..k {
        let mut next = cur.clone();
        let mut changed = false;
        for e in g.edges() {
            let Some((y, gm)) = &cur[e.head] else { continue };
            let cand = (y.affine(&e.cost, &e.gain), gm.scale(&e.gain));
            if next[e.tail].as_ref().is_none_or(|old| cand < *old) {
                next[e.tail] = Some(cand);
                changed = true;
            }
        }
        counters::add_relaxations(g.m() as u64);
        cur = next;
        if !changed {
            break;
        }
    }
    cur.into_iter().map(|p| p.map(|(a, b)| (a.reduce(), b.reduce()))).collect()
}

/// For every vertex `v`, the lexicographic maximum of
/// `((beta - c(P)) / g(P), 1 / g(P))` over `s -> v` walks with at most `k` edges.
fn lex_from(g: &Graph, s: VertexId, k: usize, beta: &Rational) -> Vec<Option<LexPair>> {
    let n = g.n();
    let _scratch = AuxGuard::new(4 * n);
    let mut cur: Vec<Option<(Fraction, Fraction)>> = vec![None; n];
    cur[s] = Some((beta.clone().into(), Rational::one().into()));
    for _ in 0..k {
        let mut next = cur.clone();
        let mut changed = false;
        for e in g.edges() {
            let Some((l1, l2)) = &cur[e.tail] else { continue };
            let ig = g.inv_gain(e.id);
            let cand = (l1.affine(&-(&e.cost * ig), ig), l2.scale(ig));
            if next[e.head].as_ref().is_none_or(|old| cand > *old) {
                next[e.head] = Some(cand);
                changed = true;
            }
        }
        counters::add_relaxations(g.m() as u64);
        cur = next;
        if !changed {
            break;
        }
    }
    cur.into_iter().map(|p| p.map(|(a, b)| (a.reduce(), b.reduce()))).collect()
}

/// The optimal pair without building the walk.
pub fn lex_optimum(g: &Graph, s: VertexId, t: VertexId, k: usize, alpha: &Rational) -> Option<LexTarget> {
    let r = lex_toward(g, t, k, alpha);
    r[s].clone().map(|(beta, gamma)| LexTarget { alpha: alpha.clone(), beta, gamma })
}

/// Builds an optimal walk. Ties between equally good walks go to the empty
/// walk, then to the smaller edge id, at every base case; the midpoint is the
/// smallest vertex index that works.
pub fn reconstruct_walk(g: &Graph, s: VertexId, t: VertexId, k: usize, alpha: &Rational) -> Result<Walk, NoWalk> {
    let target = {
        let r = lex_toward(g, t, k, alpha);
        r[s].clone()
    };
    let Some(target) = target else {
        return Err(NoWalk { s, t, k });
    };
    let _out = AuxGuard::new(k);
    let mut edges = Vec::with_capacity(k.min(g.n() * 4));
    split(g, s, t, k, alpha, &target, &mut edges);
    let walk = Walk::from_edges(g, s, edges).expect("reconstructed edges form a walk");
    debug_assert_eq!(walk.end(), t);
    debug_assert_eq!(
        (walk.summary().apply_finite(alpha), walk.summary().gain.clone()),
        target,
        "reconstruction missed the optimum"
    );
    Ok(walk)
}

fn split(g: &Graph, s: VertexId, t: VertexId, k: usize, alpha: &Rational, target: &LexPair, out: &mut Vec<EdgeId>) {
    let _frame = AuxGuard::new(6);
    if k == 0 {
        debug_assert_eq!(s, t);
        return;
    }
    if k == 1 {
        let mut best: Option<(LexPair, Option<EdgeId>)> = None;
        if s == t {
            best = Some(((alpha.clone(), Rational::one()), None));
        }
        for &id in g.out_edges(s) {
            let e = g.edge(id);
            if e.head != t {
                continue;
            }
            let cand = (&e.cost + &e.gain * alpha, e.gain.clone());
            if best.as_ref().is_none_or(|(b, _)| cand < *b) {
                best = Some((cand, Some(id)));
            }
        }
        counters::add_relaxations(g.out_edges(s).len() as u64);
        let (pair, edge) = best.expect("base case has a walk");
        debug_assert_eq!(&pair, target);
        out.extend(edge);
        return;
    }
    let k1 = k.div_ceil(2);
    let k2 = k - k1;
    let (beta, gamma) = target;
    let (x, right, left_gain) = {
        let l = lex_from(g, s, k1, beta);
        let r = lex_toward(g, t, k2, alpha);
        let _held = AuxGuard::new(4 * g.n());
        let mut found = None;
        for x in 0..g.n() {
            if let (Some((l1, l2)), Some((r1, r2))) = (&l[x], &r[x]) {
                if l1 == r1 && *r2 == gamma * l2 {
                    found = Some((x, (r1.clone(), r2.clone()), l2.recip()));
                    break;
                }
            }
        }
        found.expect("a midpoint vertex exists for an attainable optimum")
    };
    split(g, s, x, k1, &right.0, &(beta.clone(), left_gain), out);
    split(g, x, t, k2, alpha, &right, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn instance_a() -> Graph {
        Graph::new(2, [(0, 1, rat(1, 1), rat(1, 2)), (1, 0, rat(1, 1), rat(1, 2))]).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = instance_a();
        let w = reconstruct_walk(&g, 0, 1, 1, &rat(0, 1)).unwrap();
        assert_eq!(w.edges(), &[0]);
    }

    #[test]
    fn two_cycle() {
        let g = instance_a();
        let w = reconstruct_walk(&g, 0, 0, 2, &rat(2, 1)).unwrap();
        // empty walk gives (2, 1); the two-cycle gives (3/2 + 1/4 * 2, 1/4) = (2, 1/4)
        assert_eq!(w.edges(), &[0, 1]);
        assert_eq!(w.summary().apply_finite(&rat(2, 1)), rat(2, 1));
        assert_eq!(w.summary().gain, rat(1, 4));
    }

    #[test]
    fn missing_walk() {
        let g = Graph::new(2, [(0, 1, rat(1, 1), rat(1, 1))]).unwrap();
        assert_eq!(reconstruct_walk(&g, 1, 0, 3, &rat(0, 1)), Err(NoWalk { s: 1, t: 0, k: 3 }));
    }

    #[test]
    fn prefers_lower_gain_on_value_ties() {
        // two parallel edges with equal value at alpha = 2: 1 + 1/2 * 2 = 2 = 0 + 1 * 2
        let g = Graph::new(2, [(0, 1, rat(0, 1), rat(1, 1)), (0, 1, rat(1, 1), rat(1, 2))]).unwrap();
        let w = reconstruct_walk(&g, 0, 1, 1, &rat(2, 1)).unwrap();
        assert_eq!(w.edges(), &[1]);
    }
}
