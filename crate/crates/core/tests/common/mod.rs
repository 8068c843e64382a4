//! Shared helpers for the integration tests: small random instances and
//! brute-force walk enumeration.
#![allow(dead_code)]

use m2vpi::graph::{EdgeId, Graph, VertexId};
use m2vpi::rational::{rat, Rational};
use m2vpi::walk::WalkSummary;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn small_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn small_gain(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    rat(rng.gen_range(1..=bound), rng.gen_range(1..=bound))
}

/// Random monotone instance with `n` vertices and `m` edges, numerators and
/// denominators bounded by `bound` in absolute value.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize, bound: i64) -> Graph {
    let edges: Vec<_> = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            (u, v, small_rational(rng, bound), small_gain(rng, bound))
        })
        .collect();
    Graph::new(n, edges).unwrap()
}

/// Calls `f(end, edges, summary)` for every walk out of `s` with at most `k`
/// edges, the empty walk included.
pub fn walks_from(g: &Graph, s: VertexId, k: usize, f: &mut impl FnMut(VertexId, &[EdgeId], &WalkSummary)) {
    fn go(
        g: &Graph,
        at: VertexId,
        k: usize,
        edges: &mut Vec<EdgeId>,
        sum: &WalkSummary,
        f: &mut impl FnMut(VertexId, &[EdgeId], &WalkSummary),
    ) {
        f(at, edges, sum);
        if edges.len() == k {
            return;
        }
        for &id in g.out_edges(at) {
            let e = g.edge(id);
            edges.push(id);
            go(g, e.head, k, edges, &sum.then(&WalkSummary::of_edge(e)), f);
            edges.pop();
        }
    }
    go(g, s, k, &mut Vec::new(), &WalkSummary::empty(), f);
}

/// Brute-force facts about the closed walks at `v` with `1..=k` edges.
#[derive(Debug, Clone, Default)]
pub struct ClosedWalks {
    /// Least bound over walks with gain below one.
    pub upper: Option<Rational>,
    /// Greatest bound over walks with gain above one.
    pub lower: Option<Rational>,
    pub neg_unit: bool,
}

impl ClosedWalks {
    pub fn contradiction(&self) -> bool {
        self.neg_unit || matches!((&self.lower, &self.upper), (Some(lo), Some(up)) if lo > up)
    }
}

pub fn closed_walks(g: &Graph, v: VertexId, k: usize) -> ClosedWalks {
    let one = Rational::one();
    let mut out = ClosedWalks::default();
    walks_from(g, v, k, &mut |end, edges, sum| {
        if end != v || edges.is_empty() {
            return;
        }
        if sum.gain == one {
            out.neg_unit |= sum.cost.is_negative();
            return;
        }
        let phi = &sum.cost / &(&one - &sum.gain);
        if sum.gain < one {
            if out.upper.as_ref().is_none_or(|u| phi < *u) {
                out.upper = Some(phi);
            }
        } else if out.lower.as_ref().is_none_or(|l| phi > *l) {
            out.lower = Some(phi);
        }
    });
    out
}

/// Lexicographic minimum of `(c(Q) + g(Q) alpha, g(Q))` over `s -> t` walks
/// with at most `k` edges, by enumeration.
pub fn lex_min(g: &Graph, s: VertexId, t: VertexId, k: usize, alpha: &Rational) -> Option<(Rational, Rational)> {
    let mut best: Option<(Rational, Rational)> = None;
    walks_from(g, s, k, &mut |end, _, sum| {
        if end == t {
            let cand = (&sum.cost + &sum.gain * alpha, sum.gain.clone());
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    });
    best
}

/// Exact discounted distances `inf_P sum_i gamma^i c(e_{i+1})` over finite
/// `s -> t` walks, by policy iteration on a stopping problem per target.
///
/// Restricted to the vertices that reach `t`, and with the option to stop at
/// `t` for free, the least cost of an infinite play equals the infimum over
/// finite walks: a play can be cut off arbitrarily late and routed to `t`.
pub fn exact_discounted(n: usize, edges: &[(usize, usize, Rational)], gamma: &Rational) -> Vec<Vec<Option<Rational>>> {
    let mut out = vec![vec![None; n]; n];
    for t in 0..n {
        // reach[u]: distance in edges from u to t
        let mut reach = vec![usize::MAX; n];
        reach[t] = 0;
        let mut frontier = vec![t];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &v in &frontier {
                for (u, w, _) in edges {
                    if *w == v && reach[*u] == usize::MAX {
                        reach[*u] = reach[v] + 1;
                        next.push(*u);
                    }
                }
            }
            frontier = next;
        }
        // actions: Some(edge index) or None for stopping at t
        let actions: Vec<Vec<Option<usize>>> = (0..n)
            .map(|u| {
                let mut a: Vec<Option<usize>> = Vec::new();
                if u == t {
                    a.push(None);
                }
                a.extend((0..edges.len()).filter(|&i| edges[i].0 == u && reach[edges[i].1] != usize::MAX).map(Some));
                a
            })
            .collect();
        // start from shortest routes to t, then stop
        let mut policy: Vec<Option<usize>> = (0..n)
            .map(|u| {
                if u == t || reach[u] == usize::MAX {
                    None
                } else {
                    (0..edges.len()).find(|&i| edges[i].0 == u && reach[edges[i].1].saturating_add(1) == reach[u])
                }
            })
            .collect();
        loop {
            let x = evaluate(n, edges, gamma, &policy, &reach);
            let mut changed = false;
            for u in (0..n).filter(|&u| reach[u] != usize::MAX) {
                let value = |a: &Option<usize>| match a {
                    None => Rational::zero(),
                    Some(i) => &edges[*i].2 + gamma * &x[edges[*i].1],
                };
                let mut best = value(&policy[u]);
                for a in &actions[u] {
                    let v = value(a);
                    if v < best {
                        best = v;
                        policy[u] = *a;
                        changed = true;
                    }
                }
            }
            if !changed {
                for s in 0..n {
                    if reach[s] != usize::MAX {
                        out[s][t] = Some(x[s].clone());
                    }
                }
                break;
            }
        }
    }
    out
}

/// Values of a stationary policy whose successor graph is functional.
fn evaluate(
    n: usize,
    edges: &[(usize, usize, Rational)],
    gamma: &Rational,
    policy: &[Option<usize>],
    reach: &[usize],
) -> Vec<Rational> {
    let mut x: Vec<Option<Rational>> = vec![None; n];
    for start in (0..n).filter(|&u| reach[u] != usize::MAX) {
        let mut stack = Vec::new();
        let mut at = start;
        let mut on_stack = vec![false; n];
        while x[at].is_none() && !on_stack[at] {
            on_stack[at] = true;
            stack.push(at);
            match policy[at] {
                None => {
                    x[at] = Some(Rational::zero());
                    stack.pop();
                    break;
                }
                Some(i) => at = edges[i].1,
            }
        }
        if x[at].is_none() {
            // a cycle closes at `at`: solve x_at = c(C) + gamma^|C| x_at
            let from = stack.iter().position(|&u| u == at).unwrap();
            let mut cost = Rational::zero();
            let mut pow = Rational::one();
            for &u in &stack[from..] {
                let e = &edges[policy[u].unwrap()];
                cost = &cost + &pow * &e.2;
                pow = &pow * gamma;
            }
            x[at] = Some(&cost / &(Rational::one() - &pow));
        }
        while let Some(u) = stack.pop() {
            if x[u].is_some() {
                continue;
            }
            let e = &edges[policy[u].unwrap()];
            x[u] = Some(&e.2 + gamma * x[e.1].as_ref().unwrap());
        }
    }
    x.into_iter().map(|v| v.unwrap_or_else(Rational::zero)).collect()
}
