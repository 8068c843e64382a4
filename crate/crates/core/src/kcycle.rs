//! The k-cycle upper bound `phi_{v,k}`: the tightest `phi(C)` over closed
//! walks `C` through `v` with at most `k` edges and gain below one.
//!
//! The bound is found by parametric search. For each length `j` the walks
//! `P_{j,w}` minimizing `c(P) + g(P) * phi_{v,k}` are chosen without knowing
//! `phi_{v,k}`: every candidate is a line in the unknown, and a binary search
//! over the breakpoints of the per-vertex lower envelopes, steered by
//! [`locate_cycle`], narrows an interval `(a, b)` until no breakpoint is left
//! inside it. Infeasibility discovered on the way is returned as a certificate.

use crate::certificate::{verify_certificate, Certificate};
use crate::counters::{self, AuxGuard};
use crate::envelope::{lower_envelope, Line};
use crate::graph::{Graph, VertexId};
use crate::locate::{locate_cycle, CycleCase, CycleLocate};
use crate::rational::{ExtRational, Rational};
use crate::reconstruct::reconstruct_walk;
use crate::walk::{phi, Walk, WalkSummary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KCycle {
    /// `phi_{v,k}` with a closed walk attaining it, when one was requested.
    Finite { value: Rational, witness: Option<Walk> },
    /// No closed walk through `v` with at most `k` edges has gain below one.
    Unbounded,
    Infeasible(Certificate),
}

impl KCycle {
    pub fn value(&self) -> Option<ExtRational> {
        match self {
            KCycle::Finite { value, .. } => Some(ExtRational::Finite(value.clone())),
            KCycle::Unbounded => Some(ExtRational::PosInf),
            KCycle::Infeasible(_) => None,
        }
    }
}

/// Which half of the search invariant holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// Every gain-above-one bound at `v` is at most `a`, and `a < phi_{v,k} < b`.
    Separated,
    /// `a < phi(c_max) <= phi(c_min) < b` for the pinned walks.
    Pinned,
}

/// One state of the search interval, recorded after every decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalStep {
    pub level: usize,
    pub a: ExtRational,
    pub b: ExtRational,
    pub invariant: Invariant,
}

/// A closed walk at `v` kept implicitly until it is needed.
#[derive(Debug, Clone)]
enum Handle {
    Walk(Walk),
    Located(CycleLocate),
}

impl Handle {
    fn phi(&self) -> Rational {
        match self {
            Handle::Walk(w) => phi(w.summary()),
            Handle::Located(r) => r.phi().expect("pinned walks have gain other than one"),
        }
    }

    fn walk(&self, g: &Graph) -> Walk {
        match self {
            Handle::Walk(w) => w.clone(),
            Handle::Located(r) => r.witness(g).expect("located walk"),
        }
    }
}

/// `phi_{v,k}` with a witness walk.
pub fn phi_vk(g: &Graph, v: VertexId, k: usize) -> KCycle {
    run(g, v, k, true, None)
}

/// `phi_{v,k}` without building the witness. Certificates are still built.
pub fn phi_vk_value(g: &Graph, v: VertexId, k: usize) -> KCycle {
    run(g, v, k, false, None)
}

/// Like [`phi_vk`], also recording the search interval after every decision.
pub fn phi_vk_traced(g: &Graph, v: VertexId, k: usize) -> (KCycle, Vec<IntervalStep>) {
    let mut trace = Vec::new();
    let r = run(g, v, k, true, Some(&mut trace));
    (r, trace)
}

fn bicycle(g: &Graph, v: VertexId, c_le: Walk, c_ge: Walk) -> KCycle {
    let cert = Certificate::NegBicycle { c_le, c_ge, path: Walk::empty(v) };
    assert!(verify_certificate(g, &cert), "k-cycle bicycle failed to verify");
    KCycle::Infeasible(cert)
}

/// Candidate tag: the carried walk, or an edge prepended to the carried walk of its head.
const CARRIED: usize = usize::MAX;

fn candidates(g: &Graph, w: VertexId, prev: &[Option<WalkSummary>]) -> Vec<Line<Rational>> {
    let mut lines = Vec::with_capacity(g.out_edges(w).len() + 1);
    if let Some(p) = &prev[w] {
        lines.push(Line { slope: p.gain.clone(), intercept: p.cost.clone(), tag: CARRIED });
    }
    for &id in g.out_edges(w) {
        let e = g.edge(id);
        if let Some(p) = &prev[e.head] {
            lines.push(Line { slope: &e.gain * &p.gain, intercept: &e.cost + &e.gain * &p.cost, tag: id });
        }
    }
    lines
}

fn run(g: &Graph, v: VertexId, k: usize, materialize: bool, mut trace: Option<&mut Vec<IntervalStep>>) -> KCycle {
    assert!(k >= 1 && v < g.n());
    counters::inc_kcycle();
    let n = g.n();
    let one = Rational::one();

    let c_min = reconstruct_walk(g.zero_cost(), v, v, k, &one).expect("empty walk");
    let c_min = Walk::from_edges(g, v, c_min.edges().to_vec()).expect("same edges");
    if c_min.summary().gain >= one {
        return KCycle::Unbounded;
    }
    let c_max = reconstruct_walk(g.zero_cost_reciprocal(), v, v, k, &one).expect("empty walk");
    let c_max = Walk::from_edges(g, v, c_max.edges().to_vec()).expect("same edges");
    let mut invariant = Invariant::Separated;
    if c_max.summary().gain > one {
        if phi(c_max.summary()) > phi(c_min.summary()) {
            return bicycle(g, v, c_min, c_max);
        }
        invariant = Invariant::Pinned;
    }
    let mut c_min = Handle::Walk(c_min);
    let mut c_max = Handle::Walk(c_max);

    let mut a = ExtRational::NegInf;
    let mut b = ExtRational::PosInf;
    let _state = AuxGuard::new(2 * n + 4);
    let mut prev: Vec<Option<WalkSummary>> = vec![None; n];
    prev[v] = Some(WalkSummary::empty());

    for level in 1..=k {
        // breakpoints strictly inside (a, b), sorted and deduplicated
        let cands: Vec<Vec<Line<Rational>>> = (0..n).map(|w| candidates(g, w, &prev)).collect();
        let mut xs: Vec<Rational> = Vec::new();
        for lines in &cands {
            let env = lower_envelope(lines.clone());
            xs.extend(env.breaks.into_iter().filter(|x| {
                let x = ExtRational::Finite(x.clone());
                a < x && x < b
            }));
        }
        counters::add_relaxations(g.m() as u64);
        xs.sort();
        xs.dedup();
        let _breaks = AuxGuard::new(xs.len());

        // conceptual list [a, xs..., b]; indices into it
        let (mut lo, mut hi) = (0usize, xs.len() + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let x = &xs[mid - 1];
            let r = locate_cycle(g, v, k, x);
            match r.case {
                CycleCase::Below => {
                    hi = mid;
                    b = ExtRational::Finite(x.clone());
                    c_min = Handle::Located(r);
                }
                CycleCase::Above => {
                    assert_eq!(invariant, Invariant::Pinned, "gain-above-one walk beyond the separated bound");
                    lo = mid;
                    a = ExtRational::Finite(x.clone());
                    c_max = Handle::Located(r);
                }
                CycleCase::Between => {
                    lo = mid;
                    a = ExtRational::Finite(x.clone());
                    invariant = Invariant::Separated;
                }
                CycleCase::NegUnitGain => {
                    return KCycle::Infeasible(Certificate::NegUnitGain(r.witness(g).expect("walk")));
                }
                CycleCase::Equal => {
                    let witness = materialize.then(|| r.witness(g).expect("walk"));
                    return KCycle::Finite { value: x.clone(), witness };
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(IntervalStep { level, a: a.clone(), b: b.clone(), invariant });
            }
            if invariant == Invariant::Pinned && c_min.phi() < c_max.phi() {
                return bicycle(g, v, c_min.walk(g), c_max.walk(g));
            }
        }

        // pick each P_{level,w} by its value inside (a, b); no breakpoint
        // lies there, so the simplest point gives the same order as any
        let z = ExtRational::simplest_between(&a, &b);
        let mut next: Vec<Option<WalkSummary>> = vec![None; n];
        for (w, lines) in cands.into_iter().enumerate() {
            let mut best: Option<(Rational, usize, Line<Rational>)> = None;
            for line in lines {
                let val = line.eval(&z);
                // carried beats any edge on a full tie, smaller edge ids beat larger
                let rank = if line.tag == CARRIED { 0 } else { line.tag + 1 };
                let better = match &best {
                    None => true,
                    Some((bv, br, bl)) => (&val, &line.slope, rank) < (bv, &bl.slope, *br),
                };
                if better {
                    best = Some((val, rank, line));
                }
            }
            if let Some((_, rank, line)) = best {
                let length = if rank == 0 {
                    prev[w].as_ref().unwrap().length
                } else {
                    prev[g.edge(rank - 1).head].as_ref().unwrap().length + 1
                };
                next[w] = Some(WalkSummary::new(line.intercept, line.slope, length));
            }
        }
        counters::add_relaxations(g.m() as u64);
        prev = next;
    }

    let p = prev[v].clone().expect("the empty walk is always a candidate");
    let z = ExtRational::simplest_between(&a, &b);
    let p_walk = |alpha: &Rational| reconstruct_walk(g, v, v, k, alpha).expect("walk");
    match p.gain.cmp(&one) {
        std::cmp::Ordering::Less => {
            let phi_p = phi(&p);
            match invariant {
                Invariant::Separated => {
                    let r = locate_cycle(g, v, k, &phi_p);
                    match r.case {
                        CycleCase::Equal => {
                            let witness = materialize.then(|| r.witness(g).expect("walk"));
                            KCycle::Finite { value: phi_p, witness }
                        }
                        CycleCase::NegUnitGain => {
                            KCycle::Infeasible(Certificate::NegUnitGain(r.witness(g).expect("walk")))
                        }
                        other => panic!("final walk bound {phi_p} located as {other:?}"),
                    }
                }
                Invariant::Pinned => {
                    let phi_max = c_max.phi();
                    assert!(phi_p <= phi_max);
                    if phi_p < phi_max {
                        return bicycle(g, v, p_walk(&phi_max), c_max.walk(g));
                    }
                    let r = locate_cycle(g, v, k, &phi_p);
                    match r.case {
                        CycleCase::Equal => {
                            let witness = materialize.then(|| r.witness(g).expect("walk"));
                            KCycle::Finite { value: phi_p, witness }
                        }
                        CycleCase::Below => bicycle(g, v, r.witness(g).expect("walk"), c_max.walk(g)),
                        CycleCase::Above => bicycle(g, v, p_walk(&phi_max), r.witness(g).expect("walk")),
                        CycleCase::NegUnitGain => {
                            KCycle::Infeasible(Certificate::NegUnitGain(r.witness(g).expect("walk")))
                        }
                        CycleCase::Between => unreachable!("k-cycle bound above a known cycle bound"),
                    }
                }
            }
        }
        std::cmp::Ordering::Greater => bicycle(g, v, c_min.walk(g), p_walk(&z)),
        std::cmp::Ordering::Equal => {
            assert!(p.cost.is_negative(), "final unit-gain walk with non-negative cost");
            let w = p_walk(&z);
            KCycle::Infeasible(Certificate::NegUnitGain(w))
        }
    }
}
