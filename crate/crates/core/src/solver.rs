//! The randomized linear-space solver.
//!
//! Phase `j` samples vertices and tightens `x*_v` to the `2^{j+1}`-cycle bound
//! of each sample. Propagating `x*` through walks of up to `3n` edges yields
//! `y*`, which equals `x^max` once every distinguished cycle has been hit.
//! The result is verified; on failure the same is done on the reverse
//! instance, and a vertex where the two disagree yields a bicycle. If neither
//! succeeds, the attempt is repeated with a fresh seed.

use rand::Rng;
use std::collections::HashMap;

use crate::certificate::{verify_certificate, Certificate};
use crate::counters::{self, AuxGuard};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::kcycle::{phi_vk, phi_vk_value, KCycle};
use crate::propagate::{evaluate_solution, BoundVector, Evaluation};
use crate::rational::{ExtRational, Rational};
use crate::reconstruct::reconstruct_walk;
use crate::rng::rng_for;
use crate::walk::{Walk, WalkSummary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Feasible(BoundVector),
    Infeasible(Certificate),
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    pub fn solution(&self) -> Option<&BoundVector> {
        match self {
            SolveOutcome::Feasible(x) => Some(x),
            SolveOutcome::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SolveOutcome::Feasible(_) => None,
            SolveOutcome::Infeasible(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub seed: u64,
    /// Attempts made, including the successful one.
    pub attempts: usize,
    /// Samples drawn in each phase of the first attempt on the input graph.
    pub phase_samples: Vec<usize>,
}

/// Per-phase `(k, samples)`: `k = min(2^{j+1}, n)` and `ceil(n / 2^j) * (l + 2 - j)^3`
/// samples, for `j = 0..=l` where `l = floor(log2 n)`.
pub fn phase_schedule(n: usize) -> Vec<(usize, usize)> {
    if n == 0 {
        return Vec::new();
    }
    let l = n.ilog2() as usize;
    (0..=l)
        .map(|j| {
            let k = (1usize << (j + 1)).min(n);
            let t = n.div_ceil(1 << j) * (l + 2 - j).pow(3);
            (k, t)
        })
        .collect()
}

/// Upper bounds from sampled cycle bounds. Each finite `x*_v` is
/// `phi_{v,k}` for the recorded `k`, so its closed walk can be rebuilt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XStar {
    pub values: BoundVector,
    pub lengths: Vec<Option<usize>>,
}

impl XStar {
    pub fn unbounded(n: usize) -> XStar {
        XStar { values: vec![ExtRational::PosInf; n], lengths: vec![None; n] }
    }

    /// The closed walk at `v` attaining `x*_v`.
    pub fn witness(&self, g: &Graph, v: VertexId) -> Walk {
        let k = self.lengths[v].expect("finite entry");
        match phi_vk(g, v, k) {
            KCycle::Finite { value, witness } => {
                assert_eq!(ExtRational::Finite(value), self.values[v]);
                witness.expect("materialized")
            }
            other => panic!("cycle bound changed on recomputation: {other:?}"),
        }
    }
}

/// Runs phases `0..phases` of the schedule, tightening `x*` in place.
/// `sample_counts` receives the number of samples of each phase.
pub fn run_phases(
    g: &Graph,
    rng: &mut impl Rng,
    phases: usize,
    xstar: &mut XStar,
    sample_counts: &mut Vec<usize>,
) -> Result<(), Certificate> {
    let n = g.n();
    let mut memo: HashMap<(VertexId, usize), ExtRational> = HashMap::new();
    for (k, t) in phase_schedule(n).into_iter().take(phases) {
        for _ in 0..t {
            let v = rng.gen_range(0..n);
            let val = match memo.get(&(v, k)) {
                Some(val) => val.clone(),
                None => {
                    let val = match phi_vk_value(g, v, k) {
                        KCycle::Finite { value, .. } => ExtRational::Finite(value),
                        KCycle::Unbounded => ExtRational::PosInf,
                        KCycle::Infeasible(cert) => return Err(cert),
                    };
                    memo.insert((v, k), val.clone());
                    val
                }
            };
            if val < xstar.values[v] {
                xstar.values[v] = val;
                xstar.lengths[v] = Some(k);
            }
        }
        sample_counts.push(t);
    }
    Ok(())
}

/// `y*_v = min over w and walks P: v -> w with at most 3n edges of c(P) + g(P) x*_w`,
/// with a minimizing endpoint `w_v` for each `v`.
pub fn compute_ystar(g: &Graph, xstar: &[ExtRational]) -> (BoundVector, Vec<VertexId>) {
    let n = g.n();
    assert!(xstar.iter().all(|x| !x.is_neg_inf()));
    let _scratch = AuxGuard::new(4 * n);
    let mut y = xstar.to_vec();
    let mut ends: Vec<VertexId> = (0..n).collect();
    for _ in 0..3 * n {
        let mut next = y.clone();
        let mut next_ends = ends.clone();
        let mut changed = false;
        for e in g.edges() {
            let ExtRational::Finite(yv) = &y[e.head] else { continue };
            let cand = ExtRational::Finite(&e.cost + &e.gain * yv);
            if cand < next[e.tail] {
                next[e.tail] = cand;
                next_ends[e.tail] = ends[e.head];
                changed = true;
            }
        }
        counters::add_relaxations(g.m() as u64);
        y = next;
        ends = next_ends;
        if !changed {
            break;
        }
    }
    (y, ends)
}

/// Why a vector is not a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The constraint of this edge does not hold.
    Violated(EdgeId),
    /// A unit-gain negative closed walk among the unbounded vertices.
    NegUnitGainCycle(Walk),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Verified,
    /// Feasible, but the entry of this vertex can be raised.
    NotMaximal(VertexId),
    Infeasible(Violation),
}

/// Checks that `x` is the pointwise maximal solution.
///
/// A feasible `x` is maximal exactly when every finite vertex reaches, along
/// tight edges, a tight closed walk of gain below one (its value is then
/// forced), and the unbounded vertices contain no closed walk of gain below
/// one. The unbounded part is also searched for unit-gain negative cycles,
/// which finite values cannot rule out.
pub fn verify_solution(g: &Graph, x: &[ExtRational]) -> Verification {
    let n = g.n();
    assert_eq!(x.len(), n);
    assert!(x.iter().all(|v| !v.is_neg_inf()), "solutions never contain -inf");
    if let Evaluation::Violated(e) = evaluate_solution(g, x) {
        return Verification::Infeasible(Violation::Violated(e));
    }
    counters::add_relaxations(g.m() as u64);

    // unbounded part: out-edges stay inside it since x is feasible
    let unbounded: Vec<bool> = x.iter().map(|v| v.is_pos_inf()).collect();
    let inside: Vec<EdgeId> =
        g.edges().iter().filter(|e| unbounded[e.tail] && unbounded[e.head]).map(|e| e.id).collect();
    if let Some(v) = first_on_contracting_cycle(g, &inside) {
        return Verification::NotMaximal(v);
    }
    if let Some(w) = unit_gain_negative_cycle(g, &inside, &unbounded) {
        return Verification::Infeasible(Violation::NegUnitGainCycle(w));
    }

    // finite part: tight edges, then vertices reaching a contracting tight cycle
    let tight: Vec<EdgeId> = g
        .edges()
        .iter()
        .filter(|e| match (&x[e.tail], &x[e.head]) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => *a == &e.cost + &e.gain * b,
            _ => false,
        })
        .map(|e| e.id)
        .collect();
    let anchored = contracting_sccs(g, &tight);
    let mut good = anchored;
    // reverse reachability along tight edges
    let mut stack: Vec<VertexId> = (0..n).filter(|&v| good[v]).collect();
    let mut rev_adj = vec![Vec::new(); n];
    for &id in &tight {
        let e = g.edge(id);
        rev_adj[e.head].push(e.tail);
    }
    while let Some(v) = stack.pop() {
        for &u in &rev_adj[v] {
            if !good[u] {
                good[u] = true;
                stack.push(u);
            }
        }
    }
    match (0..n).find(|&v| !unbounded[v] && !good[v]) {
        Some(v) => Verification::NotMaximal(v),
        None => Verification::Verified,
    }
}

/// `q_u`: least gain product of walks with at most `rounds` edges out of `u`
/// using only `edges`. Returns the vector and whether the last round improved.
fn min_gain_products(g: &Graph, edges: &[EdgeId], rounds: usize) -> (Vec<Rational>, Vec<bool>) {
    let n = g.n();
    let mut q = vec![Rational::one(); n];
    let mut improved = vec![false; n];
    for _ in 0..rounds {
        let mut next = q.clone();
        improved = vec![false; n];
        for &id in edges {
            let e = g.edge(id);
            let cand = &e.gain * &q[e.head];
            if cand < next[e.tail] {
                next[e.tail] = cand;
                improved[e.tail] = true;
            }
        }
        counters::add_relaxations(edges.len() as u64);
        q = next;
        if !improved.iter().any(|&b| b) {
            break;
        }
    }
    (q, improved)
}

/// Smallest vertex that reaches a closed walk of gain below one within `edges`.
fn first_on_contracting_cycle(g: &Graph, edges: &[EdgeId]) -> Option<VertexId> {
    let (_, improved) = min_gain_products(g, edges, g.n() + 1);
    improved.iter().position(|&b| b)
}

/// Vertices of strongly connected components (of the subgraph `edges`) that
/// contain a closed walk of gain below one.
fn contracting_sccs(g: &Graph, edges: &[EdgeId]) -> Vec<bool> {
    let n = g.n();
    let comp = scc(n, edges.iter().map(|&id| (g.edge(id).tail, g.edge(id).head)));
    let mut out = vec![false; n];
    let count = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut members = vec![Vec::new(); count];
    for v in 0..n {
        members[comp[v]].push(v);
    }
    let mut by_comp = vec![Vec::new(); count];
    for &id in edges {
        let e = g.edge(id);
        if comp[e.tail] == comp[e.head] {
            by_comp[comp[e.tail]].push(id);
        }
    }
    for c in 0..count {
        if by_comp[c].is_empty() {
            continue;
        }
        let (_, improved) = min_gain_products(g, &by_comp[c], members[c].len() + 1);
        if improved.iter().any(|&b| b) {
            for &v in &members[c] {
                out[v] = true;
            }
        }
    }
    out
}

/// Component index per vertex (Tarjan, iterative).
pub(crate) fn scc(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (u, v) in arcs {
        adj[u].push(v);
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// A unit-gain negative closed walk within `edges`, assuming none of gain below one.
///
/// Rescaling `x_u = q_u z_u` with the least gain products `q` makes every
/// gain at least one; unit-gain cycles use only edges whose rescaled gain is
/// exactly one, and on those the rescaled costs `c / q_tail` keep the sign of
/// the cycle cost. A plain additive negative-cycle search finishes the job.
fn unit_gain_negative_cycle(g: &Graph, edges: &[EdgeId], inside: &[bool]) -> Option<Walk> {
    let n = g.n();
    let (q, _) = min_gain_products(g, edges, n);
    let flat: Vec<(EdgeId, Rational)> = edges
        .iter()
        .filter_map(|&id| {
            let e = g.edge(id);
            (&e.gain * &q[e.head] == q[e.tail]).then(|| (id, &e.cost / &q[e.tail]))
        })
        .collect();
    if flat.is_empty() {
        return None;
    }
    // additive Bellman-Ford from a virtual source tied to every vertex
    let mut d: Vec<Rational> = vec![Rational::zero(); n];
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for (id, w) in &flat {
            let e = g.edge(*id);
            // walks run tail -> head, so distances flow from head back to tail
            let cand = w + &d[e.head];
            if cand < d[e.tail] {
                d[e.tail] = cand;
                pred[e.tail] = Some(*id);
                last = Some(e.tail);
            }
        }
        counters::add_relaxations(flat.len() as u64);
        last?;
    }
    let mut v = last.expect("still relaxing after n rounds");
    debug_assert!(inside[v]);
    for _ in 0..n {
        v = g.edge(pred[v].unwrap()).head;
    }
    // v is on the cycle; follow successors (pred points forward along the walk)
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let id = pred[v].unwrap();
        cycle.push(id);
        v = g.edge(id).head;
        if v == start {
            break;
        }
    }
    let walk = Walk::from_edges(g, start, cycle).expect("successor edges chain");
    assert!(walk.summary().gain.is_one() && walk.summary().cost.is_negative());
    Some(walk)
}

/// One side of a failed attempt, for certificate assembly.
pub struct Side<'a> {
    pub graph: &'a Graph,
    pub xstar: XStar,
    pub ystar: BoundVector,
    pub ends: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no vertex has its upper bound below its lower bound")]
pub struct NoWitnessVertex;

/// Reverses a walk of the reverse instance into a walk of `g` (edge ids are shared).
pub fn reverse_walk(g: &Graph, w: &Walk) -> Walk {
    let edges: Vec<EdgeId> = w.edges().iter().rev().copied().collect();
    Walk::from_edges(g, w.end(), edges).expect("reversed walk")
}

/// Maps a certificate of the reverse instance back to `g`.
pub fn certificate_from_reverse(g: &Graph, cert: &Certificate) -> Certificate {
    let mapped = match cert {
        Certificate::NegUnitGain(w) => Certificate::NegUnitGain(reverse_walk(g, w)),
        Certificate::NegBicycle { c_le, c_ge, path } => Certificate::NegBicycle {
            c_le: reverse_walk(g, c_ge),
            c_ge: reverse_walk(g, c_le),
            path: reverse_walk(g, path),
        },
    };
    assert!(verify_certificate(g, &mapped), "reverse certificate did not map back");
    mapped
}

/// Builds a bicycle from a vertex whose upper bound `y*_g` lies below the
/// lower bound `-y*rev_g` obtained on the reverse instance.
pub fn assemble_certificate(g: &Graph, fwd: &Side, rev: &Side) -> Result<Certificate, NoWitnessVertex> {
    let n = g.n();
    let v = (0..n)
        .find(|&v| match (&fwd.ystar[v], &rev.ystar[v]) {
            (ExtRational::Finite(up), ExtRational::Finite(down)) => up + down < Rational::zero(),
            _ => false,
        })
        .ok_or(NoWitnessVertex)?;
    let len = 3 * n;

    let w = fwd.ends[v];
    let alpha = fwd.xstar.values[w].finite().expect("finite endpoint").clone();
    let s = reconstruct_walk(fwd.graph, v, w, len, &alpha).expect("endpoint reachable");
    debug_assert_eq!(ExtRational::Finite(s.summary().apply_finite(&alpha)), fwd.ystar[v]);
    let d = fwd.xstar.witness(fwd.graph, w);

    let wr = rev.ends[v];
    let alpha_r = rev.xstar.values[wr].finite().expect("finite endpoint").clone();
    let s_r = reconstruct_walk(rev.graph, v, wr, len, &alpha_r).expect("endpoint reachable");
    let d_r = rev.xstar.witness(rev.graph, wr);

    let path = reverse_walk(g, &s_r).concat(&s);
    let cert = Certificate::NegBicycle { c_le: d, c_ge: reverse_walk(g, &d_r), path };
    assert!(verify_certificate(g, &cert), "assembled bicycle failed to verify");
    Ok(cert)
}

/// Violated edges examined per side after a failed assembly.
const VIOLATION_PROBES: usize = 4;

fn violated_edges<'a>(g: &'a Graph, y: &'a [ExtRational]) -> impl Iterator<Item = EdgeId> + 'a {
    g.edges().iter().filter(move |e| y[e.head].affine(&e.cost, &e.gain) < y[e.tail]).map(|e| e.id)
}

/// An edge `uv` violated by `y*` extends the walk realizing `y*_v` to a walk
/// of `3n + 1` edges that beats every walk from `u` with at most `3n` edges.
/// Cutting out any closed subwalk gives such a shorter walk, so every closed
/// subwalk strictly helps: with unit gain it has negative cost, and with gain
/// above one its bound exceeds what the rest of the walk proves. Either is a
/// certificate; closed subwalks with gain below one prove nothing.
pub fn certificate_from_violation(side: &Side, id: EdgeId) -> Option<Certificate> {
    let g = side.graph;
    let e = g.edge(id);
    let w = side.ends[e.head];
    let alpha = side.xstar.values[w].finite()?.clone();
    let rest = reconstruct_walk(g, e.head, w, 3 * g.n(), &alpha).ok()?;
    let mut edges = vec![id];
    edges.extend_from_slice(rest.edges());
    let walk = Walk::from_edges(g, e.tail, edges).ok()?;
    let verts = walk.vertices(g);
    let mut prefix = vec![WalkSummary::empty()];
    for &x in walk.edges() {
        let next = prefix.last().unwrap().then(&WalkSummary::of_edge(g.edge(x)));
        prefix.push(next);
    }
    let one = Rational::one();
    let mut lower: Option<Walk> = None;
    for j in 1..verts.len() {
        for i in 0..j {
            if verts[i] != verts[j] {
                continue;
            }
            let gain = &prefix[j].gain / &prefix[i].gain;
            let cost = (&prefix[j].cost - &prefix[i].cost) / &prefix[i].gain;
            if gain < one || (gain == one && !cost.is_negative()) {
                continue;
            }
            let cycle = Walk::from_edges(g, verts[i], walk.edges()[i..j].to_vec()).expect("subwalk");
            let cert = if gain == one {
                Certificate::NegUnitGain(cycle)
            } else {
                let c_le = lower.get_or_insert_with(|| side.xstar.witness(g, w)).clone();
                let path = Walk::from_edges(g, verts[j], walk.edges()[j..].to_vec()).expect("subwalk");
                Certificate::NegBicycle { c_le, c_ge: cycle, path }
            };
            if verify_certificate(g, &cert) {
                return Some(cert);
            }
        }
    }
    None
}

pub fn solve_simple(g: &Graph, seed: u64) -> SolveOutcome {
    solve_simple_with_stats(g, seed).0
}

pub fn solve_simple_with_stats(g: &Graph, seed: u64) -> (SolveOutcome, SolveStats) {
    let n = g.n();
    let mut stats = SolveStats { seed, ..SolveStats::default() };
    if n == 0 {
        stats.attempts = 1;
        return (SolveOutcome::Feasible(Vec::new()), stats);
    }
    let phases = phase_schedule(n).len();
    let rev = g.reverse();
    for attempt in 0.. {
        stats.attempts = attempt + 1;
        let mut rng = rng_for(seed, attempt as u64);
        let mut xstar = XStar::unbounded(n);
        let mut counts = Vec::new();
        let res = run_phases(g, &mut rng, phases, &mut xstar, &mut counts);
        if attempt == 0 {
            stats.phase_samples = counts;
        }
        if let Err(cert) = res {
            return (SolveOutcome::Infeasible(cert), stats);
        }
        let (ystar, ends) = compute_ystar(g, &xstar.values);
        match verify_solution(g, &ystar) {
            Verification::Verified => return (SolveOutcome::Feasible(ystar), stats),
            Verification::Infeasible(Violation::NegUnitGainCycle(w)) => {
                return (SolveOutcome::Infeasible(Certificate::NegUnitGain(w)), stats)
            }
            Verification::NotMaximal(_) | Verification::Infeasible(Violation::Violated(_)) => {}
        }
        let mut xrev = XStar::unbounded(n);
        if let Err(cert) = run_phases(&rev, &mut rng, phases, &mut xrev, &mut Vec::new()) {
            return (SolveOutcome::Infeasible(certificate_from_reverse(g, &cert)), stats);
        }
        let (yrev, ends_rev) = compute_ystar(&rev, &xrev.values);
        let fwd = Side { graph: g, xstar, ystar, ends };
        let bwd = Side { graph: &rev, xstar: xrev, ystar: yrev, ends: ends_rev };
        if let Ok(cert) = assemble_certificate(g, &fwd, &bwd) {
            return (SolveOutcome::Infeasible(cert), stats);
        }
        // no vertex has crossed bounds, yet a bound keeps falling: look for
        // the cycle responsible along the walks behind a violated edge
        for id in violated_edges(g, &fwd.ystar).take(VIOLATION_PROBES) {
            if let Some(cert) = certificate_from_violation(&fwd, id) {
                return (SolveOutcome::Infeasible(cert), stats);
            }
        }
        for id in violated_edges(&rev, &bwd.ystar).take(VIOLATION_PROBES) {
            if let Some(cert) = certificate_from_violation(&bwd, id) {
                return (SolveOutcome::Infeasible(certificate_from_reverse(g, &cert)), stats);
            }
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("vertex {0} has no tight out-edge")]
pub struct NoTightEdge(pub VertexId);

/// For a deterministic MDP, the action at each vertex: the smallest out-edge
/// attaining `x_v = c(e) + g(e) x_w`.
pub fn dmdp_policy(g: &Graph, x: &[ExtRational]) -> Result<Vec<EdgeId>, NoTightEdge> {
    (0..g.n())
        .map(|v| {
            g.out_edges(v)
                .iter()
                .copied()
                .find(|&id| {
                    let e = g.edge(id);
                    x[e.head].affine(&e.cost, &e.gain) == x[v]
                })
                .ok_or(NoTightEdge(v))
        })
        .collect()
}
