//! The space-time trade-off solver.
//!
//! Phases stop once the cycle length `2^{j+1}` reaches `h`. Long cycles are
//! handled through a sampled vertex set `S`: between any two of its vertices
//! the compressed instance has one edge summarizing the best walk of at most
//! `h` edges with respect to the (unknown) `x^max` of the target. Solving the
//! compressed instance bounds the sampled vertices, and the usual
//! propagation and verification finish the job.
//!
//! The dense compressed instance is solved with [`solve_simple`], and each
//! target is located on its own with [`locate_value`].

use rand::seq::index::sample;
use rand::Rng;

use crate::certificate::Certificate;
use crate::counters::AuxGuard;
use crate::envelope::{lower_envelope, Line};
use crate::graph::{Graph, VertexId};
use crate::locate::{locate_value, ValueOutcome};
use crate::rational::{ExtRational, Rational};
use crate::rng::{derive_seed, rng_for};
use crate::solver::{
    compute_ystar, phase_schedule, run_phases, solve_simple, verify_solution, SolveOutcome, Verification,
    Violation, XStar,
};
use crate::walk::WalkSummary;

/// Sampling constant in `|S| = ceil(3 (n / h) ln n)`.
pub const SAMPLE_CONSTANT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedInstance {
    pub graph: Graph,
    /// Original vertex of each compressed vertex.
    pub vertices: Vec<VertexId>,
    /// `(s, t)` in original indices for each compressed edge.
    pub provenance: Vec<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TradeoffStats {
    pub attempts: usize,
    pub phases: usize,
    pub sample_size: usize,
    pub compressed_edges: usize,
    /// Whether a full solve was needed to decide feasibility.
    pub adjudicated: bool,
}

/// `min(n, ceil(3 (n / h) ln n))`.
pub fn sample_size(n: usize, h: usize) -> usize {
    if n <= 1 {
        return n;
    }
    let s = (SAMPLE_CONSTANT * (n as f64 / h as f64) * (n as f64).ln()).ceil() as usize;
    s.min(n)
}

/// A uniform sample of [`sample_size`] distinct vertices, sorted.
pub fn sample_set(rng: &mut impl Rng, n: usize, h: usize) -> Vec<VertexId> {
    let mut s = sample(rng, n, sample_size(n, h)).into_vec();
    s.sort_unstable();
    s
}

/// Number of phases to run: through the first `j` with `2^j >= h`.
pub fn phases_for(n: usize, h: usize) -> usize {
    let total = phase_schedule(n).len();
    let mut j = 0;
    while (1usize << j) < h {
        j += 1;
    }
    (j + 1).min(total)
}

const CARRIED: usize = usize::MAX;

/// Lines `y = g x + c` for walks out of `w` with one more edge; the carried
/// walk is included unless `fresh_only`.
fn candidates(g: &Graph, w: VertexId, prev: &[Option<WalkSummary>], fresh_only: bool) -> Vec<Line<Rational>> {
    let mut lines = Vec::new();
    if !fresh_only {
        if let Some(p) = &prev[w] {
            lines.push(Line { slope: p.gain.clone(), intercept: p.cost.clone(), tag: CARRIED });
        }
    }
    for &id in g.out_edges(w) {
        let e = g.edge(id);
        if let Some(p) = &prev[e.head] {
            lines.push(Line { slope: &e.gain * &p.gain, intercept: &e.cost + &e.gain * &p.cost, tag: id });
        }
    }
    lines
}

fn select(g: &Graph, lines: Vec<Line<Rational>>, z: &Rational, prev: &[Option<WalkSummary>], w: VertexId) -> Option<WalkSummary> {
    let mut best: Option<(Rational, Rational, usize)> = None;
    for line in lines {
        let val = line.eval(z);
        let rank = if line.tag == CARRIED { 0 } else { line.tag + 1 };
        if best.as_ref().is_none_or(|(bv, bs, br)| (&val, &line.slope, rank) < (bv, bs, *br)) {
            best = Some((val, line.slope, rank));
        }
    }
    best.map(|(val, slope, rank)| {
        let length = if rank == 0 {
            prev[w].as_ref().unwrap().length
        } else {
            prev[g.edge(rank - 1).head].as_ref().unwrap().length + 1
        };
        WalkSummary::new(val - &slope * z, slope, length)
    })
}

/// For one target `t`: per source `s`, the summary of a walk of at most `h`
/// edges minimizing `c(Q) + g(Q) x^max_t` (non-empty when `s = t`).
pub fn compress_target(g: &Graph, t: VertexId, h: usize) -> Result<Vec<Option<WalkSummary>>, Certificate> {
    let n = g.n();
    let _state = AuxGuard::new(2 * n + 2);
    let mut a = ExtRational::NegInf;
    let mut b = ExtRational::PosInf;
    let mut prev: Vec<Option<WalkSummary>> = vec![None; n];
    prev[t] = Some(WalkSummary::empty());
    let mut diagonal = None;
    for level in 1..=h {
        let last = level == h;
        let mut xs: Vec<Rational> = Vec::new();
        let mut collect = |lines: Vec<Line<Rational>>| {
            let env = lower_envelope(lines);
            xs.extend(env.breaks.into_iter().filter(|x| {
                let x = ExtRational::Finite(x.clone());
                a < x && x < b
            }));
        };
        for w in 0..n {
            collect(candidates(g, w, &prev, false));
        }
        if last {
            collect(candidates(g, t, &prev, true));
        }
        xs.sort();
        xs.dedup();
        let _breaks = AuxGuard::new(xs.len());
        // x^max_t lies in [a, b); keep it there while no breakpoint is left inside
        let (mut lo, mut hi) = (0usize, xs.len() + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let x = &xs[mid - 1];
            match locate_value(g, t, x) {
                ValueOutcome::Below(_) => {
                    hi = mid;
                    b = ExtRational::Finite(x.clone());
                }
                ValueOutcome::NotBelow => {
                    lo = mid;
                    a = ExtRational::Finite(x.clone());
                }
                ValueOutcome::Infeasible(cert) => return Err(cert),
            }
        }
        let z = ExtRational::simplest_between(&a, &b);
        if last {
            diagonal = select(g, candidates(g, t, &prev, true), &z, &prev, t);
        }
        prev = (0..n).map(|w| select(g, candidates(g, w, &prev, false), &z, &prev, w)).collect();
    }
    prev[t] = diagonal;
    Ok(prev)
}

/// Builds the compressed instance on `s` (original vertex ids, any order).
pub fn build_compressed(g: &Graph, s: &[VertexId], h: usize) -> Result<CompressedInstance, Certificate> {
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in s.iter().enumerate() {
        index[v] = i;
    }
    let mut edges = Vec::new();
    let mut provenance = Vec::new();
    for &t in s {
        let best = compress_target(g, t, h)?;
        for &src in s {
            if let Some(q) = &best[src] {
                edges.push((index[src], index[t], q.cost.clone(), q.gain.clone()));
                provenance.push((src, t));
            }
        }
    }
    let graph = Graph::new(s.len(), edges).expect("compressed edges are well formed");
    Ok(CompressedInstance { graph, vertices: s.to_vec(), provenance })
}

pub fn solve_tradeoff(g: &Graph, h: usize, seed: u64) -> SolveOutcome {
    solve_tradeoff_with_stats(g, h, seed).0
}

pub fn solve_tradeoff_with_stats(g: &Graph, h: usize, seed: u64) -> (SolveOutcome, TradeoffStats) {
    let n = g.n();
    assert!(h >= 1, "h must be positive");
    let mut stats = TradeoffStats::default();
    if n == 0 {
        stats.attempts = 1;
        return (SolveOutcome::Feasible(Vec::new()), stats);
    }
    let phases = phases_for(n, h);
    stats.phases = phases;
    let mut known_feasible = false;
    for attempt in 0u64.. {
        stats.attempts = attempt as usize + 1;
        let mut rng = rng_for(seed, attempt);
        let mut xstar = XStar::unbounded(n);
        if let Err(cert) = run_phases(g, &mut rng, phases, &mut xstar, &mut Vec::new()) {
            return (SolveOutcome::Infeasible(cert), stats);
        }
        let mut suspicious = false;
        if h < n {
            let s = sample_set(&mut rng, n, h);
            stats.sample_size = s.len();
            let compressed = match build_compressed(g, &s, h) {
                Ok(c) => c,
                Err(cert) => return (SolveOutcome::Infeasible(cert), stats),
            };
            stats.compressed_edges = compressed.graph.m();
            match solve_simple(&compressed.graph, derive_seed(seed, attempt)) {
                SolveOutcome::Feasible(x) => {
                    for (i, &v) in compressed.vertices.iter().enumerate() {
                        if x[i] < xstar.values[v] {
                            xstar.values[v] = x[i].clone();
                            xstar.lengths[v] = None;
                        }
                    }
                }
                SolveOutcome::Infeasible(_) => suspicious = true,
            }
        }
        if !suspicious {
            let (ystar, _) = compute_ystar(g, &xstar.values);
            match verify_solution(g, &ystar) {
                Verification::Verified => return (SolveOutcome::Feasible(ystar), stats),
                Verification::Infeasible(Violation::NegUnitGainCycle(w)) => {
                    return (SolveOutcome::Infeasible(Certificate::NegUnitGain(w)), stats)
                }
                Verification::NotMaximal(_) | Verification::Infeasible(Violation::Violated(_)) => {}
            }
        }
        if !known_feasible {
            // a failed attempt cannot tell bad luck from infeasibility; settle it once
            stats.adjudicated = true;
            match solve_simple(g, derive_seed(seed, u64::MAX - attempt)) {
                SolveOutcome::Infeasible(cert) => return (SolveOutcome::Infeasible(cert), stats),
                SolveOutcome::Feasible(_) => known_feasible = true,
            }
        }
    }
    unreachable!()
}
