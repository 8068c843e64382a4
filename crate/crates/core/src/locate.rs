//! Location: deciding how a threshold compares to a bound without computing the bound.
//!
//! [`locate_cycle`] compares `xi` against the tightest closed-walk bound at a
//! single vertex. [`locate_global`] decides whether `x^max_v < xi_v` for some
//! `v` by a Bellman-Ford-style search over the parent graphs `H_j`, and
//! extracts a path-plus-cycle certificate when it succeeds.

use crate::certificate::Certificate;
use crate::counters::{self, AuxGuard};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::rational::{ExtRational, Rational};
use crate::reconstruct::{lex_toward, reconstruct_walk};
use crate::walk::{phi, Walk};

/// The five mutually exclusive answers of [`locate_cycle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleCase {
    /// A closed walk with gain below one has bound below `xi`.
    Below,
    /// A closed walk with gain above one has bound above `xi`.
    Above,
    /// Every gain-above-one bound is at most `xi`, and `xi` is below the k-cycle bound.
    Between,
    /// A closed walk with unit gain and negative cost exists.
    NegUnitGain,
    /// The k-cycle bound equals `xi`.
    Equal,
}

/// Result of [`locate_cycle`]: the case plus the optimal pair `(y, gain)` of
/// the lexicographically minimal closed walk `Q`, enough to recover `phi(Q)`
/// without building `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleLocate {
    pub case: CycleCase,
    pub v: VertexId,
    pub k: usize,
    pub xi: Rational,
    pub y: Rational,
    pub gain: Rational,
}

impl CycleLocate {
    /// `c(Q)`, recovered from `y = c(Q) + gain * xi`.
    pub fn cost(&self) -> Rational {
        &self.y - &self.gain * &self.xi
    }

    /// `phi(Q)` for the witness; `None` for unit gain.
    pub fn phi(&self) -> Option<Rational> {
        if self.gain.is_one() {
            None
        } else {
            Some(self.cost() / (Rational::one() - &self.gain))
        }
    }

    /// Builds the closed walk behind the answer. `Between` has no witness.
    pub fn witness(&self, g: &Graph) -> Option<Walk> {
        if self.case == CycleCase::Between {
            return None;
        }
        let w = reconstruct_walk(g, self.v, self.v, self.k, &self.xi).expect("the empty walk always exists");
        debug_assert_eq!(w.summary().gain, self.gain);
        Some(w)
    }
}

/// Compares `xi` with the k-cycle bound at `v` in `O(mk)` time.
pub fn locate_cycle(g: &Graph, v: VertexId, k: usize, xi: &Rational) -> CycleLocate {
    counters::inc_locate();
    let r = lex_toward(g, v, k, xi);
    let (y, gain) = r[v].clone().expect("the empty walk reaches v");
    debug_assert!(y <= *xi);
    let one = Rational::one();
    let case = if y < *xi {
        match gain.cmp(&one) {
            std::cmp::Ordering::Less => CycleCase::Below,
            std::cmp::Ordering::Greater => CycleCase::Above,
            std::cmp::Ordering::Equal => CycleCase::NegUnitGain,
        }
    } else if gain < one {
        CycleCase::Equal
    } else {
        // gain > 1 is impossible here: the empty walk ties on value with gain 1
        debug_assert!(gain.is_one());
        CycleCase::Between
    };
    CycleLocate { case, v, k, xi: xi.clone(), y, gain }
}

/// A refutation of `x^max_source >= threshold`: `gamma(cycle) < 1` and
/// `c(path) + gamma(path) * phi(cycle) < threshold`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocateCertificate {
    pub source: VertexId,
    pub path: Walk,
    pub cycle: Walk,
    pub threshold: Rational,
}

impl LocateCertificate {
    /// The upper bound on `x_source` the certificate proves.
    pub fn bound(&self) -> Rational {
        self.path.summary().apply_finite(&phi(self.cycle.summary()))
    }

    /// Number of distinct vertices on the path and cycle.
    pub fn vertex_count(&self, g: &Graph) -> usize {
        let mut vs = self.path.vertices(g);
        vs.extend(self.cycle.vertices(g));
        vs.sort_unstable();
        vs.dedup();
        vs.len()
    }

    pub fn verify(&self, g: &Graph) -> bool {
        self.path.validate(g)
            && self.cycle.validate(g)
            && self.path.start() == self.source
            && self.path.end() == self.cycle.start()
            && self.cycle.is_closed()
            && !self.cycle.is_empty()
            && self.cycle.summary().gain < Rational::one()
            && self.bound() < self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlobalOutcome {
    NoViolation,
    Certificate(LocateCertificate),
    Infeasible(Certificate),
}

/// Outcome together with the number of phases that performed work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalRun {
    pub outcome: GlobalOutcome,
    pub phases: usize,
}

#[derive(Clone)]
struct Entry {
    y: ExtRational,
    parent: Option<EdgeId>,
    len: usize,
}

impl Entry {
    /// Whether a candidate `(y, len, edge)` strictly beats `self`.
    fn beaten_by(&self, y: &ExtRational, len: usize, edge: EdgeId) -> bool {
        match y.cmp(&self.y) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match self.parent {
                None => false,
                Some(p) => len < self.len || (len == self.len && edge > p),
            },
        }
    }
}

/// Decides whether `x^max_v < xi_v` for some `v`, assuming feasibility.
///
/// Entries of `xi` must be finite or `-inf`.
pub fn locate_global(g: &Graph, xi: &[ExtRational]) -> GlobalOutcome {
    locate_global_run(g, xi).outcome
}

pub fn locate_global_run(g: &Graph, xi: &[ExtRational]) -> GlobalRun {
    counters::inc_locate();
    let n = g.n();
    assert_eq!(xi.len(), n);
    assert!(xi.iter().all(|x| !x.is_pos_inf()), "thresholds must be finite or -inf");
    if xi.iter().all(|x| x.is_neg_inf()) {
        return GlobalRun { outcome: GlobalOutcome::NoViolation, phases: 0 };
    }
    let _state = AuxGuard::new(6 * n);
    let mut prev: Vec<Entry> = xi.iter().map(|x| Entry { y: x.clone(), parent: None, len: 0 }).collect();
    let mut stamp = vec![usize::MAX; n];
    for j in 1..=n {
        let mut cur = prev.clone();
        let mut changed = false;
        for e in g.edges() {
            let ExtRational::Finite(yu) = &prev[e.tail].y else { continue };
            let cand = ExtRational::Finite((yu - &e.cost) * g.inv_gain(e.id));
            let len = prev[e.tail].len + 1;
            if cur[e.head].beaten_by(&cand, len, e.id) {
                cur[e.head] = Entry { y: cand, parent: Some(e.id), len };
                changed = true;
            }
        }
        counters::add_relaxations(g.m() as u64);
        if !changed {
            return GlobalRun { outcome: GlobalOutcome::NoViolation, phases: j };
        }
        if let Some(outcome) = scan_phase(g, xi, &prev, &cur, j, &mut stamp) {
            return GlobalRun { outcome, phases: j };
        }
        prev = cur;
    }
    GlobalRun { outcome: GlobalOutcome::NoViolation, phases: n }
}

/// Looks for a cycle in `H_j` and turns the first one with gain at most one
/// into an outcome.
fn scan_phase(
    g: &Graph,
    xi: &[ExtRational],
    prev: &[Entry],
    cur: &[Entry],
    phase: usize,
    stamp: &mut [usize],
) -> Option<GlobalOutcome> {
    let n = g.n();
    // stamp[v] = phase * n + start marks vertices seen from `start` in this phase
    let base = phase * n;
    let mut done = vec![false; n];
    for start in 0..n {
        if done[start] {
            continue;
        }
        let mark = base + start;
        let mut x = start;
        let mut trail = Vec::new();
        loop {
            if done[x] {
                break;
            }
            if stamp[x] == mark {
                // cycle through x: parents from x back to x, in reverse order
                let mut edges = Vec::new();
                let mut at = x;
                loop {
                    let p = cur[at].parent.expect("cycle vertices have parents");
                    edges.push(p);
                    at = g.edge(p).tail;
                    if at == x {
                        break;
                    }
                }
                edges.reverse();
                let cycle = Walk::from_edges(g, x, edges).expect("parent edges chain");
                if let Some(out) = classify_cycle(g, xi, prev, cycle) {
                    return Some(out);
                }
                break;
            }
            stamp[x] = mark;
            trail.push(x);
            match cur[x].parent {
                Some(p) => x = g.edge(p).tail,
                None => break,
            }
        }
        for v in trail {
            done[v] = true;
        }
    }
    None
}

fn rotate(g: &Graph, cycle: &Walk, at: VertexId) -> Walk {
    let vs = cycle.vertices(g);
    let i = vs.iter().position(|&v| v == at).expect("vertex on cycle");
    let mut edges = cycle.edges()[i..].to_vec();
    edges.extend_from_slice(&cycle.edges()[..i]);
    Walk::from_edges(g, at, edges).expect("rotation of a closed walk")
}

fn classify_cycle(g: &Graph, xi: &[ExtRational], prev: &[Entry], cycle: Walk) -> Option<GlobalOutcome> {
    let one = Rational::one();
    let gain = &cycle.summary().gain;
    if *gain > one {
        return None;
    }
    if gain.is_one() {
        // the sign of the cost of a unit-gain cycle does not depend on the rotation
        assert!(cycle.summary().cost.is_negative(), "unit-gain parent cycle with non-negative cost");
        return Some(GlobalOutcome::Infeasible(Certificate::NegUnitGain(cycle)));
    }
    let mut vs = cycle.vertices(g);
    vs.pop();
    vs.sort_unstable();
    let (w, at_w) = vs
        .into_iter()
        .find_map(|w| {
            let c = rotate(g, &cycle, w);
            match &prev[w].y {
                ExtRational::Finite(y) if *y > phi(c.summary()) => Some((w, c)),
                _ => None,
            }
        })
        .expect("some cycle vertex improved in this phase");

    // follow H_{j-1} parents from w
    let mut seen_at = std::collections::HashMap::new();
    let mut verts = vec![w];
    let mut back = Vec::new();
    seen_at.insert(w, 0usize);
    let mut x = w;
    while let Some(p) = prev[x].parent {
        back.push(p);
        x = g.edge(p).tail;
        if let Some(&i) = seen_at.get(&x) {
            // back[i..] closes a cycle at x = verts[i]; back[..i] leads from x to w
            let mut cyc: Vec<EdgeId> = back[i..].to_vec();
            cyc.reverse();
            let mut path: Vec<EdgeId> = back[..i].to_vec();
            path.reverse();
            let c_ge = Walk::from_edges(g, x, cyc).expect("parent cycle");
            let path = Walk::from_edges(g, x, path).expect("parent path");
            let cert = Certificate::NegBicycle { c_le: at_w, c_ge, path };
            assert!(crate::certificate::verify_certificate(g, &cert), "parent-cycle bicycle failed to verify");
            return Some(GlobalOutcome::Infeasible(cert));
        }
        seen_at.insert(x, verts.len());
        verts.push(x);
    }
    back.reverse();
    let path = Walk::from_edges(g, x, back).expect("parent path");
    let threshold = xi[x].finite().expect("roots of reached vertices are finite").clone();
    let cert = LocateCertificate { source: x, path, cycle: at_w, threshold };
    assert!(cert.verify(g), "location certificate failed to verify");
    Some(GlobalOutcome::Certificate(cert))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueOutcome {
    Below(LocateCertificate),
    NotBelow,
    Infeasible(Certificate),
}

/// Decides `x^max_v < xi` for a single vertex.
pub fn locate_value(g: &Graph, v: VertexId, xi: &Rational) -> ValueOutcome {
    let mut t = vec![ExtRational::NegInf; g.n()];
    t[v] = ExtRational::Finite(xi.clone());
    match locate_global(g, &t) {
        GlobalOutcome::NoViolation => ValueOutcome::NotBelow,
        GlobalOutcome::Certificate(c) => ValueOutcome::Below(c),
        GlobalOutcome::Infeasible(c) => ValueOutcome::Infeasible(c),
    }
}
