//! Walk algebra: summaries, composition and cycle bounds.
//!
//! A walk `P = e_1 ... e_k` from `s` to `t` encodes the implied constraint
//! `x_s <= c(P) + g(P) x_t`, with `c(P) = sum c(e_i) prod_{j<i} g(e_j)` and
//! `g(P) = prod g(e_i)`.

use std::fmt;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::rational::{ExtRational, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WalkSummary {
    pub cost: Rational,
    pub gain: Rational,
    pub length: usize,
}

impl WalkSummary {
    pub fn empty() -> Self {
        WalkSummary { cost: Rational::zero(), gain: Rational::one(), length: 0 }
    }

    pub fn new(cost: Rational, gain: Rational, length: usize) -> Self {
        WalkSummary { cost, gain, length }
    }

    pub fn of_edge(e: &Edge) -> Self {
        WalkSummary { cost: e.cost.clone(), gain: e.gain.clone(), length: 1 }
    }

    /// Summary of `self` followed by `other`.
    pub fn then(&self, other: &WalkSummary) -> WalkSummary {
        compose(self, other)
    }

    /// `c + g * alpha`, the bound the walk implies on its source.
    pub fn apply(&self, alpha: &ExtRational) -> ExtRational {
        alpha.affine(&self.cost, &self.gain)
    }

    pub fn apply_finite(&self, alpha: &Rational) -> Rational {
        &self.cost + &self.gain * alpha
    }
}

pub fn compose(a: &WalkSummary, b: &WalkSummary) -> WalkSummary {
    WalkSummary {
        cost: &a.cost + &a.gain * &b.cost,
        gain: &a.gain * &b.gain,
        length: a.length + b.length,
    }
}

/// A closed walk of gain one and negative cost. It is a certificate by itself.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("closed walk with unit gain and negative cost {0:?}")]
pub struct NegativeUnitGain(pub WalkSummary);

/// `c / (1 - g)` for a closed walk. Unit gain gives `+inf` for non-negative
/// cost and an error for negative cost.
pub fn cycle_bound(c: &WalkSummary) -> Result<ExtRational, NegativeUnitGain> {
    assert!(c.length >= 1, "cycle bound of an empty walk");
    let one = Rational::one();
    if c.gain == one {
        if c.cost.is_negative() {
            Err(NegativeUnitGain(c.clone()))
        } else {
            Ok(ExtRational::PosInf)
        }
    } else {
        Ok(ExtRational::Finite(&c.cost / (one - &c.gain)))
    }
}

/// `c / (1 - g)` for a summary known to have gain other than one.
pub fn phi(c: &WalkSummary) -> Rational {
    debug_assert!(!c.gain.is_one());
    &c.cost / (Rational::one() - &c.gain)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error("edge id {0} does not exist")]
    NoSuchEdge(EdgeId),
    #[error("edge {edge} starts at {found}, expected {expected}")]
    Broken { edge: EdgeId, expected: VertexId, found: VertexId },
    #[error("vertex {0} does not exist")]
    NoSuchVertex(VertexId),
}

/// A walk materialized as edge ids together with its summary.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    start: VertexId,
    end: VertexId,
    edges: Vec<EdgeId>,
    summary: WalkSummary,
}

impl Walk {
    pub fn empty(v: VertexId) -> Walk {
        Walk { start: v, end: v, edges: Vec::new(), summary: WalkSummary::empty() }
    }

    /// Validates chaining and computes the summary.
    pub fn from_edges(g: &Graph, start: VertexId, edges: Vec<EdgeId>) -> Result<Walk, WalkError> {
        if start >= g.n() {
            return Err(WalkError::NoSuchVertex(start));
        }
        let mut at = start;
        let mut summary = WalkSummary::empty();
        for &id in &edges {
            if id >= g.m() {
                return Err(WalkError::NoSuchEdge(id));
            }
            let e = g.edge(id);
            if e.tail != at {
                return Err(WalkError::Broken { edge: id, expected: at, found: e.tail });
            }
            summary = compose(&summary, &WalkSummary::of_edge(e));
            at = e.head;
        }
        Ok(Walk { start, end: at, edges, summary })
    }

    /// Builds a walk from a non-empty, already chained edge sequence.
    pub fn from_chain(g: &Graph, edges: Vec<EdgeId>) -> Result<Walk, WalkError> {
        let start = match edges.first() {
            Some(&id) if id < g.m() => g.edge(id).tail,
            Some(&id) => return Err(WalkError::NoSuchEdge(id)),
            None => panic!("from_chain needs at least one edge"),
        };
        Walk::from_edges(g, start, edges)
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn summary(&self) -> &WalkSummary {
        &self.summary
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    /// Vertices visited, in order, including both endpoints.
    pub fn vertices(&self, g: &Graph) -> Vec<VertexId> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        vs.push(self.start);
        vs.extend(self.edges.iter().map(|&e| g.edge(e).head));
        vs
    }

    /// `self` followed by `other`. Panics if the endpoints do not meet.
    pub fn concat(&self, other: &Walk) -> Walk {
        assert_eq!(self.end, other.start, "walks do not meet");
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Walk { start: self.start, end: other.end, edges, summary: compose(&self.summary, &other.summary) }
    }

    /// Re-checks the walk against a graph, including the cached summary.
    pub fn validate(&self, g: &Graph) -> bool {
        match Walk::from_edges(g, self.start, self.edges.clone()) {
            Ok(w) => w == *self,
            Err(_) => false,
        }
    }

    /// Maps edge ids through `f` and recomputes against `g`.
    pub fn remap(&self, g: &Graph, start: VertexId, f: impl Fn(EdgeId) -> EdgeId) -> Result<Walk, WalkError> {
        Walk::from_edges(g, start, self.edges.iter().map(|&e| f(e)).collect())
    }
}

impl fmt::Debug for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Walk({} -> {} via {:?}; {:?})", self.start, self.end, self.edges, self.summary)
    }
}
