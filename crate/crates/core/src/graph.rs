//! Constraint graphs and the plain-text instance format.
//!
//! A constraint `x_u <= c + g * x_v` is stored as an edge `u -> v` with cost
//! `c` and gain `g > 0`. Edge ids are positions in input order; that order is
//! the fixed tie-breaking order used by every algorithm in the crate.

use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use crate::rational::Rational;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: Rational,
    pub gain: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    M2vpi,
    /// Deterministic MDP: every gain is strictly below one.
    Dmdp,
}

impl InstanceKind {
    pub fn keyword(self) -> &'static str {
        match self {
            InstanceKind::M2vpi => "m2vpi",
            InstanceKind::Dmdp => "dmdp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {edge}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { edge: EdgeId, vertex: VertexId, n: usize },
    #[error("edge {edge}: gain must be positive")]
    NonPositiveGain { edge: EdgeId },
    #[error("edge {edge}: dmdp gains must be below 1")]
    DiscountNotBelowOne { edge: EdgeId },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Directed multigraph with exact rational costs and gains. Immutable.
#[derive(Debug)]
pub struct Graph {
    n: usize,
    kind: InstanceKind,
    edges: Vec<Edge>,
    inv_gain: Vec<Rational>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    zero_cost: OnceLock<Box<Graph>>,
    zero_cost_recip: OnceLock<Box<Graph>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph::build(self.n, self.kind, self.edges.clone())
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.kind == other.kind && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds an M2VPI graph from `(tail, head, cost, gain)` tuples.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Rational, Rational)>,
    ) -> Result<Graph, GraphError> {
        Self::with_kind(n, InstanceKind::M2vpi, edges)
    }

    pub fn with_kind(
        n: usize,
        kind: InstanceKind,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Rational, Rational)>,
    ) -> Result<Graph, GraphError> {
        let mut list = Vec::new();
        for (id, (tail, head, cost, gain)) in edges.into_iter().enumerate() {
            for vertex in [tail, head] {
                if vertex >= n {
                    return Err(GraphError::VertexOutOfRange { edge: id, vertex, n });
                }
            }
            if !gain.is_positive() {
                return Err(GraphError::NonPositiveGain { edge: id });
            }
            if kind == InstanceKind::Dmdp && gain >= Rational::one() {
                return Err(GraphError::DiscountNotBelowOne { edge: id });
            }
            list.push(Edge { id, tail, head, cost, gain });
        }
        Ok(Self::build(n, kind, list))
    }

    fn build(n: usize, kind: InstanceKind, edges: Vec<Edge>) -> Graph {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for e in &edges {
            out_adj[e.tail].push(e.id);
            in_adj[e.head].push(e.id);
        }
        let inv_gain = edges.iter().map(|e| e.gain.recip()).collect();
        Graph {
            n,
            kind,
            edges,
            inv_gain,
            out_adj,
            in_adj,
            zero_cost: OnceLock::new(),
            zero_cost_recip: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// `1 / gain` of an edge, precomputed.
    pub fn inv_gain(&self, id: EdgeId) -> &Rational {
        &self.inv_gain[id]
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_adj[v]
    }

    /// Same graph viewed as a plain M2VPI system.
    pub fn as_m2vpi(&self) -> Graph {
        Graph::build(self.n, InstanceKind::M2vpi, self.edges.clone())
    }

    /// The reversed system over negated variables.
    ///
    /// Substituting `z = -x` turns `x_u <= c + g x_v` into
    /// `z_v <= c/g + (1/g) z_u`, so edge `u -> v` becomes `v -> u` with cost
    /// `c/g` and gain `1/g`. The pointwise maximal solution of the reverse
    /// system is the negated pointwise minimal solution of the original.
    pub fn reverse(&self) -> Graph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let ig = &self.inv_gain[e.id];
                Edge { id: e.id, tail: e.head, head: e.tail, cost: &e.cost * ig, gain: ig.clone() }
            })
            .collect();
        Graph::build(self.n, InstanceKind::M2vpi, edges)
    }

    /// Copy with every cost zeroed. Cached.
    pub fn zero_cost(&self) -> &Graph {
        self.zero_cost.get_or_init(|| {
            let edges = self.edges.iter().map(|e| Edge { cost: Rational::zero(), ..e.clone() }).collect();
            Box::new(Graph::build(self.n, InstanceKind::M2vpi, edges))
        })
    }

    /// Copy with costs zeroed and gains inverted. Cached.
    pub fn zero_cost_reciprocal(&self) -> &Graph {
        self.zero_cost_recip.get_or_init(|| {
            let edges = self
                .edges
                .iter()
                .map(|e| Edge { cost: Rational::zero(), gain: self.inv_gain[e.id].clone(), ..e.clone() })
                .collect();
            Box::new(Graph::build(self.n, InstanceKind::M2vpi, edges))
        })
    }

    /// Parses the text format:
    ///
    /// ```text
    /// m2vpi <n> <m>        # or `dmdp <n> <m>`
    /// <u> <v> <c> <g>      # m lines, 1-indexed vertices, rationals p/q
    /// ```
    pub fn parse(text: &str) -> Result<Graph, ParseError> {
        let mut header: Option<(InstanceKind, usize, usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| ParseError { line: line_no, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let Some((kind, n, m, _)) = header else {
                let kind = match toks[0] {
                    "m2vpi" => InstanceKind::M2vpi,
                    "dmdp" => InstanceKind::Dmdp,
                    other => return Err(err(format!("expected `m2vpi` or `dmdp` header, found `{other}`"))),
                };
                if toks.len() != 3 {
                    return Err(err("header must be `<kind> <n> <m>`".into()));
                }
                let n = toks[1].parse().map_err(|_| err(format!("bad vertex count `{}`", toks[1])))?;
                let m = toks[2].parse().map_err(|_| err(format!("bad edge count `{}`", toks[2])))?;
                header = Some((kind, n, m, line_no));
                continue;
            };
            if toks.len() != 4 {
                return Err(err("edge line must be `<u> <v> <c> <g>`".into()));
            }
            if edges.len() == m {
                return Err(err(format!("more than the declared {m} edges")));
            }
            let vertex = |t: &str| -> Result<VertexId, ParseError> {
                match t.parse::<usize>() {
                    Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                    _ => Err(err(format!("bad vertex `{t}` (expected 1..={n})"))),
                }
            };
            let u = vertex(toks[0])?;
            let v = vertex(toks[1])?;
            let c: Rational = toks[2].parse().map_err(|e| err(format!("{e}")))?;
            let g: Rational = toks[3].parse().map_err(|e| err(format!("{e}")))?;
            if !g.is_positive() {
                return Err(err(format!("gain `{}` must be positive", toks[3])));
            }
            if kind == InstanceKind::Dmdp && g >= Rational::one() {
                return Err(err(format!("dmdp gain `{}` must be below 1", toks[3])));
            }
            edges.push((u, v, c, g));
        }
        let Some((kind, n, m, line)) = header else {
            return Err(ParseError { line: 0, message: "missing header".into() });
        };
        if edges.len() != m {
            return Err(ParseError { line, message: format!("declared {m} edges, found {}", edges.len()) });
        }
        Graph::with_kind(n, kind, edges).map_err(|e| ParseError { line, message: e.to_string() })
    }

    /// Prints in the format accepted by [`Graph::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.kind.keyword(), self.n, self.m()).unwrap();
        for e in &self.edges {
            writeln!(s, "{} {} {} {}", e.tail + 1, e.head + 1, e.cost, e.gain).unwrap();
        }
        s
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn parse_round_trip() {
        let text = "# two vertices\nm2vpi 2 2\n1 2 1 1/2\n2 1 1 2/4 # trailing\n";
        let g = Graph::parse(text).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge(1).gain, rat(1, 2));
        assert_eq!(g.out_edges(0), &[0]);
        assert_eq!(g.in_edges(0), &[1]);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn parse_errors_cite_lines() {
        let e = Graph::parse("m2vpi 2 1\n1 2 1/x 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = Graph::parse("m2vpi 2 1\n1 3 1 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = Graph::parse("dmdp 1 1\n1 1 1 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = Graph::parse("m2vpi 1 2\n1 1 0 1\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(Graph::parse("m2vpi 1 1\n1 1 0 0\n").is_err());
    }

    #[test]
    fn reverse_negates() {
        let g = Graph::new(2, [(0, 1, rat(3, 1), rat(2, 1))]).unwrap();
        let r = g.reverse();
        let e = r.edge(0);
        assert_eq!((e.tail, e.head), (1, 0));
        assert_eq!(e.cost, rat(3, 2));
        assert_eq!(e.gain, rat(1, 2));
        // x = (3, 0) is tight in g; z = (-3, 0) is tight in r: z_1 <= 3/2 + 1/2 z_0
        assert_eq!(&e.cost + &e.gain * rat(-3, 1), Rational::zero());
    }
}
