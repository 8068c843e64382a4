//! Seeded instance generators.
//!
//! Every kind except `random` starts from a witness point `x` and prices edges
//! against it (`c = x_u - g x_v + slack`, slack `>= 0`), so feasibility is by
//! construction. The infeasible kinds then plant a contradiction on top.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, InstanceKind, VertexId};
use crate::rational::{rat, Rational};
use crate::rng::rng_for;

/// Bound on numerators and denominators of sampled values.
pub const VALUE_BOUND: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    /// Uniform random constraints; may be feasible or not.
    Random,
    FeasibleRandom,
    /// One cycle through every vertex, tight at the witness, with gain below
    /// one; every other edge has slack at least one.
    PlantedLongCycle,
    /// A gain-above-one cycle whose lower bound exceeds the upper bound from
    /// a path into a gain-below-one cycle.
    InfeasibleBicycle,
    /// A cycle of gain exactly one and negative cost.
    InfeasibleUnit,
    DmdpRandom,
    /// Simple graph, every gain `1/2`.
    DapspRandom,
}

pub const ALL_KINDS: [GenKind; 7] = [
    GenKind::Random,
    GenKind::FeasibleRandom,
    GenKind::PlantedLongCycle,
    GenKind::InfeasibleBicycle,
    GenKind::InfeasibleUnit,
    GenKind::DmdpRandom,
    GenKind::DapspRandom,
];

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            GenKind::Random => "random",
            GenKind::FeasibleRandom => "feasible-random",
            GenKind::PlantedLongCycle => "planted-long-cycle",
            GenKind::InfeasibleBicycle => "infeasible-bicycle",
            GenKind::InfeasibleUnit => "infeasible-unit",
            GenKind::DmdpRandom => "dmdp-random",
            GenKind::DapspRandom => "dapsp-random",
        }
    }

    fn stream(self) -> u64 {
        ALL_KINDS.iter().position(|&k| k == self).unwrap() as u64
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ALL_KINDS
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown generator `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("{kind} needs n >= {min}, got {n}")]
    TooFewVertices { kind: GenKind, n: usize, min: usize },
    #[error("dapsp-random allows at most n^2 = {max} edges, got {m}")]
    TooManyEdges { m: usize, max: usize },
}

fn value(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-VALUE_BOUND..=VALUE_BOUND), rng.gen_range(1..=VALUE_BOUND))
}

fn gain(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(1..=VALUE_BOUND), rng.gen_range(1..=VALUE_BOUND))
}

fn slack(rng: &mut ChaCha8Rng) -> Rational {
    if rng.gen_bool(0.3) {
        Rational::zero()
    } else {
        rat(rng.gen_range(1..=VALUE_BOUND), rng.gen_range(1..=VALUE_BOUND))
    }
}

type RawEdge = (VertexId, VertexId, Rational, Rational);

/// An edge satisfied by `x` with the given slack.
fn priced(x: &[Rational], u: VertexId, v: VertexId, g: Rational, slack: Rational) -> RawEdge {
    let c = &x[u] - &g * &x[v] + slack;
    (u, v, c, g)
}

/// A closed walk through `verts` with edge gains multiplying to `product`,
/// tight at `x`.
fn tight_cycle(rng: &mut ChaCha8Rng, x: &[Rational], verts: &[VertexId], product: &Rational) -> Vec<RawEdge> {
    let l = verts.len();
    let mut gains: Vec<Rational> = (0..l - 1).map(|_| gain(rng)).collect();
    let so_far = gains.iter().fold(Rational::one(), |acc, g| &acc * g);
    gains.push(product / &so_far);
    (0..l).map(|i| priced(x, verts[i], verts[(i + 1) % l], gains[i].clone(), Rational::zero())).collect()
}

fn feasible_filler(rng: &mut ChaCha8Rng, x: &[Rational], count: usize, min_slack: Rational) -> Vec<RawEdge> {
    let n = x.len();
    (0..count)
        .map(|_| {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            priced(x, u, v, gain(rng), &slack(rng) + &min_slack)
        })
        .collect()
}

/// A feasible instance whose only tight cycle has `len` distinct vertices
/// and gain `1/2`; every other edge has slack at least one. `len` is clamped
/// to `1..=n`. With `len = n` this is the `planted-long-cycle` kind.
pub fn planted_long_cycle(n: usize, m: usize, len: usize, seed: u64) -> Graph {
    assert!(n >= 1);
    let rng = &mut rng_for(seed, GenKind::PlantedLongCycle.stream());
    let x: Vec<Rational> = (0..n).map(|_| value(rng)).collect();
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    order.truncate(len.clamp(1, n));
    let mut edges = tight_cycle(rng, &x, &order, &rat(1, 2));
    let rest = m.saturating_sub(edges.len());
    edges.extend(feasible_filler(rng, &x, rest, Rational::one()));
    edges.shuffle(rng);
    Graph::new(n, edges).expect("generated edges are valid")
}

/// Generates an instance; equal arguments give identical instances.
pub fn generate(kind: GenKind, n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    let min = match kind {
        GenKind::InfeasibleBicycle => 2,
        _ => 1,
    };
    if n < min {
        return Err(GenError::TooFewVertices { kind, n, min });
    }
    let rng = &mut rng_for(seed, kind.stream());
    let x: Vec<Rational> = (0..n).map(|_| value(rng)).collect();
    let mut edges: Vec<RawEdge> = Vec::new();
    let graph_kind = match kind {
        GenKind::DmdpRandom | GenKind::DapspRandom => InstanceKind::Dmdp,
        _ => InstanceKind::M2vpi,
    };
    match kind {
        GenKind::Random => {
            edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), value(rng), gain(rng))).collect();
        }
        GenKind::FeasibleRandom => edges = feasible_filler(rng, &x, m, Rational::zero()),
        GenKind::PlantedLongCycle => return Ok(planted_long_cycle(n, m, n, seed)),
        GenKind::InfeasibleBicycle => {
            let mut order: Vec<VertexId> = (0..n).collect();
            order.shuffle(rng);
            let (s, t) = (order[0], order[1]);
            let len = |rng: &mut ChaCha8Rng| rng.gen_range(1..=n.min(3));
            // upper side: a path s -> t and a cycle at t, all tight at x
            let mut at = s;
            for _ in 0..rng.gen_range(0..=2usize) {
                let next = rng.gen_range(0..n);
                edges.push(priced(&x, at, next, gain(rng), Rational::zero()));
                at = next;
            }
            edges.push(priced(&x, at, t, gain(rng), Rational::zero()));
            let mut cyc: Vec<VertexId> = vec![t];
            cyc.extend((1..len(rng)).map(|_| rng.gen_range(0..n)));
            edges.extend(tight_cycle(rng, &x, &cyc, &rat(1, 2)));
            // lower side: a gain-2 cycle at s whose bound is pushed above x_s
            let mut cyc: Vec<VertexId> = vec![s];
            cyc.extend((1..len(rng)).map(|_| rng.gen_range(0..n)));
            let mut up = tight_cycle(rng, &x, &cyc, &rat(2, 1));
            up[0].2 = &up[0].2 - rat(rng.gen_range(1..=VALUE_BOUND), 1);
            edges.extend(up);
            let rest = m.saturating_sub(edges.len());
            edges.extend(feasible_filler(rng, &x, rest, Rational::zero()));
        }
        GenKind::InfeasibleUnit => {
            let mut cyc: Vec<VertexId> = vec![rng.gen_range(0..n)];
            cyc.extend((1..rng.gen_range(1..=n.min(4))).map(|_| rng.gen_range(0..n)));
            let mut unit = tight_cycle(rng, &x, &cyc, &Rational::one());
            unit[0].2 = &unit[0].2 - rat(1, rng.gen_range(1..=VALUE_BOUND));
            edges.extend(unit);
            let rest = m.saturating_sub(edges.len());
            edges.extend(feasible_filler(rng, &x, rest, Rational::zero()));
        }
        GenKind::DmdpRandom => {
            // one action per state first, so every state has a policy
            let discount = |rng: &mut ChaCha8Rng| {
                let q = rng.gen_range(2..=VALUE_BOUND);
                rat(rng.gen_range(1..q), q)
            };
            for u in 0..n {
                edges.push((u, rng.gen_range(0..n), value(rng), discount(rng)));
            }
            for _ in n..m {
                edges.push((rng.gen_range(0..n), rng.gen_range(0..n), value(rng), discount(rng)));
            }
        }
        GenKind::DapspRandom => {
            if m > n * n {
                return Err(GenError::TooManyEdges { m, max: n * n });
            }
            let pairs: Vec<usize> = rand::seq::index::sample(rng, n * n, m).into_vec();
            edges = pairs.into_iter().map(|p| (p / n, p % n, value(rng), rat(1, 2))).collect();
        }
    }
    edges.shuffle(rng);
    Ok(Graph::with_kind(n, graph_kind, edges).expect("generated edges are valid"))
}
