//! Discounted all-pairs shortest paths with one discount `γ` on every edge.
//!
//! The cost of a walk `e_1 … e_k` is `Σ γ^{i-1} c(e_i)` and the distance is
//! the infimum over walks, which a finite walk need not attain. After
//! [`madani_reduce`] every distance toward a sink `v''` is attained by a simple
//! path, and every optimal walk with the fewest edges is simple. The driver
//! [`solve_dapsp`] then trades sources for hitting sets of long shortest
//! paths, stage by stage, until few enough remain for plain dynamic
//! programming.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::counters::{add_relaxations, AuxGuard};
use crate::envelope::{lower_envelope, Envelope, Line};
use crate::graph::{Graph, InstanceKind};
use crate::oracle::naive_dapsp;
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::solver::scc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniformError {
    #[error("discount {0} is not in (0, 1)")]
    BadDiscount(Rational),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("gains {0} and {1} differ; give the discount explicitly")]
    MixedGains(Rational, Rational),
    #[error("no edge to read the discount from")]
    NoDiscount,
}

/// A simple digraph with rational costs and one discount `γ ∈ (0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformInstance {
    n: usize,
    edges: Vec<(usize, usize, Rational)>,
    gamma: Rational,
}

impl UniformInstance {
    /// Parallel edges collapse to the cheapest one, which leaves every
    /// distance unchanged. Edges come out sorted by `(tail, head)`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Rational)>,
        gamma: Rational,
    ) -> Result<Self, UniformError> {
        if !gamma.is_positive() || gamma >= Rational::one() {
            return Err(UniformError::BadDiscount(gamma));
        }
        let mut best: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (u, v, c) in edges {
            for vertex in [u, v] {
                if vertex >= n {
                    return Err(UniformError::VertexOutOfRange { vertex, n });
                }
            }
            let slot = best.entry((u, v)).or_insert_with(|| c.clone());
            if c < *slot {
                *slot = c;
            }
        }
        let edges = best.into_iter().map(|((u, v), c)| (u, v, c)).collect();
        Ok(UniformInstance { n, edges, gamma })
    }

    /// Costs from `g`. Without an explicit `gamma` all gains must agree.
    pub fn from_graph(g: &Graph, gamma: Option<Rational>) -> Result<Self, UniformError> {
        let gamma = match gamma {
            Some(x) => x,
            None => {
                let first = g.edges().first().ok_or(UniformError::NoDiscount)?.gain.clone();
                if let Some(e) = g.edges().iter().find(|e| e.gain != first) {
                    return Err(UniformError::MixedGains(first, e.gain.clone()));
                }
                first
            }
        };
        Self::new(g.n(), g.edges().iter().map(|e| (e.tail, e.head, e.cost.clone())), gamma)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// As a deterministic MDP file: every gain is `γ`.
    pub fn to_graph(&self) -> Graph {
        let edges = self.edges.iter().map(|(u, v, c)| (*u, *v, c.clone(), self.gamma.clone()));
        Graph::with_kind(self.n, InstanceKind::Dmdp, edges).expect("valid uniform instance")
    }
}

/// Adjacency lists over `(tail, head, cost)` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Net<S> {
    n: usize,
    edges: Vec<(usize, usize, S)>,
    out: Vec<Vec<usize>>,
}

impl<S: Scalar> Net<S> {
    pub fn new(n: usize, edges: Vec<(usize, usize, S)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for (id, (u, _, _)) in edges.iter().enumerate() {
            out[*u].push(id);
        }
        Net { n, edges, out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, S)] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// Discounted cost of a walk given by edge ids.
    pub fn walk_cost(&self, gamma: &S, walk: &[usize]) -> S {
        let mut cost = S::zero();
        let mut pw = S::one();
        for &id in walk {
            cost = cost.add(&pw.mul(&self.edges[id].2));
            pw = pw.mul(gamma);
        }
        cost
    }
}

fn relax<S: Scalar>(slot: &mut Option<S>, cand: S) -> bool {
    if slot.as_ref().is_none_or(|old| cand.lt(old)) {
        *slot = Some(cand);
        true
    } else {
        false
    }
}

fn powers<S: Scalar>(gamma: &S, k: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(S::one());
    for i in 0..k {
        out.push(out[i].mul(gamma));
    }
    out
}

/// The reduced graph and where each original vertex went.
#[derive(Debug, Clone)]
pub struct ReducedInstance<S> {
    pub net: Net<S>,
    pub gamma: S,
    /// `v'`: entry copy of `v`; walks start here.
    pub prime: Vec<usize>,
    /// `v''`: sink copy of `v`; walks end here.
    pub double: Vec<usize>,
    /// Hub vertex of each strongly connected component of the input.
    pub hubs: Vec<usize>,
}

pub fn madani_reduce(inst: &UniformInstance) -> ReducedInstance<Rational> {
    madani_reduce_as(inst)
}

/// The reduction in any scalar type. Vertices are `v' = v`, `v'' = n + v`,
/// then one hub per component. Edges: the original ones between primes,
/// `v' -> v''` at cost 0, `w' -> hub(w)` at the cost `μ(w)` of the cheapest
/// infinite walk from `w` inside a nontrivial component, hub to hub along the
/// condensation, and `hub(t) -> t''` at cost 0.
pub fn madani_reduce_as<S: Scalar>(inst: &UniformInstance) -> ReducedInstance<S> {
    let n = inst.n;
    let gamma = S::from_rational(&inst.gamma);
    let costs: Vec<(usize, usize, S)> =
        inst.edges.iter().map(|(u, v, c)| (*u, *v, S::from_rational(c))).collect();
    let comp = scc(n, costs.iter().map(|&(u, v, _)| (u, v)));
    let k = comp.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut size = vec![0usize; k];
    for &c in &comp {
        size[c] += 1;
    }
    let mut cyclic: Vec<bool> = size.iter().map(|&s| s > 1).collect();
    for &(u, v, _) in &costs {
        if u == v {
            cyclic[comp[u]] = true;
        }
    }
    let mu = recurrent_values(n, &costs, &gamma, &comp, &cyclic);

    let hubs: Vec<usize> = (0..k).map(|c| 2 * n + c).collect();
    let mut edges = costs.clone();
    edges.extend((0..n).map(|v| (v, n + v, S::zero())));
    for (w, m) in mu.into_iter().enumerate() {
        if let Some(m) = m {
            edges.push((w, hubs[comp[w]], m));
        }
    }
    let mut condensed: Vec<(usize, usize)> = costs
        .iter()
        .filter(|(u, v, _)| comp[*u] != comp[*v])
        .map(|(u, v, _)| (comp[*u], comp[*v]))
        .collect();
    condensed.sort_unstable();
    condensed.dedup();
    edges.extend(condensed.into_iter().map(|(a, b)| (hubs[a], hubs[b], S::zero())));
    edges.extend((0..n).map(|t| (hubs[comp[t]], n + t, S::zero())));
    ReducedInstance {
        net: Net::new(2 * n + k, edges),
        gamma,
        prime: (0..n).collect(),
        double: (n..2 * n).collect(),
        hubs,
    }
}

/// `μ(w)`: the least cost of an infinite walk from `w` that never leaves the
/// component of `w`, by policy iteration. `None` on acyclic components.
fn recurrent_values<S: Scalar>(
    n: usize,
    edges: &[(usize, usize, S)],
    gamma: &S,
    comp: &[usize],
    cyclic: &[bool],
) -> Vec<Option<S>> {
    let mut inside = vec![Vec::new(); n];
    for (id, (u, v, _)) in edges.iter().enumerate() {
        if comp[*u] == comp[*v] && cyclic[comp[*u]] {
            inside[*u].push(id);
        }
    }
    let mut policy: Vec<Option<usize>> = inside.iter().map(|ids| ids.first().copied()).collect();
    loop {
        let value = evaluate_policy(n, edges, gamma, &policy);
        let mut changed = false;
        for w in 0..n {
            let Some(cur) = &value[w] else { continue };
            let mut best: Option<(S, usize)> = None;
            for &id in &inside[w] {
                let (_, v, c) = &edges[id];
                let cand = c.add(&gamma.mul(value[*v].as_ref().expect("policy stays inside")));
                if best.as_ref().is_none_or(|(b, _)| cand.lt(b)) {
                    best = Some((cand, id));
                }
            }
            if let Some((b, id)) = best {
                if b.improves_on(cur) {
                    policy[w] = Some(id);
                    changed = true;
                }
            }
        }
        add_relaxations(edges.len() as u64);
        if !changed {
            return value;
        }
    }
}

/// Values of a positional policy: every vertex follows its chosen edge
/// forever, so the walk ends in a cycle whose value is a geometric series.
fn evaluate_policy<S: Scalar>(n: usize, edges: &[(usize, usize, S)], gamma: &S, policy: &[Option<usize>]) -> Vec<Option<S>> {
    let mut value: Vec<Option<S>> = vec![None; n];
    let mut state = vec![0u8; n];
    let step = |v: usize, value: &[Option<S>]| {
        let (_, head, c) = &edges[policy[v].unwrap()];
        c.add(&gamma.mul(value[*head].as_ref().unwrap()))
    };
    for start in 0..n {
        if policy[start].is_none() || state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = edges[policy[v].unwrap()].1;
        }
        let mut open = path.len();
        if state[v] == 1 {
            let pos = path.iter().position(|&x| x == v).unwrap();
            let mut sum = S::zero();
            let mut pw = S::one();
            for &x in &path[pos..] {
                sum = sum.add(&pw.mul(&edges[policy[x].unwrap()].2));
                pw = pw.mul(gamma);
            }
            value[v] = Some(sum.div(&S::one().sub(&pw)));
            for i in (pos + 1..path.len()).rev() {
                value[path[i]] = Some(step(path[i], &value));
            }
            open = pos;
        }
        for i in (0..open).rev() {
            value[path[i]] = Some(step(path[i], &value));
        }
        for &x in &path {
            state[x] = 2;
        }
    }
    value
}

/// One synchronous backward round: `d'(s) = min(d(s), min_{su} c(su) + γ d(u))`.
fn backward_round<S: Scalar>(net: &Net<S>, gamma: &S, d: &[Option<S>]) -> Vec<Option<S>> {
    let mut next = d.to_vec();
    for (u, v, c) in &net.edges {
        if let Some(dv) = &d[*v] {
            relax(&mut next[*u], c.add(&gamma.mul(dv)));
        }
    }
    add_relaxations(net.m() as u64);
    next
}

/// Rows `j = 0..=k` of `δ^{≤j}(s, t)` over all sources `s`.
pub fn delta_to_target<S: Scalar>(net: &Net<S>, gamma: &S, t: usize, k: usize) -> Vec<Vec<Option<S>>> {
    let mut row = vec![None; net.n()];
    row[t] = Some(S::zero());
    let mut rows = vec![row];
    for _ in 0..k {
        let next = backward_round(net, gamma, rows.last().unwrap());
        rows.push(next);
    }
    rows
}

/// Exact-length distances `δ^j(s, t)` for `j = 0..=k`, with one realizing
/// walk per entry (smallest edge id on ties).
#[derive(Debug, Clone)]
pub struct SourceTable<S> {
    pub source: usize,
    pub dist: Vec<Vec<Option<S>>>,
    pred: Vec<Vec<Option<usize>>>,
}

pub fn delta_from_source<S: Scalar>(net: &Net<S>, gamma: &S, s: usize, k: usize) -> SourceTable<S> {
    let n = net.n();
    let mut dist = vec![vec![None; n]; k + 1];
    let mut pred = vec![vec![None; n]; k + 1];
    dist[0][s] = Some(S::zero());
    let mut pw = S::one();
    for j in 1..=k {
        let (done, rest) = dist.split_at_mut(j);
        let prev = &done[j - 1];
        for (id, (u, t, c)) in net.edges.iter().enumerate() {
            if let Some(du) = &prev[*u] {
                if relax(&mut rest[0][*t], du.add(&pw.mul(c))) {
                    pred[j][*t] = Some(id);
                }
            }
        }
        pw = pw.mul(gamma);
        add_relaxations(net.m() as u64);
    }
    SourceTable { source: s, dist, pred }
}

impl<S: Scalar> SourceTable<S> {
    pub fn k(&self) -> usize {
        self.dist.len() - 1
    }

    /// Edge ids of the stored walk with exactly `j` edges to `t`.
    pub fn walk(&self, net: &Net<S>, j: usize, t: usize) -> Option<Vec<usize>> {
        self.dist[j][t].as_ref()?;
        let mut out = Vec::with_capacity(j);
        let mut at = t;
        for level in (1..=j).rev() {
            let id = self.pred[level][at].expect("finite entries have predecessors");
            out.push(id);
            at = net.edges[id].0;
        }
        out.reverse();
        Some(out)
    }

    /// Vertices of that walk, `j + 1` of them.
    pub fn vertices(&self, net: &Net<S>, j: usize, t: usize) -> Option<Vec<usize>> {
        let walk = self.walk(net, j, t)?;
        let mut out = vec![self.source];
        out.extend(walk.iter().map(|&id| net.edges[id].1));
        Some(out)
    }

    /// `δ^{≤k}(s, t)` for every `t`.
    pub fn best(&self) -> Vec<Option<S>> {
        let mut out = vec![None; self.dist[0].len()];
        for row in &self.dist {
            for (slot, d) in out.iter_mut().zip(row) {
                if let Some(d) = d {
                    relax(slot, d.clone());
                }
            }
        }
        out
    }
}

/// `δ^{≤k}(s, ·)` with exact-length rows rolled, in `O(n)` extra space.
pub fn distances_from<S: Scalar>(net: &Net<S>, gamma: &S, s: usize, k: usize) -> Vec<Option<S>> {
    let n = net.n();
    let mut cur = vec![None; n];
    cur[s] = Some(S::zero());
    let mut best = cur.clone();
    let mut pw = S::one();
    for _ in 0..k {
        let mut next = vec![None; n];
        for (u, t, c) in &net.edges {
            if let Some(du) = &cur[*u] {
                relax(&mut next[*t], du.add(&pw.mul(c)));
            }
        }
        add_relaxations(net.m() as u64);
        if next.iter().all(Option::is_none) {
            break;
        }
        for (slot, d) in best.iter_mut().zip(&next) {
            if let Some(d) = d {
                relax(slot, d.clone());
            }
        }
        cur = next;
        pw = pw.mul(gamma);
    }
    best
}

/// `D(s, v, x) = min_i δ^i(s, v) + γ^i x` for one source `s`, `i ≤ k`.
#[derive(Debug, Clone)]
pub struct EnvelopeStructure<S> {
    pub source: usize,
    pub k: usize,
    per_vertex: Vec<Envelope<S>>,
}

impl<S: Scalar> EnvelopeStructure<S> {
    pub fn from_table(table: &SourceTable<S>, gamma: &S) -> Self {
        let pows = powers(gamma, table.k());
        let n = table.dist[0].len();
        let per_vertex = (0..n)
            .map(|v| {
                let lines = (0..=table.k())
                    .filter_map(|i| {
                        let d = table.dist[i][v].as_ref()?;
                        Some(Line { slope: pows[i].clone(), intercept: d.clone(), tag: i })
                    })
                    .collect();
                lower_envelope(lines)
            })
            .collect();
        EnvelopeStructure { source: table.source, k: table.k(), per_vertex }
    }

    pub fn query(&self, v: usize, x: &S) -> Option<S> {
        self.per_vertex[v].eval(x)
    }

    /// Answers for non-decreasing `xs` in one pass.
    pub fn query_sorted(&self, v: usize, xs: &[S]) -> Vec<Option<S>> {
        let mut sweep = self.per_vertex[v].sweep();
        xs.iter().map(|x| sweep.eval(x)).collect()
    }

    pub fn cells(&self) -> usize {
        self.per_vertex.iter().map(|e| e.lines.len()).sum()
    }
}

pub fn build_envelope<S: Scalar>(net: &Net<S>, gamma: &S, s: usize, k: usize) -> EnvelopeStructure<S> {
    EnvelopeStructure::from_table(&delta_from_source(net, gamma, s, k), gamma)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSet {
    /// Sorted.
    pub vertices: Vec<usize>,
    pub k: usize,
    /// Number of stored simple `k`-edge walks that had to be hit.
    pub family_size: usize,
}

impl HittingSet {
    /// `⌈(n / (k + 1)) (ln |Q| + 1)⌉ + 1`, the greedy guarantee.
    pub fn greedy_bound(&self, n: usize) -> usize {
        if self.family_size == 0 {
            return 0;
        }
        let q = self.family_size as f64;
        ((n as f64 / (self.k + 1) as f64) * (q.ln() + 1.0)).ceil() as usize + 1
    }
}

/// The stored exact-`k` walks of `table` that visit `k + 1` distinct vertices.
fn simple_walks<S: Scalar>(net: &Net<S>, table: &SourceTable<S>, stamp: &mut [usize], epoch: &mut usize) -> Vec<Vec<usize>> {
    let k = table.k();
    let mut out = Vec::new();
    for t in 0..net.n() {
        let Some(vs) = table.vertices(net, k, t) else { continue };
        *epoch += 1;
        let simple = vs.iter().all(|&v| {
            let fresh = stamp[v] != *epoch;
            stamp[v] = *epoch;
            fresh
        });
        if simple {
            out.push(vs);
        }
    }
    out
}

/// Repeatedly takes the vertex in the most unhit sets (smallest id on ties).
pub fn greedy_hitting_set(n: usize, family: &[Vec<usize>]) -> Vec<usize> {
    let mut count = vec![0usize; n];
    let mut members = vec![Vec::new(); n];
    for (i, set) in family.iter().enumerate() {
        for &v in set {
            count[v] += 1;
            members[v].push(i);
        }
    }
    let mut hit = vec![false; family.len()];
    let mut left = family.len();
    let mut chosen = Vec::new();
    while left > 0 {
        let v = (0..n).max_by_key(|&v| (count[v], std::cmp::Reverse(v))).unwrap();
        chosen.push(v);
        for &i in &members[v] {
            if !hit[i] {
                hit[i] = true;
                left -= 1;
                for &u in &family[i] {
                    count[u] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

pub fn build_hitting_set<S: Scalar>(net: &Net<S>, gamma: &S, sources: &[usize], k: usize) -> HittingSet {
    let mut stamp = vec![0; net.n()];
    let mut epoch = 0;
    let mut family = Vec::new();
    for &s in sources {
        let table = delta_from_source(net, gamma, s, k);
        family.extend(simple_walks(net, &table, &mut stamp, &mut epoch));
    }
    HittingSet { vertices: greedy_hitting_set(net.n(), &family), k, family_size: family.len() }
}

/// First reduction: with exact rows `from_x[i][j] = δ(x_i, targets_j)`, runs
/// `h` backward rounds per target seeded by those rows and by `δ(t, t) ≤ 0`,
/// which yields `min(d_h(s, t), δ^{≤h}(s, t))` for every source.
pub fn reduce_sources_v1<S: Scalar>(
    net: &Net<S>,
    gamma: &S,
    sources: &[usize],
    targets: &[usize],
    h: usize,
    x: &[usize],
    from_x: &[Vec<Option<S>>],
) -> Vec<Vec<Option<S>>> {
    let _scratch = AuxGuard::new(2 * net.n());
    let mut out = vec![vec![None; targets.len()]; sources.len()];
    for (j, &t) in targets.iter().enumerate() {
        let mut d = vec![None; net.n()];
        for (i, &xv) in x.iter().enumerate() {
            d[xv] = from_x[i][j].clone();
        }
        relax(&mut d[t], S::zero());
        for _ in 0..h {
            d = backward_round(net, gamma, &d);
        }
        for (r, &s) in sources.iter().enumerate() {
            out[r][j] = d[s].clone();
        }
    }
    out
}

/// Second reduction: `min(δ^{≤h}(s, t), min_x D(s, x, δ(x, t)))`, each
/// `(s, x)` envelope swept once over the targets sorted by `δ(x, ·)`.
pub fn reduce_sources_v2<S: Scalar>(
    envelopes: &[EnvelopeStructure<S>],
    targets: &[usize],
    x: &[usize],
    from_x: &[Vec<Option<S>>],
) -> Vec<Vec<Option<S>>> {
    let orders: Vec<Vec<usize>> = from_x
        .iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..row.len()).filter(|&j| row[j].is_some()).collect();
            idx.sort_by(|&a, &b| row[a].as_ref().unwrap().total_cmp(row[b].as_ref().unwrap()));
            idx
        })
        .collect();
    envelopes
        .iter()
        .map(|env| {
            let mut row: Vec<Option<S>> = targets.iter().map(|&t| env.query(t, &S::zero())).collect();
            for (i, &xv) in x.iter().enumerate() {
                let values: Vec<S> = orders[i].iter().map(|&j| from_x[i][j].clone().unwrap()).collect();
                for (&j, d) in orders[i].iter().zip(env.query_sorted(xv, &values)) {
                    if let Some(d) = d {
                        relax(&mut row[j], d);
                    }
                }
            }
            row
        })
        .collect()
}

/// Branching parameter `d` of the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branching {
    Auto,
    Fixed(usize),
}

impl FromStr for Branching {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Branching::Auto);
        }
        match s.parse::<usize>() {
            Ok(d) if d >= 2 => Ok(Branching::Fixed(d)),
            _ => Err(format!("expected `auto` or an integer >= 2, found `{s}`")),
        }
    }
}

impl fmt::Display for Branching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branching::Auto => f.write_str("auto"),
            Branching::Fixed(d) => write!(f, "{d}"),
        }
    }
}

/// `max(2, ⌈n^{1/2} / m^{1/4}⌉)`.
pub fn auto_branching(n: usize, m: usize) -> usize {
    let d = ((n as f64).sqrt() / (m.max(1) as f64).powf(0.25)).ceil() as usize;
    d.max(2)
}

/// Constant in the source-set caps `⌈3 (n / h) ln n⌉` and `3 ln n`.
pub const SIZE_CONSTANT: f64 = 3.0;

/// Reduced graphs this small go straight to per-source dynamic programming.
pub const SMALL_INSTANCE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageInfo {
    pub h: usize,
    pub sources: usize,
    /// Size of the hitting set that became the next source set.
    pub hitting: usize,
    pub cap: usize,
    pub family: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DriverTrace {
    pub d: usize,
    pub reduced_n: usize,
    pub reduced_m: usize,
    pub stages: Vec<StageInfo>,
    /// Sources finished by plain dynamic programming.
    pub direct_sources: usize,
    /// A stage overshot its cap and the driver finished directly.
    pub fallback: bool,
    pub short_circuit: bool,
}

/// Source-set cap after a stage with parameter `h`.
pub fn stage_cap(n: usize, h: usize) -> usize {
    let c = (SIZE_CONSTANT * (n as f64 / h as f64) * (n as f64).ln()).ceil() as usize;
    c.min(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscountedDistances<S> {
    /// `dist[s][t]`; `None` when `t` is unreachable from `s`.
    pub dist: Vec<Vec<Option<S>>>,
}

impl<S: Scalar> DiscountedDistances<S> {
    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn get(&self, s: usize, t: usize) -> Option<&S> {
        self.dist[s][t].as_ref()
    }

    /// CSV rows; empty cells are `inf`.
    pub fn to_csv(&self, fmt_cell: impl Fn(&S) -> String) -> String {
        let mut out = String::new();
        for row in &self.dist {
            let cells: Vec<String> = row.iter().map(|d| d.as_ref().map_or("inf".into(), &fmt_cell)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn solve_dapsp(inst: &UniformInstance, d: Branching) -> DiscountedDistances<Rational> {
    solve_dapsp_traced(inst, d).0
}

pub fn solve_dapsp_f64(inst: &UniformInstance, d: Branching) -> DiscountedDistances<f64> {
    solve_dapsp_traced(inst, d).0
}

pub fn solve_dapsp_traced<S: Scalar>(inst: &UniformInstance, d: Branching) -> (DiscountedDistances<S>, DriverTrace) {
    let red = madani_reduce_as::<S>(inst);
    let (dist, trace) = solve_reduced(&red, d);
    (DiscountedDistances { dist }, trace)
}

fn direct<S: Scalar>(net: &Net<S>, gamma: &S, sources: &[usize], targets: &[usize]) -> Vec<Vec<Option<S>>> {
    sources
        .iter()
        .map(|&s| {
            let all = distances_from(net, gamma, s, net.n());
            targets.iter().map(|&t| all[t].clone()).collect()
        })
        .collect()
}

/// Distances from every `v'` to every `u''` of a reduced instance.
pub fn solve_reduced<S: Scalar>(red: &ReducedInstance<S>, d: Branching) -> (Vec<Vec<Option<S>>>, DriverTrace) {
    let net = &red.net;
    let gamma = &red.gamma;
    let n = net.n();
    let d = match d {
        Branching::Auto => auto_branching(n, net.m()),
        Branching::Fixed(d) => d.max(2),
    };
    let mut trace = DriverTrace { d, reduced_n: n, reduced_m: net.m(), ..DriverTrace::default() };
    let sources = &red.prime;
    let targets = &red.double;
    if n <= SMALL_INSTANCE {
        trace.short_circuit = true;
        trace.direct_sources = sources.len();
        return (direct(net, gamma, sources, targets), trace);
    }
    let few = SIZE_CONSTANT * (n as f64).ln();

    // stage 0: hitting set for prefixes of d edges, first reduction
    let h0 = d.min(n);
    let first = build_hitting_set(net, gamma, sources, h0);
    let cap = stage_cap(n, h0);
    trace.stages.push(StageInfo {
        h: h0,
        sources: sources.len(),
        hitting: first.vertices.len(),
        cap,
        family: first.family_size,
    });
    if first.vertices.len() > cap {
        trace.fallback = true;
        trace.direct_sources = sources.len();
        return (direct(net, gamma, sources, targets), trace);
    }

    // stages i >= 1 with h = d^{i+1}; keep the envelopes for the way back
    let mut levels: Vec<(Vec<EnvelopeStructure<S>>, Vec<usize>)> = Vec::new();
    let mut current = first.vertices;
    let mut h = h0;
    let mut stamp = vec![0; n];
    let mut epoch = 0;
    let bottom = loop {
        if current.is_empty() || current.len() as f64 <= few {
            trace.direct_sources = current.len();
            break direct(net, gamma, &current, targets);
        }
        h = h.saturating_mul(d).min(n);
        let mut family = Vec::new();
        let mut envelopes = Vec::with_capacity(current.len());
        for &s in &current {
            let table = delta_from_source(net, gamma, s, h);
            family.extend(simple_walks(net, &table, &mut stamp, &mut epoch));
            envelopes.push(EnvelopeStructure::from_table(&table, gamma));
        }
        let next = greedy_hitting_set(n, &family);
        let cap = stage_cap(n, h);
        trace.stages.push(StageInfo { h, sources: current.len(), hitting: next.len(), cap, family: family.len() });
        if next.len() > cap {
            trace.fallback = true;
            trace.direct_sources = current.len();
            break direct(net, gamma, &current, targets);
        }
        levels.push((envelopes, std::mem::replace(&mut current, next)));
    };

    let mut rows = bottom;
    let mut solved = current;
    for (envelopes, srcs) in levels.into_iter().rev() {
        rows = reduce_sources_v2(&envelopes, targets, &solved, &rows);
        solved = srcs;
    }
    let rows = reduce_sources_v1(net, gamma, sources, targets, h0, &solved, &rows);
    (rows, trace)
}

impl ReducedInstance<Rational> {
    /// The reduced graph as a file-format instance (every gain `γ`).
    pub fn to_graph(&self) -> Graph {
        let edges = self.net.edges.iter().map(|(u, v, c)| (*u, *v, c.clone(), self.gamma.clone()));
        Graph::with_kind(self.net.n(), InstanceKind::Dmdp, edges).expect("valid reduced instance")
    }
}

impl<S: Scalar> ReducedInstance<S> {
    /// An optimal `s -> t` walk with the fewest edges, as edge ids.
    pub fn optimal_walk(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let table = delta_from_source(&self.net, &self.gamma, s, self.net.n());
        let mut best: Option<(S, usize)> = None;
        for (j, row) in table.dist.iter().enumerate() {
            if let Some(d) = &row[t] {
                if best.as_ref().is_none_or(|(b, _)| d.lt(b)) {
                    best = Some((d.clone(), j));
                }
            }
        }
        let (_, j) = best?;
        table.walk(&self.net, j, t)
    }

    /// Plain per-source dynamic programming over every pair `(v', u'')`.
    pub fn naive(&self) -> Vec<Vec<Option<S>>> {
        direct(&self.net, &self.gamma, &self.prime, &self.double)
    }
}

/// The baseline: reduce, run the per-target recursion with `n` rounds on
/// every pair, and read off `(v', u'')`.
pub fn naive_distances(inst: &UniformInstance) -> DiscountedDistances<Rational> {
    let red = madani_reduce(inst);
    let all = naive_dapsp(&red.to_graph(), &red.gamma);
    let dist = red.prime.iter().map(|&s| red.double.iter().map(|&t| all[s][t].clone()).collect()).collect();
    DiscountedDistances { dist }
}
