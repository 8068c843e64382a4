//! Discounted all-pairs distances against enumeration and policy iteration.

mod common;

use common::{exact_discounted, walks_from};
use m2vpi::dapsp::{
    build_envelope, build_hitting_set, delta_from_source, delta_to_target, madani_reduce, naive_distances,
    reduce_sources_v1, reduce_sources_v2, solve_dapsp, solve_dapsp_f64, solve_dapsp_traced, stage_cap, Branching,
    Net, UniformInstance,
};
use m2vpi::oracle::naive_dapsp;
use m2vpi::rational::{rat, Rational};
use m2vpi::rng::rng_for;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const GAMMAS: [(i64, i64); 4] = [(1, 2), (1, 3), (2, 3), (3, 4)];

fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> UniformInstance {
    let (p, q) = GAMMAS[rng.gen_range(0..GAMMAS.len())];
    let edges: Vec<_> = (0..m)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rat(rng.gen_range(-8..=8), rng.gen_range(1..=4))))
        .collect();
    UniformInstance::new(n, edges, rat(p, q)).unwrap()
}

fn net_of(inst: &UniformInstance) -> Net<Rational> {
    Net::new(inst.n(), inst.edges().to_vec())
}

fn le(a: &Option<Rational>, b: &Option<Rational>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a <= b,
    }
}

/// `g[r][v]`: least cost of a `v -> t` walk with exactly `r` edges.
fn exact_to_target(net: &Net<Rational>, gamma: &Rational, t: usize, k: usize) -> Vec<Vec<Option<Rational>>> {
    let mut rows = vec![vec![None; net.n()]];
    rows[0][t] = Some(Rational::zero());
    for r in 1..=k {
        let mut next: Vec<Option<Rational>> = vec![None; net.n()];
        for (u, w, c) in net.edges() {
            if let Some(d) = &rows[r - 1][*w] {
                let cand = c + &(gamma * d);
                if next[*u].as_ref().is_none_or(|old| cand < *old) {
                    next[*u] = Some(cand);
                }
            }
        }
        rows.push(next);
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn reduction_preserves_distances(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 0);
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(0..=2 * n);
        let inst = random_instance(rng, n, m);
        let truth = exact_discounted(n, inst.edges(), inst.gamma());
        prop_assert_eq!(&naive_distances(&inst).dist, &truth);

        // every fewest-edge optimal walk into a sink copy is simple
        let red = madani_reduce(&inst);
        for &s in &red.prime {
            for &t in &red.double {
                let Some(walk) = red.optimal_walk(s, t) else { continue };
                let mut seen = vec![s];
                seen.extend(walk.iter().map(|&id| red.net.edges()[id].1));
                let len = seen.len();
                seen.sort_unstable();
                seen.dedup();
                prop_assert_eq!(seen.len(), len);
            }
        }
    }

    #[test]
    fn bounded_tables_match_enumeration(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 1);
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(0..=2 * n);
        let k = rng.gen_range(0..=4);
        let inst = random_instance(rng, n, m);
        let (net, g, gamma) = (net_of(&inst), inst.to_graph(), inst.gamma().clone());

        // exact[s][j][t] by enumeration
        let mut exact = vec![vec![vec![None::<Rational>; n]; k + 1]; n];
        for s in 0..n {
            walks_from(&g, s, k, &mut |end, edges, sum| {
                let slot = &mut exact[s][edges.len()][end];
                if slot.as_ref().is_none_or(|old| sum.cost < *old) {
                    *slot = Some(sum.cost.clone());
                }
            });
        }
        let at_most = |s: usize, j: usize, t: usize| {
            (0..=j).filter_map(|i| exact[s][i][t].clone()).min()
        };

        for t in 0..n {
            let rows = delta_to_target(&net, &gamma, t, k);
            for j in 0..=k {
                for s in 0..n {
                    prop_assert_eq!(&rows[j][s], &at_most(s, j, t));
                    if j > 0 {
                        prop_assert!(le(&rows[j][s], &rows[j - 1][s]));
                    }
                }
            }
        }
        for s in 0..n {
            let table = delta_from_source(&net, &gamma, s, k);
            for j in 0..=k {
                for t in 0..n {
                    prop_assert_eq!(&table.dist[j][t], &exact[s][j][t]);
                    if let Some(walk) = table.walk(&net, j, t) {
                        prop_assert_eq!(walk.len(), j);
                        prop_assert_eq!(Some(net.walk_cost(&gamma, &walk)), exact[s][j][t].clone());
                    }
                }
            }
            let best = table.best();
            for t in 0..n {
                prop_assert_eq!(&best[t], &at_most(s, k, t));
            }

            // the envelope is the pointwise minimum of its lines
            let env = build_envelope(&net, &gamma, s, k);
            let mut xs: Vec<Rational> = (0..6).map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=3))).collect();
            xs.sort();
            for v in 0..n {
                let direct = |x: &Rational| {
                    let mut pw = Rational::one();
                    let mut out: Option<Rational> = None;
                    for i in 0..=k {
                        if let Some(d) = &exact[s][i][v] {
                            let cand = d + &(&pw * x);
                            out = Some(out.map_or(cand.clone(), |o| o.min(cand)));
                        }
                        pw = &pw * &gamma;
                    }
                    out
                };
                let swept = env.query_sorted(v, &xs);
                for (x, got) in xs.iter().zip(&swept) {
                    prop_assert_eq!(&env.query(v, x), &direct(x));
                    prop_assert_eq!(got, &direct(x));
                }
            }
        }
    }

    #[test]
    fn hitting_sets_cover_long_optimal_walks(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 2);
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(n..=3 * n);
        let k = rng.gen_range(1..=4);
        let inst = random_instance(rng, n, m);
        let red = madani_reduce(&inst);
        let (net, gamma) = (&red.net, &red.gamma);
        let hit = build_hitting_set(net, gamma, &red.prime, k);
        prop_assert!(hit.vertices.len() <= hit.greedy_bound(net.n()));
        let in_x = |v: usize| hit.vertices.binary_search(&v).is_ok();

        let big = net.n();
        for &t in &red.double {
            let g = exact_to_target(net, gamma, t, big);
            for &s in &red.prime {
                // fewest edges among optimal walks
                let best = (0..=big).filter_map(|r| g[r][s].clone()).min();
                let Some(best) = best else { continue };
                let ell = (0..=big).find(|&r| g[r][s].as_ref() == Some(&best)).unwrap();
                if ell < k {
                    continue;
                }
                // layers of vertices reachable from s along optimal ell-edge walks
                let mut layer = vec![s];
                let mut found = in_x(s);
                for i in 0..k {
                    let mut next = Vec::new();
                    for &u in &layer {
                        for &id in net.out_edges(u) {
                            let (_, w, c) = &net.edges()[id];
                            let Some(gw) = &g[ell - i - 1][*w] else { continue };
                            if Some(c + &(gamma * gw)) == g[ell - i][u] && !next.contains(w) {
                                next.push(*w);
                            }
                        }
                    }
                    found |= next.iter().any(|&w| in_x(w));
                    layer = next;
                }
                prop_assert!(found, "pair ({s}, {t}) with {ell} edges is not hit by {:?}", hit.vertices);
            }
        }
    }

    #[test]
    fn source_reductions_recover_distances(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 3);
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(n..=3 * n);
        let h = rng.gen_range(1..=4);
        let inst = random_instance(rng, n, m);
        let red = madani_reduce(&inst);
        let (net, gamma) = (&red.net, &red.gamma);
        let all = naive_dapsp(&red.to_graph(), gamma);
        let truth: Vec<Vec<Option<Rational>>> =
            red.prime.iter().map(|&s| red.double.iter().map(|&t| all[s][t].clone()).collect()).collect();

        let x = build_hitting_set(net, gamma, &red.prime, h).vertices;
        let from_x: Vec<Vec<Option<Rational>>> =
            x.iter().map(|&v| red.double.iter().map(|&t| all[v][t].clone()).collect()).collect();
        let v1 = reduce_sources_v1(net, gamma, &red.prime, &red.double, h, &x, &from_x);
        prop_assert_eq!(&v1, &truth);
        let envelopes: Vec<_> = red.prime.iter().map(|&s| build_envelope(net, gamma, s, h)).collect();
        let v2 = reduce_sources_v2(&envelopes, &red.double, &x, &from_x);
        prop_assert_eq!(&v2, &truth);
    }

    #[test]
    fn optimal_walks_have_optimal_parts(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 4);
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=3 * n);
        let inst = random_instance(rng, n, m);
        let red = madani_reduce(&inst);
        let (net, gamma) = (&red.net, &red.gamma);
        let all = naive_dapsp(&red.to_graph(), gamma);
        for &s in &red.prime {
            for &t in &red.double {
                let Some(walk) = red.optimal_walk(s, t) else {
                    prop_assert_eq!(&all[s][t], &None);
                    continue;
                };
                prop_assert_eq!(Some(net.walk_cost(gamma, &walk)), all[s][t].clone());
                let table = delta_from_source(net, gamma, s, walk.len());
                let mut at = s;
                for i in 0..=walk.len() {
                    // suffix from the i-th vertex is optimal for (v_i, t)
                    prop_assert_eq!(Some(net.walk_cost(gamma, &walk[i..])), all[at][t].clone());
                    // prefix of i edges is optimal among i-edge walks to v_i
                    prop_assert_eq!(Some(net.walk_cost(gamma, &walk[..i])), table.dist[i][at].clone());
                    if i < walk.len() {
                        at = net.edges()[walk[i]].1;
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn driver_matches_baselines(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 5);
        let n = rng.gen_range(1..=14);
        let m = rng.gen_range(0..=3 * n);
        let inst = random_instance(rng, n, m);
        let truth = exact_discounted(n, inst.edges(), inst.gamma());
        prop_assert_eq!(&naive_distances(&inst).dist, &truth);
        for d in [Branching::Fixed(2), Branching::Fixed(3), Branching::Auto] {
            let (got, trace) = solve_dapsp_traced::<Rational>(&inst, d);
            prop_assert_eq!(&got.dist, &truth);
            let mut h = 1;
            for (i, st) in trace.stages.iter().enumerate() {
                h = if i == 0 { trace.d.min(trace.reduced_n) } else { (h * trace.d).min(trace.reduced_n) };
                prop_assert_eq!(st.h, h);
                prop_assert_eq!(st.cap, stage_cap(trace.reduced_n, h));
                let last = i + 1 == trace.stages.len();
                prop_assert!(st.hitting <= st.cap || (last && trace.fallback));
            }
        }
        let float = solve_dapsp_f64(&inst, Branching::Auto);
        for s in 0..n {
            for t in 0..n {
                match (&float.dist[s][t], &truth[s][t]) {
                    (None, None) => {}
                    (Some(a), Some(b)) => {
                        let b = b.to_f64();
                        prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
                    }
                    (a, b) => prop_assert!(false, "reachability differs: {a:?} vs {b:?}"),
                }
            }
        }
    }
}

#[test]
fn negative_self_loop_is_taken_forever() {
    let inst = UniformInstance::new(1, [(0, 0, rat(-2, 1))], rat(1, 2)).unwrap();
    assert_eq!(solve_dapsp(&inst, Branching::Auto).get(0, 0), Some(&rat(-4, 1)));
    assert_eq!(solve_dapsp_f64(&inst, Branching::Fixed(2)).get(0, 0), Some(&-4.0));
}

#[test]
fn larger_instances_use_the_stages() {
    let mut staged = 0;
    for seed in 0..6 {
        let rng = &mut rng_for(seed, 6);
        let n = 30;
        let inst = random_instance(rng, n, 3 * n);
        let truth = naive_distances(&inst);
        for d in [Branching::Fixed(2), Branching::Fixed(3), Branching::Auto] {
            let (got, trace) = solve_dapsp_traced::<Rational>(&inst, d);
            assert_eq!(got, truth, "seed {seed}, d = {d}");
            staged += usize::from(!trace.stages.is_empty() && !trace.short_circuit);
        }
    }
    assert!(staged > 0);
}
