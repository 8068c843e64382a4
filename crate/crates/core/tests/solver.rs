//! The randomized solver against the exhaustive oracle.

mod common;

use common::random_graph;
use m2vpi::certificate::verify_certificate;
use m2vpi::gen::{generate, GenKind};
use m2vpi::oracle::shostak_enumerate;
use m2vpi::rational::{ExtRational, Rational};
use m2vpi::rng::rng_for;
use m2vpi::solver::{
    dmdp_policy, phase_schedule, run_phases, solve_simple, solve_simple_with_stats, verify_solution, SolveOutcome,
    Verification, XStar,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_oracle(seed in any::<u64>()) {
        let rng = &mut rng_for(seed, 0);
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(0..=(2 * n).min(12));
        let g = random_graph(rng, n, m, 8);
        let truth = shostak_enumerate(&g).unwrap();
        let out = solve_simple(&g, seed);
        match &out {
            SolveOutcome::Feasible(x) => {
                prop_assert!(truth.feasible());
                prop_assert_eq!(x, &truth.x_le);
                prop_assert_eq!(verify_solution(&g, x), Verification::Verified);
            }
            SolveOutcome::Infeasible(cert) => {
                prop_assert!(!truth.feasible());
                prop_assert!(verify_certificate(&g, cert));
            }
        }
        prop_assert_eq!(solve_simple(&g, seed), out);
    }
}

#[test]
fn phase_samples_follow_schedule() {
    for n in [1, 2, 5, 8, 13, 20] {
        let g = generate(GenKind::FeasibleRandom, n, 2 * n, n as u64).unwrap();
        let (_, stats) = solve_simple_with_stats(&g, 3);
        let l = n.ilog2() as usize;
        let expected: Vec<usize> = (0..=l).map(|j| n.div_ceil(1 << j) * (l + 2 - j).pow(3)).collect();
        assert_eq!(stats.phase_samples, expected);
        assert_eq!(phase_schedule(n).into_iter().map(|(_, t)| t).collect::<Vec<_>>(), expected);
    }
}

/// Running more phases from the same stream never raises an entry of `x*`.
#[test]
fn xstar_only_decreases() {
    for seed in 0..10 {
        let g = generate(GenKind::FeasibleRandom, 9, 20, seed).unwrap();
        let total = phase_schedule(9).len();
        let mut prev = XStar::unbounded(9).values;
        for phases in 1..=total {
            let mut x = XStar::unbounded(9);
            run_phases(&g, &mut rng_for(seed, 0), phases, &mut x, &mut Vec::new()).unwrap();
            assert!(x.values.iter().zip(&prev).all(|(a, b)| a <= b));
            prev = x.values;
        }
    }
}

#[test]
fn generated_instances() {
    for seed in 0..40 {
        let n = 2 + (seed as usize % 9);
        let g = generate(GenKind::FeasibleRandom, n, 2 * n, seed).unwrap();
        assert!(solve_simple(&g, seed).is_feasible());
        for kind in [GenKind::InfeasibleBicycle, GenKind::InfeasibleUnit] {
            let g = generate(kind, n, 2 * n, seed).unwrap();
            let out = solve_simple(&g, seed);
            assert!(verify_certificate(&g, out.certificate().expect("planted contradiction")), "{kind} {seed}");
        }
    }
}

/// On a DMDP the tight edges form an optimal policy whose discounted cost
/// is exactly `x`.
#[test]
fn dmdp_policies_attain_the_values() {
    for seed in 0..30 {
        let g = generate(GenKind::DmdpRandom, 7, 16, seed).unwrap();
        let x = solve_simple(&g, seed).solution().unwrap().clone();
        let policy = dmdp_policy(&g, &x).unwrap();
        for v in 0..g.n() {
            // follow the policy for a while and compare the truncated value
            let (mut at, mut cost, mut gain) = (v, Rational::zero(), Rational::one());
            for _ in 0..40 {
                let e = g.edge(policy[at]);
                assert_eq!(e.tail, at);
                cost = &cost + &(&gain * &e.cost);
                gain = &gain * &e.gain;
                at = e.head;
            }
            let ExtRational::Finite(xv) = &x[v] else { panic!("dmdp values are finite") };
            let ExtRational::Finite(xa) = &x[at] else { unreachable!() };
            assert_eq!(&cost + &(&gain * xa), xv.clone());
        }
    }
}
