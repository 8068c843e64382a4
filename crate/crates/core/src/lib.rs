//! Exact solvers for monotone two-variable-per-inequality systems
//! `x_u <= c + g * x_v` (`g > 0`), deterministic MDPs, and discounted
//! all-pairs shortest paths with a uniform discount.
//!
//! Every solver is Las Vegas: results are verified before they are returned,
//! and infeasible systems come with a certificate that can be re-checked
//! independently with [`certificate::verify_certificate`].

pub mod certificate;
pub mod counters;
pub mod dapsp;
pub mod envelope;
pub mod gen;
pub mod graph;
pub mod kcycle;
pub mod locate;
pub mod oracle;
pub mod propagate;
pub mod rational;
pub mod reconstruct;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod tradeoff;
pub mod walk;

pub use certificate::{verify_certificate, Certificate};
pub use graph::{Edge, EdgeId, Graph, InstanceKind, VertexId};
pub use propagate::{evaluate_solution, propagate, BoundVector, Evaluation};
pub use rational::{rat, ExtRational, Rational};
pub use solver::{solve_simple, SolveOutcome};
pub use tradeoff::solve_tradeoff;
pub use walk::{compose, cycle_bound, Walk, WalkSummary};
