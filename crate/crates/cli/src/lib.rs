//! The command implementations behind the `m2vpi` binary, usable without a
//! process so tests can drive them directly.

pub mod bench;
pub mod format;
pub mod report;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use m2vpi::counters;
use m2vpi::dapsp::{
    madani_reduce_as, naive_distances, solve_dapsp_traced, Branching, DiscountedDistances, UniformError,
    UniformInstance,
};
use m2vpi::gen::{generate, planted_long_cycle, GenError, GenKind};
use m2vpi::graph::ParseError;
use m2vpi::solver::{solve_simple_with_stats, verify_solution, Verification};
use m2vpi::tradeoff::solve_tradeoff_with_stats;
use m2vpi::{verify_certificate, Graph, Rational, SolveOutcome};

use format::{parse_answer, Answer, FormatError};
use report::{Outcome, RunReport};

/// Process exit codes.
pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Answer { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Uniform(#[from] UniformError),
    #[error("{0}")]
    Usage(String),
    /// A solver result that failed its own re-check. Never expected.
    #[error("verification failed: {0}")]
    Unverified(String),
    #[error("{0}")]
    Mismatch(String),
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::parse(&read_file(path)?).map_err(|source| CliError::Parse { path: path.into(), source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Simple,
    /// The trade-off solver with this `h`; `None` means `h = n`.
    Tradeoff(Option<usize>),
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Simple => "simple",
            Algo::Tradeoff(_) => "tradeoff",
        }
    }
}

/// The trade-off parameter as given on the command line: `<int>` or `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HArg(pub Option<usize>);

impl FromStr for HArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_h(s).map(HArg)
    }
}

/// `<int>` or `n`.
pub fn parse_h(s: &str) -> Result<Option<usize>, String> {
    match s {
        "n" => Ok(None),
        _ => match s.parse::<usize>() {
            Ok(h) if h >= 1 => Ok(Some(h)),
            _ => Err(format!("expected a positive integer or `n`, found `{s}`")),
        },
    }
}

/// Solves, re-verifies the answer, and measures.
pub fn run_solve(g: &Graph, algo: Algo, seed: u64, id: &str) -> Result<(SolveOutcome, RunReport), CliError> {
    counters::reset();
    let start = Instant::now();
    let (out, attempts, param) = match algo {
        Algo::Simple => {
            let (out, stats) = solve_simple_with_stats(g, seed);
            (out, stats.attempts, String::new())
        }
        Algo::Tradeoff(h) => {
            let h = h.unwrap_or(g.n()).max(1);
            let (out, stats) = solve_tradeoff_with_stats(g, h, seed);
            (out, stats.attempts, format!("h={h}"))
        }
    };
    let wall = start.elapsed();
    let work = counters::snapshot();
    let outcome = match &out {
        SolveOutcome::Feasible(x) => match verify_solution(g, x) {
            Verification::Verified => Outcome::Feasible,
            other => return Err(CliError::Unverified(format!("{other:?}"))),
        },
        SolveOutcome::Infeasible(c) if verify_certificate(g, c) => Outcome::Infeasible,
        SolveOutcome::Infeasible(c) => return Err(CliError::Unverified(format!("{c:?}"))),
    };
    let report = RunReport {
        id: id.into(),
        algo: algo.name().into(),
        n: g.n(),
        m: g.m(),
        seed,
        param,
        outcome,
        wall,
        counters: work,
        attempts,
    };
    Ok((out, report))
}

pub fn answer_text(out: &SolveOutcome) -> String {
    match out {
        SolveOutcome::Feasible(x) => format::write_solution(x),
        SolveOutcome::Infeasible(c) => format::write_certificate(c),
    }
}

pub fn exit_code(out: &SolveOutcome) -> i32 {
    if out.is_feasible() {
        EXIT_FEASIBLE
    } else {
        EXIT_INFEASIBLE
    }
}

/// `len` plants a cycle of that length; only meaningful for
/// `planted-long-cycle`, where it defaults to `n`.
pub fn run_gen(kind: GenKind, n: usize, m: usize, seed: u64, len: Option<usize>) -> Result<Graph, CliError> {
    match (kind, len) {
        (GenKind::PlantedLongCycle, Some(len)) => {
            if !(1..=n).contains(&len) || m < len {
                return Err(CliError::Usage(format!("cycle length {len} needs 1 <= len <= n and m >= len")));
            }
            Ok(planted_long_cycle(n, m, len, seed))
        }
        (_, Some(_)) => Err(CliError::Usage(format!("--len only applies to planted-long-cycle, not {kind}"))),
        (_, None) => Ok(generate(kind, n, m, seed)?),
    }
}

/// Checks a printed answer against its instance: the exit code the solver
/// should have used, or an error if the answer is wrong.
pub fn run_verify(g: &Graph, answer: &str, path: &Path) -> Result<i32, CliError> {
    match parse_answer(g, answer).map_err(|source| CliError::Answer { path: path.into(), source })? {
        Answer::Solution(x) => match verify_solution(g, &x) {
            Verification::Verified => Ok(EXIT_FEASIBLE),
            other => Err(CliError::Unverified(format!("{other:?}"))),
        },
        Answer::Certificate(c) if verify_certificate(g, &c) => Ok(EXIT_INFEASIBLE),
        Answer::Certificate(_) => Err(CliError::Unverified("certificate does not hold".into())),
    }
}

pub fn uniform_instance(g: &Graph, gamma: Option<&str>) -> Result<UniformInstance, CliError> {
    let gamma = gamma
        .map(|s| Rational::from_str(s).map_err(|e| CliError::Usage(format!("bad discount: {e}"))))
        .transpose()?;
    Ok(UniformInstance::from_graph(g, gamma)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Exact(DiscountedDistances<Rational>),
    Float(DiscountedDistances<f64>),
}

impl Matrix {
    pub fn to_csv(&self) -> String {
        match self {
            Matrix::Exact(d) => d.to_csv(|x| x.to_string()),
            Matrix::Float(d) => d.to_csv(|x| x.to_string()),
        }
    }
}

/// Runs the discounted APSP driver, or with `naive` the plain dynamic
/// program on the reduced graph.
pub fn run_dapsp(inst: &UniformInstance, d: Branching, float: bool, naive: bool, id: &str) -> (Matrix, RunReport) {
    counters::reset();
    let start = Instant::now();
    let matrix = match (float, naive) {
        (false, false) => Matrix::Exact(solve_dapsp_traced(inst, d).0),
        (true, false) => Matrix::Float(solve_dapsp_traced(inst, d).0),
        (false, true) => Matrix::Exact(naive_distances(inst)),
        (true, true) => Matrix::Float(DiscountedDistances { dist: madani_reduce_as::<f64>(inst).naive() }),
    };
    let wall = start.elapsed();
    let algo = match (float, naive) {
        (false, false) => "dapsp",
        (true, false) => "dapsp-float",
        (false, true) => "dapsp-naive",
        (true, true) => "dapsp-naive-float",
    };
    let report = RunReport {
        id: id.into(),
        algo: algo.into(),
        n: inst.n(),
        m: inst.m(),
        seed: 0,
        param: if naive { String::new() } else { format!("d={d}") },
        outcome: Outcome::Distances,
        wall,
        counters: counters::snapshot(),
        attempts: 1,
    };
    (matrix, report)
}

/// Relative tolerance for float matrices against the exact baseline.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Compares against the exact naive baseline; exact mode demands equality.
pub fn check_dapsp(inst: &UniformInstance, got: &Matrix) -> Result<(), CliError> {
    let want = naive_distances(inst);
    for s in 0..inst.n() {
        for t in 0..inst.n() {
            let w = want.get(s, t);
            let ok = match got {
                Matrix::Exact(d) => d.get(s, t) == w,
                Matrix::Float(d) => match (d.get(s, t), w) {
                    (None, None) => true,
                    (Some(a), Some(b)) => {
                        let b = b.to_f64();
                        (a - b).abs() <= FLOAT_TOLERANCE * b.abs().max(1.0)
                    }
                    _ => false,
                },
            };
            if !ok {
                return Err(CliError::Mismatch(format!("distance from {} to {} differs from the baseline", s + 1, t + 1)));
            }
        }
    }
    Ok(())
}
