//! Benchmark suites: one generated instance and one solver per line.
//!
//! ```text
//! # <algo> <generator> n=<int> m=<int> seed=<int> [h=<int|n>] [d=<int|auto>] [len=<int>] [gamma=<p/q>]
//! tradeoff planted-long-cycle n=200 m=400 seed=1 h=32
//! dapsp-float dapsp-random n=500 m=2000 seed=1 d=auto
//! ```
//!
//! `algo` is `simple`, `tradeoff`, `dapsp`, `dapsp-naive`, or either of the
//! last two with a `-float` suffix.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use m2vpi::dapsp::Branching;
use m2vpi::gen::GenKind;

use crate::report::RunReport;
use crate::{parse_h, run_dapsp, run_gen, run_solve, uniform_instance, Algo, CliError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellAlgo {
    Solve(Algo),
    Dapsp { d: Branching, float: bool, naive: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub algo: CellAlgo,
    pub kind: GenKind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub len: Option<usize>,
    pub gamma: Option<String>,
}

impl Cell {
    pub fn id(&self) -> String {
        format!("{}-{}-{}-{}", self.kind, self.n, self.m, self.seed)
    }
}

fn suite_error(line: usize, message: String) -> CliError {
    CliError::Usage(format!("suite line {line}: {message}"))
}

pub fn parse_suite(text: &str) -> Result<Vec<Cell>, CliError> {
    let mut cells = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |m: String| suite_error(line, m);
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(err("expected `<algo> <generator> key=value ...`".into()));
        }
        let kind: GenKind = toks[1].parse().map_err(err)?;
        let (mut n, mut m, mut seed, mut len, mut gamma) = (None, None, 0u64, None, None);
        let (mut h, mut d) = (None, Branching::Auto);
        for tok in &toks[2..] {
            let Some((key, value)) = tok.split_once('=') else {
                return Err(err(format!("expected key=value, found `{tok}`")));
            };
            let int = || value.parse::<usize>().map_err(|_| err(format!("bad {key} `{value}`")));
            match key {
                "n" => n = Some(int()?),
                "m" => m = Some(int()?),
                "seed" => seed = value.parse().map_err(|_| err(format!("bad seed `{value}`")))?,
                "len" => len = Some(int()?),
                "h" => h = Some(parse_h(value).map_err(err)?),
                "d" => d = value.parse().map_err(err)?,
                "gamma" => gamma = Some(value.to_string()),
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        let (Some(n), Some(m)) = (n, m) else {
            return Err(err("n= and m= are required".into()));
        };
        let algo = match toks[0] {
            "simple" => CellAlgo::Solve(Algo::Simple),
            "tradeoff" => CellAlgo::Solve(Algo::Tradeoff(h.flatten())),
            a => {
                let (base, float) = a.strip_suffix("-float").map_or((a, false), |b| (b, true));
                let naive = match base {
                    "dapsp" => false,
                    "dapsp-naive" => true,
                    _ => return Err(err(format!("unknown algorithm `{a}`"))),
                };
                CellAlgo::Dapsp { d, float, naive }
            }
        };
        cells.push(Cell { algo, kind, n, m, seed, len, gamma });
    }
    Ok(cells)
}

pub fn run_cell(cell: &Cell) -> Result<RunReport, CliError> {
    let g = run_gen(cell.kind, cell.n, cell.m, cell.seed, cell.len)?;
    let id = cell.id();
    match &cell.algo {
        CellAlgo::Solve(algo) => Ok(run_solve(&g, *algo, cell.seed, &id)?.1),
        CellAlgo::Dapsp { d, float, naive } => {
            let inst = uniform_instance(&g, cell.gamma.as_deref())?;
            let mut report = run_dapsp(&inst, *d, *float, *naive, &id).1;
            report.seed = cell.seed;
            Ok(report)
        }
    }
}

/// Runs the cells on `jobs` threads; reports come back in cell order.
pub fn run_suite(cells: &[Cell], jobs: usize) -> Result<Vec<RunReport>, CliError> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunReport, CliError>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let r = run_cell(cell);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every cell runs")).collect()
}
