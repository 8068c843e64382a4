//! One row of measurements per solver run.

use std::fmt;
use std::time::Duration;

use m2vpi::counters::Counters;

/// Bumped whenever the columns change.
pub const CSV_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 13] = [
    "id",
    "algo",
    "n",
    "m",
    "seed",
    "param",
    "outcome",
    "wall_ms",
    "relaxations",
    "locate_calls",
    "kcycle_calls",
    "peak_aux_cells",
    "attempts",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Feasible,
    Infeasible,
    /// A distance matrix from one of the discounted APSP runs.
    Distances,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Feasible => "feasible",
            Outcome::Infeasible => "infeasible",
            Outcome::Distances => "distances",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub id: String,
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// `h=<int>` or `d=<int|auto>`, empty when the algorithm has none.
    pub param: String,
    pub outcome: Outcome,
    pub wall: Duration,
    pub counters: Counters,
    /// Solver attempts; always 1 for the deterministic algorithms.
    pub attempts: usize,
}

impl RunReport {
    pub fn csv_header() -> String {
        format!("# m2vpi bench csv v{CSV_VERSION}\n{}\n", CSV_COLUMNS.join(","))
    }

    pub fn csv_row(&self) -> String {
        let c = &self.counters;
        format!(
            "{},{},{},{},{},{},{},{:.3},{},{},{},{},{}\n",
            self.id,
            self.algo,
            self.n,
            self.m,
            self.seed,
            self.param,
            self.outcome,
            self.wall.as_secs_f64() * 1e3,
            c.relaxations,
            c.locate_calls,
            c.kcycle_calls,
            c.peak_aux_cells,
            self.attempts
        )
    }
}

pub fn to_csv(reports: &[RunReport]) -> String {
    let mut out = RunReport::csv_header();
    for r in reports {
        out.push_str(&r.csv_row());
    }
    out
}
