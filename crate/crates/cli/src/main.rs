use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use m2vpi::dapsp::Branching;
use m2vpi::gen::GenKind;
use m2vpi_cli::bench::{parse_suite, run_suite};
use m2vpi_cli::report::{to_csv, RunReport};
use m2vpi_cli::{
    answer_text, check_dapsp, exit_code, load_graph, read_file, run_dapsp, run_gen, run_solve, run_verify,
    uniform_instance, write_file, Algo, CliError, HArg, EXIT_ERROR, EXIT_FEASIBLE,
};

#[derive(Parser)]
#[command(name = "m2vpi", version, about = "Exact solvers for monotone two-variable systems and discounted APSP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Simple,
    Tradeoff,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance. Exit 0 with `x` lines, or 2 with a certificate.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "simple")]
        algo: AlgoArg,
        /// Path length parameter of the trade-off solver: an integer or `n`.
        #[arg(long, default_value = "n")]
        h: HArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the answer here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a one-row benchmark CSV to stderr.
        #[arg(long)]
        report: bool,
    },
    /// Generate a seeded instance.
    Gen {
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Planted cycle length for planted-long-cycle (default n).
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an answer file against an instance. Exit 0 or 2 as `solve` would.
    Verify { file: PathBuf, answer: PathBuf },
    /// Discounted all-pairs distances as a CSV matrix (`inf` when unreachable).
    Dapsp {
        file: PathBuf,
        /// Uniform discount; read from the edge gains when omitted.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value = "auto")]
        d: Branching,
        /// Use f64 instead of exact rationals.
        #[arg(long)]
        float: bool,
        /// Also run the exact naive baseline and compare.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite and print the CSV.
    Bench {
        suite: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve { file, algo, h, seed, out, report } => {
            let g = load_graph(&file)?;
            let algo = match algo {
                AlgoArg::Simple => Algo::Simple,
                AlgoArg::Tradeoff => Algo::Tradeoff(h.0),
            };
            let id = file.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
            let (outcome, rep) = run_solve(&g, algo, seed, &id)?;
            emit(out.as_deref(), &answer_text(&outcome))?;
            if report {
                eprint!("{}{}", RunReport::csv_header(), rep.csv_row());
            }
            Ok(exit_code(&outcome))
        }
        Command::Gen { kind, n, m, seed, len, out } => {
            let g = run_gen(kind, n, m, seed, len)?;
            emit(out.as_deref(), &g.to_text())?;
            Ok(EXIT_FEASIBLE)
        }
        Command::Verify { file, answer } => {
            let g = load_graph(&file)?;
            run_verify(&g, &read_file(&answer)?, &answer)
        }
        Command::Dapsp { file, gamma, d, float, check, out } => {
            let g = load_graph(&file)?;
            let inst = uniform_instance(&g, gamma.as_deref())?;
            let (matrix, _) = run_dapsp(&inst, d, float, false, "");
            if check {
                check_dapsp(&inst, &matrix)?;
                eprintln!("check: matches the naive baseline");
            }
            emit(out.as_deref(), &matrix.to_csv())?;
            Ok(EXIT_FEASIBLE)
        }
        Command::Bench { suite, jobs, out } => {
            let cells = parse_suite(&read_file(&suite)?)?;
            let reports = run_suite(&cells, jobs)?;
            emit(out.as_deref(), &to_csv(&reports))?;
            Ok(EXIT_FEASIBLE)
        }
    }
}

fn main() -> ExitCode {
    // clap would exit with 2 on bad arguments, which means infeasible here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
