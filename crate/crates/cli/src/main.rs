//! `steiner`: solve, generate and inspect planar Steiner forest instances.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use steiner_core::io::length_str;
use steiner_core::pipeline::Mode;
use steiner_core::Length;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "steiner", version, about = "Approximation algorithms for Steiner forest in planar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance and print its result record as JSON.
    Solve(SolveArgs),
    /// Print a random grid instance.
    Generate(GenerateArgs),
    /// Print a branch decomposition of an instance's graph.
    Decompose(DecomposeArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Gw,
    PcCluster,
    Ptas,
    DpOnly,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Gw => Mode::Gw,
            ModeArg::PcCluster => Mode::PcCluster,
            ModeArg::Ptas => Mode::Ptas,
            ModeArg::DpOnly => Mode::DpOnly,
        }
    }
}

/// Exact length from `3`, `7/2` or `0.25`.
fn parse_length(s: &str) -> Result<Length, String> {
    length_str::parse(s).ok_or_else(|| format!("`{s}` is not a number or fraction"))
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "ptas")]
    mode: ModeArg,
    #[arg(long, value_parser = parse_length, default_value = "1/2")]
    epsilon: Length,
    /// Clustering slack for the primal-dual phase.
    #[arg(long, value_parser = parse_length, default_value = "1/4")]
    delta: Length,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spanner length constant.
    #[arg(long, value_parser = parse_length, default_value = "1")]
    c: Length,
    /// Number of thinning classes (default: ceil(c / epsilon)).
    #[arg(long)]
    p: Option<usize>,
    /// Largest dynamic-program table before falling back to the primal-dual forest.
    #[arg(long)]
    table_limit: Option<usize>,
    /// Branch decomposition in nested-parentheses form (dp-only mode).
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Also write the result record to this file.
    #[arg(long)]
    emit_json: Option<PathBuf>,
    /// Attach the exact optimum and the measured ratio.
    #[arg(long)]
    oracle: bool,
    /// Write the balanced decomposition as Graphviz DOT (dp-only mode).
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write every dynamic-program table to this file.
    #[arg(long)]
    dump_tables: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    demands: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge lengths are drawn uniformly from 1..=max.
    #[arg(long, default_value_t = 10)]
    max_length: i64,
    /// Probability of a diagonal in each grid cell.
    #[arg(long, default_value_t = 0.0)]
    diagonals: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Text,
}

#[derive(Debug, clap::Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Start from this decomposition instead of the heuristic one.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Balance the decomposition first.
    #[arg(long)]
    balanced: bool,
    #[arg(long, value_enum, default_value = "dot")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Infeasible(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Generate(a) => commands::generate(a),
        Command::Decompose(a) => commands::decompose(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn arguments_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn modes_map_onto_pipeline_modes() {
        for (arg, mode) in ModeArg::value_variants().iter().zip(Mode::ALL) {
            assert_eq!(Mode::from(*arg), mode);
            assert_eq!(arg.to_possible_value().unwrap().get_name(), mode.name());
        }
    }

    #[test]
    fn solve_defaults() {
        let cli = Cli::try_parse_from(["steiner", "solve", "--input", "x.txt"]).unwrap();
        let Command::Solve(a) = cli.command else { panic!("not solve") };
        assert_eq!(a.mode, ModeArg::Ptas);
        assert_eq!(a.epsilon, Length::new(1, 2));
        assert_eq!(a.delta, Length::new(1, 4));
        assert!(!a.oracle);
    }

    #[test]
    fn epsilon_accepts_decimals_and_fractions() {
        assert_eq!(parse_length("0.25"), Ok(Length::new(1, 4)));
        assert_eq!(parse_length("1/3"), Ok(Length::new(1, 3)));
        assert!(parse_length("half").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Input(String::new()).exit_code(), 1);
        assert_eq!(CliError::Infeasible(String::new()).exit_code(), 2);
    }
}
