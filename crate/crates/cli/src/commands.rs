use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use steiner_core::branch::{balance, heuristic_decompose, parse_decomposition, BranchDecomposition};
use steiner_core::io::{
    emit_result, generate_grid_instance, generate_planar_instance, parse_instance, serialize_instance, Instance,
    LengthDist,
};
use steiner_core::oracle::{brute_force_opt, OracleLimits};
use steiner_core::pipeline::{run_pipeline, DecompositionSource, Mode, PipelineConfig, PipelineError};

use crate::{CliError, DecomposeArgs, Format, GenerateArgs, SolveArgs};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_decomposition(path: &Path) -> Result<BranchDecomposition, CliError> {
    parse_decomposition(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Infeasible(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub(crate) fn solve(a: SolveArgs) -> Result<(), CliError> {
    let inst = load_instance(&a.input)?;
    let mode = Mode::from(a.mode);
    let mut cfg = PipelineConfig {
        epsilon: a.epsilon,
        delta: a.delta,
        p: a.p,
        c: a.c,
        mode,
        seed: a.seed,
        keep_artifacts: a.dot.is_some() || a.dump_tables.is_some(),
        ..PipelineConfig::default()
    };
    if let Some(limit) = a.table_limit {
        cfg.table_limit = limit;
    }
    if let Some(path) = &a.decomposition {
        cfg.decomposition = DecompositionSource::Given(load_decomposition(path)?);
    }
    let out = run_pipeline(&inst.graph, &inst.demands, &cfg)?;
    let mut record = out.record;
    if a.oracle {
        match brute_force_opt(&inst.graph, &inst.demands, OracleLimits::default()) {
            Ok(r) => record = record.with_oracle(r.opt),
            Err(e) => eprintln!("warning: oracle skipped: {e}"),
        }
    }
    if let Some(path) = &a.dot {
        match &out.artifacts.decomposition_dot {
            Some(dot) => write(path, dot)?,
            None => eprintln!(
                "warning: mode {mode} builds no decomposition of the input graph; {} not written",
                path.display()
            ),
        }
    }
    if let Some(path) = &a.dump_tables {
        let mut text = String::new();
        for (i, run) in out.artifacts.dp_runs.iter().enumerate() {
            let _ = writeln!(
                text,
                "# run {i}: solution of {} edges, width {}, {} unit edges, largest table {}",
                run.edges.len(),
                run.width,
                run.unit_edges,
                run.max_table
            );
            if let Some(d) = &run.decomposition_text {
                let _ = writeln!(text, "# decomposition {d}");
            }
            text.push_str(run.table_dump.as_deref().unwrap_or(""));
            text.push('\n');
        }
        write(path, &text)?;
    }
    let json = emit_result(&record);
    if let Some(path) = &a.emit_json {
        write(path, &json)?;
    }
    println!("{json}");
    Ok(())
}

pub(crate) fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let dist = LengthDist::Uniform(a.max_length);
    let inst = if a.diagonals > 0.0 {
        generate_planar_instance(a.rows, a.cols, a.demands, a.diagonals, dist, a.seed)
    } else {
        generate_grid_instance(a.rows, a.cols, a.demands, dist, a.seed)
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let text = serialize_instance(&inst);
    match &a.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn decompose(a: DecomposeArgs) -> Result<(), CliError> {
    let inst = load_instance(&a.input)?;
    let g = &inst.graph;
    let mut bd = match &a.decomposition {
        Some(path) => load_decomposition(path)?,
        None => heuristic_decompose(g),
    };
    bd.validate(g).map_err(|e| CliError::Input(format!("decomposition: {e}")))?;
    if a.balanced {
        bd = balance(&bd).0;
    }
    eprintln!("width {}", bd.width(g));
    let text = match a.format {
        Format::Dot => bd.to_dot(g),
        Format::Text => bd.to_text() + "\n",
    };
    match &a.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
