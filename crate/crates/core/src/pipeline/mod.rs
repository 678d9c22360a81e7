//! End-to-end driver: instance decomposition, spanner, thinning, the dynamic
//! program on each piece, lifting, and merging.

mod stages;

use std::fmt;
use std::str::FromStr;
use web_time::Instant;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branch::{balance, heuristic_decompose, BranchDecomposition, BranchError};
use crate::dp::{
    build_regions, contract_alpha, dp_solve, unit_length_reduce, ClusterTable, DpError, DpOptions, DpParameters,
    SimpleFilter,
};
use crate::graph::{Demand, EdgeId, Graph, Length};
use crate::io::{to_f64, Parameters, ResultRecord};
use crate::oracle::{brute_force_opt, OracleError, OracleLimits};
use crate::pc::{decompose_instance, gw_steiner_forest, GwError};

pub use stages::{bfs_levels, lift_stage, merge, spanner_stage, thinning_stage, IdentitySpanner, Spanner, Thinning};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Gw,
    PcCluster,
    Ptas,
    DpOnly,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Exact, Mode::Gw, Mode::PcCluster, Mode::Ptas, Mode::DpOnly];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Gw => "gw",
            Mode::PcCluster => "pc-cluster",
            Mode::Ptas => "ptas",
            Mode::DpOnly => "dp-only",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown mode {0:?}")]
pub struct UnknownMode(pub String);

impl FromStr for Mode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| UnknownMode(s.to_string()))
    }
}

#[derive(Clone, Debug, Default)]
pub enum DecompositionSource {
    #[default]
    Heuristic,
    Given(BranchDecomposition),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub epsilon: Length,
    pub delta: Length,
    /// Number of thinning classes; `ceil(c / epsilon)` when unset.
    pub p: Option<usize>,
    /// Spanner length constant.
    pub c: Length,
    pub mode: Mode,
    pub seed: u64,
    pub decomposition: DecompositionSource,
    pub table_limit: usize,
    /// Keep decompositions and table dumps of every dynamic-program run.
    pub keep_artifacts: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            epsilon: Length::new(1, 2),
            delta: Length::new(1, 4),
            p: None,
            c: Length::one(),
            mode: Mode::Ptas,
            seed: 0,
            decomposition: DecompositionSource::Heuristic,
            table_limit: DpOptions::default().table_limit,
            keep_artifacts: false,
        }
    }
}

impl PipelineConfig {
    pub fn new(mode: Mode, epsilon: Length) -> Self {
        Self { mode, epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.epsilon <= Length::zero() || self.epsilon > Length::one() {
            return bad("epsilon must lie in (0, 1]");
        }
        if self.delta <= Length::zero() {
            return bad("delta must be positive");
        }
        if self.c <= Length::zero() {
            return bad("c must be positive");
        }
        if self.p == Some(0) {
            return bad("p must be at least 1");
        }
        if matches!(self.decomposition, DecompositionSource::Given(_)) && self.mode != Mode::DpOnly {
            return bad("a decomposition file is only accepted in dp-only mode");
        }
        Ok(())
    }

    pub fn thinning_count(&self) -> usize {
        self.p.unwrap_or_else(|| {
            let q = self.c / self.epsilon;
            q.numer().div_ceil(q.denom()).to_usize().unwrap_or(usize::MAX).max(1)
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("demand {0:?} cannot be satisfied")]
    Infeasible(Demand),
    #[error("demand {0:?} names a vertex outside the graph")]
    UnknownVertex(Demand),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("decomposition: {0}")]
    Decomposition(#[from] BranchError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("dynamic program: {0}")]
    Dp(DpError),
}

impl From<GwError> for PipelineError {
    fn from(e: GwError) -> Self {
        match e {
            GwError::Infeasible(d) => PipelineError::Infeasible(d),
            GwError::UnknownVertex(d) => PipelineError::UnknownVertex(d),
        }
    }
}

impl From<DpError> for PipelineError {
    fn from(e: DpError) -> Self {
        match e {
            DpError::Decomposition(b) => PipelineError::Decomposition(b),
            other => PipelineError::Dp(other),
        }
    }
}

/// Output of one dynamic-program run, on the graph it was given.
#[derive(Clone, Debug)]
pub struct DpRun {
    pub edges: Vec<EdgeId>,
    pub params: DpParameters,
    /// Width of the decomposition the table was built on.
    pub width: usize,
    pub unit_edges: usize,
    pub max_table: usize,
    pub checked: usize,
    pub rejected: usize,
    pub total_radius: u64,
    /// Text form of the edgelet decomposition and the per-cluster dump.
    pub decomposition_text: Option<String>,
    pub table_dump: Option<String>,
}

/// Rounds `g` to unit lengths, expands the balanced form of `bd`, and runs
/// the dynamic program restricted to simple configurations.
pub fn dp_stage(
    g: &Graph,
    demands: &[Demand],
    bd: &BranchDecomposition,
    cfg: &PipelineConfig,
) -> Result<DpRun, PipelineError> {
    bd.validate(g)?;
    let (balanced, _) = balance(bd);
    let unit = unit_length_reduce(g, demands, cfg.epsilon, cfg.c);
    let ubd = unit.expand_decomposition(&balanced);
    let width = ubd.width(&unit.graph);
    let params = DpParameters::for_epsilon(cfg.epsilon, cfg.c, width, unit.graph.num_edges());
    let clusters = ClusterTable::build(&unit.graph, &ubd, &unit.demands);
    let layers = contract_alpha(&unit.graph, &ubd, params.alpha);
    let cover = build_regions(&unit.graph, &ubd, &clusters, &layers, params.beta);
    let mut filter = SimpleFilter::new(&clusters, &cover, params.gamma);
    let table = dp_solve(&unit.graph, &ubd, &unit.demands, &mut filter, DpOptions { table_limit: cfg.table_limit })?;
    let edges = unit.lift(g, &table.reconstruct(&ubd), demands);
    Ok(DpRun {
        edges,
        width,
        unit_edges: unit.graph.num_edges(),
        max_table: table.max_table(),
        checked: filter.checked,
        rejected: filter.rejected,
        total_radius: layers.total_radius(),
        decomposition_text: cfg.keep_artifacts.then(|| ubd.to_text()),
        table_dump: cfg.keep_artifacts.then(|| table.dump(&ubd)),
        params,
    })
}

/// Everything a run produces besides the record.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    /// Balanced decomposition handed to the dynamic program, as DOT over
    /// the graph it decomposes. Only for dp-only runs.
    pub decomposition_dot: Option<String>,
    pub dp_runs: Vec<DpRun>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub record: ResultRecord,
    pub artifacts: Artifacts,
}

fn check_demands(g: &Graph, demands: &[Demand]) -> Result<(), PipelineError> {
    if let Some(&d) = demands.iter().find(|d| !g.has_vertex(d.s) || !g.has_vertex(d.t)) {
        return Err(PipelineError::UnknownVertex(d));
    }
    g.first_disconnected(demands).map_or(Ok(()), |d| Err(PipelineError::Infeasible(d)))
}

/// Running maxima and sums over the dynamic-program runs of one solve.
#[derive(Default)]
struct Tally {
    runs: usize,
    fallbacks: usize,
    width: usize,
    max_table: usize,
    unit_edges: usize,
    checked: usize,
    rejected: usize,
    thinned: Length,
    additive: Length,
    params: Option<DpParameters>,
}

impl Tally {
    fn add(&mut self, r: &DpRun) {
        self.runs += 1;
        self.width = self.width.max(r.width);
        self.max_table = self.max_table.max(r.max_table);
        self.unit_edges += r.unit_edges;
        self.checked += r.checked;
        self.rejected += r.rejected;
        if self.params.as_ref().is_none_or(|p| p.w <= r.params.w) {
            self.params = Some(r.params.clone());
        }
    }
}

/// Solves one piece of a decomposed instance: spanner, thinning, dynamic
/// program on the contracted graph, lifting. Falls back to the primal-dual
/// forest when a table outgrows the limit.
fn solve_piece(
    g: &Graph,
    demands: &[Demand],
    cfg: &PipelineConfig,
    tally: &mut Tally,
    art: &mut Artifacts,
) -> Result<Vec<EdgeId>, PipelineError> {
    if demands.is_empty() {
        return Ok(Vec::new());
    }
    let g1 = spanner_stage(g, demands, cfg.epsilon, &IdentitySpanner);
    let thin = thinning_stage(&g1, cfg.thinning_count());
    let g2 = &thin.contracted.graph;
    let d2 = thin.map_demands(demands);
    tally.thinned += g1.length_of(&thin.s);
    tally.additive += cfg.epsilon * g2.total_length() / cfg.c + g1.length_of(&thin.s);
    let bd = heuristic_decompose(g2);
    let sol2 = match dp_stage(g2, &d2, &bd, cfg) {
        Ok(run) => {
            tally.add(&run);
            let edges = run.edges.clone();
            if cfg.keep_artifacts {
                art.dp_runs.push(run);
            }
            edges
        }
        Err(PipelineError::Dp(DpError::TableLimit { .. })) => {
            tally.fallbacks += 1;
            gw_steiner_forest(g2, &d2)?.forest
        }
        Err(e) => return Err(e),
    };
    Ok(lift_stage(&sol2, &thin.s, demands, &g1))
}

pub fn run_pipeline(g: &Graph, demands: &[Demand], cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    let start = Instant::now();
    cfg.validate()?;
    check_demands(g, demands)?;
    let mut art = Artifacts::default();
    let mut tally = Tally::default();
    let mut meas: Vec<(&str, f64)> = Vec::new();
    let mut params = Parameters { epsilon: Some(to_f64(cfg.epsilon)), ..Parameters::default() };

    let edges = match cfg.mode {
        Mode::Exact => brute_force_opt(g, demands, OracleLimits::default())?.edges,
        Mode::Gw => {
            let r = gw_steiner_forest(g, demands)?;
            meas.push(("dual_lower_bound", to_f64(r.dual)));
            r.forest
        }
        Mode::PcCluster | Mode::Ptas => {
            params.delta = Some(to_f64(cfg.delta));
            let dec = decompose_instance(g, demands, cfg.epsilon, cfg.delta)?;
            meas.push(("subinstances", dec.parts.len() as f64));
            meas.push(("nesting_depth", dec.nesting_depth() as f64));
            meas.push(("max_edge_multiplicity", dec.max_edge_multiplicity() as f64));
            meas.push(("approx_length", to_f64(g.length_of(&dec.approx))));
            let mut parts = Vec::with_capacity(dec.parts.len());
            for part in dec.parts.iter().filter(|p| !p.demands.is_empty()) {
                let loc = part.local(g);
                let sol = match cfg.mode {
                    Mode::Ptas => solve_piece(&loc.graph, &loc.demands, cfg, &mut tally, &mut art)?,
                    _ => gw_steiner_forest(&loc.graph, &loc.demands)?.forest,
                };
                parts.push(loc.to_input(&sol));
            }
            merge(g, &parts, demands)
        }
        Mode::DpOnly => {
            let bd = match &cfg.decomposition {
                DecompositionSource::Heuristic => heuristic_decompose(g),
                DecompositionSource::Given(bd) => bd.clone(),
            };
            bd.validate(g)?;
            if cfg.keep_artifacts {
                art.decomposition_dot = Some(balance(&bd).0.to_dot(g));
            }
            meas.push(("input_width", bd.width(g) as f64));
            tally.additive = cfg.epsilon * g.total_length() / cfg.c;
            let run = dp_stage(g, demands, &bd, cfg)?;
            tally.add(&run);
            let edges = run.edges.clone();
            if cfg.keep_artifacts {
                art.dp_runs.push(run);
            }
            edges
        }
    };

    if matches!(cfg.mode, Mode::Ptas | Mode::DpOnly) {
        if cfg.mode == Mode::Ptas {
            params.p = Some(cfg.thinning_count() as u64);
            meas.push(("thinned_length", to_f64(tally.thinned)));
            meas.push(("dp_fallbacks", tally.fallbacks as f64));
        }
        meas.push(("dp_runs", tally.runs as f64));
        meas.push(("width", tally.width as f64));
        meas.push(("max_table", tally.max_table as f64));
        meas.push(("unit_edges", tally.unit_edges as f64));
        meas.push(("configs_checked", tally.checked as f64));
        meas.push(("configs_rejected", tally.rejected as f64));
        meas.push(("additive_budget", to_f64(tally.additive)));
        if let Some(p) = &tally.params {
            params.alpha = Some(to_f64(p.alpha));
            params.beta = Some(to_f64(p.beta));
            params.gamma = Some(p.gamma);
        }
    }

    let feasible = g.is_feasible(&edges, demands);
    let mut record = ResultRecord::new(cfg.mode.name(), g, &edges, feasible);
    record.parameters = params;
    record.measurements = meas.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    record.measurements.insert("seed".into(), cfg.seed as f64);
    record.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(PipelineOutput { record, artifacts: art })
}

/// Runs the configured mode and returns its record.
pub fn run_ptas(g: &Graph, demands: &[Demand], cfg: &PipelineConfig) -> Result<ResultRecord, PipelineError> {
    run_pipeline(g, demands, cfg).map(|o| o.record)
}

/// Largest length the configured mode may return given the optimum:
/// `(1 + eps) OPT + additive_budget` for ptas, `OPT + additive_budget` for
/// dp-only, twice the optimum for the primal-dual modes, the optimum for
/// exact. `None` when a table fell back to the primal-dual forest.
pub fn ledger_bound(record: &ResultRecord, opt: Length) -> Option<f64> {
    let opt = to_f64(opt);
    let eps = record.parameters.epsilon.unwrap_or(0.0);
    let add = record.measurements.get("additive_budget").copied().unwrap_or(0.0);
    match record.algorithm.as_str() {
        "exact" => Some(opt),
        "gw" => Some(2.0 * opt),
        "pc-cluster" => Some(2.0 * (1.0 + eps) * opt),
        "ptas" if record.measurements.get("dp_fallbacks").copied().unwrap_or(0.0) == 0.0 => {
            Some((1.0 + eps) * opt + add)
        }
        "dp-only" => Some(opt + add),
        _ => None,
    }
}
