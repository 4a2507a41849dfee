//! Sensor-network experiment harness: random scenario generation on the
//! unit square, layout synthesis per design mode, experiment runs with merit
//! tracking and broadcast-cost accounting, and deterministic CSV emission.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algorithms::abc::{augdgm_init, augdgm_step_with_hook};
use crate::algorithms::admm::{admm_step_with_hook, AdmmProblem, AdmmState};
use crate::algorithms::merit::{merit_v, MeritReference};
use crate::algorithms::push_sum::{diminishing_step, push_sum_step_with_hook, PushSumState};
use crate::algorithms::AlgoError;
use crate::design::{cost_report, DesignError, DesignMode, DesignSpec, EdgePolicy};
use crate::end_core::{EndLayout, Partition, StackedVector, StackedWeightOperator};
use crate::graph::{BipartiteGraph, DirectedGraph, GraphError, WeightMatrix};
use crate::problems::{
    LassoInstance, LeastSquaresInstance, LsAgent, ProblemError, SeparableCost,
};

const GENERATOR_NAME: &str = "chacha8";
const DIVERGENCE_LIMIT: f64 = 1e6;
const MAX_GENERATION_ATTEMPTS: u64 = 50;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(
        "scenario generation failed after {0} attempts; increase comm_radius_min or sensing_radius"
    )]
    GenerationFailed(u64),
    #[error("symmetrized communication graph is disconnected; increase comm_radius_min")]
    SymmetrizedDisconnected,
    #[error("failed to write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Layout(#[from] crate::end_core::LayoutError),
}

/// Random sensor/source scenario parameters on the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub agents: usize,
    pub sources: usize,
    pub sensing_radius: f64,
    pub comm_radius_min: f64,
    pub measurements_per_agent: usize,
    pub noise_variance: f64,
    /// When set, only this fraction of sources is active and the estimation
    /// problem carries an l1 penalty.
    pub active_fraction: Option<f64>,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Desk-scale regression setup (kept small for fast test runs). The radii
    /// are wider than the full-scale setup's: with only 8 sources and 20
    /// sensors the rejection rules (full source coverage, strong connectivity)
    /// are essentially never satisfiable below these values.
    pub fn regression_desk(seed: u64) -> Self {
        Self {
            agents: 20,
            sources: 8,
            sensing_radius: 0.35,
            comm_radius_min: 0.25,
            measurements_per_agent: 10,
            noise_variance: 0.1,
            active_fraction: None,
            seed,
        }
    }

    /// Full-scale regression setup.
    pub fn regression_paper(seed: u64) -> Self {
        Self {
            agents: 100,
            sources: 20,
            sensing_radius: 0.2,
            comm_radius_min: 0.1,
            ..Self::regression_desk(seed)
        }
    }

    /// Sparse-recovery setup: few agents, many sources, scalar measurements.
    pub fn lasso(seed: u64) -> Self {
        Self {
            agents: 10,
            sources: 20,
            sensing_radius: 0.8,
            comm_radius_min: 0.5,
            measurements_per_agent: 1,
            noise_variance: 0.1,
            active_fraction: Some(0.3),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let diag = 2.0_f64.sqrt();
        if self.agents == 0 || self.sources == 0 || self.measurements_per_agent == 0 {
            return Err(HarnessError::InvalidConfig("counts must be positive".into()));
        }
        if !(self.sensing_radius > 0.0 && self.sensing_radius < diag) {
            return Err(HarnessError::InvalidConfig(format!(
                "sensing_radius {} outside (0, sqrt(2))",
                self.sensing_radius
            )));
        }
        if !(self.comm_radius_min > 0.0 && self.comm_radius_min < diag) {
            return Err(HarnessError::InvalidConfig(format!(
                "comm_radius_min {} outside (0, sqrt(2))",
                self.comm_radius_min
            )));
        }
        if self.noise_variance < 0.0 {
            return Err(HarnessError::InvalidConfig("noise_variance must be >= 0".into()));
        }
        if let Some(f) = self.active_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(HarnessError::InvalidConfig(format!(
                    "active_fraction {f} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Parses a `key = value` config file; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::regression_desk(0);
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::InvalidConfig(format!("expected key = value: {line}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                HarnessError::InvalidConfig(format!("{key}: {e}"))
            };
            match key {
                "agents" => cfg.agents = value.parse().map_err(|e| bad(&e))?,
                "sources" => cfg.sources = value.parse().map_err(|e| bad(&e))?,
                "sensing_radius" => cfg.sensing_radius = value.parse().map_err(|e| bad(&e))?,
                "comm_radius_min" => cfg.comm_radius_min = value.parse().map_err(|e| bad(&e))?,
                "measurements_per_agent" => {
                    cfg.measurements_per_agent = value.parse().map_err(|e| bad(&e))?
                }
                "noise_variance" => cfg.noise_variance = value.parse().map_err(|e| bad(&e))?,
                "active_fraction" => {
                    cfg.active_fraction = Some(value.parse().map_err(|e| bad(&e))?)
                }
                "seed" => cfg.seed = value.parse().map_err(|e| bad(&e))?,
                other => {
                    return Err(HarnessError::InvalidConfig(format!("unknown key {other}")))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Gaussian draws via the polar (Marsaglia) transform, fixed once for
/// reproducibility of seeded runs.
struct GaussianSource<'a> {
    rng: &'a mut ChaCha8Rng,
    spare: Option<f64>,
}

impl<'a> GaussianSource<'a> {
    fn new(rng: &'a mut ChaCha8Rng) -> Self {
        Self { rng, spare: None }
    }

    fn sample(&mut self, std_dev: f64) -> f64 {
        if let Some(s) = self.spare.take() {
            return s * std_dev;
        }
        loop {
            let u = 2.0 * self.rng.gen::<f64>() - 1.0;
            let v = 2.0 * self.rng.gen::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f * std_dev;
            }
        }
    }
}

pub enum ScenarioProblem {
    LeastSquares(LeastSquaresInstance),
    Lasso(LassoInstance),
}

impl ScenarioProblem {
    pub fn cost(&self) -> &dyn SeparableCost {
        match self {
            Self::LeastSquares(p) => p,
            Self::Lasso(p) => p,
        }
    }

    pub fn admm(&self) -> &dyn AdmmProblem {
        match self {
            Self::LeastSquares(p) => p,
            Self::Lasso(p) => p,
        }
    }

    pub fn is_differentiable(&self) -> bool {
        matches!(self, Self::LeastSquares(_))
    }

    pub fn smoothness(&self) -> Option<f64> {
        match self {
            Self::LeastSquares(p) => Some(p.smoothness_constant()),
            Self::Lasso(_) => None,
        }
    }

    /// Centralized optimum and optimal value.
    pub fn reference(&self) -> Result<(DVector<f64>, f64), ProblemError> {
        match self {
            Self::LeastSquares(p) => p.reference(),
            Self::Lasso(p) => p.reference(),
        }
    }
}

pub struct Scenario {
    pub config: ScenarioConfig,
    pub partition: Partition,
    pub comm: DirectedGraph,
    pub interference: BipartiteGraph,
    pub problem: ScenarioProblem,
    pub true_signal: DVector<f64>,
    /// How many rejected draws preceded the accepted one.
    pub rejected_draws: u64,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Draws a scenario. The draw order inside one attempt is fixed: sensor
/// positions, source positions, per-sensor communication radii, sensing
/// matrices, true source signals, the active-source choice (sparse mode),
/// then measurement noise. Draws are rejected (seed incremented) until the
/// communication graph is strongly connected and every sensor observes at
/// least one source.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario, HarnessError> {
    config.validate()?;
    let n = config.agents;
    let p_count = config.sources;
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(attempt));
        let sensors: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let sources: Vec<(f64, f64)> =
            (0..p_count).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let radii: Vec<f64> = (0..n)
            .map(|_| config.comm_radius_min + 0.1 * rng.gen::<f64>())
            .collect();

        let mut interference_edges = Vec::new();
        let mut observed = vec![false; n];
        for (p, &sp) in sources.iter().enumerate() {
            for (i, &si) in sensors.iter().enumerate() {
                if dist(sp, si) <= config.sensing_radius {
                    interference_edges.push((p, i));
                    observed[i] = true;
                }
            }
        }
        let mut comm_edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && dist(sensors[i], sensors[j]) <= radii[i] {
                    comm_edges.push((i, j));
                }
            }
        }

        // sensing matrices: uniform entries, rows normalized
        let components_of: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                interference_edges
                    .iter()
                    .filter(|&&(_, j)| j == i)
                    .map(|&(p, _)| p)
                    .collect()
            })
            .collect();
        let mut outputs = Vec::with_capacity(n);
        for comps in &components_of {
            let cols = comps.len();
            let rows = config.measurements_per_agent;
            let mut h = DMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    h[(r, c)] = rng.gen::<f64>();
                }
                let norm = h.row(r).norm();
                if norm > 0.0 {
                    let scaled = h.row(r) / norm;
                    h.row_mut(r).copy_from(&scaled);
                }
            }
            outputs.push(h);
        }

        let mut signal = DVector::from_iterator(p_count, (0..p_count).map(|_| rng.gen::<f64>()));
        if let Some(fraction) = config.active_fraction {
            let active = ((fraction * p_count as f64).ceil() as usize).clamp(1, p_count);
            // Fisher-Yates choice of the active sources
            let mut order: Vec<usize> = (0..p_count).collect();
            for k in (1..p_count).rev() {
                let j = rng.gen_range(0..=k);
                order.swap(k, j);
            }
            let mut keep = vec![false; p_count];
            for &p in order.iter().take(active) {
                keep[p] = true;
            }
            for p in 0..p_count {
                if !keep[p] {
                    signal[p] = 0.0;
                }
            }
        }

        let mut gaussian = GaussianSource::new(&mut rng);
        let std_dev = config.noise_variance.sqrt();
        let mut agents = Vec::with_capacity(n);
        for (i, comps) in components_of.iter().enumerate() {
            let truth = DVector::from_iterator(comps.len(), comps.iter().map(|&p| signal[p]));
            let mut measurement = &outputs[i] * truth;
            for r in 0..measurement.len() {
                measurement[r] += gaussian.sample(std_dev);
            }
            agents.push(LsAgent {
                components: comps.clone(),
                output: outputs[i].clone(),
                measurement,
            });
        }

        if !observed.iter().all(|&b| b) {
            continue;
        }
        let comm = DirectedGraph::from_edges(0..n, comm_edges)?;
        if !comm.is_strongly_connected() {
            continue;
        }
        let interference = BipartiteGraph::from_edges(p_count, n, interference_edges)?;
        let partition = Partition::scalar(p_count).expect("positive source count");
        let ls = LeastSquaresInstance::new(partition.clone(), agents)?;
        let problem = if config.active_fraction.is_some() {
            ScenarioProblem::Lasso(LassoInstance::new(ls)?)
        } else {
            ScenarioProblem::LeastSquares(ls)
        };
        return Ok(Scenario {
            config: config.clone(),
            partition,
            comm,
            interference,
            problem,
            true_signal: signal,
            rejected_draws: attempt,
        });
    }
    Err(HarnessError::GenerationFailed(MAX_GENERATION_ATTEMPTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    PushSum,
    AugDgm,
    Admm,
}

impl Algorithm {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "push_sum" => Some(Self::PushSum),
            "augdgm" => Some(Self::AugDgm),
            "admm" => Some(Self::Admm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PushSum => "push_sum",
            Self::AugDgm => "augdgm",
            Self::Admm => "admm",
        }
    }

    /// Communication rounds per iteration under the broadcast cost model.
    pub fn rounds_per_iteration(&self) -> f64 {
        match self {
            Self::AugDgm => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignChoice {
    Standard,
    Customized,
}

impl DesignChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(Self::Standard),
            "customized" => Some(Self::Customized),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Customized => "customized",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StopRule {
    pub merit_threshold: f64,
    pub max_iterations: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { merit_threshold: 1e-2, max_iterations: 100_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub design: DesignChoice,
    pub stop: StopRule,
    /// ADMM relaxation step.
    pub alpha: f64,
    /// Fixed step for the gradient-tracking method; default `0.9 / L`.
    pub gamma: Option<f64>,
    /// Record a trace row every this many iterations (the final row is
    /// always recorded).
    pub record_every: usize,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, design: DesignChoice) -> Self {
        Self {
            algorithm,
            design,
            stop: StopRule::default(),
            alpha: 0.5,
            gamma: None,
            record_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub merit: f64,
    pub consensus_residual: f64,
    pub cumulative_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub generator: &'static str,
    pub seed: u64,
    pub algorithm: &'static str,
    pub design_mode: &'static str,
    /// True when the communication graph was symmetrized (mutual edges only)
    /// to satisfy the undirected-design requirement.
    pub symmetrized: bool,
    pub rows: Vec<TraceRow>,
    pub iterations_to_threshold: Option<usize>,
    pub total_cost: f64,
    pub memory: usize,
    pub diverged: bool,
    pub warnings: Vec<String>,
}

impl RunTrace {
    /// Deterministic CSV image: header, one row per record, then the summary
    /// as `#` comment lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,merit,consensus_residual,cum_cost\n");
        for row in &self.rows {
            writeln!(
                s,
                "{},{},{},{}",
                row.k, row.merit, row.consensus_residual, row.cumulative_cost
            )
            .unwrap();
        }
        writeln!(s, "# generator={}", self.generator).unwrap();
        writeln!(s, "# seed={}", self.seed).unwrap();
        writeln!(s, "# algorithm={}", self.algorithm).unwrap();
        writeln!(s, "# design_mode={}", self.design_mode).unwrap();
        writeln!(s, "# symmetrized={}", self.symmetrized).unwrap();
        match self.iterations_to_threshold {
            Some(k) => writeln!(s, "# iterations_to_threshold={k}").unwrap(),
            None => writeln!(s, "# iterations_to_threshold=none").unwrap(),
        }
        writeln!(s, "# total_cost={}", self.total_cost).unwrap();
        writeln!(s, "# memory={}", self.memory).unwrap();
        writeln!(s, "# diverged={}", self.diverged).unwrap();
        for w in &self.warnings {
            writeln!(s, "# warning={w}").unwrap();
        }
        s
    }
}

pub fn emit_csv(trace: &RunTrace, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, trace.to_csv())
        .map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

/// Builds the layout for the requested design mode and algorithm. The
/// subgradient push-sum runs on the directed graph as-is; the other two need
/// undirected connected design graphs, so the communication graph is reduced
/// to its mutual edges first.
pub fn synthesize_layout(
    scenario: &Scenario,
    run: &RunConfig,
) -> Result<(Arc<EndLayout>, bool), HarnessError> {
    let (comm, symmetrized) = match run.algorithm {
        Algorithm::PushSum => (scenario.comm.clone(), false),
        Algorithm::AugDgm | Algorithm::Admm => {
            let mutual = scenario.comm.mutual_edges();
            if !mutual.is_connected_undirected()? {
                return Err(HarnessError::SymmetrizedDisconnected);
            }
            (mutual, true)
        }
    };
    let mode = match (run.design, run.algorithm) {
        (DesignChoice::Standard, _) => DesignMode::Standard,
        (DesignChoice::Customized, Algorithm::PushSum) => DesignMode::SteinerDirected,
        (DesignChoice::Customized, _) => DesignMode::SteinerUndirected,
    };
    let spec = DesignSpec { mode, edge_policy: EdgePolicy::AllAvailable };
    let layout = spec.synthesize(&comm, &scenario.interference, &scenario.partition)?;
    Ok((Arc::new(layout), symmetrized))
}

fn uniform_weights(layout: &Arc<EndLayout>) -> Result<StackedWeightOperator, HarnessError> {
    let weights: Vec<WeightMatrix> = (0..layout.component_count())
        .map(|p| WeightMatrix::uniform_column_stochastic(&layout.design(p).with_self_loops()))
        .collect::<Result<_, _>>()?;
    Ok(StackedWeightOperator::new(layout.clone(), weights)?)
}

fn metropolis_weights(layout: &Arc<EndLayout>) -> Result<StackedWeightOperator, HarnessError> {
    let weights: Vec<WeightMatrix> = (0..layout.component_count())
        .map(|p| WeightMatrix::metropolis(layout.design(p)))
        .collect::<Result<_, _>>()?;
    Ok(StackedWeightOperator::new(layout.clone(), weights)?)
}

/// Runs one (scenario, design mode, algorithm) cell to the stopping rule,
/// tracking the copy-weighted merit against the centralized reference and
/// the cumulative broadcast cost.
pub fn run_experiment(scenario: &Scenario, run: &RunConfig) -> Result<RunTrace, HarnessError> {
    let (layout, symmetrized) = synthesize_layout(scenario, run)?;
    let report = cost_report(&layout);
    let cost_per_iteration =
        report.per_iteration_broadcast_cost * run.algorithm.rounds_per_iteration();
    let problem = scenario.problem.cost();
    let (y_star, f_star) = scenario.problem.reference()?;
    let reference = MeritReference::new(problem, layout.clone(), y_star, f_star)?;

    let mut trace = RunTrace {
        generator: GENERATOR_NAME,
        seed: scenario.config.seed,
        algorithm: run.algorithm.name(),
        design_mode: run.design.name(),
        symmetrized,
        rows: Vec::new(),
        iterations_to_threshold: None,
        total_cost: 0.0,
        memory: report.total_memory,
        diverged: false,
        warnings: Vec::new(),
    };

    let record = |k: usize,
                      y: &StackedVector,
                      cum_cost: f64,
                      trace: &mut RunTrace|
     -> Result<bool, HarnessError> {
        let merit = merit_v(y, problem, &reference)?;
        let hit = merit <= run.stop.merit_threshold;
        if (k % run.record_every.max(1) == 0) || hit || k == run.stop.max_iterations {
            trace.rows.push(TraceRow {
                k,
                merit,
                consensus_residual: y.consensus_residual(),
                cumulative_cost: cum_cost,
            });
        }
        Ok(hit)
    };

    let mut cum_cost = 0.0;
    let mut no_hook = |_: usize, _: usize, _: usize| {};
    match run.algorithm {
        Algorithm::PushSum => {
            let weights = uniform_weights(&layout)?;
            // The raw k^{-0.51} schedule starts at 1, far above 1/L for the
            // generated instances; scale it so the first step is safe.
            let scale = run.gamma.unwrap_or_else(|| match &scenario.problem {
                ScenarioProblem::LeastSquares(p) => 1.0 / p.smoothness_constant(),
                ScenarioProblem::Lasso(p) => 1.0 / p.least_squares().smoothness_constant(),
            });
            let mut state = PushSumState::new(StackedVector::zeros(layout.clone()));
            for k in 1..=run.stop.max_iterations {
                let gamma = scale * diminishing_step(k);
                state =
                    push_sum_step_with_hook(&state, &weights, problem, gamma, &mut no_hook)?;
                cum_cost += cost_per_iteration;
                if state.y.max_abs() > DIVERGENCE_LIMIT {
                    trace.diverged = true;
                    break;
                }
                if record(k, &state.y, cum_cost, &mut trace)? {
                    trace.iterations_to_threshold = Some(k);
                    break;
                }
            }
        }
        Algorithm::AugDgm => {
            let weights = metropolis_weights(&layout)?;
            let smoothness = scenario.problem.smoothness().unwrap_or(1.0);
            let gamma = run.gamma.unwrap_or(0.9 / smoothness);
            if !(gamma > 0.0 && gamma < 1.0 / smoothness) {
                trace
                    .warnings
                    .push(format!("gamma {gamma} outside (0, {}); no guarantee", 1.0 / smoothness));
            }
            if !scenario.problem.is_differentiable() {
                return Err(HarnessError::Algo(AlgoError::Problem(
                    ProblemError::NotDifferentiable,
                )));
            }
            let mut state = augdgm_init(&weights, problem)?;
            for k in 1..=run.stop.max_iterations {
                state = augdgm_step_with_hook(&state, &weights, problem, gamma, &mut no_hook)?;
                cum_cost += cost_per_iteration;
                if state.y.max_abs() > DIVERGENCE_LIMIT {
                    trace.diverged = true;
                    break;
                }
                if record(k, &state.y, cum_cost, &mut trace)? {
                    trace.iterations_to_threshold = Some(k);
                    break;
                }
            }
        }
        Algorithm::Admm => {
            let admm_problem = scenario.problem.admm();
            let mut state = AdmmState::new(layout.clone(), run.alpha)?;
            for k in 1..=run.stop.max_iterations {
                state = admm_step_with_hook(&state, admm_problem, &mut no_hook)?;
                cum_cost += cost_per_iteration;
                if state.estimates().max_abs() > DIVERGENCE_LIMIT {
                    trace.diverged = true;
                    break;
                }
                if record(k, state.estimates(), cum_cost, &mut trace)? {
                    trace.iterations_to_threshold = Some(k);
                    break;
                }
            }
        }
    }
    trace.total_cost = cum_cost;
    Ok(trace)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub seed: u64,
    pub design_mode: &'static str,
    pub algorithm: &'static str,
    pub iterations_to_threshold: Option<usize>,
    pub total_cost: f64,
    pub memory: usize,
}

/// Runs both design modes for each seed and collects summary rows.
pub fn sweep(
    base: &ScenarioConfig,
    seeds: &[u64],
    algorithm: Algorithm,
    stop: StopRule,
) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rows = Vec::new();
    for &seed in seeds {
        let config = ScenarioConfig { seed, ..base.clone() };
        let scenario = generate_scenario(&config)?;
        for design in [DesignChoice::Standard, DesignChoice::Customized] {
            let mut run = RunConfig::new(algorithm, design);
            run.stop = stop;
            run.record_every = usize::MAX; // summary only
            let trace = run_experiment(&scenario, &run)?;
            rows.push(SweepRow {
                seed,
                design_mode: design.name(),
                algorithm: algorithm.name(),
                iterations_to_threshold: trace.iterations_to_threshold,
                total_cost: trace.total_cost,
                memory: trace.memory,
            });
        }
    }
    Ok(rows)
}

pub fn sweep_summary_csv(base: &ScenarioConfig, rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "agents,sources,sensing_radius,comm_radius_min,seed,algorithm,design_mode,iters_to_threshold,total_cost,memory\n",
    );
    for r in rows {
        let iters = r
            .iterations_to_threshold
            .map(|k| k.to_string())
            .unwrap_or_else(|| "none".into());
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            base.agents,
            base.sources,
            base.sensing_radius,
            base.comm_radius_min,
            r.seed,
            r.algorithm,
            r.design_mode,
            iters,
            r.total_cost,
            r.memory
        )
        .unwrap();
    }
    s
}
