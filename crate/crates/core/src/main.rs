use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use end_opt::design::{cost_report, DesignMode, DesignSpec, EdgePolicy};
use end_opt::harness::{
    emit_csv, generate_scenario, run_experiment, sweep, sweep_summary_csv, Algorithm,
    DesignChoice, RunConfig, ScenarioConfig, StopRule,
};

#[derive(Parser)]
#[command(name = "endopt", about = "Sparsity-aware distributed optimization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (key = value lines); defaults to the built-in
    /// desk-scale regression setup.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Full-scale setup (100 agents, 20 sources) instead of desk scale.
    #[arg(long)]
    paper_scale: bool,
    /// Sparse-recovery (l1) setup instead of regression.
    #[arg(long)]
    lasso: bool,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::from_text(&text)?
            }
            None if self.lasso => ScenarioConfig::lasso(0),
            None if self.paper_scale => ScenarioConfig::regression_paper(0),
            None => ScenarioConfig::regression_desk(0),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize estimate layouts and print their memory/broadcast costs.
    Design {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// standard | steiner_undirected | steiner_directed (default: all)
        #[arg(long)]
        design_mode: Option<String>,
    },
    /// Run one algorithm on one scenario and write a trace CSV.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// push_sum | augdgm | admm
        #[arg(long, default_value = "push_sum")]
        algorithm: String,
        /// standard | customized
        #[arg(long, default_value = "customized")]
        design_mode: String,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-2)]
        merit_threshold: f64,
        /// Output directory for the trace CSV.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run standard vs customized designs across seeds; write summary.csv.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "push_sum")]
        algorithm: String,
        /// Number of consecutive seeds starting at --seed (default 0).
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-2)]
        merit_threshold: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Design { scenario, design_mode } => {
            let cfg = scenario.resolve()?;
            let s = generate_scenario(&cfg)?;
            let modes: Vec<DesignMode> = match design_mode.as_deref() {
                Some(name) => vec![DesignMode::parse(name)
                    .with_context(|| format!("unknown design mode {name}"))?],
                None => vec![
                    DesignMode::Standard,
                    DesignMode::SteinerUndirected,
                    DesignMode::SteinerDirected,
                ],
            };
            for mode in modes {
                let comm = match mode {
                    DesignMode::SteinerUndirected => s.comm.mutual_edges(),
                    _ => s.comm.clone(),
                };
                let spec = DesignSpec { mode, edge_policy: EdgePolicy::AllAvailable };
                let layout = spec.synthesize(&comm, &s.interference, &s.partition)?;
                print!("{}", cost_report(&layout).text(mode.name()));
                println!();
            }
        }
        Command::Run { scenario, algorithm, design_mode, max_iters, merit_threshold, out } => {
            let cfg = scenario.resolve()?;
            let Some(algorithm) = Algorithm::parse(&algorithm) else {
                bail!("unknown algorithm {algorithm}");
            };
            let Some(design) = DesignChoice::parse(&design_mode) else {
                bail!("unknown design mode {design_mode}");
            };
            let s = generate_scenario(&cfg)?;
            let mut run = RunConfig::new(algorithm, design);
            run.stop = StopRule { merit_threshold, max_iterations: max_iters };
            run.record_every = (max_iters / 1000).max(1);
            let trace = run_experiment(&s, &run)?;
            fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            let path = out.join(format!(
                "trace_{}_{}_seed{}.csv",
                algorithm.name(),
                design.name(),
                cfg.seed
            ));
            emit_csv(&trace, &path)?;
            match trace.iterations_to_threshold {
                Some(k) => println!(
                    "reached merit {merit_threshold} at iteration {k} (cost {}); trace: {}",
                    trace.total_cost,
                    path.display()
                ),
                None => println!(
                    "threshold not reached in {max_iters} iterations (diverged: {}); trace: {}",
                    trace.diverged,
                    path.display()
                ),
            }
        }
        Command::Sweep {
            scenario,
            algorithm,
            seeds,
            max_iters,
            merit_threshold,
            out,
        } => {
            let cfg = scenario.resolve()?;
            let Some(algorithm) = Algorithm::parse(&algorithm) else {
                bail!("unknown algorithm {algorithm}");
            };
            let seed_list: Vec<u64> = (cfg.seed..cfg.seed + seeds).collect();
            let stop = StopRule { merit_threshold, max_iterations: max_iters };
            let rows = sweep(&cfg, &seed_list, algorithm, stop)?;
            fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            let path = out.join("summary.csv");
            fs::write(&path, sweep_summary_csv(&cfg, &rows))
                .with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
