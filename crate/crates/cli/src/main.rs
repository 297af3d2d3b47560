//! Command-line front end: trains agents, benchmarks both algorithms over
//! seed sweeps, and renders worlds, writing all artifacts as files.
//!
//! Exit status is 0 on success, 1 on I/O or data-file failures, and 2 on
//! usage errors (including unknown environment ids and out-of-range
//! hyperparameters). Seeded subcommands are fully reproducible: repeated
//! invocations write byte-identical files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gymnav_core::agents::{choose_action, AgentConfig, AgentError, Algorithm, QTable};
use gymnav_core::environment::EnvError;
use gymnav_core::harness::{
    comparison_csv, interval_averages, intervals_csv, learning_onset, run_csv, train, train_many,
    Comparison, ComparisonRow, HarnessError, IntervalMean, TrainOutput,
};
use gymnav_core::plot::{learning_curve_svg, series_chart_svg, world_svg, Series,
    DEFAULT_SMOOTHING_WINDOW};
use gymnav_core::registry::Registry;
use gymnav_core::rng::Rng64;
use gymnav_core::vehicle::RobotPose;

/// Episodes per averaging block in interval tables.
const INTERVAL: u32 = 200;

#[derive(Parser)]
#[command(
    name = "gymnav",
    version,
    about = "Tabular TD learning on 2D lidar navigation tracks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered environments.
    ListEnvs,
    /// Train one agent and write run.csv, intervals.csv, curve.svg and
    /// qtable.txt into --out.
    Train(TrainArgs),
    /// Train both algorithms across several seeds, write per-run CSVs plus
    /// a combined table and plot, and print the comparison.
    Benchmark(BenchmarkArgs),
    /// Render a world to SVG, optionally overlaying a greedy rollout.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    #[value(name = "qlearning")]
    QLearning,
    #[value(name = "sarsa")]
    Sarsa,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::QLearning => Algorithm::QLearning,
            AlgoArg::Sarsa => Algorithm::Sarsa,
        }
    }
}

#[derive(Args)]
struct HyperArgs {
    /// Learning rate.
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Discount factor.
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    /// Initial exploration rate.
    #[arg(long, default_value_t = 0.9)]
    epsilon: f64,
    /// Multiplicative exploration decay per episode.
    #[arg(long, default_value_t = 0.9986)]
    decay: f64,
    /// Exploration floor.
    #[arg(long, default_value_t = 0.05)]
    eps_min: f64,
}

impl HyperArgs {
    fn config(&self) -> Result<AgentConfig, CliError> {
        let config = AgentConfig {
            alpha: self.alpha,
            gamma: self.gamma,
            epsilon0: self.epsilon,
            decay: self.decay,
            eps_min: self.eps_min,
        };
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Environment id (see list-envs).
    #[arg(long)]
    env: String,
    /// Learning algorithm.
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Number of training episodes.
    #[arg(long, default_value_t = 3000)]
    episodes: u32,
    /// Step cap per episode.
    #[arg(long, default_value_t = 1500)]
    max_steps: u32,
    /// Seed for the run's random generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Environment id (see list-envs).
    #[arg(long)]
    env: String,
    /// Number of training episodes per run.
    #[arg(long, default_value_t = 3000)]
    episodes: u32,
    /// Step cap per episode.
    #[arg(long, default_value_t = 1500)]
    max_steps: u32,
    /// Number of seeds per algorithm (seeds 0..k).
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// Worker threads for the sweep; results do not depend on this.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Environment id (see list-envs).
    #[arg(long)]
    env: String,
    /// Q-table file; when given, one greedy rollout is drawn (max 1500
    /// steps).
    #[arg(long)]
    qtable: Option<PathBuf>,
    /// Seed for greedy tie-breaking in the rollout.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn env_error(e: EnvError) -> CliError {
    match e {
        EnvError::UnknownEnv { .. } | EnvError::InvalidConfig(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn harness_error(e: HarnessError) -> CliError {
    match e {
        HarnessError::Env(inner) => env_error(inner),
        HarnessError::Agent(AgentError::InvalidConfig(msg)) => CliError::Usage(msg),
        other => CliError::Runtime(other.to_string()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Builtin environments plus any world files from $GYMNAV_WORLDS.
fn build_registry() -> Result<Registry, CliError> {
    let mut registry = Registry::builtin();
    if let Ok(dir) = std::env::var("GYMNAV_WORLDS") {
        if !dir.is_empty() {
            registry.add_worlds_dir(Path::new(&dir)).map_err(|e| {
                CliError::Runtime(format!("loading GYMNAV_WORLDS ({dir}): {e}"))
            })?;
        }
    }
    Ok(registry)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListEnvs => list_envs(),
        Command::Train(args) => train_cmd(&args),
        Command::Benchmark(args) => benchmark_cmd(&args),
        Command::Render(args) => render_cmd(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

fn list_envs() -> Result<(), CliError> {
    let registry = build_registry()?;
    for entry in registry.entries() {
        println!(
            "{}\t{}\t{}",
            entry.id(),
            entry.world().name(),
            entry.description()
        );
    }
    Ok(())
}

fn check_counts(episodes: u32, max_steps: u32) -> Result<(), CliError> {
    if episodes < 1 {
        return Err(CliError::Usage("--episodes must be at least 1".to_string()));
    }
    if max_steps < 1 {
        return Err(CliError::Usage("--max-steps must be at least 1".to_string()));
    }
    Ok(())
}

fn make_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn train_cmd(args: &TrainArgs) -> Result<(), CliError> {
    check_counts(args.episodes, args.max_steps)?;
    let config = args.hyper.config()?;
    let registry = build_registry()?;
    let algorithm: Algorithm = args.algo.into();
    let output = train(
        &registry,
        &args.env,
        algorithm,
        &config,
        args.episodes,
        args.max_steps,
        args.seed,
    )
    .map_err(harness_error)?;
    make_out_dir(&args.out)?;
    let intervals = interval_averages(&output.log, INTERVAL).map_err(harness_error)?;
    write_file(&args.out.join("run.csv"), &run_csv(&output.log.episodes))?;
    write_file(&args.out.join("intervals.csv"), &intervals_csv(&intervals))?;
    write_file(
        &args.out.join("curve.svg"),
        &learning_curve_svg(&output.log, DEFAULT_SMOOTHING_WINDOW),
    )?;
    write_file(&args.out.join("qtable.txt"), &output.qtable.to_text())?;
    let last = intervals.last().expect("at least one interval");
    println!(
        "{} on {}: {} episodes, seed {}, mean reward {:.1} over episodes {}-{}",
        algorithm.name(),
        args.env,
        args.episodes,
        args.seed,
        last.mean,
        last.start,
        last.end
    );
    Ok(())
}

/// Element-wise mean of per-seed interval tables (all share one grid).
fn average_intervals(tables: &[Vec<IntervalMean>]) -> Vec<IntervalMean> {
    let rows = tables[0].len();
    (0..rows)
        .map(|i| IntervalMean {
            start: tables[0][i].start,
            end: tables[0][i].end,
            mean: tables.iter().map(|t| t[i].mean).sum::<f64>() / tables.len() as f64,
        })
        .collect()
}

/// Per-episode cumulative reward averaged across runs.
fn average_curve(outputs: &[&TrainOutput]) -> Vec<f64> {
    let n = outputs[0].log.episodes.len();
    (0..n)
        .map(|i| {
            outputs
                .iter()
                .map(|o| o.log.episodes[i].cumulative_reward)
                .sum::<f64>()
                / outputs.len() as f64
        })
        .collect()
}

fn benchmark_cmd(args: &BenchmarkArgs) -> Result<(), CliError> {
    check_counts(args.episodes, args.max_steps)?;
    if args.seeds < 1 {
        return Err(CliError::Usage("--seeds must be at least 1".to_string()));
    }
    if args.jobs < 1 {
        return Err(CliError::Usage("--jobs must be at least 1".to_string()));
    }
    let config = args.hyper.config()?;
    let registry = build_registry()?;
    let runs: Vec<(Algorithm, u64)> = [Algorithm::QLearning, Algorithm::Sarsa]
        .into_iter()
        .flat_map(|algo| (0..args.seeds).map(move |seed| (algo, seed)))
        .collect();
    let outputs = train_many(
        &registry,
        &args.env,
        &runs,
        &config,
        args.episodes,
        args.max_steps,
        args.jobs,
    )
    .map_err(harness_error)?;
    make_out_dir(&args.out)?;

    let mut per_algo_intervals: Vec<Vec<Vec<IntervalMean>>> = vec![Vec::new(), Vec::new()];
    let mut per_algo_outputs: Vec<Vec<&TrainOutput>> = vec![Vec::new(), Vec::new()];
    for ((algorithm, seed), output) in runs.iter().zip(&outputs) {
        write_file(
            &args.out.join(format!("run_{}_{}.csv", algorithm.name(), seed)),
            &run_csv(&output.log.episodes),
        )?;
        let slot = match algorithm {
            Algorithm::QLearning => 0,
            Algorithm::Sarsa => 1,
        };
        per_algo_intervals[slot]
            .push(interval_averages(&output.log, INTERVAL).map_err(harness_error)?);
        per_algo_outputs[slot].push(output);
    }
    let ql_means = average_intervals(&per_algo_intervals[0]);
    let sa_means = average_intervals(&per_algo_intervals[1]);
    let comparison = Comparison {
        label_a: Algorithm::QLearning.name().to_string(),
        label_b: Algorithm::Sarsa.name().to_string(),
        rows: ql_means
            .iter()
            .zip(&sa_means)
            .map(|(a, b)| ComparisonRow {
                start: a.start,
                end: a.end,
                mean_a: a.mean,
                mean_b: b.mean,
            })
            .collect(),
        onset_a: learning_onset(&ql_means),
        onset_b: learning_onset(&sa_means),
    };
    write_file(&args.out.join("benchmark.csv"), &comparison_csv(&comparison))?;
    let svg = series_chart_svg(
        &[
            Series {
                label: format!("{} (mean of {} seeds)", Algorithm::QLearning.name(), args.seeds),
                color: "#2244cc".to_string(),
                values: average_curve(&per_algo_outputs[0]),
            },
            Series {
                label: format!("{} (mean of {} seeds)", Algorithm::Sarsa.name(), args.seeds),
                color: "#cc2222".to_string(),
                values: average_curve(&per_algo_outputs[1]),
            },
        ],
        "episode",
        "cumulated reward",
    );
    write_file(&args.out.join("benchmark.svg"), &svg)?;
    print!("{}", comparison.to_table());
    Ok(())
}

fn render_cmd(args: &RenderArgs) -> Result<(), CliError> {
    let registry = build_registry()?;
    let mut env = registry.make(&args.env).map_err(env_error)?;
    let trajectory = match &args.qtable {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Runtime(format!("cannot read {}: {e}", path.display()))
            })?;
            let q = QTable::parse(&text).map_err(|e| CliError::Runtime(e.to_string()))?;
            let mut rng = Rng64::new(args.seed);
            let mut state = env.reset().key();
            let mut poses: Vec<RobotPose> = vec![env.pose()];
            for _ in 0..1500 {
                let action = choose_action(&q, &state, 0.0, &mut rng);
                let result = env.step(action).map_err(env_error)?;
                poses.push(env.pose());
                if result.done {
                    break;
                }
                state = result.observation.key();
            }
            Some(poses)
        }
    };
    let world = env.config().world.clone();
    let svg = world_svg(&world, trajectory.as_deref());
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            make_out_dir(parent)?;
        }
    }
    write_file(&args.out, &svg)?;
    Ok(())
}
