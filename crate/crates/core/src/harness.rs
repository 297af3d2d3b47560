//! Training loops, run logs, and run statistics.
//!
//! A run is a sequence of episodes driven by one seeded generator. Given the
//! same environment id, algorithm, config, and seed, `train` reproduces the
//! exact same log and Q-table on every invocation.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::agents::{
    choose_action, decay_epsilon, q_learning_update, sarsa_update, AgentConfig, AgentError,
    Algorithm, QTable,
};
use crate::environment::{Action, EnvError, Environment};
use crate::registry::Registry;
use crate::rng::Rng64;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("run log is empty")]
    EmptyLog,
    #[error("interval length must be at least 1")]
    BadInterval,
    #[error("episode counts differ: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("csv line {line}: {message}")]
    MalformedCsv { line: usize, message: String },
}

/// Summary of one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub index: u32,
    /// Steps taken; in `[1, max_steps]`. Equals `max_steps` exactly when
    /// the episode did not crash.
    pub steps: u32,
    pub cumulative_reward: f64,
    /// Exploration rate in effect during this episode.
    pub epsilon: f64,
    pub crashed: bool,
}

/// Complete record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub env_id: String,
    pub algorithm: Algorithm,
    pub config: AgentConfig,
    pub seed: u64,
    pub episodes: Vec<EpisodeRecord>,
}

/// A finished run: its log plus the learned table.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub log: RunLog,
    pub qtable: QTable,
}

/// Runs a single episode, updating `q` after every transition.
///
/// Q-Learning selects an action, steps, and learns from the observed
/// transition immediately. Sarsa selects the follow-up action before
/// learning and then executes exactly that action on the next step, so the
/// learned `(s, a, r, s', a')` tuples match the behavior trace.
#[allow(clippy::too_many_arguments)]
pub fn run_episode(
    env: &mut Environment,
    algorithm: Algorithm,
    q: &mut QTable,
    config: &AgentConfig,
    epsilon: f64,
    index: u32,
    max_steps: u32,
    rng: &mut Rng64,
) -> Result<EpisodeRecord, EnvError> {
    assert!(max_steps >= 1, "episodes need at least one step");
    let mut state = env.reset().key();
    let mut cumulative = 0.0;
    let mut steps = 0u32;
    let mut crashed = false;
    match algorithm {
        Algorithm::QLearning => {
            for _ in 0..max_steps {
                let action = choose_action(q, &state, epsilon, rng);
                let result = env.step(action)?;
                let next_state = result.observation.key();
                q_learning_update(q, &state, action, result.reward, &next_state, result.done, config);
                cumulative += result.reward;
                steps += 1;
                if result.done {
                    crashed = true;
                    break;
                }
                state = next_state;
            }
        }
        Algorithm::Sarsa => {
            let mut action = choose_action(q, &state, epsilon, rng);
            for _ in 0..max_steps {
                let result = env.step(action)?;
                let next_state = result.observation.key();
                let next_action = choose_action(q, &next_state, epsilon, rng);
                sarsa_update(
                    q,
                    &state,
                    action,
                    result.reward,
                    &next_state,
                    next_action,
                    result.done,
                    config,
                );
                cumulative += result.reward;
                steps += 1;
                if result.done {
                    crashed = true;
                    break;
                }
                state = next_state;
                action = next_action;
            }
        }
    }
    Ok(EpisodeRecord {
        index,
        steps,
        cumulative_reward: cumulative,
        epsilon,
        crashed,
    })
}

/// Trains from a fresh table for `episodes` episodes. Epsilon starts at
/// `config.epsilon0` and decays once after each episode, so episode 0 runs
/// at `epsilon0` itself.
pub fn train(
    registry: &Registry,
    env_id: &str,
    algorithm: Algorithm,
    config: &AgentConfig,
    episodes: u32,
    max_steps: u32,
    seed: u64,
) -> Result<TrainOutput, HarnessError> {
    assert!(episodes >= 1, "training needs at least one episode");
    config.validate()?;
    let mut env = registry.make(env_id)?;
    let mut q = QTable::new();
    let mut rng = Rng64::new(seed);
    let mut epsilon = config.epsilon0;
    let mut records = Vec::with_capacity(episodes as usize);
    for index in 0..episodes {
        let record = run_episode(
            &mut env, algorithm, &mut q, config, epsilon, index, max_steps, &mut rng,
        )?;
        records.push(record);
        epsilon = decay_epsilon(epsilon, config);
    }
    Ok(TrainOutput {
        log: RunLog {
            env_id: env_id.to_string(),
            algorithm,
            config: *config,
            seed,
            episodes: records,
        },
        qtable: q,
    })
}

/// Runs `train` for every (algorithm, seed) pair, fanning out over up to
/// `jobs` worker threads. Results come back in input order and are
/// identical to running the pairs sequentially, since every run owns its
/// environment, table, and generator.
pub fn train_many(
    registry: &Registry,
    env_id: &str,
    runs: &[(Algorithm, u64)],
    config: &AgentConfig,
    episodes: u32,
    max_steps: u32,
    jobs: usize,
) -> Result<Vec<TrainOutput>, HarnessError> {
    assert!(jobs >= 1, "need at least one worker");
    if jobs == 1 || runs.len() <= 1 {
        return runs
            .iter()
            .map(|&(algorithm, seed)| {
                train(registry, env_id, algorithm, config, episodes, max_steps, seed)
            })
            .collect();
    }
    let slots: Vec<Mutex<Option<Result<TrainOutput, HarnessError>>>> =
        runs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(runs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= runs.len() {
                    break;
                }
                let (algorithm, seed) = runs[i];
                let result =
                    train(registry, env_id, algorithm, config, episodes, max_steps, seed);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

/// Mean cumulative reward over one block of episodes; `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMean {
    pub start: u32,
    pub end: u32,
    pub mean: f64,
}

/// Blocks the log into consecutive `interval`-episode groups and averages
/// the cumulative reward of each. A trailing partial block is reported over
/// its own (shorter) length.
pub fn interval_averages(log: &RunLog, interval: u32) -> Result<Vec<IntervalMean>, HarnessError> {
    if interval == 0 {
        return Err(HarnessError::BadInterval);
    }
    if log.episodes.is_empty() {
        return Err(HarnessError::EmptyLog);
    }
    let mut out = Vec::new();
    for chunk in log.episodes.chunks(interval as usize) {
        let sum: f64 = chunk.iter().map(|e| e.cumulative_reward).sum();
        let start = chunk[0].index;
        out.push(IntervalMean {
            start,
            end: start + chunk.len() as u32,
            mean: sum / chunk.len() as f64,
        });
    }
    Ok(out)
}

/// Trailing moving average of cumulative reward. Entry `i` averages the
/// last `window` records ending at `i`; shorter prefixes average over what
/// exists.
pub fn moving_average(log: &RunLog, window: u32) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    let mut out = Vec::with_capacity(log.episodes.len());
    let mut sum = 0.0;
    for (i, episode) in log.episodes.iter().enumerate() {
        sum += episode.cumulative_reward;
        if i >= window as usize {
            sum -= log.episodes[i - window as usize].cumulative_reward;
        }
        let len = (i + 1).min(window as usize);
        out.push(sum / len as f64);
    }
    out
}

/// Index of the first interval whose mean is positive.
pub fn learning_onset(means: &[IntervalMean]) -> Option<usize> {
    means.iter().position(|m| m.mean > 0.0)
}

/// Side-by-side interval means for two runs of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub label_a: String,
    pub label_b: String,
    pub rows: Vec<ComparisonRow>,
    /// First positive interval per run (the learning onset), if any.
    pub onset_a: Option<usize>,
    pub onset_b: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub start: u32,
    pub end: u32,
    pub mean_a: f64,
    pub mean_b: f64,
}

impl Comparison {
    /// Formats the comparison as an aligned text table with a trailing
    /// learning-onset row.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let fmt_onset = |onset: Option<usize>, rows: &[ComparisonRow]| match onset {
            Some(i) => format!("{}-{}", rows[i].start, rows[i].end),
            None => "none".to_string(),
        };
        out.push_str(&format!(
            "{:<16} {:>14} {:>14}\n",
            "episodes", self.label_a, self.label_b
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<16} {:>14.2} {:>14.2}\n",
                format!("{}-{}", row.start, row.end),
                row.mean_a,
                row.mean_b
            ));
        }
        out.push_str(&format!(
            "{:<16} {:>14} {:>14}\n",
            "first positive",
            fmt_onset(self.onset_a, &self.rows),
            fmt_onset(self.onset_b, &self.rows)
        ));
        out
    }
}

/// Compares two runs over the same interval grid. The logs must contain the
/// same number of episodes.
pub fn compare(a: &RunLog, b: &RunLog, interval: u32) -> Result<Comparison, HarnessError> {
    if a.episodes.len() != b.episodes.len() {
        return Err(HarnessError::LengthMismatch {
            a: a.episodes.len(),
            b: b.episodes.len(),
        });
    }
    let ia = interval_averages(a, interval)?;
    let ib = interval_averages(b, interval)?;
    let rows = ia
        .iter()
        .zip(&ib)
        .map(|(ma, mb)| ComparisonRow {
            start: ma.start,
            end: ma.end,
            mean_a: ma.mean,
            mean_b: mb.mean,
        })
        .collect();
    let (label_a, label_b) = if a.algorithm == b.algorithm {
        (
            format!("{}-a", a.algorithm.name()),
            format!("{}-b", b.algorithm.name()),
        )
    } else {
        (a.algorithm.name().to_string(), b.algorithm.name().to_string())
    };
    Ok(Comparison {
        label_a,
        label_b,
        rows,
        onset_a: learning_onset(&ia),
        onset_b: learning_onset(&ib),
    })
}

/// Formats a float with 17 significant digits, enough for exact f64 round
/// trips, in a fixed scientific form (`-1.2300000000000000e4`).
pub fn format_f64_17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes episode records as CSV with header
/// `episode,steps,cum_reward,epsilon,crashed`. Floats are printed with 17
/// significant digits so that export -> import -> export is byte-identical.
pub fn run_csv(episodes: &[EpisodeRecord]) -> String {
    let mut out = String::from("episode,steps,cum_reward,epsilon,crashed\n");
    for e in episodes {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.index,
            e.steps,
            format_f64_17(e.cumulative_reward),
            format_f64_17(e.epsilon),
            e.crashed
        ));
    }
    out
}

/// Parses the `run_csv` format.
pub fn parse_run_csv(text: &str) -> Result<Vec<EpisodeRecord>, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "episode,steps,cum_reward,epsilon,crashed")) => {}
        Some((_, other)) => {
            return Err(HarnessError::MalformedCsv {
                line: 1,
                message: format!("unexpected header `{other}`"),
            })
        }
        None => {
            return Err(HarnessError::MalformedCsv {
                line: 1,
                message: "missing header".to_string(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(HarnessError::MalformedCsv {
                line,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let bad = |message: String| HarnessError::MalformedCsv { line, message };
        out.push(EpisodeRecord {
            index: fields[0]
                .parse()
                .map_err(|_| bad(format!("bad episode index `{}`", fields[0])))?,
            steps: fields[1]
                .parse()
                .map_err(|_| bad(format!("bad step count `{}`", fields[1])))?,
            cumulative_reward: fields[2]
                .parse()
                .map_err(|_| bad(format!("bad reward `{}`", fields[2])))?,
            epsilon: fields[3]
                .parse()
                .map_err(|_| bad(format!("bad epsilon `{}`", fields[3])))?,
            crashed: match fields[4] {
                "true" => true,
                "false" => false,
                other => return Err(bad(format!("bad crashed flag `{other}`"))),
            },
        });
    }
    Ok(out)
}

/// Serializes interval means as CSV with header
/// `interval_start,interval_end,mean_reward`.
pub fn intervals_csv(rows: &[IntervalMean]) -> String {
    let mut out = String::from("interval_start,interval_end,mean_reward\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.start,
            row.end,
            format_f64_17(row.mean)
        ));
    }
    out
}

/// Serializes a comparison as CSV with one mean column per run.
pub fn comparison_csv(cmp: &Comparison) -> String {
    let mut out = format!(
        "interval_start,interval_end,mean_{},mean_{}\n",
        cmp.label_a, cmp.label_b
    );
    for row in &cmp.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.start,
            row.end,
            format_f64_17(row.mean_a),
            format_f64_17(row.mean_b)
        ));
    }
    out
}

/// Wall-clock throughput of the raw environment step loop.
#[derive(Debug, Clone, Copy)]
pub struct ThroughputReport {
    pub steps: u64,
    pub elapsed: Duration,
    pub steps_per_second: f64,
    /// Simulated seconds per wall second: steps/s times the per-step
    /// simulated duration.
    pub real_time_factor: f64,
}

/// Drives `steps` environment steps with uniformly random actions on a
/// single thread, resetting whenever an episode ends, and times the loop.
pub fn measure_step_throughput(env: &mut Environment, steps: u64, seed: u64) -> ThroughputReport {
    let mut rng = Rng64::new(seed);
    let action_duration = env.config().action_duration;
    env.reset();
    let start = Instant::now();
    for _ in 0..steps {
        if env.is_terminated() {
            env.reset();
        }
        let action = Action::ALL[rng.uniform_index(Action::ALL.len())];
        env.step(action).expect("non-terminated episode steps");
    }
    let elapsed = start.elapsed();
    let steps_per_second = steps as f64 / elapsed.as_secs_f64();
    ThroughputReport {
        steps,
        elapsed,
        steps_per_second,
        real_time_factor: steps_per_second * action_duration,
    }
}
