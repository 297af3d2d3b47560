//! Tabular temporal-difference learning: Q-Learning and Sarsa.
//!
//! Both algorithms keep action values in a sparse table keyed by the state
//! string and update one entry per transition:
//!
//! ```text
//! Q-Learning: q(s,a) += alpha * (r + gamma * max_a' q(s',a') - q(s,a))
//! Sarsa:      q(s,a) += alpha * (r + gamma * q(s',a')         - q(s,a))
//! ```
//!
//! On terminal transitions the bootstrap term is dropped and the target is
//! the bare reward. Action selection is epsilon-greedy with uniform random
//! tie-breaking among equal maxima.

use std::collections::HashMap;

use thiserror::Error;

use crate::environment::Action;
use crate::rng::Rng64;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
    #[error("q-table line {line}: {message}")]
    MalformedTable { line: usize, message: String },
}

/// Which update rule a training run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    QLearning,
    Sarsa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::QLearning => "qlearning",
            Algorithm::Sarsa => "sarsa",
        }
    }

    pub fn from_name(name: &str) -> Option<Algorithm> {
        match name {
            "qlearning" => Some(Algorithm::QLearning),
            "sarsa" => Some(Algorithm::Sarsa),
            _ => None,
        }
    }
}

/// Learning hyperparameters. The defaults are the standard configuration
/// used throughout the built-in benchmarks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    /// Learning rate in [0, 1].
    pub alpha: f64,
    /// Discount factor in [0, 1).
    pub gamma: f64,
    /// Exploration rate for episode 0.
    pub epsilon0: f64,
    /// Multiplicative epsilon decay applied once per episode.
    pub decay: f64,
    /// Lower bound for epsilon.
    pub eps_min: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            alpha: 0.2,
            gamma: 0.9,
            epsilon0: 0.9,
            decay: 0.9986,
            eps_min: 0.05,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let fail = |msg: String| Err(AgentError::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return fail(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.epsilon0) {
            return fail(format!("epsilon0 must be in [0, 1], got {}", self.epsilon0));
        }
        if !(0.0..=1.0).contains(&self.decay) {
            return fail(format!("decay must be in [0, 1], got {}", self.decay));
        }
        if !(0.0..=1.0).contains(&self.eps_min) {
            return fail(format!("eps_min must be in [0, 1], got {}", self.eps_min));
        }
        Ok(())
    }
}

/// Sparse action-value table. Reading an absent entry yields exactly 0.0
/// and allocates nothing; rows appear only when written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    rows: HashMap<String, [f64; 3]>,
}

impl QTable {
    pub fn new() -> Self {
        QTable::default()
    }

    pub fn get(&self, state: &str, action: Action) -> f64 {
        self.rows
            .get(state)
            .map_or(0.0, |row| row[action.index()])
    }

    pub fn set(&mut self, state: &str, action: Action, value: f64) {
        if let Some(row) = self.rows.get_mut(state) {
            row[action.index()] = value;
        } else {
            let mut row = [0.0; 3];
            row[action.index()] = value;
            self.rows.insert(state.to_string(), row);
        }
    }

    /// Greatest action value for `state` (0.0 when the state is absent).
    pub fn max_value(&self, state: &str) -> f64 {
        self.rows.get(state).map_or(0.0, |row| {
            row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        })
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    /// Total (state, action) entries held.
    pub fn num_entries(&self) -> usize {
        self.rows.len() * Action::ALL.len()
    }

    pub fn state_keys(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// Serializes the table as `<state key> <action name> <value>` lines,
    /// sorted lexicographically. Values use the shortest decimal form that
    /// parses back to the identical f64.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<&String> = self.rows.keys().collect();
        keys.sort();
        let mut out = String::new();
        for key in keys {
            let row = &self.rows[key];
            for action in Action::ALL {
                out.push_str(key);
                out.push(' ');
                out.push_str(action.name());
                out.push(' ');
                out.push_str(&row[action.index()].to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Parses the `to_text` format. Duplicate (state, action) lines are an
    /// error.
    pub fn parse(text: &str) -> Result<QTable, AgentError> {
        let mut table = QTable::new();
        let mut seen: HashMap<(String, Action), ()> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(AgentError::MalformedTable {
                    line,
                    message: format!("expected `<state> <action> <value>`, got `{raw}`"),
                });
            }
            let action = Action::from_name(fields[1]).ok_or_else(|| AgentError::MalformedTable {
                line,
                message: format!("unknown action `{}`", fields[1]),
            })?;
            let value: f64 = fields[2].parse().map_err(|_| AgentError::MalformedTable {
                line,
                message: format!("`{}` is not a number", fields[2]),
            })?;
            if seen
                .insert((fields[0].to_string(), action), ())
                .is_some()
            {
                return Err(AgentError::MalformedTable {
                    line,
                    message: format!("duplicate entry for `{} {}`", fields[0], fields[1]),
                });
            }
            table.set(fields[0], action, value);
        }
        Ok(table)
    }
}

/// Epsilon-greedy selection. With probability `epsilon` picks uniformly at
/// random; otherwise picks an action with the highest value, breaking exact
/// ties uniformly at random.
///
/// Draw discipline (relied on for replayable runs): exactly one uniform
/// draw decides explore vs exploit, plus exactly one more when choosing
/// among two or more candidates.
pub fn choose_action(q: &QTable, state: &str, epsilon: f64, rng: &mut Rng64) -> Action {
    if rng.next_f64() < epsilon {
        return Action::ALL[rng.uniform_index(Action::ALL.len())];
    }
    let mut best = f64::NEG_INFINITY;
    let mut candidates = [Action::Forward; 3];
    let mut count = 0;
    for action in Action::ALL {
        let value = q.get(state, action);
        if value > best {
            best = value;
            candidates[0] = action;
            count = 1;
        } else if value == best {
            candidates[count] = action;
            count += 1;
        }
    }
    if count == 1 {
        candidates[0]
    } else {
        candidates[rng.uniform_index(count)]
    }
}

fn td_update(q: &mut QTable, state: &str, action: Action, target: f64, alpha: f64) {
    let old = q.get(state, action);
    q.set(state, action, old + alpha * (target - old));
}

/// Off-policy update toward `r + gamma * max_a' q(s', a')`; on terminal
/// transitions the target is just `r`.
pub fn q_learning_update(
    q: &mut QTable,
    state: &str,
    action: Action,
    reward: f64,
    next_state: &str,
    terminal: bool,
    config: &AgentConfig,
) {
    let target = if terminal {
        reward
    } else {
        reward + config.gamma * q.max_value(next_state)
    };
    td_update(q, state, action, target, config.alpha);
}

/// On-policy update toward `r + gamma * q(s', a')` for the action actually
/// selected next; on terminal transitions the target is just `r`.
pub fn sarsa_update(
    q: &mut QTable,
    state: &str,
    action: Action,
    reward: f64,
    next_state: &str,
    next_action: Action,
    terminal: bool,
    config: &AgentConfig,
) {
    let target = if terminal {
        reward
    } else {
        reward + config.gamma * q.get(next_state, next_action)
    };
    td_update(q, state, action, target, config.alpha);
}

/// One per-episode decay step: `max(eps_min, epsilon * decay)`.
pub fn decay_epsilon(epsilon: f64, config: &AgentConfig) -> f64 {
    (epsilon * config.decay).max(config.eps_min)
}
