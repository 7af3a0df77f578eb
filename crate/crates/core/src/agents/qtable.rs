//! Tabular Q-learning: a growable state×action value table, the ε-greedy
//! policy, the one-step value update, the training loop with optional
//! expert-trajectory replay, and a plain-text table format.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_tiebreak, EpisodeTrace, ExpertTrajectory};
use crate::envs::Environment;
use crate::error::{Error, Result};

/// Number of expert replay passes used by tabular training.
pub const Q_EXPERT_PASSES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    values: Vec<f64>,
    n_actions: usize,
}

impl QTable {
    pub fn new(n_actions: usize) -> Self {
        assert!(n_actions > 0, "action set must be non-empty");
        QTable { values: Vec::new(), n_actions }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_states(&self) -> usize {
        self.values.len() / self.n_actions
    }

    /// Grows the table with zero-initialized rows up to and including `state`.
    pub fn ensure_row(&mut self, state: usize) {
        let needed = (state + 1) * self.n_actions;
        if self.values.len() < needed {
            self.values.resize(needed, 0.0);
        }
    }

    /// Value of (state, action); unvisited states read as zero.
    pub fn get(&self, state: usize, action: usize) -> f64 {
        assert!(action < self.n_actions);
        self.values.get(state * self.n_actions + action).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        assert!(action < self.n_actions);
        self.ensure_row(state);
        self.values[state * self.n_actions + action] = value;
    }

    pub fn row(&self, state: usize) -> Option<&[f64]> {
        let start = state * self.n_actions;
        self.values.get(start..start + self.n_actions)
    }

    /// Row values, materialized as zeros for unvisited states.
    pub fn row_or_zeros(&self, state: usize) -> Vec<f64> {
        self.row(state).map(|r| r.to_vec()).unwrap_or_else(|| vec![0.0; self.n_actions])
    }

    pub fn max_value(&self, state: usize) -> f64 {
        self.row(state)
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QLearnConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub epsilon_decay: f64,
    pub epsilon_min: f64,
    pub episodes: usize,
    pub max_steps: usize,
}

impl QLearnConfig {
    /// Fixed exploration rate, long training: the walkthrough protocol.
    pub fn section3() -> Self {
        QLearnConfig {
            alpha: 0.5,
            gamma: 0.9,
            epsilon: 0.2,
            epsilon_decay: 1.0,
            epsilon_min: 0.2,
            episodes: 500,
            max_steps: 20,
        }
    }

    /// Decaying exploration, short training: the benchmark protocol.
    pub fn appendix() -> Self {
        QLearnConfig {
            alpha: 0.1,
            gamma: 0.95,
            epsilon: 1.0,
            epsilon_decay: 0.99,
            epsilon_min: 0.05,
            episodes: 100,
            max_steps: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.alpha <= 1.0
            && (0.0..1.0).contains(&self.gamma)
            && (0.0..=1.0).contains(&self.epsilon)
            && (0.0..=1.0).contains(&self.epsilon_decay)
            && (0.0..=1.0).contains(&self.epsilon_min);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("Q-learning settings out of range: {self:?}")))
        }
    }
}

/// ε-greedy selection over the state's row (created on first sight): a
/// uniformly random action with probability ε, otherwise a uniformly
/// tie-broken argmax.
pub fn q_choose_action<R: Rng>(
    table: &mut QTable,
    state: usize,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    table.ensure_row(state);
    if rng.gen::<f64>() < epsilon {
        rng.gen_range(0..table.n_actions())
    } else {
        argmax_tiebreak(table.row(state).expect("row just ensured"), rng)
    }
}

/// One-step value update
/// `Q(s,a) ← (1−α)·Q(s,a) + α·(r + γ·max_a′ Q(s′,a′))`; returns the new
/// value. Rows for both states are created on demand; a terminal `s′` keeps
/// an all-zero row (it is never updated), so its future term is zero.
pub fn q_update(
    table: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    alpha: f64,
    gamma: f64,
) -> f64 {
    table.ensure_row(state);
    table.ensure_row(next_state);
    let future = table.max_value(next_state);
    let old = table.get(state, action);
    let new = (1.0 - alpha) * old + alpha * (reward + gamma * future);
    table.set(state, action, new);
    new
}

/// Trains a Q-table on the environment. When an expert trajectory is given,
/// it is replayed `repeat_count` times first; the transitions observed
/// during each pass are recorded and their value updates applied in order at
/// the end of that pass. Ordinary episodes follow, with ε multiplied by the
/// decay factor (and floored) after each episode.
pub fn train_q<R: Rng>(
    env: &mut Environment,
    config: &QLearnConfig,
    expert: Option<&ExpertTrajectory>,
    rng: &mut R,
) -> Result<(QTable, Vec<EpisodeTrace>)> {
    config.validate()?;
    let mut table = QTable::new(env.n_actions());

    if let Some(expert) = expert {
        let action_indices = resolve_action_indices(env, &expert.actions)?;
        for _ in 0..expert.repeat_count {
            env.reset();
            let mut state = env.current_index();
            let mut recorded = Vec::with_capacity(action_indices.len());
            for &a in &action_indices {
                let step = env.step_index(a)?;
                recorded.push((state, a, step.reward, step.next_index));
                state = step.next_index;
                if step.done {
                    break;
                }
            }
            for (s, a, r, s_next) in recorded {
                q_update(&mut table, s, a, r, s_next, config.alpha, config.gamma);
            }
        }
    }

    let mut epsilon = config.epsilon;
    let mut traces = Vec::with_capacity(config.episodes);
    for episode in 0..config.episodes {
        let mut state = env.reset();
        let mut steps = 0;
        let mut total_reward = 0.0;
        let mut success = false;
        loop {
            let action = q_choose_action(&mut table, state, epsilon, rng);
            let step = env.step_index(action)?;
            q_update(&mut table, state, action, step.reward, step.next_index, config.alpha, config.gamma);
            steps += 1;
            total_reward += step.reward;
            success |= step.reward > 0.0;
            state = step.next_index;
            if step.done {
                break;
            }
        }
        traces.push(EpisodeTrace {
            episode,
            steps,
            total_reward,
            success,
            epsilon,
            final_fidelity: env.last_fidelity(),
        });
        epsilon = (epsilon * config.epsilon_decay).max(config.epsilon_min);
    }
    Ok((table, traces))
}

pub(crate) fn resolve_action_indices(
    env: &Environment,
    actions: &[crate::envs::ActionSpec],
) -> Result<Vec<usize>> {
    actions
        .iter()
        .map(|a| {
            env.actions()
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| Error::UnknownAction { label: a.label() })
        })
        .collect()
}

/// Renders the table as tab-separated text: a header of action labels, then
/// one row per state index. Values print in full round-trip precision.
pub fn qtable_to_text(table: &QTable, action_labels: &[String]) -> String {
    assert_eq!(action_labels.len(), table.n_actions());
    let mut out = String::from("state");
    for label in action_labels {
        out.push('\t');
        out.push_str(label);
    }
    out.push('\n');
    for state in 0..table.n_states() {
        out.push_str(&state.to_string());
        for action in 0..table.n_actions() {
            out.push('\t');
            out.push_str(&table.get(state, action).to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses the text produced by [`qtable_to_text`].
pub fn qtable_from_text(text: &str) -> Result<(QTable, Vec<String>)> {
    let bad = |msg: &str| Error::BadArtifact(format!("q-table text: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("missing header"))?;
    let mut cols = header.split('\t');
    if cols.next() != Some("state") {
        return Err(bad("header must start with 'state'"));
    }
    let labels: Vec<String> = cols.map(|s| s.to_string()).collect();
    if labels.is_empty() {
        return Err(bad("no action columns"));
    }
    let mut table = QTable::new(labels.len());
    for (row_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let state: usize = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad state index"))?;
        if state != row_no {
            return Err(bad("state indices must be consecutive from 0"));
        }
        let mut count = 0;
        for field in fields {
            let value: f64 = field.parse().map_err(|_| bad("bad value"))?;
            if count >= labels.len() {
                return Err(bad("too many values in row"));
            }
            table.set(state, count, value);
            count += 1;
        }
        if count != labels.len() {
            return Err(bad("row width does not match header"));
        }
    }
    Ok((table, labels))
}
