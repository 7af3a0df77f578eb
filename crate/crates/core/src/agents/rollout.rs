//! Greedy (ε = 0) evaluation of a trained agent on an environment.

use rand::Rng;

use super::policy_net::{Features, PolicyNet};
use super::qtable::QTable;
use super::argmax_tiebreak;
use crate::envs::{ActionSpec, Environment};
use crate::error::Result;

/// Anything that can score the actions available in a state.
pub trait ActionValues {
    fn action_values(&mut self, state: usize) -> Result<Vec<f64>>;
}

impl ActionValues for QTable {
    fn action_values(&mut self, state: usize) -> Result<Vec<f64>> {
        Ok(self.row_or_zeros(state))
    }
}

/// One-hot-encoded networks score states by their registry index.
impl ActionValues for PolicyNet {
    fn action_values(&mut self, state: usize) -> Result<Vec<f64>> {
        self.forward(Features::OneHot(state))
    }
}

#[derive(Clone, Debug)]
pub struct Rollout {
    pub success: bool,
    pub steps: usize,
    pub actions: Vec<ActionSpec>,
    pub final_fidelity: f64,
}

/// Runs one fresh episode always taking a highest-valued action (ties
/// broken uniformly at random). Success means some step paid the reward.
pub fn greedy_rollout<A: ActionValues + ?Sized, R: Rng>(
    agent: &mut A,
    env: &mut Environment,
    max_steps: usize,
    rng: &mut R,
) -> Result<Rollout> {
    let mut state = env.reset();
    let mut actions = Vec::new();
    let mut success = false;
    for _ in 0..max_steps {
        if env.is_done() {
            break;
        }
        let values = agent.action_values(state)?;
        let action = argmax_tiebreak(&values, rng);
        let step = env.step_index(action)?;
        actions.push(env.actions()[action].clone());
        success |= step.reward > 0.0;
        state = step.next_index;
        if step.done {
            break;
        }
    }
    Ok(Rollout { success, steps: actions.len(), actions, final_fidelity: env.last_fidelity() })
}
