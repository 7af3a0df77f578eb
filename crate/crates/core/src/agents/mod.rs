//! Learning agents: a tabular Q-learner and a small fully connected Q-value
//! network trained from replayed transitions, plus the ε-greedy policy,
//! replay buffer, expert-trajectory injection, and greedy evaluation they
//! share.

mod dqn;
mod policy_net;
mod qtable;
mod replay;
mod rollout;

pub use dqn::{train_dqn, DqnConfig, TargetSchedule, DQN_EXPERT_PASSES};
pub use policy_net::{
    net_train_step, update_target, BatchTransition, Encoding, Features, PolicyNet,
    TargetUpdateMode, HIDDEN_WIDTH,
};
pub use qtable::{
    q_choose_action, q_update, qtable_from_text, qtable_to_text, train_q, QLearnConfig, QTable,
    Q_EXPERT_PASSES,
};
pub use replay::{ReplayBuffer, Transition};
pub use rollout::{greedy_rollout, ActionValues, Rollout};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envs::ActionSpec;

/// A known good action sequence replayed verbatim before ordinary training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpertTrajectory {
    pub actions: Vec<ActionSpec>,
    pub repeat_count: usize,
}

impl ExpertTrajectory {
    pub fn new(actions: Vec<ActionSpec>, repeat_count: usize) -> Self {
        ExpertTrajectory { actions, repeat_count }
    }
}

/// Per-episode training summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub episode: usize,
    pub steps: usize,
    pub total_reward: f64,
    pub success: bool,
    pub epsilon: f64,
    pub final_fidelity: f64,
}

/// Index of a maximal value, ties broken uniformly at random.
pub(crate) fn argmax_tiebreak<R: Rng>(values: &[f64], rng: &mut R) -> usize {
    debug_assert!(!values.is_empty());
    let mut best = f64::NEG_INFINITY;
    for &v in values {
        if v > best {
            best = v;
        }
    }
    let count = values.iter().filter(|&&v| v == best).count();
    let mut pick = rng.gen_range(0..count);
    for (i, &v) in values.iter().enumerate() {
        if v == best {
            if pick == 0 {
                return i;
            }
            pick -= 1;
        }
    }
    unreachable!("argmax over a non-empty slice")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn argmax_prefers_the_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(argmax_tiebreak(&[0.0, 0.0, 0.0, 0.0, 100.0], &mut rng), 4);
        }
    }

    #[test]
    fn argmax_breaks_ties_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0usize; 5];
        for _ in 0..5000 {
            counts[argmax_tiebreak(&[1.0; 5], &mut rng)] += 1;
        }
        // mean 1000, sd ≈ 28; a ±4σ band is compatible with uniformity
        for c in counts {
            assert!((880..1120).contains(&c), "tie-break counts skewed: {counts:?}");
        }
    }

    #[test]
    fn argmax_ignores_positive_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let row = [3.0, -1.0, 7.0, 7.0, 2.0];
        let scaled: Vec<f64> = row.iter().map(|v| v * 4.5).collect();
        for _ in 0..100 {
            let a = argmax_tiebreak(&row, &mut rng);
            assert!(a == 2 || a == 3);
            let b = argmax_tiebreak(&scaled, &mut rng);
            assert!(b == 2 || b == 3);
        }
    }
}
