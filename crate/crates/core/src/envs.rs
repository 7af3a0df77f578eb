//! The three environment formulations sharing one reset/step contract:
//!
//! * **matrix** — the state is the accumulated circuit unitary, starting
//!   from the identity and compared against the target by trace fidelity;
//! * **reverse** — the state starts at the target unitary, every action is
//!   the inverse of a gate, and the goal is to reach the identity;
//! * **tn** — the state is the state vector produced from `|0…0>`, actions
//!   may be single gates or ordered gate pairs, and success is judged by
//!   state overlap (state-preparation tasks) or by the trace fidelity of the
//!   accumulated unitary (gate-synthesis tasks).
//!
//! Every distinct state (up to global phase, within tolerance) is interned
//! in a [`StateRegistry`] and exposed to agents as a dense index.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gatealg::{
    apply, compose, dagger, embed, fingerprint, state_overlap, trace_fidelity, ComplexScalar,
    Fingerprint, GateKind, GatePlacement, StateVector, UnitaryMatrix, FINGERPRINT_TOL,
};
use crate::tasks::{TargetKind, TaskSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Matrix,
    Reverse,
    Tn,
}

impl Representation {
    pub const ALL: [Representation; 3] =
        [Representation::Matrix, Representation::Reverse, Representation::Tn];

    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Matrix => "matrix",
            Representation::Reverse => "reverse",
            Representation::Tn => "tn",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Representation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown representation '{s}'")))
    }
}

/// One selectable action: a gate, an inverted gate, or an ordered gate pair
/// (the first-listed gate is applied first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionSpec {
    pub first: GatePlacement,
    pub second: Option<GatePlacement>,
    pub inverse: bool,
}

impl ActionSpec {
    pub fn single(first: GatePlacement) -> Self {
        ActionSpec { first, second: None, inverse: false }
    }

    pub fn pair(first: GatePlacement, second: GatePlacement) -> Self {
        ActionSpec { first, second: Some(second), inverse: false }
    }

    /// The inverse of a forward gate, as used by the reverse representation.
    /// Inverting an already-inverted controlled-phase gate yields the plain
    /// one; every other gate is carried with an inverse mark.
    pub fn reverse_of(placement: &GatePlacement) -> Self {
        if placement.gate.kind == GateKind::CpInv {
            let mut plain = placement.clone();
            plain.gate = plain.gate.inverse();
            ActionSpec { first: plain, second: None, inverse: false }
        } else {
            ActionSpec { first: placement.clone(), second: None, inverse: true }
        }
    }

    pub fn is_pair(&self) -> bool {
        self.second.is_some()
    }

    pub fn label(&self) -> String {
        match (&self.second, self.inverse) {
            (Some(second), _) => format!("({}, {})", self.first.label(), second.label()),
            (None, true) => format!("{}⁻¹", self.first.label()),
            (None, false) => self.first.label(),
        }
    }

    /// The full-register matrix this action multiplies onto the state.
    pub fn matrix(&self, n_qubits: usize) -> Result<UnitaryMatrix> {
        let first = embed(&self.first, n_qubits)?;
        Ok(match &self.second {
            Some(second) => compose(&embed(second, n_qubits)?, &first)?,
            None if self.inverse => dagger(&first),
            None => first,
        })
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Interns values (matrices or state vectors) by phase-invariant fingerprint
/// and hands out dense indices in first-visit order.
#[derive(Clone, Debug)]
pub struct StateRegistry {
    map: HashMap<Fingerprint, usize>,
    values: Vec<Vec<ComplexScalar>>,
    tol: f64,
    cap: Option<usize>,
}

impl StateRegistry {
    pub fn new(tol: f64, cap: Option<usize>) -> Self {
        StateRegistry { map: HashMap::new(), values: Vec::new(), tol, cap }
    }

    /// Index for the value, inserting it if unseen. Returns `(index, was_new)`.
    pub fn get_or_insert(&mut self, entries: &[ComplexScalar]) -> Result<(usize, bool)> {
        let key = fingerprint(entries, self.tol);
        if let Some(&idx) = self.map.get(&key) {
            return Ok((idx, false));
        }
        if let Some(cap) = self.cap {
            if self.values.len() >= cap {
                return Err(Error::RegistryCapExceeded { cap });
            }
        }
        let idx = self.values.len();
        self.map.insert(key, idx);
        self.values.push(entries.to_vec());
        Ok((idx, true))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Representative raw entries first registered under this index.
    pub fn value(&self, index: usize) -> Option<&[ComplexScalar]> {
        self.values.get(index).map(|v| v.as_slice())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardRule {
    pub threshold: f64,
    pub success_reward: f64,
}

impl Default for RewardRule {
    fn default() -> Self {
        RewardRule { threshold: 0.99, success_reward: 100.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FidelityMode {
    UnitaryTrace,
    StateOverlap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub next_index: usize,
    pub reward: f64,
    pub done: bool,
}

/// Snapshot of the current episode state.
#[derive(Clone, Debug)]
pub struct EnvState {
    pub value: EnvValue,
    pub index: usize,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub enum EnvValue {
    Unitary(UnitaryMatrix),
    State(StateVector),
}

#[derive(Clone, Debug)]
pub struct Environment {
    task: TaskSpec,
    representation: Representation,
    actions: Vec<ActionSpec>,
    action_matrices: Vec<UnitaryMatrix>,
    initial_unitary: UnitaryMatrix,
    target_unitary: UnitaryMatrix,
    fidelity_mode: FidelityMode,
    reward_rule: RewardRule,
    max_steps: usize,
    registry: StateRegistry,
    current_unitary: UnitaryMatrix,
    current_state: Option<StateVector>,
    current_index: usize,
    depth: usize,
    done: bool,
    last_fidelity: f64,
}

/// Builds an environment with the task's default action set for the
/// requested representation.
pub fn make_env(
    task: &TaskSpec,
    representation: Representation,
    max_steps: usize,
) -> Result<Environment> {
    let actions = task.action_set(representation)?;
    Environment::with_actions(task, representation, actions, max_steps)
}

impl Environment {
    pub fn with_actions(
        task: &TaskSpec,
        representation: Representation,
        actions: Vec<ActionSpec>,
        max_steps: usize,
    ) -> Result<Self> {
        if !task.supports(representation) {
            return Err(Error::UnsupportedCombination {
                task: task.name.to_string(),
                representation: representation.to_string(),
            });
        }
        let n = task.n_qubits;
        let action_matrices: Vec<UnitaryMatrix> =
            actions.iter().map(|a| a.matrix(n)).collect::<Result<_>>()?;
        let identity = UnitaryMatrix::identity(n);
        let (initial_unitary, target_unitary) = match representation {
            Representation::Matrix | Representation::Tn => {
                (identity, task.target_unitary.clone())
            }
            Representation::Reverse => (task.target_unitary.clone(), identity),
        };
        let fidelity_mode = match (representation, task.kind) {
            (Representation::Tn, TargetKind::StatePrep) => FidelityMode::StateOverlap,
            _ => FidelityMode::UnitaryTrace,
        };
        let mut env = Environment {
            task: task.clone(),
            representation,
            actions,
            action_matrices,
            initial_unitary: initial_unitary.clone(),
            target_unitary,
            fidelity_mode,
            reward_rule: RewardRule::default(),
            max_steps,
            registry: StateRegistry::new(FINGERPRINT_TOL, None),
            current_unitary: initial_unitary,
            current_state: None,
            current_index: 0,
            depth: 0,
            done: false,
            last_fidelity: 0.0,
        };
        env.reset();
        Ok(env)
    }

    /// Limits the number of distinct states; further growth is an error.
    pub fn set_state_cap(&mut self, cap: usize) {
        self.registry.cap = Some(cap);
    }

    pub fn reset(&mut self) -> usize {
        self.current_unitary = self.initial_unitary.clone();
        self.current_state = match self.representation {
            Representation::Tn => Some(StateVector::zero(self.task.n_qubits)),
            _ => None,
        };
        self.depth = 0;
        self.done = false;
        self.last_fidelity = self.measure_fidelity();
        let (idx, _) = self
            .registry
            .get_or_insert(self.registry_key_entries().as_slice())
            .expect("initial state always fits the registry");
        self.current_index = idx;
        idx
    }

    pub fn step(&mut self, action: &ActionSpec) -> Result<StepResult> {
        let idx = self
            .actions
            .iter()
            .position(|a| a == action)
            .ok_or_else(|| Error::UnknownAction { label: action.label() })?;
        self.step_index(idx)
    }

    pub fn step_index(&mut self, action: usize) -> Result<StepResult> {
        if self.done {
            return Err(Error::EpisodeFinished);
        }
        let m = self
            .action_matrices
            .get(action)
            .ok_or_else(|| Error::UnknownAction { label: format!("#{action}") })?;
        self.current_unitary = compose(m, &self.current_unitary)?;
        if let Some(psi) = &self.current_state {
            self.current_state = Some(apply(m, psi)?);
        }
        self.depth += 1;
        let fid = self.measure_fidelity();
        self.last_fidelity = fid;
        let success = fid > self.reward_rule.threshold;
        let reward = if success { self.reward_rule.success_reward } else { 0.0 };
        self.done = success || self.depth >= self.max_steps;
        let (next_index, _) = self.registry.get_or_insert(self.registry_key_entries().as_slice())?;
        self.current_index = next_index;
        Ok(StepResult { next_index, reward, done: self.done })
    }

    fn measure_fidelity(&self) -> f64 {
        match self.fidelity_mode {
            FidelityMode::UnitaryTrace => {
                trace_fidelity(&self.current_unitary, &self.target_unitary)
                    .expect("matched register sizes")
            }
            FidelityMode::StateOverlap => {
                let psi = self.current_state.as_ref().expect("tn tracks a state vector");
                state_overlap(psi, &self.task.target_state).expect("matched register sizes")
            }
        }
    }

    /// Entries whose fingerprint identifies the current state: the state
    /// vector in the tn representation, the accumulated unitary otherwise.
    fn registry_key_entries(&self) -> Vec<ComplexScalar> {
        match &self.current_state {
            Some(psi) => psi.amplitudes().to_vec(),
            None => self.current_unitary.entries().to_vec(),
        }
    }

    pub fn actions(&self) -> &[ActionSpec] {
        &self.actions
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action_labels(&self) -> Vec<String> {
        self.actions.iter().map(|a| a.label()).collect()
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn current_index(&self) -> usize {
        self.current_index
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Fidelity measured after the most recent step (or reset).
    pub fn last_fidelity(&self) -> f64 {
        self.last_fidelity
    }

    pub fn registry_size(&self) -> usize {
        self.registry.len()
    }

    pub fn registry(&self) -> &StateRegistry {
        &self.registry
    }

    pub fn state(&self) -> EnvState {
        let value = match &self.current_state {
            Some(psi) => EnvValue::State(psi.clone()),
            None => EnvValue::Unitary(self.current_unitary.clone()),
        };
        EnvState { value, index: self.current_index, depth: self.depth }
    }
}

/// Recovers the gate sequence (in application order) realized by a
/// trajectory of actions taken in the given representation.
pub fn circuit_from_trajectory(
    actions: &[ActionSpec],
    representation: Representation,
) -> Vec<GatePlacement> {
    match representation {
        Representation::Matrix | Representation::Tn => {
            let mut out = Vec::new();
            for a in actions {
                out.push(a.first.clone());
                if let Some(second) = &a.second {
                    out.push(second.clone());
                }
            }
            out
        }
        Representation::Reverse => actions
            .iter()
            .rev()
            .map(|a| if a.inverse { a.first.clone() } else { a.first.inverse() })
            .collect(),
    }
}

/// Expands every action sequence up to `depth` levels, breadth first and in
/// action-list order, so that all reachable states up to that depth are
/// registered. Returns the registry size afterwards. Sequences whose prefix
/// already ended the episode are not extended.
pub fn expand_breadth_first(env: &mut Environment, depth: usize) -> Result<usize> {
    let n = env.n_actions();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for seq in frontier.drain(..) {
            for action in 0..n {
                env.reset();
                let mut terminated = false;
                for &prefix_action in &seq {
                    if env.step_index(prefix_action)?.done {
                        terminated = true;
                        break;
                    }
                }
                if terminated {
                    break; // prefix cannot be extended by any action
                }
                let result = env.step_index(action)?;
                if !result.done {
                    let mut child = seq.clone();
                    child.push(action);
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    env.reset();
    Ok(env.registry_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatealg::GateKind::*;
    use crate::tasks::{get_task, walkthrough_action_set, TaskName};
    use approx::assert_abs_diff_eq;

    fn bell_matrix_env() -> Environment {
        let task = get_task(TaskName::BellPhiPlus);
        let actions = walkthrough_action_set(Representation::Matrix);
        Environment::with_actions(&task, Representation::Matrix, actions, 20).unwrap()
    }

    #[test]
    fn matrix_walkthrough_first_steps() {
        let mut env = bell_matrix_env();
        assert_eq!(env.reset(), 0);
        assert_eq!(env.registry_size(), 1);

        // H₀ from the identity: the first intermediate of the worked example
        let r = env.step_index(0).unwrap();
        assert_eq!(r.next_index, 1);
        assert_eq!(r.reward, 0.0);
        assert!(!r.done);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            [h, 0.0, h, 0.0],
            [0.0, h, 0.0, h],
            [h, 0.0, -h, 0.0],
            [0.0, h, 0.0, -h],
        ];
        if let EnvValue::Unitary(u) = env.state().value {
            for row in 0..4 {
                for col in 0..4 {
                    assert_abs_diff_eq!(u.get(row, col).re, expect[row][col], epsilon = 1e-12);
                    assert_abs_diff_eq!(u.get(row, col).im, 0.0, epsilon = 1e-12);
                }
            }
        } else {
            panic!("matrix env carries a unitary");
        }

        // CNOT₀₁ completes the Bell circuit
        let r = env.step_index(4).unwrap();
        assert_eq!(r.reward, 100.0);
        assert!(r.done);
        assert!(env.last_fidelity() > 1.0 - 1e-12);
    }

    #[test]
    fn step_after_done_is_an_error() {
        let mut env = bell_matrix_env();
        env.step_index(0).unwrap();
        let r = env.step_index(4).unwrap();
        assert!(r.done);
        assert!(matches!(env.step_index(0), Err(Error::EpisodeFinished)));
        env.reset();
        assert!(env.step_index(0).is_ok());
    }

    #[test]
    fn step_limit_terminates_with_zero_reward() {
        let task = get_task(TaskName::BellPhiPlus);
        let actions = walkthrough_action_set(Representation::Matrix);
        let mut env = Environment::with_actions(&task, Representation::Matrix, actions, 3).unwrap();
        for step in 0..3 {
            let r = env.step_index(2).unwrap(); // T₀ never reaches the target
            assert_eq!(r.reward, 0.0);
            assert_eq!(r.done, step == 2);
        }
        assert!(env.is_done());
    }

    #[test]
    fn unknown_action_is_an_error() {
        let mut env = bell_matrix_env();
        let foreign = ActionSpec::single(GatePlacement::single(X, 0));
        assert!(matches!(env.step(&foreign), Err(Error::UnknownAction { .. })));
        assert!(matches!(env.step_index(99), Err(Error::UnknownAction { .. })));
    }

    #[test]
    fn commuting_paths_share_an_index() {
        let mut env = bell_matrix_env();
        env.step_index(2).unwrap(); // T₀
        let a = env.step_index(3).unwrap().next_index; // then T₁
        env.reset();
        env.step_index(3).unwrap(); // T₁
        let b = env.step_index(2).unwrap().next_index; // then T₀
        assert_eq!(a, b);
        // distinct orders of non-commuting gates stay distinct
        env.reset();
        env.step_index(0).unwrap();
        let hc = env.step_index(4).unwrap().next_index; // H₀ then CNOT₀₁
        env.reset();
        env.step_index(4).unwrap();
        let ch = env.step_index(0).unwrap().next_index; // CNOT₀₁ then H₀
        assert_ne!(hc, ch);
    }

    #[test]
    fn registry_survives_reset_and_stays_dense() {
        let mut env = bell_matrix_env();
        env.step_index(0).unwrap();
        env.step_index(1).unwrap();
        let size = env.registry_size();
        env.reset();
        assert_eq!(env.registry_size(), size);
        assert_eq!(env.current_index(), 0);
        for i in 0..size {
            assert!(env.registry().value(i).is_some());
        }
        assert!(env.registry().value(size).is_none());
    }

    #[test]
    fn reverse_walkthrough_recovers_the_circuit() {
        let task = get_task(TaskName::BellPhiPlus);
        let actions = walkthrough_action_set(Representation::Reverse);
        let mut env =
            Environment::with_actions(&task, Representation::Reverse, actions.clone(), 20).unwrap();
        // start at the target, undo CNOT₀₁ then H₀
        let r1 = env.step(&actions[4]).unwrap();
        assert_eq!(r1.reward, 0.0);
        let r2 = env.step(&actions[0]).unwrap();
        assert_eq!(r2.reward, 100.0);
        assert!(r2.done);

        let circuit = circuit_from_trajectory(&[actions[4].clone(), actions[0].clone()], Representation::Reverse);
        let labels: Vec<String> = circuit.iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["H₀", "CNOT₀₁"]);
    }

    #[test]
    fn tn_pair_action_prepares_the_bell_state() {
        let task = get_task(TaskName::BellPhiPlus);
        let actions = walkthrough_action_set(Representation::Tn);
        let mut env = Environment::with_actions(&task, Representation::Tn, actions, 20).unwrap();
        let r = env.step_index(13).unwrap(); // (H₀, CNOT₀₁)
        assert_eq!(r.reward, 100.0);
        assert!(r.done);
        if let EnvValue::State(psi) = env.state().value {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            assert_abs_diff_eq!(psi.amplitudes()[0].re, h, epsilon = 1e-12);
            assert_abs_diff_eq!(psi.amplitudes()[3].re, h, epsilon = 1e-12);
            assert_abs_diff_eq!(psi.amplitudes()[1].norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(psi.amplitudes()[2].norm(), 0.0, epsilon = 1e-12);
        } else {
            panic!("tn env carries a state vector");
        }
    }

    #[test]
    fn tn_gate_task_rewards_the_unitary_not_the_state() {
        let task = get_task(TaskName::Cz);
        let mut env = make_env(&task, Representation::Tn, 20).unwrap();
        // CZ = H₀ · CNOT₁₀ · H₀ leaves |00⟩ fixed; the reward must fire on
        // the accumulated unitary even though the state returns to index 0.
        let labels = env.action_labels();
        let h0 = labels.iter().position(|l| l == "H₀").unwrap();
        let c10 = labels.iter().position(|l| l == "CNOT₁₀").unwrap();
        env.step_index(h0).unwrap();
        env.step_index(c10).unwrap();
        let r = env.step_index(h0).unwrap();
        assert_eq!(r.reward, 100.0);
        assert!(r.done);
        assert_eq!(r.next_index, 0, "|00⟩ aliases the initial state on purpose");
    }

    #[test]
    fn tn_state_task_rewards_overlap() {
        let task = get_task(TaskName::Ghz);
        let mut env = make_env(&task, Representation::Tn, 20).unwrap();
        let labels = env.action_labels();
        let h0 = labels.iter().position(|l| l == "H₀").unwrap();
        let c01 = labels.iter().position(|l| l == "CNOT₀₁").unwrap();
        let c12 = labels.iter().position(|l| l == "CNOT₁₂").unwrap();
        env.step_index(h0).unwrap();
        env.step_index(c01).unwrap();
        let r = env.step_index(c12).unwrap();
        assert_eq!(r.reward, 100.0);
        assert!(r.done);
    }

    #[test]
    fn registry_cap_is_enforced() {
        let mut env = bell_matrix_env();
        env.set_state_cap(2);
        env.step_index(0).unwrap(); // second state fits
        assert!(matches!(
            env.step_index(2),
            Err(Error::RegistryCapExceeded { cap: 2 })
        ));
    }

    #[test]
    fn unsupported_combination_is_rejected() {
        let task = get_task(TaskName::Toffoli);
        assert!(matches!(
            make_env(&task, Representation::Tn, 20),
            Err(Error::UnsupportedCombination { .. })
        ));
    }

    #[test]
    fn breadth_first_expansion_orders_children_by_action() {
        let mut env = bell_matrix_env();
        let size = expand_breadth_first(&mut env, 1).unwrap();
        assert_eq!(size, 6); // identity plus five distinct one-action states
        // replaying action k must land on index k+1
        for a in 0..5 {
            env.reset();
            assert_eq!(env.step_index(a).unwrap().next_index, a + 1);
        }
    }

    #[test]
    fn deterministic_replay() {
        let mut env = bell_matrix_env();
        let seq = [2usize, 0, 3, 4, 1];
        let run = |env: &mut Environment| {
            env.reset();
            let mut out = Vec::new();
            for &a in &seq {
                let r = env.step_index(a).unwrap();
                out.push((r.next_index, r.reward.to_bits(), r.done));
                if r.done {
                    break;
                }
            }
            out
        };
        let a = run(&mut env);
        let b = run(&mut env);
        assert_eq!(a, b);
    }

    #[test]
    fn reverse_round_trip_for_every_task() {
        for name in TaskName::ALL {
            let task = get_task(name);
            let mut env = make_env(&task, Representation::Reverse, 20).unwrap();
            // feed the reversed, inverted solution
            let trajectory: Vec<ActionSpec> =
                task.solution.iter().rev().map(ActionSpec::reverse_of).collect();
            let mut last = None;
            for a in &trajectory {
                last = Some(env.step(a).unwrap_or_else(|e| panic!("{name}: {e}")));
            }
            let last = last.unwrap();
            assert_eq!(last.reward, 100.0, "{name}");
            assert!(last.done, "{name}");
            let circuit = circuit_from_trajectory(&trajectory, Representation::Reverse);
            let recovered: Vec<String> = circuit.iter().map(|p| p.label()).collect();
            let original: Vec<String> = task.solution.iter().map(|p| p.label()).collect();
            assert_eq!(recovered, original, "{name}");
        }
    }

    #[test]
    fn pair_flattening_keeps_application_order() {
        let actions = walkthrough_action_set(Representation::Tn);
        let circuit = circuit_from_trajectory(&[actions[13].clone()], Representation::Tn);
        let labels: Vec<String> = circuit.iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["H₀", "CNOT₀₁"]);
    }
}
