//! Self-verification: re-derives every task target through independent
//! routes (closed-form constructions, hand-coded amplitudes, geometric-series
//! counting) and replays the walkthrough, expert, and reverse-episode
//! trajectories. `corrupt` injects a small error into the solution-product
//! route so the negative path of the checker itself can be exercised.

use serde::{Deserialize, Serialize};

use crate::envs::{
    circuit_from_trajectory, make_env, ActionSpec, EnvValue, Representation, StateRegistry,
};
use crate::error::Result;
use crate::gatealg::{
    apply, compose, embed, state_overlap, trace_fidelity, ComplexScalar, GateKind,
    GatePlacement, StateVector, UnitaryMatrix, FINGERPRINT_TOL,
};
use crate::tasks::{get_task, walkthrough_action_set, TargetKind, TaskName};

pub const ENTRY_TOL: f64 = 1e-12;
pub const FIDELITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn render_checks(checks: &[CheckResult]) -> String {
    let mut out = String::new();
    for check in checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {} — {}\n", check.name, check.detail));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!(
        "{} checks, {} passed, {} failed\n",
        checks.len(),
        checks.len() - failed,
        failed
    ));
    out
}

/// Runs the full check suite. With `corrupt` set, the first gate of every
/// solution product is perturbed, which must trip the identity checks while
/// leaving the independently derived references untouched.
pub fn run_checks(corrupt: bool) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    for task in TaskName::ALL {
        checks.push(guard(
            format!("solution circuit reproduces target: {task}"),
            solution_identity(task, corrupt),
        ));
    }
    for (task, name) in [
        (TaskName::Swap, "swap"),
        (TaskName::Iswap, "iswap"),
        (TaskName::Cz, "cz"),
        (TaskName::Z3, "z3"),
        (TaskName::Toffoli, "toffoli"),
    ] {
        checks.push(guard(
            format!("canonical target closed form: {name}"),
            canonical_cross_check(task),
        ));
    }
    checks.push(guard(
        "alternative iswap decomposition equivalent".to_string(),
        iswap_alternative(corrupt),
    ));
    for task in TaskName::ALL {
        checks.push(guard(
            format!("search-space size closed form: {task}"),
            space_size_cross_check(task),
        ));
    }
    checks.push(guard(
        "unitary walkthrough: two-step preparation".to_string(),
        walkthrough_matrix(),
    ));
    checks.push(guard(
        "reverse walkthrough: inverted episode recovers circuit".to_string(),
        walkthrough_reverse(),
    ));
    checks.push(guard(
        "state walkthrough: one-step preparation".to_string(),
        walkthrough_state(),
    ));
    for representation in [Representation::Matrix, Representation::Reverse] {
        checks.push(guard(
            format!("expert trajectory solves toffoli: {representation}"),
            expert_trajectory_check(representation),
        ));
    }
    for task in TaskName::ALL {
        checks.push(guard(
            format!("reverse episode inverts to solution: {task}"),
            reverse_round_trip(task),
        ));
    }
    checks.push(guard(
        "global phase shares a state index".to_string(),
        phase_invariance_check(),
    ));
    checks
}

fn guard(name: String, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Product of the placements (optionally with the first gate perturbed so the
/// checks have a negative mode to detect).
fn solution_product(
    placements: &[GatePlacement],
    n_qubits: usize,
    corrupt: bool,
) -> Result<UnitaryMatrix> {
    let mut acc = UnitaryMatrix::identity(n_qubits);
    for (k, placement) in placements.iter().enumerate() {
        let mut m = embed(placement, n_qubits)?;
        if corrupt && k == 0 {
            // a wrong normalization constant: scales the whole gate, which
            // no downstream cancellation can hide
            let entries = m.entries().iter().map(|e| e * 1.001).collect();
            m = UnitaryMatrix::from_entries_unchecked(n_qubits, entries);
        }
        acc = compose(&m, &acc)?;
    }
    Ok(acc)
}

fn entry_deviation(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn solution_identity(name: TaskName, corrupt: bool) -> Result<(bool, String)> {
    let task = get_task(name);
    let product = solution_product(&task.solution, task.n_qubits, corrupt)?;
    match task.kind {
        TargetKind::GateSynth => {
            let deviation = entry_deviation(&product, &task.target_unitary);
            let fidelity = trace_fidelity(&product, &task.target_unitary)?;
            let passed = deviation <= ENTRY_TOL && fidelity > 1.0 - FIDELITY_TOL;
            Ok((passed, format!("max entry deviation {deviation:.3e}, trace fidelity {fidelity:.12}")))
        }
        TargetKind::StatePrep => {
            let produced = apply(&product, &StateVector::zero(task.n_qubits))?;
            let reference = reference_state(name);
            let overlap = state_overlap(&produced, &reference)?;
            // a non-unitary product can push the overlap above 1, so check
            // the distance from 1 rather than a one-sided bound
            let passed = (overlap - 1.0).abs() < FIDELITY_TOL;
            Ok((passed, format!("state overlap {overlap:.12}")))
        }
    }
}

/// Hand-coded target amplitudes for the state-preparation tasks.
fn reference_state(name: TaskName) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| ComplexScalar::new(x, 0.0);
    let z = re(0.0);
    let (n, amps): (usize, Vec<ComplexScalar>) = match name {
        TaskName::BellPhiPlus => (2, vec![re(h), z, z, re(h)]),
        TaskName::BellPhiMinus => (2, vec![re(h), z, z, re(-h)]),
        TaskName::BellPsiPlus => (2, vec![z, re(h), re(h), z]),
        TaskName::BellPsiMinus => (2, vec![z, re(h), re(-h), z]),
        TaskName::Ghz => (3, vec![re(h), z, z, z, z, z, z, re(h)]),
        _ => unreachable!("only state-preparation tasks have reference amplitudes"),
    };
    StateVector::from_amplitudes(n, amps).expect("reference amplitudes are normalized")
}

/// Rebuilds each synthesis target directly from its action on basis indices
/// (qubit 0 is the most significant bit) and compares entrywise.
fn canonical_cross_check(name: TaskName) -> Result<(bool, String)> {
    let task = get_task(name);
    let dim = 1usize << task.n_qubits;
    let one = ComplexScalar::new(1.0, 0.0);
    let i = ComplexScalar::new(0.0, 1.0);
    let mut entries = vec![ComplexScalar::new(0.0, 0.0); dim * dim];
    match name {
        TaskName::Swap => {
            for col in 0..dim {
                let row = ((col & 0b01) << 1) | ((col & 0b10) >> 1);
                entries[row * dim + col] = one;
            }
        }
        TaskName::Iswap => {
            entries[0] = one;
            entries[3 * dim + 3] = one;
            entries[2 * dim + 1] = i;
            entries[dim + 2] = i;
        }
        TaskName::Cz => {
            for col in 0..dim {
                entries[col * dim + col] = if col == 0b11 { -one } else { one };
            }
        }
        TaskName::Z3 => {
            for col in 0..dim {
                entries[col * dim + col] = if col & 0b100 != 0 { -one } else { one };
            }
        }
        TaskName::Toffoli => {
            for col in 0..dim {
                let row = if col & 0b011 == 0b011 { col ^ 0b100 } else { col };
                entries[row * dim + col] = one;
            }
        }
        _ => unreachable!("only synthesis targets have closed forms here"),
    }
    let reference = UnitaryMatrix::from_entries(task.n_qubits, entries)?;
    let deviation = entry_deviation(&reference, &task.target_unitary);
    Ok((deviation <= ENTRY_TOL, format!("max entry deviation {deviation:.3e}")))
}

/// A second well-known circuit for iswap must agree with the task
/// solution exactly.
fn iswap_alternative(corrupt: bool) -> Result<(bool, String)> {
    let task = get_task(TaskName::Iswap);
    let alternative = [
        GatePlacement::single(GateKind::S, 0),
        GatePlacement::single(GateKind::S, 1),
        GatePlacement::single(GateKind::H, 0),
        GatePlacement::two(GateKind::Cnot, 0, 1),
        GatePlacement::two(GateKind::Cnot, 1, 0),
        GatePlacement::single(GateKind::H, 1),
    ];
    let a = solution_product(&task.solution, task.n_qubits, corrupt)?;
    let b = solution_product(&alternative, task.n_qubits, false)?;
    let deviation = entry_deviation(&a, &b);
    let target_dev = entry_deviation(&b, &task.target_unitary);
    let passed = deviation <= ENTRY_TOL && target_dev <= ENTRY_TOL;
    Ok((
        passed,
        format!("decompositions differ by {deviation:.3e}, target deviation {target_dev:.3e}"),
    ))
}

/// Counts Σ_{k=0}^{L} c^k two ways: the iterative task route and the closed
/// geometric-series form (c^{L+1} − 1)/(c − 1) in wide arithmetic.
fn space_size_cross_check(name: TaskName) -> Result<(bool, String)> {
    let task = get_task(name);
    let c = task.matrix_action_count() as u128;
    let l = task.solution_length() as u32;
    let closed = (c.pow(l + 1) - 1) / (c - 1);
    let iterative = task.space_size() as u128;
    Ok((
        closed == iterative,
        format!("closed form {closed}, iterative {iterative}"),
    ))
}

fn walkthrough_matrix() -> Result<(bool, String)> {
    let task = get_task(TaskName::BellPhiPlus);
    let actions = walkthrough_action_set(Representation::Matrix);
    let mut env =
        crate::envs::Environment::with_actions(&task, Representation::Matrix, actions, 20)?;
    let h0 = ActionSpec::single(GatePlacement::single(GateKind::H, 0));
    let cnot = ActionSpec::single(GatePlacement::two(GateKind::Cnot, 0, 1));
    let first = env.step(&h0)?;
    let after_h = match env.state().value {
        EnvValue::Unitary(u) => u,
        EnvValue::State(_) => unreachable!("unitary representation"),
    };
    let expected = embed(&GatePlacement::single(GateKind::H, 0), 2)?;
    let deviation = entry_deviation(&after_h, &expected);
    let second = env.step(&cnot)?;
    let passed = first.reward == 0.0
        && deviation <= ENTRY_TOL
        && second.reward == 100.0
        && second.done;
    Ok((
        passed,
        format!(
            "intermediate deviation {deviation:.3e}, rewards {} then {}",
            first.reward, second.reward
        ),
    ))
}

fn walkthrough_reverse() -> Result<(bool, String)> {
    let task = get_task(TaskName::BellPhiPlus);
    let actions = walkthrough_action_set(Representation::Reverse);
    let mut env =
        crate::envs::Environment::with_actions(&task, Representation::Reverse, actions, 20)?;
    let trajectory = [
        ActionSpec::reverse_of(&GatePlacement::two(GateKind::Cnot, 0, 1)),
        ActionSpec::reverse_of(&GatePlacement::single(GateKind::H, 0)),
    ];
    let first = env.step(&trajectory[0])?;
    let second = env.step(&trajectory[1])?;
    let circuit = circuit_from_trajectory(&trajectory, Representation::Reverse);
    let labels: Vec<String> = circuit.iter().map(|p| p.label()).collect();
    let passed =
        first.reward == 0.0 && second.reward == 100.0 && labels == ["H₀", "CNOT₀₁"];
    Ok((
        passed,
        format!("recovered circuit {}", labels.join(", ")),
    ))
}

fn walkthrough_state() -> Result<(bool, String)> {
    let task = get_task(TaskName::BellPhiPlus);
    let actions = walkthrough_action_set(Representation::Tn);
    let mut env = crate::envs::Environment::with_actions(&task, Representation::Tn, actions, 20)?;
    let pair = ActionSpec::pair(
        GatePlacement::single(GateKind::H, 0),
        GatePlacement::two(GateKind::Cnot, 0, 1),
    );
    let step = env.step(&pair)?;
    let produced = match env.state().value {
        EnvValue::State(s) => s,
        EnvValue::Unitary(_) => unreachable!("state representation"),
    };
    let deviation: f64 = produced
        .amplitudes()
        .iter()
        .zip(reference_state(TaskName::BellPhiPlus).amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let passed = step.reward == 100.0 && step.done && deviation <= ENTRY_TOL;
    Ok((
        passed,
        format!("amplitude deviation {deviation:.3e}, reward {}", step.reward),
    ))
}

fn expert_trajectory_check(representation: Representation) -> Result<(bool, String)> {
    let task = get_task(TaskName::Toffoli);
    let expert = task
        .expert_trajectory(representation)
        .expect("toffoli ships an expert trajectory");
    let mut env = make_env(&task, representation, 20)?;
    let mut rewards = Vec::new();
    for action in &expert {
        rewards.push(env.step(action)?.reward);
    }
    let passed = rewards.len() == 7
        && rewards[..6].iter().all(|&r| r == 0.0)
        && rewards[6] == 100.0
        && env.is_done();
    Ok((passed, format!("rewards {rewards:?}")))
}

fn reverse_round_trip(name: TaskName) -> Result<(bool, String)> {
    let task = get_task(name);
    let mut env = make_env(&task, Representation::Reverse, 20)?;
    let trajectory: Vec<ActionSpec> = task
        .solution
        .iter()
        .rev()
        .map(ActionSpec::reverse_of)
        .collect();
    let mut last_reward = 0.0;
    for action in &trajectory {
        last_reward = env.step(action)?.reward;
    }
    let recovered: Vec<String> = circuit_from_trajectory(&trajectory, Representation::Reverse)
        .iter()
        .map(|p| p.label())
        .collect();
    let expected: Vec<String> = task.solution.iter().map(|p| p.label()).collect();
    let passed = last_reward == 100.0 && recovered == expected;
    Ok((
        passed,
        format!("final reward {last_reward}, circuit {}", recovered.join(", ")),
    ))
}

fn phase_invariance_check() -> Result<(bool, String)> {
    let psi = reference_state(TaskName::BellPhiPlus);
    let rotated: Vec<ComplexScalar> = psi
        .amplitudes()
        .iter()
        .map(|a| a * ComplexScalar::new(0.0, 1.0))
        .collect();
    let mut registry = StateRegistry::new(FINGERPRINT_TOL, None);
    let (first, _) = registry.get_or_insert(psi.amplitudes())?;
    let (second, was_new) = registry.get_or_insert(&rotated)?;
    let passed = first == second && !was_new;
    Ok((passed, format!("indices {first} and {second}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes_every_check() {
        let checks = run_checks(false);
        for check in &checks {
            assert!(check.passed, "{} failed: {}", check.name, check.detail);
        }
        assert!(all_passed(&checks));
        assert!(checks.len() >= 40);
    }

    #[test]
    fn corruption_is_detected_by_identity_checks_only() {
        let checks = run_checks(true);
        assert!(!all_passed(&checks));
        let identity_failures = checks
            .iter()
            .filter(|c| !c.passed && c.name.starts_with("solution circuit reproduces"))
            .count();
        assert_eq!(identity_failures, TaskName::ALL.len());
        for check in checks.iter().filter(|c| c.name.starts_with("canonical")) {
            assert!(check.passed, "{} should not see the corruption", check.name);
        }
        assert!(!checks
            .iter()
            .find(|c| c.name.starts_with("alternative"))
            .unwrap()
            .passed);
    }

    #[test]
    fn rendering_reports_pass_and_fail_lines() {
        let checks = run_checks(false);
        let text = render_checks(&checks);
        assert!(text.contains("PASS  solution circuit reproduces target: bell_phi_plus"));
        assert!(text.contains("0 failed"));
        let corrupted = render_checks(&run_checks(true));
        assert!(corrupted.contains("FAIL"));
    }
}
