//! State deduplication through the environment: algebraically equal circuits
//! — including those equal only up to a global phase — must share a registry
//! index, and episodes must terminate at the depth cap without one.

use qsynth_core::envs::{make_env, Environment, Representation, StepResult};
use qsynth_core::tasks::{get_task, walkthrough_action_set, TaskName};

fn step_label(env: &mut Environment, label: &str) -> StepResult {
    let idx = env
        .action_labels()
        .iter()
        .position(|l| l == label)
        .unwrap_or_else(|| panic!("action {label} not found"));
    let action = env.actions()[idx].clone();
    env.step(&action).unwrap()
}

fn walkthrough_env() -> Environment {
    let task = get_task(TaskName::BellPhiPlus);
    let actions = walkthrough_action_set(Representation::Matrix);
    Environment::with_actions(&task, Representation::Matrix, actions, 20).unwrap()
}

#[test]
fn anticommuting_gate_orders_share_an_index() {
    // X·Z = −Z·X: the two orderings differ by a global phase only, so the
    // registry must fold them together.
    let task = get_task(TaskName::BellPsiMinus);
    let mut env = make_env(&task, Representation::Matrix, 20).unwrap();

    env.reset();
    step_label(&mut env, "X₀");
    let xz = step_label(&mut env, "Z₀").next_index;

    env.reset();
    step_label(&mut env, "Z₀");
    let zx = step_label(&mut env, "X₀").next_index;

    assert_eq!(xz, zx, "X₀Z₀ and Z₀X₀ registered separately");
}

#[test]
fn eight_phase_gates_return_to_the_start() {
    // T⁸ = 1, so the eighth step must land back on the initial state's index
    // while the seven intermediate powers stay distinct.
    let mut env = walkthrough_env();
    env.reset();
    let mut seen = vec![env.current_index()];
    for power in 1..=8 {
        let step = step_label(&mut env, "T₀");
        if power < 8 {
            assert!(
                !seen.contains(&step.next_index),
                "T₀^{power} collided with an earlier power"
            );
            seen.push(step.next_index);
        } else {
            assert_eq!(step.next_index, 0, "T₀⁸ is the identity");
        }
    }
}

#[test]
fn registry_persists_across_resets() {
    let mut env = walkthrough_env();
    env.reset();
    step_label(&mut env, "H₀");
    step_label(&mut env, "T₁");
    let populated = env.registry_size();
    assert!(populated >= 3);

    env.reset();
    assert_eq!(env.registry_size(), populated, "reset must not clear the registry");
    assert_eq!(env.current_index(), 0, "reset must return to the initial state");

    // Replaying a known action must reuse its index rather than mint one.
    let replayed = step_label(&mut env, "H₀").next_index;
    assert_eq!(env.registry_size(), populated);
    assert!(replayed < populated);
}

#[test]
fn episodes_end_at_the_depth_cap_without_success() {
    let mut env = walkthrough_env();
    env.reset();
    for step_no in 1..=20 {
        assert!(!env.is_done(), "episode ended early at step {step_no}");
        // Alternating phase gates never reach the entangled target.
        let label = if step_no % 2 == 0 { "T₁" } else { "T₀" };
        let step = step_label(&mut env, label);
        assert_eq!(step.reward, 0.0);
        assert_eq!(step.done, step_no == 20);
    }
    assert!(env.is_done());
    assert!(env.last_fidelity() < 0.99);
}

#[test]
fn indexed_and_by_reference_stepping_agree() {
    let mut by_ref = walkthrough_env();
    let mut by_index = walkthrough_env();
    by_ref.reset();
    by_index.reset();

    for label in ["H₀", "T₀", "T₁", "CNOT₀₁"] {
        let a = step_label(&mut by_ref, label);
        let pos = by_index.action_labels().iter().position(|l| l == label).unwrap();
        let b = by_index.step_index(pos).unwrap();
        assert_eq!(a.next_index, b.next_index);
        assert_eq!(a.reward, b.reward);
        assert_eq!(a.done, b.done);
    }
}
