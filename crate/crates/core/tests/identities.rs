//! The built-in verification suite: it must pass on the shipped circuit
//! definitions, fail loudly when a gate is corrupted, and stay consumable by
//! both humans and machines.

use qsynth_core::verify::{all_passed, render_checks, run_checks, CheckResult};

#[test]
fn every_builtin_check_passes() {
    let checks = run_checks(false);
    assert!(checks.len() >= 40, "suite shrank to {} checks", checks.len());
    for check in &checks {
        assert!(check.passed, "{} failed: {}", check.name, check.detail);
    }
    assert!(all_passed(&checks));
}

#[test]
fn corruption_flips_exactly_the_circuit_reproduction_checks() {
    let checks = run_checks(true);
    let failed: Vec<&CheckResult> = checks.iter().filter(|c| !c.passed).collect();
    assert!(!failed.is_empty(), "a corrupted gate must be detected");

    // The closed-form target constructions and the search-space arithmetic do
    // not involve the corrupted gate, so they must keep passing; everything
    // that multiplies out the solution circuits must fail.
    for check in &checks {
        let independent = check.name.starts_with("canonical target closed form")
            || check.name.starts_with("search-space size closed form");
        if independent {
            assert!(check.passed, "{} should be immune to gate corruption", check.name);
        }
    }
    let reproduction_failures = failed
        .iter()
        .filter(|c| c.name.starts_with("solution circuit reproduces target"))
        .count();
    assert_eq!(
        reproduction_failures, 10,
        "all ten solution circuits must notice the corrupted gate"
    );
}

#[test]
fn rendering_and_serialization_cover_every_check() {
    let checks = run_checks(false);

    let text = render_checks(&checks);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        checks.len(),
        "one PASS line per check"
    );
    assert!(text.lines().last().unwrap().contains("checks"));

    let json = serde_json::to_string(&checks).unwrap();
    let parsed: Vec<CheckResult> = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed.len(), checks.len());
    for (a, b) in checks.iter().zip(&parsed) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.passed, b.passed);
    }
}
