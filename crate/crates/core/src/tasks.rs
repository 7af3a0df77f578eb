//! Built-in synthesis targets: their solution circuits, action sets per
//! representation, expert trajectories, and the bounded search-space size.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::envs::{ActionSpec, Representation};
use crate::error::{Error, Result};
use crate::gatealg::{
    apply, compose, embed, ComplexScalar, GateKind, GatePlacement, StateVector, UnitaryMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskName {
    BellPhiPlus,
    BellPhiMinus,
    BellPsiPlus,
    BellPsiMinus,
    Swap,
    Iswap,
    Cz,
    Ghz,
    Z3,
    Toffoli,
}

impl TaskName {
    pub const ALL: [TaskName; 10] = [
        TaskName::BellPhiPlus,
        TaskName::BellPhiMinus,
        TaskName::BellPsiPlus,
        TaskName::BellPsiMinus,
        TaskName::Swap,
        TaskName::Iswap,
        TaskName::Cz,
        TaskName::Ghz,
        TaskName::Z3,
        TaskName::Toffoli,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskName::BellPhiPlus => "bell_phi_plus",
            TaskName::BellPhiMinus => "bell_phi_minus",
            TaskName::BellPsiPlus => "bell_psi_plus",
            TaskName::BellPsiMinus => "bell_psi_minus",
            TaskName::Swap => "swap",
            TaskName::Iswap => "iswap",
            TaskName::Cz => "cz",
            TaskName::Ghz => "ghz",
            TaskName::Z3 => "z3",
            TaskName::Toffoli => "toffoli",
        }
    }

    pub fn pretty(self) -> &'static str {
        match self {
            TaskName::BellPhiPlus => "Bell |Φ+>",
            TaskName::BellPhiMinus => "Bell |Φ->",
            TaskName::BellPsiPlus => "Bell |Ψ+>",
            TaskName::BellPsiMinus => "Bell |Ψ->",
            TaskName::Swap => "SWAP",
            TaskName::Iswap => "iSWAP",
            TaskName::Cz => "CZ",
            TaskName::Ghz => "GHZ",
            TaskName::Z3 => "Z (3-qubit)",
            TaskName::Toffoli => "Toffoli",
        }
    }
}

impl fmt::Display for TaskName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskName::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown task '{s}'")))
    }
}

/// Whether success is judged on the accumulated unitary or on the prepared
/// state when running in the state-vector representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    StatePrep,
    GateSynth,
}

#[derive(Clone, Debug)]
pub struct TaskSpec {
    pub name: TaskName,
    pub n_qubits: usize,
    pub kind: TargetKind,
    pub target_unitary: UnitaryMatrix,
    pub target_state: StateVector,
    pub solution: Vec<GatePlacement>,
    pub gate_set: &'static [&'static str],
}

impl TaskSpec {
    pub fn solution_length(&self) -> usize {
        self.solution.len()
    }

    /// Number of actions in the matrix-representation set; this is also the
    /// branching factor used by the search-space bound.
    pub fn matrix_action_count(&self) -> usize {
        matrix_placements(self.name).len()
    }

    pub fn supports(&self, representation: Representation) -> bool {
        !(self.name == TaskName::Toffoli && representation == Representation::Tn)
    }

    pub fn action_set(&self, representation: Representation) -> Result<Vec<ActionSpec>> {
        if !self.supports(representation) {
            return Err(Error::UnsupportedCombination {
                task: self.name.to_string(),
                representation: representation.to_string(),
            });
        }
        Ok(match representation {
            Representation::Matrix => singles(&matrix_placements(self.name)),
            Representation::Reverse => {
                matrix_placements(self.name).iter().map(ActionSpec::reverse_of).collect()
            }
            Representation::Tn => tn_action_set(self.name),
        })
    }

    /// Known good action sequence, available for the Toffoli synthesis in the
    /// matrix and reverse representations.
    pub fn expert_trajectory(&self, representation: Representation) -> Option<Vec<ActionSpec>> {
        if self.name != TaskName::Toffoli {
            return None;
        }
        match representation {
            Representation::Matrix => {
                Some(self.solution.iter().cloned().map(ActionSpec::single).collect())
            }
            Representation::Reverse => {
                Some(self.solution.iter().rev().map(ActionSpec::reverse_of).collect())
            }
            Representation::Tn => None,
        }
    }

    /// Size of the action-sequence tree of depth `solution_length`.
    pub fn space_size(&self) -> u64 {
        space_size(self.matrix_action_count() as u64, self.solution_length() as u32)
            .expect("catalog sizes fit in u64")
    }
}

/// Number of gate sequences of length at most `length` over `actions`
/// choices: sum_{k=0..length} actions^k, evaluated exactly.
pub fn space_size(actions: u64, length: u32) -> Result<u64> {
    let overflow = || Error::SpaceSizeOverflow { actions, length };
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for _ in 0..=length {
        total = total.checked_add(term).ok_or_else(overflow)?;
        term = term.checked_mul(actions as u128).ok_or_else(overflow)?;
    }
    u64::try_from(total).map_err(|_| overflow())
}

pub fn get_task(name: TaskName) -> TaskSpec {
    use GateKind::*;
    let single = GatePlacement::single;
    let two = GatePlacement::two;

    let (n_qubits, kind, solution, gate_set): (
        usize,
        TargetKind,
        Vec<GatePlacement>,
        &'static [&'static str],
    ) = match name {
        TaskName::BellPhiPlus => (
            2,
            TargetKind::StatePrep,
            vec![single(H, 0), two(Cnot, 0, 1)],
            &["H", "CNOT", "T"],
        ),
        TaskName::BellPhiMinus => (
            2,
            TargetKind::StatePrep,
            vec![single(X, 0), single(H, 0), two(Cnot, 0, 1)],
            &["H", "CNOT", "T", "X"],
        ),
        TaskName::BellPsiPlus => (
            2,
            TargetKind::StatePrep,
            vec![single(H, 0), single(X, 1), two(Cnot, 0, 1)],
            &["H", "CNOT", "T", "X"],
        ),
        TaskName::BellPsiMinus => (
            2,
            TargetKind::StatePrep,
            vec![single(H, 0), single(X, 1), single(Z, 0), single(Z, 1), two(Cnot, 0, 1)],
            &["H", "CNOT", "T", "X", "Z"],
        ),
        TaskName::Swap => (
            2,
            TargetKind::GateSynth,
            vec![two(Cnot, 1, 0), two(Cnot, 0, 1), two(Cnot, 1, 0)],
            &["H", "CNOT", "T"],
        ),
        TaskName::Iswap => (
            2,
            TargetKind::GateSynth,
            vec![two(Cnot, 0, 1), single(T, 1), single(T, 1), two(Cnot, 1, 0), two(Cnot, 0, 1)],
            &["H", "CNOT", "T"],
        ),
        TaskName::Cz => (
            2,
            TargetKind::GateSynth,
            vec![single(H, 0), two(Cnot, 1, 0), single(H, 0)],
            &["H", "CNOT", "T"],
        ),
        TaskName::Ghz => (
            3,
            TargetKind::StatePrep,
            vec![single(H, 0), two(Cnot, 0, 1), two(Cnot, 1, 2)],
            &["H", "CNOT", "T"],
        ),
        TaskName::Z3 => (
            3,
            TargetKind::GateSynth,
            vec![single(S, 0), single(S, 0)],
            &["H", "CNOT", "T", "S"],
        ),
        TaskName::Toffoli => (
            3,
            TargetKind::GateSynth,
            vec![
                single(H, 0),
                two(Cp, 1, 0),
                two(Cnot, 2, 1),
                two(CpInv, 1, 0),
                two(Cnot, 2, 1),
                two(Cp, 2, 0),
                single(H, 0),
            ],
            &["CNOT", "H", "CP", "CP⁻¹"],
        ),
    };

    let target_unitary = match name {
        TaskName::Swap => permutation_unitary(2, |i| (i >> 1) | ((i & 1) << 1)),
        TaskName::Cz => phase_unitary(2, |i| if i == 0b11 { -ComplexScalar::ONE } else { ComplexScalar::ONE }),
        TaskName::Iswap => iswap_unitary(),
        TaskName::Z3 => phase_unitary(3, |i| {
            if i & 0b100 != 0 {
                -ComplexScalar::ONE
            } else {
                ComplexScalar::ONE
            }
        }),
        TaskName::Toffoli => permutation_unitary(3, |i| if i & 0b011 == 0b011 { i ^ 0b100 } else { i }),
        // State-preparation targets are defined by their circuits.
        _ => circuit_unitary(&solution, n_qubits),
    };
    let target_state = apply(&target_unitary, &StateVector::zero(n_qubits)).unwrap();

    TaskSpec { name, n_qubits, kind, target_unitary, target_state, solution, gate_set }
}

/// Composes a placement list (applied left to right) into one unitary.
pub fn circuit_unitary(placements: &[GatePlacement], n_qubits: usize) -> UnitaryMatrix {
    let mut u = UnitaryMatrix::identity(n_qubits);
    for p in placements {
        let g = embed(p, n_qubits).expect("valid placement");
        u = compose(&g, &u).expect("same register");
    }
    u
}

fn permutation_unitary(n_qubits: usize, map: impl Fn(usize) -> usize) -> UnitaryMatrix {
    let dim = 1 << n_qubits;
    let mut entries = vec![ComplexScalar::ZERO; dim * dim];
    for col in 0..dim {
        entries[map(col) * dim + col] = ComplexScalar::ONE;
    }
    UnitaryMatrix::from_entries(n_qubits, entries).unwrap()
}

fn phase_unitary(n_qubits: usize, diag: impl Fn(usize) -> ComplexScalar) -> UnitaryMatrix {
    let dim = 1 << n_qubits;
    let mut entries = vec![ComplexScalar::ZERO; dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = diag(i);
    }
    UnitaryMatrix::from_entries(n_qubits, entries).unwrap()
}

fn iswap_unitary() -> UnitaryMatrix {
    let i = ComplexScalar::new(0.0, 1.0);
    let mut entries = vec![ComplexScalar::ZERO; 16];
    entries[0] = ComplexScalar::ONE; // |00> -> |00>
    entries[2 * 4 + 1] = i; // |01> -> i|10>
    entries[4 + 2] = i; // |10> -> i|01>
    entries[15] = ComplexScalar::ONE; // |11> -> |11>
    UnitaryMatrix::from_entries(2, entries).unwrap()
}

fn singles(placements: &[GatePlacement]) -> Vec<ActionSpec> {
    placements.iter().cloned().map(ActionSpec::single).collect()
}

fn matrix_placements(name: TaskName) -> Vec<GatePlacement> {
    use GateKind::*;
    let single = GatePlacement::single;
    let two = GatePlacement::two;
    match name {
        TaskName::BellPhiPlus | TaskName::Swap | TaskName::Iswap | TaskName::Cz => vec![
            single(H, 0),
            single(H, 1),
            single(T, 0),
            single(T, 1),
            two(Cnot, 0, 1),
            two(Cnot, 1, 0),
        ],
        TaskName::BellPhiMinus | TaskName::BellPsiPlus => vec![
            single(H, 0),
            single(H, 1),
            single(T, 0),
            single(X, 0),
            single(X, 1),
            two(Cnot, 0, 1),
        ],
        TaskName::BellPsiMinus => vec![
            single(H, 0),
            single(H, 1),
            single(T, 0),
            single(X, 0),
            single(X, 1),
            single(Z, 0),
            single(Z, 1),
            two(Cnot, 0, 1),
        ],
        TaskName::Ghz => vec![
            single(H, 0),
            single(H, 1),
            single(H, 2),
            single(T, 0),
            single(T, 1),
            single(T, 2),
            two(Cnot, 0, 1),
            two(Cnot, 1, 2),
        ],
        TaskName::Z3 => vec![
            single(H, 0),
            single(H, 1),
            single(H, 2),
            single(T, 0),
            single(T, 1),
            single(T, 2),
            single(S, 0),
            single(S, 1),
            single(S, 2),
            two(Cnot, 0, 1),
        ],
        TaskName::Toffoli => vec![
            two(Cnot, 2, 1),
            single(H, 0),
            two(Cp, 1, 0),
            two(CpInv, 1, 0),
            two(Cp, 2, 0),
        ],
    }
}

fn tn_action_set(name: TaskName) -> Vec<ActionSpec> {
    use GateKind::*;
    let s = |k, q| ActionSpec::single(GatePlacement::single(k, q));
    let s2 = |k, c, t| ActionSpec::single(GatePlacement::two(k, c, t));
    let p = |a: GatePlacement, b: GatePlacement| ActionSpec::pair(a, b);
    let g1 = GatePlacement::single;
    let g2 = GatePlacement::two;
    match name {
        TaskName::BellPhiPlus
        | TaskName::BellPhiMinus
        | TaskName::BellPsiPlus
        | TaskName::BellPsiMinus => {
            let cnot = || g2(Cnot, 0, 1);
            vec![
                s(H, 0),
                s(H, 1),
                s(T, 0),
                s(T, 1),
                s(X, 0),
                s(X, 1),
                s2(Cnot, 0, 1),
                p(g1(H, 0), g1(H, 1)),
                p(g1(H, 0), g1(T, 1)),
                p(g1(H, 1), g1(T, 0)),
                p(g1(T, 0), g1(T, 1)),
                p(g1(Z, 0), g1(Z, 1)),
                p(g1(T, 0), cnot()),
                p(cnot(), g1(T, 0)),
                p(g1(T, 1), cnot()),
                p(cnot(), g1(T, 1)),
                p(g1(H, 0), cnot()),
                p(cnot(), g1(H, 0)),
                p(g1(H, 1), cnot()),
                p(cnot(), g1(H, 1)),
            ]
        }
        TaskName::Swap | TaskName::Iswap | TaskName::Cz => {
            let cnot = || g2(Cnot, 0, 1);
            let tonc = || g2(Cnot, 1, 0);
            vec![
                s(H, 0),
                s(H, 1),
                s(T, 0),
                s(T, 1),
                s2(Cnot, 0, 1),
                s2(Cnot, 1, 0),
                p(g1(H, 0), g1(H, 1)),
                p(g1(H, 0), g1(T, 1)),
                p(g1(H, 1), g1(T, 0)),
                p(g1(T, 0), g1(T, 1)),
                p(cnot(), tonc()),
                p(tonc(), cnot()),
                p(g1(T, 0), cnot()),
                p(cnot(), g1(T, 0)),
                p(g1(T, 1), cnot()),
                p(cnot(), g1(T, 1)),
                p(g1(H, 0), cnot()),
                p(cnot(), g1(H, 0)),
                p(g1(H, 1), cnot()),
                p(cnot(), g1(H, 1)),
            ]
        }
        TaskName::Ghz | TaskName::Z3 => {
            let mut acts = vec![
                s(H, 0),
                s(H, 1),
                s(H, 2),
                s(T, 0),
                s(S, 0),
                s(S, 1),
                s(S, 2),
                s(T, 1),
                s(T, 2),
                s2(Cnot, 0, 1),
                s2(Cnot, 1, 2),
                s2(Cnot, 0, 2),
            ];
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                acts.push(p(g1(H, a), g1(H, b)));
                acts.push(p(g1(H, a), g1(T, b)));
                acts.push(p(g1(T, a), g1(H, b)));
                acts.push(p(g1(T, a), g1(T, b)));
            }
            for (c, t) in [(0, 1), (0, 2), (1, 2)] {
                for q in 0..3 {
                    acts.push(p(g1(H, q), g2(Cnot, c, t)));
                    acts.push(p(g1(T, q), g2(Cnot, c, t)));
                }
            }
            acts.push(p(g2(Cnot, 0, 1), g2(Cnot, 0, 2)));
            acts.push(p(g2(Cnot, 0, 1), g2(Cnot, 1, 2)));
            acts.push(p(g2(Cnot, 0, 2), g2(Cnot, 1, 2)));
            acts
        }
        TaskName::Toffoli => unreachable!("rejected by action_set"),
    }
}

/// The small demonstration action sets used by the two-qubit walkthrough:
/// five single-gate actions in the matrix representations, seventeen
/// actions (singles plus composites) in the state-vector one.
pub fn walkthrough_action_set(representation: Representation) -> Vec<ActionSpec> {
    use GateKind::*;
    let g1 = GatePlacement::single;
    let base = vec![g1(H, 0), g1(H, 1), g1(T, 0), g1(T, 1), GatePlacement::two(Cnot, 0, 1)];
    match representation {
        Representation::Matrix => singles(&base),
        Representation::Reverse => base.iter().map(ActionSpec::reverse_of).collect(),
        Representation::Tn => {
            let cnot = || GatePlacement::two(Cnot, 0, 1);
            let p = ActionSpec::pair;
            let mut acts = singles(&base);
            acts.extend([
                p(g1(H, 0), g1(H, 1)),
                p(g1(H, 0), g1(T, 1)),
                p(g1(H, 1), g1(T, 0)),
                p(g1(T, 0), g1(T, 1)),
                p(g1(T, 0), cnot()),
                p(cnot(), g1(T, 0)),
                p(g1(T, 1), cnot()),
                p(cnot(), g1(T, 1)),
                p(g1(H, 0), cnot()),
                p(cnot(), g1(H, 0)),
                p(g1(H, 1), cnot()),
                p(cnot(), g1(H, 1)),
            ]);
            acts
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogRow {
    pub task: String,
    pub qubits: usize,
    pub actions: usize,
    pub length: usize,
    pub space_size: u64,
    pub gate_set: Vec<String>,
}

/// Machine-readable task listing.
pub fn catalog() -> Vec<CatalogRow> {
    TaskName::ALL
        .into_iter()
        .map(|name| {
            let t = get_task(name);
            CatalogRow {
                task: name.to_string(),
                qubits: t.n_qubits,
                actions: t.matrix_action_count(),
                length: t.solution_length(),
                space_size: t.space_size(),
                gate_set: t.gate_set.iter().map(|s| s.to_string()).collect(),
            }
        })
        .collect()
}
