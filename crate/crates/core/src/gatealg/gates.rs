//! Named gates and their placement on qubit registers.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gatealg::matrix::{dagger, ComplexScalar, UnitaryMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    T,
    S,
    X,
    Z,
    Cnot,
    Cp,
    CpInv,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::T | GateKind::S | GateKind::X | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Cp | GateKind::CpInv => 2,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::S => "S",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cp => "CP",
            GateKind::CpInv => "CP", // rendered with a trailing inverse mark
        }
    }
}

/// A gate identity: base kind plus an optional conjugate-transpose mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateName {
    pub kind: GateKind,
    pub dagger: bool,
}

impl GateName {
    pub fn plain(kind: GateKind) -> Self {
        Self { kind, dagger: false }
    }

    pub fn daggered(kind: GateKind) -> Self {
        Self { kind, dagger: true }
    }

    /// Canonical inverse: self-inverse gates stay themselves, the two
    /// controlled-phase kinds swap, everything else toggles the dagger.
    pub fn inverse(self) -> Self {
        match self.kind {
            GateKind::H | GateKind::X | GateKind::Z | GateKind::Cnot => {
                Self { kind: self.kind, dagger: self.dagger }
            }
            GateKind::Cp => Self { kind: GateKind::CpInv, dagger: self.dagger },
            GateKind::CpInv => Self { kind: GateKind::Cp, dagger: self.dagger },
            GateKind::T | GateKind::S => Self { kind: self.kind, dagger: !self.dagger },
        }
    }
}

/// Matrix of a bare gate in its own 1- or 2-qubit space. For two-qubit gates
/// the first qubit (the control) is the high bit of the basis index.
pub fn base_gate_matrix(name: GateName) -> UnitaryMatrix {
    let c = |re, im| ComplexScalar::new(re, im);
    let h = FRAC_1_SQRT_2;
    let entries: Vec<ComplexScalar> = match name.kind {
        GateKind::H => vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        GateKind::T => {
            let w = ComplexScalar::from_polar(1.0, FRAC_PI_4);
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), w]
        }
        GateKind::S => vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        GateKind::X => vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        GateKind::Z => vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        GateKind::Cnot => {
            let mut m = vec![ComplexScalar::ZERO; 16];
            // |00>->|00>, |01>->|01>, |10>->|11>, |11>->|10>
            for (col, row) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
                m[row * 4 + col] = ComplexScalar::ONE;
            }
            m
        }
        GateKind::Cp => diag4(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)),
        GateKind::CpInv => diag4(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)),
    };
    let n = name.kind.arity();
    let m = UnitaryMatrix::from_entries_unchecked(n, entries);
    if name.dagger {
        dagger(&m)
    } else {
        m
    }
}

fn diag4(a: ComplexScalar, b: ComplexScalar, c: ComplexScalar, d: ComplexScalar) -> Vec<ComplexScalar> {
    let mut m = vec![ComplexScalar::ZERO; 16];
    m[0] = a;
    m[5] = b;
    m[10] = c;
    m[15] = d;
    m
}

/// A gate bound to concrete qubits. For two-qubit gates the control is
/// listed first: CNOT_{c,t}, CP_{c,t}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GatePlacement {
    pub gate: GateName,
    pub qubits: Vec<usize>,
}

impl GatePlacement {
    pub fn single(kind: GateKind, qubit: usize) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self { gate: GateName::plain(kind), qubits: vec![qubit] }
    }

    pub fn two(kind: GateKind, control: usize, target: usize) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Self { gate: GateName::plain(kind), qubits: vec![control, target] }
    }

    /// Placement of the canonical inverse gate on the same qubits.
    pub fn inverse(&self) -> Self {
        Self { gate: self.gate.inverse(), qubits: self.qubits.clone() }
    }

    pub fn label(&self) -> String {
        let mut s = String::from(self.gate.kind.token());
        for &q in &self.qubits {
            s.push_str(subscript(q).as_str());
        }
        if self.gate.kind == GateKind::CpInv {
            s.push_str("⁻¹");
        }
        if self.gate.dagger {
            s.push('†');
        }
        s
    }
}

impl fmt::Display for GatePlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub(crate) fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// Embeds a placed gate into the full 2^n-dimensional register space.
pub fn embed(placement: &GatePlacement, n_qubits: usize) -> Result<UnitaryMatrix> {
    let arity = placement.gate.kind.arity();
    if placement.qubits.len() != arity {
        return Err(Error::BadPlacement(format!(
            "{} expects {} qubit(s), got {}",
            placement.gate.kind.token(),
            arity,
            placement.qubits.len()
        )));
    }
    for &q in &placement.qubits {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
    }
    if arity == 2 && placement.qubits[0] == placement.qubits[1] {
        return Err(Error::BadPlacement(format!(
            "two-qubit gate on duplicate qubit {}",
            placement.qubits[0]
        )));
    }

    let g = base_gate_matrix(placement.gate);
    let dim = 1usize << n_qubits;
    let gd = g.dim();
    // Qubit q occupies bit position n-1-q of a basis index.
    let shifts: Vec<usize> = placement.qubits.iter().map(|&q| n_qubits - 1 - q).collect();
    let mut out = vec![ComplexScalar::ZERO; dim * dim];
    for col in 0..dim {
        let mut k_in = 0usize;
        for &sh in &shifts {
            k_in = (k_in << 1) | ((col >> sh) & 1);
        }
        for k_out in 0..gd {
            let amp = g.get(k_out, k_in);
            if amp == ComplexScalar::ZERO {
                continue;
            }
            let mut row = col;
            for (pos, &sh) in shifts.iter().enumerate() {
                let bit = (k_out >> (shifts.len() - 1 - pos)) & 1;
                row = (row & !(1 << sh)) | (bit << sh);
            }
            out[row * dim + col] = amp;
        }
    }
    Ok(UnitaryMatrix::from_entries_unchecked(n_qubits, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatealg::matrix::{apply, compose, trace_fidelity, StateVector};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn assert_close(m: &UnitaryMatrix, expect: &[ComplexScalar]) {
        assert_eq!(m.entries().len(), expect.len());
        for (i, (a, b)) in m.entries().iter().zip(expect).enumerate() {
            assert!((a - b).norm() < 1e-12, "entry {i}: {a} vs {b}");
        }
    }

    #[test]
    fn base_gates_match_their_definitions() {
        let h = FRAC_1_SQRT_2;
        assert_close(
            &base_gate_matrix(GateName::plain(GateKind::H)),
            &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        );
        assert_close(
            &base_gate_matrix(GateName::plain(GateKind::T)),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, h)],
        );
        // S† = diag(1, -i)
        assert_close(
            &base_gate_matrix(GateName::daggered(GateKind::S)),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)],
        );
    }

    #[test]
    fn every_base_gate_is_unitary() {
        for kind in [
            GateKind::H,
            GateKind::T,
            GateKind::S,
            GateKind::X,
            GateKind::Z,
            GateKind::Cnot,
            GateKind::Cp,
            GateKind::CpInv,
        ] {
            for dag in [false, true] {
                let m = base_gate_matrix(GateName { kind, dagger: dag });
                assert!(m.unitarity_deviation() < 1e-14, "{kind:?} dagger={dag}");
            }
        }
    }

    #[test]
    fn cp_times_cp_inverse_is_identity() {
        let a = base_gate_matrix(GateName::plain(GateKind::Cp));
        let b = base_gate_matrix(GateName::plain(GateKind::CpInv));
        let p = compose(&a, &b).unwrap();
        assert_close(&p, UnitaryMatrix::identity(2).entries());
    }

    #[test]
    fn canonical_inverses() {
        let inv = |k| GateName::plain(k).inverse();
        assert_eq!(inv(GateKind::H), GateName::plain(GateKind::H));
        assert_eq!(inv(GateKind::Cnot), GateName::plain(GateKind::Cnot));
        assert_eq!(inv(GateKind::T), GateName::daggered(GateKind::T));
        assert_eq!(inv(GateKind::Cp), GateName::plain(GateKind::CpInv));
        assert_eq!(inv(GateKind::CpInv), GateName::plain(GateKind::Cp));
        // and the matrices really invert each other
        for kind in [GateKind::T, GateKind::S, GateKind::Cp, GateKind::CpInv] {
            let name = GateName::plain(kind);
            let p = compose(&base_gate_matrix(name.inverse()), &base_gate_matrix(name)).unwrap();
            assert_close(&p, UnitaryMatrix::identity(kind.arity()).entries());
        }
    }

    #[test]
    fn embed_h_on_qubit0_of_two() {
        // H x I with qubit 0 as the high bit.
        let h = FRAC_1_SQRT_2;
        let m = embed(&GatePlacement::single(GateKind::H, 0), 2).unwrap();
        let rows = [
            [h, 0.0, h, 0.0],
            [0.0, h, 0.0, h],
            [h, 0.0, -h, 0.0],
            [0.0, h, 0.0, -h],
        ];
        let expect: Vec<ComplexScalar> = rows.iter().flatten().map(|&x| c(x, 0.0)).collect();
        assert_close(&m, &expect);
    }

    #[test]
    fn embed_t_distinguishes_qubits() {
        let w = ComplexScalar::from_polar(1.0, FRAC_PI_4);
        let one = ComplexScalar::ONE;
        let t0 = embed(&GatePlacement::single(GateKind::T, 0), 2).unwrap();
        let t1 = embed(&GatePlacement::single(GateKind::T, 1), 2).unwrap();
        for (i, expect) in [one, one, w, w].iter().enumerate() {
            assert!((t0.get(i, i) - expect).norm() < 1e-12);
        }
        for (i, expect) in [one, w, one, w].iter().enumerate() {
            assert!((t1.get(i, i) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn embed_cnot_forward_matches_basis_map() {
        // CNOT with control 0, target 1: |q0 q1> -> |q0, q1 xor q0>.
        let m = embed(&GatePlacement::two(GateKind::Cnot, 0, 1), 2).unwrap();
        for col in 0..4usize {
            let q0 = col >> 1;
            let row = if q0 == 1 { col ^ 1 } else { col };
            for r in 0..4 {
                let expect = if r == row { 1.0 } else { 0.0 };
                assert!((m.get(r, col) - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn embed_cnot_reversed_control() {
        // Control 1, target 0: |00>->|00>, |01>->|11>, |10>->|10>, |11>->|01>.
        let m = embed(&GatePlacement::two(GateKind::Cnot, 1, 0), 2).unwrap();
        let map = [(0usize, 0usize), (1, 3), (2, 2), (3, 1)];
        for (col, row) in map {
            for r in 0..4 {
                let expect = if r == row { 1.0 } else { 0.0 };
                assert!((m.get(r, col) - c(expect, 0.0)).norm() < 1e-15, "col {col} row {r}");
            }
        }
    }

    #[test]
    fn embed_in_three_qubit_register_matches_bit_arithmetic() {
        // Independent route: act on every basis state with plain bit ops.
        let m = embed(&GatePlacement::two(GateKind::Cnot, 2, 1), 3).unwrap();
        for col in 0..8usize {
            let q2 = col & 1;
            let row = if q2 == 1 { col ^ 0b010 } else { col };
            assert!((m.get(row, col) - ComplexScalar::ONE).norm() < 1e-15);
        }
        let cp = embed(&GatePlacement::two(GateKind::Cp, 2, 0), 3).unwrap();
        for i in 0..8usize {
            let expect = if (i & 0b101) == 0b101 { c(0.0, 1.0) } else { ComplexScalar::ONE };
            assert!((cp.get(i, i) - expect).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn embedded_gates_stay_unitary() {
        for p in [
            GatePlacement::single(GateKind::H, 2),
            GatePlacement::two(GateKind::Cnot, 2, 0),
            GatePlacement::two(GateKind::CpInv, 1, 2),
        ] {
            let m = embed(&p, 3).unwrap();
            assert!(m.unitarity_deviation() < 1e-13, "{p}");
        }
    }

    #[test]
    fn embed_rejects_bad_placements() {
        assert!(matches!(
            embed(&GatePlacement::single(GateKind::H, 2), 2),
            Err(Error::QubitOutOfRange { qubit: 2, n_qubits: 2 })
        ));
        assert!(embed(&GatePlacement::two(GateKind::Cnot, 1, 1), 2).is_err());
        let malformed = GatePlacement { gate: GateName::plain(GateKind::Cnot), qubits: vec![0] };
        assert!(embed(&malformed, 2).is_err());
    }

    #[test]
    fn bell_circuit_from_placements() {
        let h0 = embed(&GatePlacement::single(GateKind::H, 0), 2).unwrap();
        let cnot = embed(&GatePlacement::two(GateKind::Cnot, 0, 1), 2).unwrap();
        let u = compose(&cnot, &h0).unwrap();
        let psi = apply(&u, &StateVector::zero(2)).unwrap();
        let h = FRAC_1_SQRT_2;
        let expect = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for (a, b) in psi.amplitudes().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((trace_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn labels() {
        assert_eq!(GatePlacement::single(GateKind::H, 0).label(), "H₀");
        assert_eq!(GatePlacement::two(GateKind::Cnot, 0, 1).label(), "CNOT₀₁");
        assert_eq!(GatePlacement::two(GateKind::CpInv, 1, 0).label(), "CP₁₀⁻¹");
        assert_eq!(GatePlacement::single(GateKind::T, 10).label(), "T₁₀");
        let mut tdag = GatePlacement::single(GateKind::T, 0);
        tdag.gate.dagger = true;
        assert_eq!(tdag.label(), "T₀†");
    }
}
