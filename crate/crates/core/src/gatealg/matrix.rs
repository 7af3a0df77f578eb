//! Dense complex matrices and state vectors over qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index: |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + ... + q_{n-1}.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Frobenius tolerance for accepting a matrix as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Tolerance for accepting a state vector as normalized.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    n_qubits: usize,
    dim: usize,
    entries: Vec<ComplexScalar>, // row-major, dim*dim
}

impl UnitaryMatrix {
    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut entries = vec![ComplexScalar::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ComplexScalar::ONE;
        }
        Self { n_qubits, dim, entries }
    }

    /// Builds a matrix from row-major entries, rejecting non-unitary input.
    pub fn from_entries(n_qubits: usize, entries: Vec<ComplexScalar>) -> Result<Self> {
        let dim = 1 << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let m = Self { n_qubits, dim, entries };
        let deviation = m.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(m)
    }

    /// For products of already-validated unitaries.
    pub(crate) fn from_entries_unchecked(n_qubits: usize, entries: Vec<ComplexScalar>) -> Self {
        let dim = 1 << n_qubits;
        debug_assert_eq!(entries.len(), dim * dim);
        Self { n_qubits, dim, entries }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> ComplexScalar {
        self.entries[row * self.dim + col]
    }

    /// Frobenius norm of U†U - I.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                // (U†U)_{ij} = sum_k conj(U_{ki}) U_{kj}
                let mut acc = ComplexScalar::ZERO;
                for k in 0..d {
                    acc += self.entries[k * d + i].conj() * self.entries[k * d + j];
                }
                if i == j {
                    acc -= ComplexScalar::ONE;
                }
                sum += acc.norm_sqr();
            }
        }
        sum.sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<ComplexScalar>,
}

impl StateVector {
    /// |0...0>
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![ComplexScalar::ZERO; 1 << n_qubits];
        amplitudes[0] = ComplexScalar::ONE;
        Self { n_qubits, amplitudes }
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<ComplexScalar>) -> Result<Self> {
        let dim = 1 << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[ComplexScalar] {
        &self.amplitudes
    }
}

/// Matrix product `a * s`: the circuit accumulated in `s` followed by `a`.
pub fn compose(a: &UnitaryMatrix, s: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    if a.dim != s.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: s.dim });
    }
    let d = a.dim;
    let mut out = vec![ComplexScalar::ZERO; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a.entries[i * d + k];
            if aik == ComplexScalar::ZERO {
                continue;
            }
            let row = &s.entries[k * d..(k + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for (o, sv) in dst.iter_mut().zip(row) {
                *o += aik * sv;
            }
        }
    }
    Ok(UnitaryMatrix::from_entries_unchecked(a.n_qubits, out))
}

/// `u |psi>`
pub fn apply(u: &UnitaryMatrix, psi: &StateVector) -> Result<StateVector> {
    if u.dim != psi.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim, found: psi.dim() });
    }
    let d = u.dim;
    let mut out = vec![ComplexScalar::ZERO; d];
    for i in 0..d {
        let mut acc = ComplexScalar::ZERO;
        for k in 0..d {
            acc += u.entries[i * d + k] * psi.amplitudes[k];
        }
        out[i] = acc;
    }
    Ok(StateVector { n_qubits: psi.n_qubits, amplitudes: out })
}

/// Conjugate transpose.
pub fn dagger(u: &UnitaryMatrix) -> UnitaryMatrix {
    let d = u.dim;
    let mut out = vec![ComplexScalar::ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = u.entries[i * d + j].conj();
        }
    }
    UnitaryMatrix::from_entries_unchecked(u.n_qubits, out)
}

/// |Tr(a† b)| / 2^n, the phase-invariant closeness of two unitaries.
pub fn trace_fidelity(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    // Tr(A†B) = sum_{ij} conj(A_ij) B_ij
    let mut tr = ComplexScalar::ZERO;
    for (x, y) in a.entries.iter().zip(&b.entries) {
        tr += x.conj() * y;
    }
    Ok(tr.norm() / a.dim as f64)
}

/// |<a|b>|^2
pub fn state_overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut ip = ComplexScalar::ZERO;
    for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
        ip += x.conj() * y;
    }
    Ok(ip.norm_sqr())
}
