//! Global-phase-invariant hashable keys for matrices and state vectors.
//!
//! Two values that differ only by a global phase (or by noise well below the
//! tolerance) must map to the same key, so environment state registries can
//! deduplicate revisited states.

use crate::gatealg::matrix::{ComplexScalar, StateVector, UnitaryMatrix};

/// Default rounding tolerance. Entries produced by short products of the
/// supported gates are algebraic numbers separated by far more than this.
pub const FINGERPRINT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    cells: Vec<(i64, i64)>,
}

impl Fingerprint {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Canonicalizes `entries` and rounds to a lattice of spacing `tol`:
/// the whole vector is rotated so the first entry with |.| > tol becomes
/// positive real, then each real/imaginary part is rounded to the nearest
/// multiple of `tol`.
pub fn fingerprint(entries: &[ComplexScalar], tol: f64) -> Fingerprint {
    let rotation = entries
        .iter()
        .find(|e| e.norm() > tol)
        .map(|e| e.conj() / e.norm())
        .unwrap_or(ComplexScalar::ONE);
    let cells = entries
        .iter()
        .map(|e| {
            let r = e * rotation;
            ((r.re / tol).round() as i64, (r.im / tol).round() as i64)
        })
        .collect();
    Fingerprint { cells }
}

impl UnitaryMatrix {
    pub fn fingerprint(&self, tol: f64) -> Fingerprint {
        fingerprint(self.entries(), tol)
    }
}

impl StateVector {
    pub fn fingerprint(&self, tol: f64) -> Fingerprint {
        fingerprint(self.amplitudes(), tol)
    }
}
