//! Gate algebra: dense unitaries, state vectors, gate placement and
//! embedding, trace/overlap fidelities, and phase-invariant fingerprints.

mod fingerprint;
mod gates;
mod matrix;

pub use fingerprint::{fingerprint, Fingerprint, FINGERPRINT_TOL};
pub use gates::{base_gate_matrix, embed, GateKind, GateName, GatePlacement};
pub use matrix::{
    apply, compose, dagger, state_overlap, trace_fidelity, ComplexScalar, StateVector,
    UnitaryMatrix, NORM_TOL, UNITARITY_TOL,
};
