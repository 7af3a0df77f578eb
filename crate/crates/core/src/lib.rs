//! Synthesis of small quantum circuits by reinforcement learning.
//!
//! The library decomposes into five layers:
//!
//! * [`gatealg`]: dense gate algebra (unitaries, state vectors, embedding,
//!   fidelities, phase-invariant fingerprints).
//! * [`tasks`]: the built-in synthesis targets, their action sets, solution
//!   circuits, expert trajectories, and the search-space bound.
//! * [`envs`]: the three environment formulations (matrix, reverse matrix,
//!   state-vector) with deduplicating state registries.
//! * [`agents`]: tabular Q-learning and a small from-scratch DQN, plus
//!   greedy rollouts and artifact (de)serialization.
//! * [`bench`]: seeded multi-round success-ratio benchmarks and the
//!   walkthrough reproductions.

pub mod agents;
pub mod bench;
pub mod envs;
pub mod error;
pub mod gatealg;
pub mod tasks;
pub mod verify;

pub use error::{Error, Result};
