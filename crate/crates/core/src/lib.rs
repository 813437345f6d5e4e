//! Counter-diabatic quantum annealing in the LHZ parity encoding.
//!
//! The crate compiles all-to-all Ising problems onto the parity lattice,
//! builds annealing and counter-diabatic Hamiltonians, integrates the
//! Schrödinger equation, tunes the free drive amplitude `lambda_f`, and runs
//! ensemble studies over random instances. Energies are in units of the
//! coupling scale J and times in 1/J, with hbar = 1.

pub mod cli;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod operators;
pub mod optimizer;
pub mod output;
pub mod schedule;

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use lattice::{brute_force_ground, LhzLayout, LogicalProblem, PhysicalInstance};
pub use operators::{OperatorMatrix, Protocol};
pub use schedule::{term_schedules, ScheduleSample, SweepProfile};
