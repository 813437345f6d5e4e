//! Time evolution under the sweep Hamiltonians and the observables along it.

mod propagate;
mod spectrum;
mod state;

pub use propagate::{
    evolve, initial_steps, propagate, Integrator, SweepOptions, SweepResult, SweepSample, MAX_STEPS, MIN_STEPS,
};
pub use spectrum::{instantaneous_spectrum, min_gap_scan, GroundSpace, Spectrum, SpectrumSeries};
pub use state::{excess_energy, fidelity_sq, final_diagonal, initial_state, QuantumState};
