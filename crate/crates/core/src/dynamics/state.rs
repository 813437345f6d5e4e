use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{brute_force_ground, LhzLayout, PhysicalInstance};
use crate::operators::OperatorMatrix;

use super::spectrum::GroundSpace;

/// Normalised state vector on the qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<Complex64>,
}

impl QuantumState {
    /// Rejects vectors whose length is not a power of two or whose norm is off by more than 1e-10.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!("state length {} is not a power of two", amplitudes.len())));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut v = DVector::zeros(1 << n_qubits);
        v[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    /// `|->^{N}`: amplitude `2^{-N/2} (-1)^{popcount(z)}`.
    pub fn minus_product(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = (dim as f64).sqrt().recip();
        let v = DVector::from_fn(dim, |b, _| {
            let sign = if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * a, 0.0)
        });
        Self { amplitudes: v }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<Complex64> {
        &mut self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<psi|H|psi>` (real part; H is assumed Hermitian).
    pub fn expectation(&self, h: &OperatorMatrix) -> f64 {
        self.amplitudes.dotc(&(h.matrix() * &self.amplitudes)).re
    }

    /// Expectation of a diagonal operator given by its diagonal.
    pub fn diagonal_expectation(&self, diag: &[f64]) -> f64 {
        self.amplitudes.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum()
    }

    /// `|<self|other>|^2`
    pub fn overlap_sq(&self, other: &QuantumState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Ground state of the transverse driver `sum_k X_k` on the layout's register.
pub fn initial_state(layout: &LhzLayout) -> QuantumState {
    QuantumState::minus_product(layout.n_physical())
}

/// Population of the ground space, clamped to `[0, 1]`.
pub fn fidelity_sq(state: &QuantumState, ground: &GroundSpace) -> f64 {
    let v = ground.vectors();
    assert_eq!(v.nrows(), state.dim(), "state and ground space dimensions differ");
    let proj = v.ad_mul(state.amplitudes());
    proj.iter().map(|c| c.norm_sqr()).sum::<f64>().clamp(0.0, 1.0)
}

/// Diagonal of the final (classical) Hamiltonian in the computational basis.
pub fn final_diagonal(instance: &PhysicalInstance) -> Vec<f64> {
    let n = instance.n_physical();
    (0..1usize << n)
        .map(|b| instance.classical_energy(&crate::lattice::basis_spins(b, n)))
        .collect()
}

/// `<psi|H(tau)|psi> - E_0` for the final classical Hamiltonian.
pub fn excess_energy(state: &QuantumState, instance: &PhysicalInstance) -> Result<f64> {
    let e0 = brute_force_ground(instance)?.energy;
    Ok(state.diagonal_expectation(&final_diagonal(instance)) - e0)
}
