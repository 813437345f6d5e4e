//! Dense operators on the `2^N_p` dimensional qubit register.
//!
//! Basis convention: qubit 0 is the most significant tensor factor, so qubit `k`
//! is bit `N_p - 1 - k` of a basis index, and a zero bit is the `sigma^z = +1` state.

mod gauge;
mod hamiltonian;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub use gauge::{
    action_closed_form, action_closed_form_from_sample, action_gradient, alpha_coefficients,
    exact_gauge_potential, g_operator, g_operator_from_sample, spectral_gauge_potential, y_field_rates,
    y_fields, AlphaCoefficients,
};
pub use hamiltonian::{
    annealing_terms, annealing_terms_from_sample, cd_real_terms, cd_terms, frame_angles, hamiltonian_annealing,
    hamiltonian_cd, hamiltonian_cd_real, protocol_terms, time_derivative_terms, HamiltonianTerms, Protocol,
};

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A dense complex operator; energies in units of J.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<Complex64>);

impl OperatorMatrix {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        check_dense(n_qubits)?;
        let dim = 1 << n_qubits;
        Ok(Self(DMatrix::zeros(dim, dim)))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Self {
        assert!(m.is_square(), "operator must be square");
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.0)
    }

    /// `max |H - H^dagger|`
    pub fn hermiticity_defect(&self) -> f64 {
        linalg::max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.0[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        self.0.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> OperatorMatrix {
        Self(linalg::commutator(&self.0, &other.0))
    }
}

impl std::ops::Add<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

pub(crate) fn check_dense(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit { what: "dense operator register", size: n_qubits, limit: MAX_DENSE_QUBITS });
    }
    Ok(())
}

#[inline]
pub(crate) fn bit_of(n_qubits: usize, k: usize) -> usize {
    1 << (n_qubits - 1 - k)
}

/// Real-weighted sum of Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, Vec<(usize, Axis)>)>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, Vec<(usize, Axis)>)] {
        &self.terms
    }

    pub fn push(&mut self, coeff: f64, string: Vec<(usize, Axis)>) {
        self.terms.push((coeff, string));
    }

    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        let mut out = OperatorMatrix::zeros(self.n_qubits)?;
        for (coeff, string) in &self.terms {
            if *coeff != 0.0 {
                accumulate_string(&mut out.0, self.n_qubits, *coeff, string)?;
            }
        }
        Ok(out)
    }
}

/// Tensor product of single-site Paulis with identities elsewhere.
pub fn pauli_matrix(n_qubits: usize, string: &[(usize, Axis)]) -> Result<OperatorMatrix> {
    if string.is_empty() {
        return Err(Error::EmptyPauliString);
    }
    let mut out = OperatorMatrix::zeros(n_qubits)?;
    accumulate_string(&mut out.0, n_qubits, 1.0, string)?;
    Ok(out)
}

fn accumulate_string(m: &mut DMatrix<Complex64>, n: usize, coeff: f64, string: &[(usize, Axis)]) -> Result<()> {
    let mut flip = 0usize;
    let mut z_mask = 0usize;
    let mut y_mask = 0usize;
    for &(k, axis) in string {
        if k >= n {
            return Err(Error::QubitOutOfRange { index: k, n_qubits: n });
        }
        let bit = bit_of(n, k);
        match axis {
            Axis::X => flip ^= bit,
            Axis::Y => {
                flip ^= bit;
                y_mask ^= bit;
            }
            Axis::Z => z_mask ^= bit,
        }
    }
    // Repeated sites are not supported: each site contributes one factor.
    let n_y = y_mask.count_ones();
    for col in 0..(1usize << n) {
        // sigma^y |0> = i|1>, sigma^y |1> = -i|0>; sigma^z |1> = -|1>
        let mut phase = Complex64::new(coeff, 0.0) * Complex64::i().powu(n_y);
        let minus = (col & z_mask).count_ones() + (col & y_mask).count_ones();
        if minus % 2 == 1 {
            phase = -phase;
        }
        m[(col ^ flip, col)] += phase;
    }
    Ok(())
}
