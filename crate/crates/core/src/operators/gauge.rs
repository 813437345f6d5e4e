//! Variational and exact adiabatic gauge potentials.
//!
//! The local ansatz is `A = sum_k alpha_k Y_k`. Its Hilbert-Schmidt action
//! `Tr[G^2] / 2^N_p`, with `G = dH/dt + i[A, H]`, is quadratic in every
//! `alpha_k` and has the closed-form minimiser returned by [`alpha_coefficients`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{hamiltonian::time_derivative_terms, hamiltonian_annealing, Axis, OperatorMatrix, PauliSum};
use crate::error::{Error, Result};
use crate::lattice::{LhzLayout, PhysicalInstance};
use crate::linalg::hermitian_eigen;
use crate::schedule::{term_schedules, ScheduleSample, SweepProfile};

/// Relative spectral gap below which the exact gauge potential is refused.
const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Per-qubit coefficients `alpha_k` of the `sigma^y` ansatz, in units of 1/J.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCoefficients(pub Vec<f64>);

impl AlphaCoefficients {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Sum of squared strengths of the constraints touching each qubit.
fn constraint_load(layout: &LhzLayout, c: &[f64]) -> Vec<f64> {
    (0..layout.n_physical())
        .map(|k| layout.constraints_of(k).iter().map(|&l| c[l] * c[l]).sum())
        .collect()
}

/// `alpha_k = (hdot J - Jdot h) / (2 (J^2 + h^2 + sum_n C_n^2))`
pub fn alpha_coefficients(sample: &ScheduleSample, layout: &LhzLayout) -> Result<AlphaCoefficients> {
    let load = constraint_load(layout, &sample.c);
    let mut alpha = Vec::with_capacity(layout.n_physical());
    for k in 0..layout.n_physical() {
        let (h, j) = (sample.h[k], sample.j[k]);
        let den = j * j + h * h + load[k];
        if den == 0.0 {
            return Err(Error::Singular(k));
        }
        alpha.push(0.5 * (sample.hdot[k] * j - sample.jdot[k] * h) / den);
    }
    Ok(AlphaCoefficients(alpha))
}

/// Time derivative of the optimal `alpha_k`.
fn alpha_rates(sample: &ScheduleSample, layout: &LhzLayout) -> Result<Vec<f64>> {
    let load = constraint_load(layout, &sample.c);
    let load_rate: Vec<f64> = (0..layout.n_physical())
        .map(|k| layout.constraints_of(k).iter().map(|&l| 2.0 * sample.c[l] * sample.cdot[l]).sum())
        .collect();
    (0..layout.n_physical())
        .map(|k| {
            let (h, hd, hdd) = (sample.h[k], sample.hdot[k], sample.hddot[k]);
            let (j, jd, jdd) = (sample.j[k], sample.jdot[k], sample.jddot[k]);
            let num = hd * j - jd * h;
            let num_rate = hdd * j - jdd * h;
            let den = j * j + h * h + load[k];
            if den == 0.0 {
                return Err(Error::Singular(k));
            }
            let den_rate = 2.0 * j * jd + 2.0 * h * hd + load_rate[k];
            Ok(0.5 * (num_rate * den - num * den_rate) / (den * den))
        })
        .collect()
}

fn drive_profile(instance: &PhysicalInstance, lambda_f: f64) -> Result<SweepProfile> {
    SweepProfile::new(0.0, lambda_f, instance.tau())
}

/// `Y_k(t) = alpha_k(t) * lambda_dot(t)` with `lambda` running from 0 to `lambda_f`.
pub fn y_fields(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<Vec<f64>> {
    let sample = term_schedules(instance, t)?;
    let rate = drive_profile(instance, lambda_f)?.lambda_dot_at(t)?;
    let alpha = alpha_coefficients(&sample, instance.layout())?;
    Ok(alpha.0.iter().map(|a| a * rate).collect())
}

/// `dY_k/dt` by the product rule.
pub fn y_field_rates(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<Vec<f64>> {
    let sample = term_schedules(instance, t)?;
    let profile = drive_profile(instance, lambda_f)?;
    let (rate, accel) = (profile.lambda_dot_at(t)?, profile.lambda_ddot_at(t)?);
    let alpha = alpha_coefficients(&sample, instance.layout())?;
    let alpha_dot = alpha_rates(&sample, instance.layout())?;
    Ok(alpha.0.iter().zip(&alpha_dot).map(|(a, ad)| ad * rate + a * accel).collect())
}

/// `G = dH/dt + i[A, H]` for `A = sum_k alpha_k Y_k`, expanded into Pauli strings.
pub fn g_operator_from_sample(layout: &LhzLayout, sample: &ScheduleSample, alpha: &AlphaCoefficients) -> PauliSum {
    let n = layout.n_physical();
    let a = &alpha.0;
    let mut g = PauliSum::new(n);
    for k in 0..n {
        g.push(sample.hdot[k] - 2.0 * a[k] * sample.j[k], vec![(k, Axis::X)]);
        g.push(sample.jdot[k] + 2.0 * a[k] * sample.h[k], vec![(k, Axis::Z)]);
    }
    for (l, quad) in layout.constraints().iter().enumerate() {
        g.push(-sample.cdot[l], quad.iter().map(|&q| (q, Axis::Z)).collect());
        for (leg, &q) in quad.iter().enumerate() {
            let string = quad
                .iter()
                .enumerate()
                .map(|(m, &p)| (p, if m == leg { Axis::X } else { Axis::Z }))
                .collect();
            g.push(2.0 * sample.c[l] * a[q], string);
        }
    }
    g
}

pub fn g_operator(instance: &PhysicalInstance, t: f64, alpha: &AlphaCoefficients) -> Result<OperatorMatrix> {
    let sample = term_schedules(instance, t)?;
    g_operator_from_sample(instance.layout(), &sample, alpha).to_matrix()
}

/// Closed form of `Tr[G^2] / 2^N_p`.
pub fn action_closed_form_from_sample(layout: &LhzLayout, sample: &ScheduleSample, alpha: &AlphaCoefficients) -> f64 {
    let a = &alpha.0;
    let local: f64 = (0..layout.n_physical())
        .map(|k| {
            let gx = sample.hdot[k] - 2.0 * a[k] * sample.j[k];
            let gz = sample.jdot[k] + 2.0 * a[k] * sample.h[k];
            gx * gx + gz * gz
        })
        .sum();
    let plaquettes: f64 = layout
        .constraints()
        .iter()
        .enumerate()
        .map(|(l, quad)| {
            let legs: f64 = quad.iter().map(|&q| a[q] * a[q]).sum();
            sample.cdot[l] * sample.cdot[l] + 4.0 * sample.c[l] * sample.c[l] * legs
        })
        .sum();
    local + plaquettes
}

pub fn action_closed_form(instance: &PhysicalInstance, t: f64, alpha: &AlphaCoefficients) -> Result<f64> {
    let sample = term_schedules(instance, t)?;
    Ok(action_closed_form_from_sample(instance.layout(), &sample, alpha))
}

/// Gradient of the closed-form action with respect to each `alpha_k`.
pub fn action_gradient(layout: &LhzLayout, sample: &ScheduleSample, alpha: &AlphaCoefficients) -> Vec<f64> {
    let load = constraint_load(layout, &sample.c);
    (0..layout.n_physical())
        .map(|k| {
            let (a, h, j) = (alpha.0[k], sample.h[k], sample.j[k]);
            2.0 * (-2.0 * j * (sample.hdot[k] - 2.0 * a * j) + 2.0 * h * (sample.jdot[k] + 2.0 * a * h) + 4.0 * a * load[k])
        })
        .collect()
}

/// Exact gauge potential from the eigenbasis of `h`:
/// `<m|A|n> = i <m|dh|n> / (E_n - E_m)` off the diagonal, zero on it.
pub fn spectral_gauge_potential(h: &OperatorMatrix, dh: &OperatorMatrix) -> Result<OperatorMatrix> {
    let eig = hermitian_eigen(h.matrix())?;
    let scale = eig.values.iter().map(|e| e.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = DEGENERACY_TOLERANCE * scale;
    if let Some(gap) = eig.values.windows(2).map(|w| w[1] - w[0]).find(|g| *g <= tol) {
        return Err(Error::DegenerateSpectrum { gap, tol });
    }
    let v = &eig.vectors;
    let dh_eig = v.ad_mul(&(dh.matrix() * v));
    let n = h.dim();
    let a_eig = DMatrix::from_fn(n, n, |m, k| {
        if m == k {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::i() * dh_eig[(m, k)] / (eig.values[k] - eig.values[m])
        }
    });
    Ok(OperatorMatrix::from_matrix(v * a_eig * v.adjoint()))
}

/// Exact gauge potential of the annealing Hamiltonian with respect to time.
pub fn exact_gauge_potential(instance: &PhysicalInstance, t: f64) -> Result<OperatorMatrix> {
    let h = hamiltonian_annealing(instance, t)?;
    let dh = time_derivative_terms(instance, t)?.to_matrix()?;
    spectral_gauge_potential(&h, &dh)
}
