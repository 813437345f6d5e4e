use serde::{Deserialize, Serialize};

use super::{gauge, Axis, OperatorMatrix, PauliSum};
use crate::error::{Error, Result};
use crate::lattice::{LhzLayout, PhysicalInstance};
use crate::schedule::{term_schedules, ScheduleSample};

/// Which Hamiltonian drives a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Plain annealing: transverse field, local fields and plaquettes.
    Annealing,
    /// Annealing plus the local `sigma^y` counter-diabatic drive.
    Cd,
    /// The counter-diabatic Hamiltonian rotated about z so that it is real.
    CdReal,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Annealing => "annealing",
            Protocol::Cd => "cd",
            Protocol::CdReal => "cd_real",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "annealing" => Ok(Protocol::Annealing),
            "cd" => Ok(Protocol::Cd),
            "cd_real" | "cd-real" => Ok(Protocol::CdReal),
            other => Err(format!("unknown protocol '{other}' (expected annealing, cd or cd_real)")),
        }
    }
}

/// `sum_k x_k X_k + y_k Y_k + z_k Z_k - sum_l c_l Z_n Z_w Z_s Z_e`
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub plaquettes: Vec<[usize; 4]>,
    pub c: Vec<f64>,
}

impl HamiltonianTerms {
    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn to_pauli_sum(&self) -> PauliSum {
        let n = self.n_qubits();
        let mut sum = PauliSum::new(n);
        for k in 0..n {
            sum.push(self.x[k], vec![(k, Axis::X)]);
            sum.push(self.y[k], vec![(k, Axis::Y)]);
            sum.push(self.z[k], vec![(k, Axis::Z)]);
        }
        for (quad, &c) in self.plaquettes.iter().zip(&self.c) {
            sum.push(-c, quad.iter().map(|&q| (q, Axis::Z)).collect());
        }
        sum
    }

    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        self.to_pauli_sum().to_matrix()
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn norm_estimate(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .chain(&self.c)
            .map(|v| v.abs())
            .sum()
    }
}

pub fn annealing_terms_from_sample(layout: &LhzLayout, sample: &ScheduleSample) -> HamiltonianTerms {
    HamiltonianTerms {
        x: sample.h.clone(),
        y: vec![0.0; layout.n_physical()],
        z: sample.j.clone(),
        plaquettes: layout.constraints().to_vec(),
        c: sample.c.clone(),
    }
}

pub fn annealing_terms(instance: &PhysicalInstance, t: f64) -> Result<HamiltonianTerms> {
    let sample = term_schedules(instance, t)?;
    Ok(annealing_terms_from_sample(instance.layout(), &sample))
}

pub fn cd_terms(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<HamiltonianTerms> {
    let mut terms = annealing_terms(instance, t)?;
    terms.y = gauge::y_fields(instance, t, lambda_f)?;
    Ok(terms)
}

/// Per-qubit rotation angles `theta_k = atan(Y_k / h_k)` of the real frame.
pub fn frame_angles(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<Vec<f64>> {
    check_interior(instance, t)?;
    let sample = term_schedules(instance, t)?;
    let y = gauge::y_fields(instance, t, lambda_f)?;
    Ok(sample.h.iter().zip(&y).map(|(h, y)| y.atan2(*h)).collect())
}

fn check_interior(instance: &PhysicalInstance, t: f64) -> Result<()> {
    if !(t > 0.0 && t < instance.tau()) {
        return Err(Error::EndpointIndeterminate { t });
    }
    Ok(())
}

/// Counter-diabatic Hamiltonian after the z rotation `exp(i sum theta_k/2 Z_k)`:
/// x field `sqrt(h^2 + Y^2)`, z field `J - theta_dot/2`, no y field.
pub fn cd_real_terms(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<HamiltonianTerms> {
    check_interior(instance, t)?;
    let sample = term_schedules(instance, t)?;
    let y = gauge::y_fields(instance, t, lambda_f)?;
    let ydot = gauge::y_field_rates(instance, t, lambda_f)?;
    let n = instance.n_physical();
    let mut x = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for k in 0..n {
        let (h, hd, yk, ykd) = (sample.h[k], sample.hdot[k], y[k], ydot[k]);
        let r2 = h * h + yk * yk;
        if r2 == 0.0 {
            return Err(Error::Singular(k));
        }
        x.push(r2.sqrt());
        z.push(sample.j[k] - 0.5 * (ykd * h - hd * yk) / r2);
    }
    Ok(HamiltonianTerms {
        x,
        y: vec![0.0; n],
        z,
        plaquettes: instance.layout().constraints().to_vec(),
        c: sample.c,
    })
}

/// `dH/dt` of the annealing Hamiltonian.
pub fn time_derivative_terms(instance: &PhysicalInstance, t: f64) -> Result<HamiltonianTerms> {
    let s = term_schedules(instance, t)?;
    Ok(HamiltonianTerms {
        x: s.hdot,
        y: vec![0.0; instance.n_physical()],
        z: s.jdot,
        plaquettes: instance.layout().constraints().to_vec(),
        c: s.cdot,
    })
}

pub fn protocol_terms(instance: &PhysicalInstance, protocol: Protocol, lambda_f: f64, t: f64) -> Result<HamiltonianTerms> {
    match protocol {
        Protocol::Annealing => annealing_terms(instance, t),
        Protocol::Cd => cd_terms(instance, t, lambda_f),
        Protocol::CdReal => cd_real_terms(instance, t, lambda_f),
    }
}

pub fn hamiltonian_annealing(instance: &PhysicalInstance, t: f64) -> Result<OperatorMatrix> {
    annealing_terms(instance, t)?.to_matrix()
}

pub fn hamiltonian_cd(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<OperatorMatrix> {
    cd_terms(instance, t, lambda_f)?.to_matrix()
}

pub fn hamiltonian_cd_real(instance: &PhysicalInstance, t: f64, lambda_f: f64) -> Result<OperatorMatrix> {
    cd_real_terms(instance, t, lambda_f)?.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{basis_spins, brute_force_ground};
    use crate::linalg::{hermitian_eigen, max_abs};
    use crate::operators::pauli_matrix;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn instance(seed: u64, tau: f64) -> PhysicalInstance {
        PhysicalInstance::random(3, seed, 1.0, 2.0, 10.0, tau).unwrap()
    }

    #[test]
    fn start_is_transverse_field() {
        let inst = instance(1, 1.0);
        let h = hamiltonian_annealing(&inst, 0.0).unwrap();
        let eig = hermitian_eigen(h.matrix()).unwrap();
        assert!((eig.values[0] + 4.0).abs() < 1e-12);
        assert!((eig.values[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn final_hamiltonian_is_classical() {
        let inst = PhysicalInstance::random(4, 3, 1.0, 2.0, 10.0, 1.0).unwrap();
        let h = hamiltonian_annealing(&inst, 1.0).unwrap();
        // h(tau) is zero only to rounding; compare off-diagonals against it
        let off: f64 = (0..h.dim())
            .flat_map(|j| (0..h.dim()).filter(move |&i| i != j).map(move |i| (i, j)))
            .map(|(i, j)| h.matrix()[(i, j)].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-14);
        let diag = h.diagonal_real();
        for (b, e) in diag.iter().enumerate() {
            assert!((e - inst.classical_energy(&basis_spins(b, 8))).abs() < 1e-12);
        }
        let ground = brute_force_ground(&inst).unwrap();
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - ground.energy).abs() < 1e-12);
    }

    #[test]
    fn hermitian_over_sweep() {
        let inst = instance(4, 2.0);
        for i in 0..16 {
            let t = 2.0 * (i as f64 + 0.5) / 16.0;
            for h in [
                hamiltonian_annealing(&inst, t).unwrap(),
                hamiltonian_cd(&inst, t, 1.3).unwrap(),
                hamiltonian_cd_real(&inst, t, 1.3).unwrap(),
            ] {
                assert!(h.hermiticity_defect() < 1e-13);
            }
        }
    }

    #[test]
    fn cd_reduces_to_annealing() {
        let inst = instance(5, 1.0);
        for t in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(hamiltonian_cd(&inst, t, 0.0).unwrap(), hamiltonian_annealing(&inst, t).unwrap());
        }
        let h0 = hamiltonian_cd(&inst, 0.0, 3.0).unwrap();
        let mut x = DMatrix::<Complex64>::zeros(16, 16);
        for k in 0..4 {
            x += pauli_matrix(4, &[(k, Axis::X)]).unwrap().matrix();
        }
        assert!(max_abs(&(h0.matrix() - x)) < 1e-15);
    }

    #[test]
    fn cd_breaks_time_reversal() {
        let inst = instance(6, 1.0);
        assert!(hamiltonian_cd(&inst, 0.4, 1.0).unwrap().max_imag() > 1e-3);
        assert_eq!(hamiltonian_annealing(&inst, 0.4).unwrap().max_imag(), 0.0);
    }

    #[test]
    fn cd_real_is_real_and_reduces() {
        let inst = instance(7, 1.0);
        let h = hamiltonian_cd_real(&inst, 0.5, 2.0).unwrap();
        assert!(h.max_imag() < 1e-12);
        for t in [0.25, 0.5, 0.75] {
            let a = hamiltonian_cd_real(&inst, t, 0.0).unwrap();
            let b = hamiltonian_annealing(&inst, t).unwrap();
            assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);
        }
        assert!(matches!(hamiltonian_cd_real(&inst, 0.0, 1.0), Err(Error::EndpointIndeterminate { .. })));
        assert!(matches!(hamiltonian_cd_real(&inst, 1.0, 1.0), Err(Error::EndpointIndeterminate { .. })));
    }

    #[test]
    fn protocol_names_roundtrip() {
        for p in [Protocol::Annealing, Protocol::Cd, Protocol::CdReal] {
            assert_eq!(p.as_str().parse::<Protocol>().unwrap(), p);
        }
        assert!("linear".parse::<Protocol>().is_err());
    }
}
