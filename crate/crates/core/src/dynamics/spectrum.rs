use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PhysicalInstance;
use crate::linalg::hermitian_eigen;
use crate::operators::{cd_terms, protocol_terms, OperatorMatrix, Protocol};

/// Relative tolerance for grouping eigenvalues into the ground space.
const GROUND_DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Orthonormal basis of the (possibly degenerate) ground eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSpace {
    energy: f64,
    vectors: DMatrix<Complex64>,
}

impl GroundSpace {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn degeneracy(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn projector(&self) -> OperatorMatrix {
        OperatorMatrix::from_matrix(&self.vectors * self.vectors.adjoint())
    }

    /// One-dimensional ground space spanned by a normalised vector.
    pub fn from_vector(energy: f64, v: nalgebra::DVector<Complex64>) -> Self {
        let dim = v.len();
        Self { energy, vectors: DMatrix::from_column_slice(dim, 1, v.as_slice()) }
    }

    /// Ground space of a diagonal operator: the minimising basis states.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let (energy, members) = diagonal_ground(diag);
        let mut vectors = DMatrix::zeros(diag.len(), members.len());
        for (c, &b) in members.iter().enumerate() {
            vectors[(b, c)] = Complex64::new(1.0, 0.0);
        }
        Self { energy, vectors }
    }
}

/// Minimum of `diag` and the indices within tolerance of it.
pub(crate) fn diagonal_ground(diag: &[f64]) -> (f64, Vec<usize>) {
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = diag.iter().map(|d| d.abs()).fold(1.0, f64::max);
    let tol = GROUND_DEGENERACY_TOLERANCE * scale;
    let members = diag.iter().enumerate().filter(|(_, &d)| d - min <= tol).map(|(b, _)| b).collect();
    (min, members)
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub ground: GroundSpace,
}

/// Lowest `m` eigenvalues of a Hermitian operator and its ground space.
pub fn instantaneous_spectrum(h: &OperatorMatrix, m: usize) -> Result<Spectrum> {
    if m == 0 || m > h.dim() {
        return Err(Error::InvalidArgument(format!("requested {m} levels of a {}-dimensional operator", h.dim())));
    }
    let eig = hermitian_eigen(h.matrix())?;
    let scale = eig.values.iter().map(|e| e.abs()).fold(1.0, f64::max);
    let tol = GROUND_DEGENERACY_TOLERANCE * scale;
    let e0 = eig.values[0];
    let g = eig.values.iter().take_while(|&&e| e - e0 <= tol).count();
    let vectors = eig.vectors.columns(0, g).into_owned();
    Ok(Spectrum {
        eigenvalues: eig.values[..m].to_vec(),
        ground: GroundSpace { energy: e0, vectors },
    })
}

/// Low-lying spectrum along a sweep and the position of the smallest gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub protocol: Protocol,
    pub lambda_f: f64,
    pub tau: f64,
    pub times: Vec<f64>,
    /// `levels[i]` holds the lowest eigenvalues at `times[i]`.
    pub levels: Vec<Vec<f64>>,
    pub min_gap: f64,
    /// Position of the minimal gap as a fraction of tau.
    pub min_gap_position: f64,
}

impl SpectrumSeries {
    pub fn gaps(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l[1] - l[0]).collect()
    }
}

/// Scan the lowest `m >= 2` levels on `n_times` uniform points and refine the
/// gap minimum with a parabola through its neighbours.
pub fn min_gap_scan(
    instance: &PhysicalInstance,
    protocol: Protocol,
    lambda_f: f64,
    n_times: usize,
    m: usize,
) -> Result<SpectrumSeries> {
    if n_times < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 scan points, got {n_times}")));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("a gap needs at least 2 levels".into()));
    }
    let tau = instance.tau();
    let times: Vec<f64> = (0..n_times).map(|i| tau * i as f64 / (n_times - 1) as f64).collect();
    let mut levels = Vec::with_capacity(n_times);
    for (i, &t) in times.iter().enumerate() {
        let terms = if protocol == Protocol::CdReal && (i == 0 || i == n_times - 1) {
            // the rotated frame coincides with the lab frame at both ends
            cd_terms(instance, t, lambda_f)?
        } else {
            protocol_terms(instance, protocol, lambda_f, t)?
        };
        let h = terms.to_matrix()?;
        levels.push(instantaneous_spectrum(&h, m.min(h.dim()))?.eigenvalues);
    }
    let gaps: Vec<f64> = levels.iter().map(|l| l[1] - l[0]).collect();
    let (i, _) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    let step = tau / (n_times - 1) as f64;
    let (pos, gap) = if i > 0 && i + 1 < n_times {
        let (a, b, c) = (gaps[i - 1], gaps[i], gaps[i + 1]);
        let curv = a - 2.0 * b + c;
        if curv > 0.0 {
            let delta = 0.5 * (a - c) / curv;
            (times[i] + delta * step, (b - 0.25 * (a - c) * delta).max(0.0))
        } else {
            (times[i], b)
        }
    } else {
        (times[i], gaps[i])
    };
    Ok(SpectrumSeries {
        protocol,
        lambda_f,
        tau,
        times,
        levels,
        min_gap: gap,
        min_gap_position: pos / tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::state::final_diagonal;
    use crate::operators::hamiltonian_annealing;

    #[test]
    fn transverse_field_spectrum() {
        let inst = PhysicalInstance::random(3, 4, 1.0, 2.0, 10.0, 1.0).unwrap();
        let s = instantaneous_spectrum(&hamiltonian_annealing(&inst, 0.0).unwrap(), 3).unwrap();
        assert!((s.eigenvalues[0] + 4.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] + 2.0).abs() < 1e-12);
        assert_eq!(s.ground.degeneracy(), 1);
    }

    #[test]
    fn final_spectrum_is_sorted_classical_energies() {
        let inst = PhysicalInstance::random(3, 5, 1.0, 2.0, 10.0, 1.0).unwrap();
        let s = instantaneous_spectrum(&hamiltonian_annealing(&inst, 1.0).unwrap(), 16).unwrap();
        let mut diag = final_diagonal(&inst);
        diag.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&diag) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let inst = PhysicalInstance::random(3, 6, 1.0, 2.0, 10.0, 1.0).unwrap();
        let s = instantaneous_spectrum(&hamiltonian_annealing(&inst, 0.6).unwrap(), 1).unwrap();
        let p = s.ground.projector();
        assert!((&(&p * &p) - &p).max_abs() < 1e-12);
    }

    #[test]
    fn degenerate_diagonal_ground() {
        let g = GroundSpace::from_diagonal(&[1.0, -2.0, 0.5, -2.0]);
        assert_eq!(g.degeneracy(), 2);
        assert_eq!(g.energy(), -2.0);
    }

    #[test]
    fn gap_scan_basics() {
        let inst = PhysicalInstance::random(3, 7, 1.0, 2.0, 10.0, 1.0).unwrap();
        let a = min_gap_scan(&inst, Protocol::Annealing, 0.0, 21, 3).unwrap();
        assert!((a.gaps()[0] - 2.0).abs() < 1e-12);
        assert!(a.min_gap > 0.0 && a.min_gap <= a.gaps().iter().copied().fold(f64::INFINITY, f64::min) + 1e-12);
        let c = min_gap_scan(&inst, Protocol::Cd, 0.0, 21, 3).unwrap();
        assert_eq!(a.levels, c.levels);
        assert!(min_gap_scan(&inst, Protocol::Annealing, 0.0, 2, 3).is_err());
        let r = min_gap_scan(&inst, Protocol::CdReal, 1.0, 11, 2).unwrap();
        assert!(r.min_gap > 0.0);
    }
}
