//! Dense complex linear algebra helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

/// Only the lower triangle of `m` is read.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    let fm = faer::Mat::<Complex64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|i| s[i].re).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok(HermitianEigen { values, vectors })
}

impl HermitianEigen {
    /// `exp(-i dt H) psi` using the stored decomposition.
    pub fn apply_propagator(&self, dt: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, e) in coeffs.iter_mut().zip(&self.values) {
            *c *= Complex64::from_polar(1.0, -dt * e);
        }
        &self.vectors * coeffs
    }

    /// Dense `exp(-i dt H)`.
    pub fn propagator(&self, dt: f64) -> DMatrix<Complex64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let phase = Complex64::from_polar(1.0, -dt * self.values[j]);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `A B - B A`
pub fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + a.adjoint()).scale(0.5)
    }

    #[test]
    fn reconstructs_matrix() {
        let h = random_hermitian(12, 3);
        let eig = hermitian_eigen(&h).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let d = DMatrix::from_diagonal(&DVector::from_iterator(12, eig.values.iter().map(|&v| Complex64::new(v, 0.0))));
        let back = &eig.vectors * d * eig.vectors.adjoint();
        assert!(max_abs(&(back - &h)) < 1e-12);
    }

    #[test]
    fn propagator_is_unitary() {
        let h = random_hermitian(16, 9);
        let u = hermitian_eigen(&h).unwrap().propagator(0.37);
        let id = DMatrix::<Complex64>::identity(16, 16);
        assert!(max_abs(&(u.adjoint() * &u - id)) < 1e-12);
    }
}
