//! Variational choice of the sweep endpoint `lambda_f`: fidelity scans, grid
//! plus golden-section maximisation, and a Gaussian profile fit.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DVector, Dyn, OMatrix, OVector, U4};
use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate, Integrator, SweepOptions};
use crate::error::{Error, Result};
use crate::lattice::PhysicalInstance;
use crate::operators::Protocol;

/// `F^2(tau)` sampled on a strictly increasing `lambda_f` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCurve {
    pub lambda_values: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub tau: f64,
    /// Seed of the instance, when it was generated from one.
    pub instance_seed: Option<u64>,
}

/// Settings shared by scans and the optimiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub n_grid: usize,
    /// Golden-section stops once the bracket is narrower than this.
    pub tol: f64,
    pub integrator: Integrator,
    /// Convergence tolerance of each propagation.
    pub sweep_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { n_grid: 81, tol: 1e-3, integrator: Integrator::SplitOperator, sweep_tolerance: 1e-6 }
    }
}

impl OptimizerConfig {
    fn sweep(&self, lambda_f: f64) -> SweepOptions {
        let mut opts = SweepOptions::new(Protocol::Cd, lambda_f).with_samples(2).with_integrator(self.integrator);
        opts.tolerance = self.sweep_tolerance;
        opts
    }
}

/// Final CD fidelity at one `lambda_f`.
pub fn final_fidelity(instance: &PhysicalInstance, lambda_f: f64, config: &OptimizerConfig) -> Result<f64> {
    propagate(instance, &config.sweep(lambda_f))
        .map(|r| r.final_fidelity_sq)
        .map_err(|e| Error::ScanPoint { lambda_f, source: Box::new(e) })
}

fn check_bounds(bounds: (f64, f64), n_grid: usize) -> Result<()> {
    let (lo, hi) = bounds;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidOptimizer(format!("bounds must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    if n_grid < 3 {
        return Err(Error::InvalidOptimizer(format!("n_grid must be at least 3, got {n_grid}")));
    }
    Ok(())
}

/// `n_grid` evenly spaced points over `bounds`, plus 0 when it lies strictly
/// inside and is not already a grid point.
pub fn lambda_grid(bounds: (f64, f64), n_grid: usize) -> Result<Vec<f64>> {
    check_bounds(bounds, n_grid)?;
    let (lo, hi) = bounds;
    let last = (n_grid - 1) as f64;
    let mut grid: Vec<f64> = (0..n_grid)
        .map(|i| if i + 1 == n_grid { hi } else { lo + (hi - lo) * i as f64 / last })
        .collect();
    if lo < 0.0 && hi > 0.0 && !grid.contains(&0.0) {
        let at = grid.partition_point(|&x| x < 0.0);
        grid.insert(at, 0.0);
    }
    Ok(grid)
}

/// One CD propagation per grid point.
pub fn scan_lambda_f(instance: &PhysicalInstance, bounds: (f64, f64), config: &OptimizerConfig) -> Result<ScanCurve> {
    let lambda_values = lambda_grid(bounds, config.n_grid)?;
    let fidelities = lambda_values
        .iter()
        .map(|&l| final_fidelity(instance, l, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanCurve { lambda_values, fidelities, tau: instance.tau(), instance_seed: instance.seed() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub lambda_f: f64,
    pub fidelity_sq: f64,
    /// The coarse scan the refinement started from.
    pub curve: ScanCurve,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Coarse scan, then golden-section maximisation on the interval between the
/// neighbours of the best grid point. Never returns less than the grid best.
pub fn optimize_lambda_f(instance: &PhysicalInstance, bounds: (f64, f64), config: &OptimizerConfig) -> Result<Optimum> {
    if !(config.tol > 0.0) {
        return Err(Error::InvalidOptimizer(format!("tol must be positive, got {}", config.tol)));
    }
    let curve = scan_lambda_f(instance, bounds, config)?;
    let grid = &curve.lambda_values;
    let i = argmax(&curve.fidelities);
    let mut best = (grid[i], curve.fidelities[i]);
    let mut evaluations = grid.len();
    let (mut a, mut b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let mut eval = |x: f64, best: &mut (f64, f64)| -> Result<f64> {
        let f = final_fidelity(instance, x, config)?;
        evaluations += 1;
        if f > best.1 {
            *best = (x, f);
        }
        Ok(f)
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut best)?;
    let mut fd = eval(d, &mut best)?;
    while b - a > config.tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut best)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut best)?;
        }
    }
    Ok(Optimum { lambda_f: best.0, fidelity_sq: best.1, curve, evaluations })
}

/// First index of the largest value.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// `amplitude * exp(-(x - mean)^2 / (2 sigma^2)) + baseline`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub mean: f64,
    pub sigma: f64,
    pub fwhm: f64,
    pub baseline: f64,
    pub residual_rms: f64,
}

impl GaussianFit {
    pub fn eval(&self, x: f64) -> f64 {
        gaussian(&[self.amplitude, self.mean, self.sigma, self.baseline], x)
    }
}

fn gaussian(p: &[f64], x: f64) -> f64 {
    let z = (x - p[1]) / p[2];
    p[0] * (-0.5 * z * z).exp() + p[3]
}

struct GaussianProblem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    p: OVector<f64, U4>,
    trace: Vec<f64>,
}

impl GaussianProblem<'_> {
    fn rms(&self) -> f64 {
        let r = self.residual_vec();
        (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt()
    }

    fn residual_vec(&self) -> DVector<f64> {
        DVector::from_iterator(self.x.len(), self.x.iter().zip(self.y).map(|(&x, &y)| gaussian(self.p.as_slice(), x) - y))
    }
}

impl LeastSquaresProblem<f64, Dyn, U4> for GaussianProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U4>;
    type ParameterStorage = Owned<f64, U4>;

    fn set_params(&mut self, p: &OVector<f64, U4>) {
        self.p.copy_from(p);
        let rms = self.rms();
        self.trace.push(rms);
    }

    fn params(&self) -> OVector<f64, U4> {
        self.p
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let r = self.residual_vec();
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U4>> {
        let (a, mu, s) = (self.p[0], self.p[1], self.p[2]);
        if s == 0.0 {
            return None;
        }
        let mut j = OMatrix::<f64, Dyn, U4>::zeros(self.x.len());
        for (row, &x) in self.x.iter().enumerate() {
            let z = (x - mu) / s;
            let e = (-0.5 * z * z).exp();
            j[(row, 0)] = e;
            j[(row, 1)] = a * e * z / s;
            j[(row, 2)] = a * e * z * z / s;
            j[(row, 3)] = 1.0;
        }
        Some(j)
    }
}

/// Least-squares Gaussian-plus-baseline fit of a scan curve.
pub fn gaussian_fit(curve: &ScanCurve) -> Result<GaussianFit> {
    fit_gaussian(&curve.lambda_values, &curve.fidelities)
}

/// Fit `y(x)`; needs at least 5 points and a maximum strictly inside the range.
pub fn fit_gaussian(x: &[f64], y: &[f64]) -> Result<GaussianFit> {
    if x.len() != y.len() {
        return Err(Error::Shape { expected: x.len(), got: y.len() });
    }
    if x.len() < 5 {
        return Err(Error::InvalidOptimizer(format!("a Gaussian fit needs at least 5 points, got {}", x.len())));
    }
    let i = argmax(y);
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if i == 0 || i == y.len() - 1 || hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::NoPeak);
    }
    let weights: Vec<f64> = y.iter().map(|v| v - lo).collect();
    let total: f64 = weights.iter().sum();
    let var = x.iter().zip(&weights).map(|(xi, w)| w * (xi - x[i]).powi(2)).sum::<f64>() / total;
    let spacing = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let sigma0 = var.sqrt().max(spacing);
    let problem = GaussianProblem {
        x,
        y,
        p: OVector::<f64, U4>::new(hi - lo, x[i], sigma0, lo),
        trace: Vec::new(),
    };
    let (problem, report) = LevenbergMarquardt::new().with_patience(200).minimize(problem);
    let p = problem.p;
    let ok = report.termination.was_successful() && p.iter().all(|v| v.is_finite()) && p[2] != 0.0;
    if !ok {
        return Err(Error::FitFailure { residuals: problem.trace });
    }
    let sigma = p[2].abs();
    Ok(GaussianFit {
        amplitude: p[0],
        mean: p[1],
        sigma,
        fwhm: 2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * sigma,
        baseline: p[3],
        residual_rms: problem.rms(),
    })
}
