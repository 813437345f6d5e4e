use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PhysicalInstance;
use crate::operators::{annealing_terms, bit_of, cd_terms, check_dense, frame_angles, protocol_terms, HamiltonianTerms, Protocol};

use super::spectrum::{diagonal_ground, instantaneous_spectrum, GroundSpace};
use super::state::{fidelity_sq, final_diagonal, initial_state, QuantumState};

/// Smallest initial step count.
pub const MIN_STEPS: usize = 512;
/// Step ceiling of the convergence guard.
pub const MAX_STEPS: usize = 1 << 20;
/// Points used to estimate `max_t ||H(t)||`.
const NORM_SCAN_POINTS: usize = 32;

/// How a single substep `exp(-i dt H(t_mid))` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// `exp(-i H(t_mid) dt)` for each piecewise-constant step, applied to the
    /// state by a scaled Taylor series truncated at machine precision.
    MidpointExponential,
    /// Symmetric split: half diagonal phase, exact one-qubit x/y rotations, half
    /// diagonal phase. Second order and much cheaper for large registers.
    SplitOperator,
}

impl Integrator {
    pub fn as_str(self) -> &'static str {
        match self {
            Integrator::MidpointExponential => "midpoint_exponential",
            Integrator::SplitOperator => "split_operator",
        }
    }
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Integrator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "midpoint_exponential" | "midpoint-exponential" | "midpoint" => Ok(Integrator::MidpointExponential),
            "split_operator" | "split-operator" | "split" => Ok(Integrator::SplitOperator),
            other => Err(format!("unknown integrator '{other}' (expected midpoint or split)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub protocol: Protocol,
    pub lambda_f: f64,
    /// Initial step count; estimated from the Hamiltonian norm when `None`.
    pub steps: Option<usize>,
    /// Evenly spaced sample times including both ends; at least 2.
    pub n_samples: usize,
    pub integrator: Integrator,
    /// Keep doubling `steps` until the final fidelity moves by less than this.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Run the doubling guard. Without it the first run is returned as is.
    pub converge: bool,
}

impl SweepOptions {
    pub fn new(protocol: Protocol, lambda_f: f64) -> Self {
        Self {
            protocol,
            lambda_f,
            steps: None,
            n_samples: 200,
            integrator: Integrator::MidpointExponential,
            tolerance: 1e-6,
            max_steps: MAX_STEPS,
            converge: true,
        }
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }
}

/// Observables at one sample time. Energies refer to the annealing Hamiltonian
/// at that time; `excess_energy` is measured from its ground energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub t: f64,
    pub fidelity_sq: f64,
    pub energy: f64,
    pub excess_energy: f64,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub protocol: Protocol,
    pub lambda_f: f64,
    pub tau: f64,
    pub integrator: Integrator,
    /// Step count of the accepted run.
    pub steps: usize,
    pub samples: Vec<SweepSample>,
    pub final_fidelity_sq: f64,
    pub final_excess_energy: f64,
    pub final_state: QuantumState,
}

impl SweepResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.samples.iter().map(|s| (s.norm - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Basis-state sign tables for the diagonal part of the Hamiltonian.
struct Register {
    n: usize,
    z_signs: Vec<Vec<f64>>,
    plaquette_signs: Vec<Vec<f64>>,
}

impl Register {
    fn new(n: usize, plaquettes: &[[usize; 4]]) -> Result<Self> {
        check_dense(n)?;
        let dim = 1usize << n;
        let sign = |b: usize, k: usize| if b & bit_of(n, k) == 0 { 1.0 } else { -1.0 };
        let z_signs = (0..n).map(|k| (0..dim).map(|b| sign(b, k)).collect()).collect();
        let plaquette_signs = plaquettes
            .iter()
            .map(|q| (0..dim).map(|b| q.iter().map(|&k| sign(b, k)).product()).collect())
            .collect();
        Ok(Self { n, z_signs, plaquette_signs })
    }

    fn diagonal(&self, terms: &HamiltonianTerms, out: &mut [f64]) {
        out.iter_mut().for_each(|d| *d = 0.0);
        for (z, signs) in terms.z.iter().zip(&self.z_signs) {
            if *z != 0.0 {
                out.iter_mut().zip(signs).for_each(|(d, s)| *d += z * s);
            }
        }
        for (c, signs) in terms.c.iter().zip(&self.plaquette_signs) {
            if *c != 0.0 {
                out.iter_mut().zip(signs).for_each(|(d, s)| *d -= c * s);
            }
        }
    }

    /// Multiply by `exp(-i dt d_b)` entrywise.
    fn phase(psi: &mut DVector<Complex64>, diag: &[f64], dt: f64) {
        for (a, d) in psi.iter_mut().zip(diag) {
            *a *= Complex64::from_polar(1.0, -dt * d);
        }
    }

    /// `out = H psi` for diagonal `diag` plus `sum_k x_k X_k + y_k Y_k`.
    fn apply(&self, psi: &DVector<Complex64>, diag: &[f64], x: &[f64], y: &[f64], out: &mut DVector<Complex64>) {
        for ((o, a), d) in out.iter_mut().zip(psi.iter()).zip(diag) {
            *o = a * d;
        }
        for k in 0..self.n {
            if x[k] == 0.0 && y[k] == 0.0 {
                continue;
            }
            let bit = bit_of(self.n, k);
            // <b|X+Y... : Y|0> = i|1>, Y|1> = -i|0>
            let to_one = Complex64::new(x[k], y[k]);
            let to_zero = Complex64::new(x[k], -y[k]);
            for b in (0..psi.len()).filter(|b| b & bit == 0) {
                out[b] += to_zero * psi[b | bit];
                out[b | bit] += to_one * psi[b];
            }
        }
    }

    /// `exp(-i dt (x X_k + y Y_k))` on qubit `k`.
    fn rotate(&self, psi: &mut DVector<Complex64>, k: usize, x: f64, y: f64, dt: f64) {
        let r = x.hypot(y);
        if r == 0.0 {
            return;
        }
        let (s, c) = (r * dt).sin_cos();
        // -i sin/r * (x - iy) and -i sin/r * (x + iy)
        let up = Complex64::new(-s * y / r, -s * x / r);
        let down = Complex64::new(s * y / r, -s * x / r);
        let bit = bit_of(self.n, k);
        let dim = psi.len();
        for b in (0..dim).filter(|b| b & bit == 0) {
            let (a0, a1) = (psi[b], psi[b | bit]);
            psi[b] = a0 * c + up * a1;
            psi[b | bit] = a1 * c + down * a0;
        }
    }
}

/// Applies substeps. The split integrator defers each trailing half phase and
/// merges it with the leading half phase of the next substep; `flush` applies
/// whatever is pending.
struct Stepper {
    integrator: Integrator,
    register: Register,
    diag: Vec<f64>,
    pending: Vec<f64>,
    pending_dt: f64,
}

impl Stepper {
    fn new(integrator: Integrator, n: usize, plaquettes: &[[usize; 4]]) -> Result<Self> {
        let register = Register::new(n, plaquettes)?;
        let dim = 1 << n;
        Ok(Self { integrator, diag: vec![0.0; dim], pending: vec![0.0; dim], pending_dt: 0.0, register })
    }

    fn step(&mut self, psi: &mut DVector<Complex64>, terms: &HamiltonianTerms, dt: f64) -> Result<()> {
        match self.integrator {
            Integrator::MidpointExponential => {
                self.register.diagonal(terms, &mut self.diag);
                self.exp_action(psi, &terms.x, &terms.y, dt);
            }
            Integrator::SplitOperator => {
                self.register.diagonal(terms, &mut self.diag);
                if self.pending_dt == 0.0 {
                    Register::phase(psi, &self.diag, 0.5 * dt);
                } else {
                    let (a, b) = (self.pending_dt, 0.5 * dt);
                    for (p, d) in self.pending.iter_mut().zip(&self.diag) {
                        *p = a * *p + b * d;
                    }
                    Register::phase(psi, &self.pending, 1.0);
                }
                for k in 0..self.register.n {
                    self.register.rotate(psi, k, terms.x[k], terms.y[k], dt);
                }
                std::mem::swap(&mut self.pending, &mut self.diag);
                self.pending_dt = 0.5 * dt;
            }
        }
        Ok(())
    }

    /// `psi <- exp(-i H dt) psi` with `H` given by `self.diag`, `x` and `y`.
    /// The interval is cut so that `|H| h <= 1` and each piece is summed as a
    /// Taylor series until the next term falls below machine precision.
    fn exp_action(&mut self, psi: &mut DVector<Complex64>, x: &[f64], y: &[f64], dt: f64) {
        let bound = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
            + x.iter().zip(y).map(|(a, b)| a.hypot(*b)).sum::<f64>();
        let pieces = (bound * dt.abs()).ceil().max(1.0) as usize;
        let h = dt / pieces as f64;
        let mut term = psi.clone();
        let mut next = psi.clone();
        for _ in 0..pieces {
            term.copy_from(psi);
            for j in 1..=40 {
                self.register.apply(&term, &self.diag, x, y, &mut next);
                next *= Complex64::new(0.0, -h / j as f64);
                std::mem::swap(&mut term, &mut next);
                *psi += &term;
                if term.norm() <= f64::EPSILON * 1e-2 * psi.norm() {
                    break;
                }
            }
        }
    }

    fn flush(&mut self, psi: &mut DVector<Complex64>) {
        if self.pending_dt != 0.0 {
            Register::phase(psi, &self.pending, self.pending_dt);
            self.pending_dt = 0.0;
        }
    }
}

/// Evolve `state` from `t0` to `t1` in `steps` equal substeps, each using the
/// Hamiltonian returned by `terms_at` at the substep midpoint.
pub fn evolve<F>(
    state: &mut QuantumState,
    t0: f64,
    t1: f64,
    steps: usize,
    integrator: Integrator,
    mut terms_at: F,
) -> Result<()>
where
    F: FnMut(f64) -> Result<HamiltonianTerms>,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let dt = (t1 - t0) / steps as f64;
    let first = terms_at(t0 + 0.5 * dt)?;
    if state.dim() != 1 << first.n_qubits() {
        return Err(Error::Shape { expected: 1 << first.n_qubits(), got: state.dim() });
    }
    let mut stepper = Stepper::new(integrator, first.n_qubits(), &first.plaquettes)?;
    stepper.step(state.amplitudes_mut(), &first, dt)?;
    for i in 1..steps {
        let terms = terms_at(t0 + (i as f64 + 0.5) * dt)?;
        stepper.step(state.amplitudes_mut(), &terms, dt)?;
    }
    stepper.flush(state.amplitudes_mut());
    Ok(())
}

/// `exp(-i sign sum_k theta_k/2 Z_k)` applied in place: sign=+1 maps lab to
/// rotated frame, sign=-1 maps back.
fn frame_rotation(psi: &mut DVector<Complex64>, theta: &[f64], sign: f64) {
    let n = theta.len();
    for (b, a) in psi.iter_mut().enumerate() {
        let phase: f64 = theta
            .iter()
            .enumerate()
            .map(|(k, th)| if b & bit_of(n, k) == 0 { 0.5 * th } else { -0.5 * th })
            .sum();
        *a *= Complex64::from_polar(1.0, sign * phase);
    }
}

/// Midpoint scan of `max_t sum |coefficients|`. With `diagonal_only` the one-body
/// x/y coefficients, which the split integrator applies exactly, are left out.
fn norm_estimate(instance: &PhysicalInstance, protocol: Protocol, lambda_f: f64, diagonal_only: bool) -> Result<f64> {
    let tau = instance.tau();
    let mut best: f64 = 0.0;
    for i in 0..NORM_SCAN_POINTS {
        let t = tau * (i as f64 + 0.5) / NORM_SCAN_POINTS as f64;
        let terms = protocol_terms(instance, protocol, lambda_f, t)?;
        let est = if diagonal_only {
            terms.z.iter().chain(&terms.c).map(|v| v.abs()).sum()
        } else {
            terms.norm_estimate()
        };
        best = best.max(est);
    }
    Ok(best)
}

/// Initial step count `max(512, ceil(10 tau max||H||))`, the norm taken over the
/// terms the integrator does not treat exactly.
pub fn initial_steps(instance: &PhysicalInstance, protocol: Protocol, lambda_f: f64, integrator: Integrator) -> Result<usize> {
    let est = norm_estimate(instance, protocol, lambda_f, integrator == Integrator::SplitOperator)?;
    let steps = (10.0 * instance.tau() * est).ceil();
    Ok(if steps.is_finite() && steps < usize::MAX as f64 { (steps as usize).max(MIN_STEPS) } else { usize::MAX })
}

struct RawRun {
    states: Vec<QuantumState>,
    final_fidelity: f64,
}

/// One fixed-step run storing the lab-frame state at each sample time.
fn run_fixed(
    instance: &PhysicalInstance,
    opts: &SweepOptions,
    steps: usize,
    final_ground: &GroundSpace,
) -> Result<RawRun> {
    let tau = instance.tau();
    let dt = tau / steps as f64;
    let per_sample = steps / (opts.n_samples - 1);
    let layout = instance.layout();
    let mut stepper = Stepper::new(opts.integrator, layout.n_physical(), layout.constraints())?;
    let mut psi = initial_state(layout);
    let mut states = Vec::with_capacity(opts.n_samples);
    states.push(psi.clone());
    let rotated = opts.protocol == Protocol::CdReal && steps > 1;
    let mut in_rotated_frame = false;
    for i in 0..steps {
        let t_mid = (i as f64 + 0.5) * dt;
        let terms = if rotated && i > 0 && i + 1 < steps {
            if !in_rotated_frame {
                stepper.flush(psi.amplitudes_mut());
                frame_rotation(psi.amplitudes_mut(), &frame_angles(instance, i as f64 * dt, opts.lambda_f)?, 1.0);
                in_rotated_frame = true;
            }
            protocol_terms(instance, Protocol::CdReal, opts.lambda_f, t_mid)?
        } else {
            if in_rotated_frame {
                stepper.flush(psi.amplitudes_mut());
                frame_rotation(psi.amplitudes_mut(), &frame_angles(instance, i as f64 * dt, opts.lambda_f)?, -1.0);
                in_rotated_frame = false;
            }
            match opts.protocol {
                Protocol::Annealing => annealing_terms(instance, t_mid)?,
                _ => cd_terms(instance, t_mid, opts.lambda_f)?,
            }
        };
        stepper.step(psi.amplitudes_mut(), &terms, dt)?;
        if (i + 1) % per_sample == 0 {
            stepper.flush(psi.amplitudes_mut());
            let mut snapshot = psi.clone();
            if in_rotated_frame {
                let t = (i + 1) as f64 * dt;
                frame_rotation(snapshot.amplitudes_mut(), &frame_angles(instance, t, opts.lambda_f)?, -1.0);
            }
            states.push(snapshot);
        }
    }
    let final_fidelity = fidelity_sq(states.last().expect("samples"), final_ground);
    Ok(RawRun { states, final_fidelity })
}

fn validate(opts: &SweepOptions) -> Result<()> {
    if opts.n_samples < 2 {
        return Err(Error::InvalidArgument(format!("n_samples must be at least 2, got {}", opts.n_samples)));
    }
    if opts.steps == Some(0) {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !opts.lambda_f.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda_f must be finite, got {}", opts.lambda_f)));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tolerance)));
    }
    Ok(())
}

/// Ground space of the annealing Hamiltonian at `t`, with shortcuts at both ends.
fn reference_ground(instance: &PhysicalInstance, t: f64, final_ground: &GroundSpace) -> Result<GroundSpace> {
    if t >= instance.tau() {
        return Ok(final_ground.clone());
    }
    if t == 0.0 && instance.h_start().iter().all(|&h| h > 0.0) {
        let psi = initial_state(instance.layout());
        let energy = -instance.h_start().iter().sum::<f64>();
        return Ok(GroundSpace::from_vector(energy, psi.amplitudes().clone()));
    }
    let h = annealing_terms(instance, t)?.to_matrix()?;
    Ok(instantaneous_spectrum(&h, 1)?.ground)
}

/// Sweep `instance` over `[0, tau]` under the chosen protocol, doubling the step
/// count until the final ground-state fidelity is converged.
pub fn propagate(instance: &PhysicalInstance, opts: &SweepOptions) -> Result<SweepResult> {
    validate(opts)?;
    let intervals = opts.n_samples - 1;
    let requested = match opts.steps {
        Some(s) => s,
        None => initial_steps(instance, opts.protocol, opts.lambda_f, opts.integrator)?,
    };
    let mut steps = requested.div_ceil(intervals).saturating_mul(intervals);
    let ceiling = if opts.converge { steps.saturating_mul(2) } else { steps };
    if ceiling > opts.max_steps {
        return Err(Error::ResourceLimit { what: "sweep step count", size: ceiling, limit: opts.max_steps });
    }
    let diag = final_diagonal(instance);
    let final_ground = GroundSpace::from_diagonal(&diag);
    let mut run = run_fixed(instance, opts, steps, &final_ground)?;
    while opts.converge {
        let previous = run.final_fidelity;
        steps *= 2;
        run = run_fixed(instance, opts, steps, &final_ground)?;
        if (run.final_fidelity - previous).abs() < opts.tolerance {
            break;
        }
        if steps.saturating_mul(2) > opts.max_steps {
            return Err(Error::NonConvergence { steps, previous, last: run.final_fidelity });
        }
    }
    let (e0_final, _) = diagonal_ground(&diag);
    let tau = instance.tau();
    let mut samples = Vec::with_capacity(opts.n_samples);
    for (s, psi) in run.states.iter().enumerate() {
        let t = if s == intervals { tau } else { tau * s as f64 / intervals as f64 };
        let (fidelity, energy, e0) = if s == intervals {
            (run.final_fidelity, psi.diagonal_expectation(&diag), e0_final)
        } else {
            let ground = reference_ground(instance, t, &final_ground)?;
            let h = annealing_terms(instance, t)?.to_matrix()?;
            (fidelity_sq(psi, &ground), psi.expectation(&h), ground.energy())
        };
        samples.push(SweepSample { t, fidelity_sq: fidelity, energy, excess_energy: energy - e0, norm: psi.norm() });
    }
    let last = *samples.last().expect("samples");
    Ok(SweepResult {
        protocol: opts.protocol,
        lambda_f: opts.lambda_f,
        tau,
        integrator: opts.integrator,
        steps,
        samples,
        final_fidelity_sq: last.fidelity_sq,
        final_excess_energy: last.excess_energy,
        final_state: run.states.pop().expect("samples"),
    })
}
