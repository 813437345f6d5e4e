use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("LHZ layout needs at least 3 logical spins, got {0}")]
    DegenerateSize(usize),

    #[error("logical problem has no coupling for pair ({0}, {1})")]
    IncompleteProblem(usize, usize),

    #[error("invalid logical problem: {0}")]
    InvalidProblem(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("value {value} at position {index} is not a spin (+1/-1)")]
    NotASpin { index: usize, value: i8 },

    #[error("physical configuration violates {kind} {index}")]
    ConstraintViolation { kind: ViolationKind, index: usize },

    #[error("{what} exceeds the supported size ({size} > {limit})")]
    ResourceLimit { what: &'static str, size: usize, limit: usize },

    #[error("time {t} lies outside the sweep interval [0, {tau}]")]
    Domain { t: f64, tau: f64 },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("empty Pauli string")]
    EmptyPauliString,

    #[error("alpha denominator vanishes for qubit {0}")]
    Singular(usize),

    #[error("instantaneous spectrum is degenerate (gap {gap:e} below tolerance {tol:e})")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error("rotated Hamiltonian is undefined at t = {t} (needs 0 < t < tau)")]
    EndpointIndeterminate { t: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error(
        "propagation did not converge within {steps} steps (last fidelities {previous:.9} and {last:.9})"
    )]
    NonConvergence { steps: usize, previous: f64, last: f64 },

    #[error("scan at lambda_f = {lambda_f} failed: {source}")]
    ScanPoint {
        lambda_f: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid optimizer input: {0}")]
    InvalidOptimizer(String),

    #[error("curve has no interior peak")]
    NoPeak,

    #[error("Gaussian fit failed to converge (residual trace {residuals:?})")]
    FitFailure { residuals: Vec<f64> },

    #[error("ensemble error: {0}")]
    Ensemble(String),

    #[error("{failed} of {total} ensemble runs failed (limit 5%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Pair,
    Plaquette,
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ViolationKind::Pair => f.write_str("pair consistency at qubit"),
            ViolationKind::Plaquette => f.write_str("plaquette"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
