//! Python module `lhz_cd`: thin wrappers over the simulator.
//!
//! Every function takes plain numbers and strings and returns dicts of
//! floats and lists, so nothing here owns state.

use lhz::dynamics::{min_gap_scan, propagate, Integrator, SweepOptions};
use lhz::ensemble::{run_ensemble, EnsembleConfig};
use lhz::optimizer::{optimize_lambda_f, OptimizerConfig};
use lhz::{PhysicalInstance, Protocol};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(lhz_cd, LhzCdError, PyRuntimeError, "Raised when the simulator rejects or fails a run.");

fn to_py(e: lhz::Error) -> PyErr {
    match e {
        lhz::Error::InvalidArgument(_)
        | lhz::Error::InvalidInstance(_)
        | lhz::Error::InvalidOptimizer(_)
        | lhz::Error::DegenerateSize(_)
        | lhz::Error::ResourceLimit { .. } => PyValueError::new_err(e.to_string()),
        other => LhzCdError::new_err(other.to_string()),
    }
}

pub fn parse_protocol(s: &str) -> PyResult<Protocol> {
    s.parse().map_err(PyValueError::new_err)
}

pub fn parse_integrator(s: &str) -> PyResult<Integrator> {
    s.parse().map_err(PyValueError::new_err)
}

fn instance(n_logical: usize, seed: u64, tau: f64, h0: f64, c: f64, aux_pin: f64) -> PyResult<PhysicalInstance> {
    PhysicalInstance::random(n_logical, seed, h0, c, aux_pin, tau).map_err(to_py)
}

/// Package version string.
#[pyfunction]
fn version() -> &'static str {
    lhz::VERSION
}

/// Propagate one sweep and return the sampled observables.
#[pyfunction]
#[pyo3(signature = (n_logical, seed, tau, protocol="cd", lambda_f=0.0, n_samples=200, integrator="midpoint", h0=1.0, c=2.0, aux_pin=10.0))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    n_logical: usize,
    seed: u64,
    tau: f64,
    protocol: &str,
    lambda_f: f64,
    n_samples: usize,
    integrator: &str,
    h0: f64,
    c: f64,
    aux_pin: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = instance(n_logical, seed, tau, h0, c, aux_pin)?;
    let opts = SweepOptions::new(parse_protocol(protocol)?, lambda_f)
        .with_samples(n_samples)
        .with_integrator(parse_integrator(integrator)?);
    let r = py.detach(|| propagate(&inst, &opts)).map_err(to_py)?;

    let d = PyDict::new(py);
    d.set_item("t", r.samples.iter().map(|s| s.t).collect::<Vec<_>>())?;
    d.set_item("fidelity_sq", r.samples.iter().map(|s| s.fidelity_sq).collect::<Vec<_>>())?;
    d.set_item("energy", r.samples.iter().map(|s| s.energy).collect::<Vec<_>>())?;
    d.set_item("excess_energy", r.samples.iter().map(|s| s.excess_energy).collect::<Vec<_>>())?;
    d.set_item("norm", r.samples.iter().map(|s| s.norm).collect::<Vec<_>>())?;
    d.set_item("final_fidelity_sq", r.final_fidelity_sq)?;
    d.set_item("final_excess_energy", r.final_excess_energy)?;
    d.set_item("max_norm_drift", r.max_norm_drift())?;
    d.set_item("steps", r.steps)?;
    Ok(d)
}

/// Optimise the CD amplitude on one instance.
#[pyfunction]
#[pyo3(signature = (n_logical, seed, tau, lambda_bounds=(-10.0, 10.0), n_grid=81, tol=1e-3, h0=1.0, c=2.0, aux_pin=10.0))]
#[allow(clippy::too_many_arguments)]
fn optimize<'py>(
    py: Python<'py>,
    n_logical: usize,
    seed: u64,
    tau: f64,
    lambda_bounds: (f64, f64),
    n_grid: usize,
    tol: f64,
    h0: f64,
    c: f64,
    aux_pin: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = instance(n_logical, seed, tau, h0, c, aux_pin)?;
    let cfg = OptimizerConfig { n_grid, tol, ..Default::default() };
    let opt = py.detach(|| optimize_lambda_f(&inst, lambda_bounds, &cfg)).map_err(to_py)?;

    let d = PyDict::new(py);
    d.set_item("lambda_f", opt.lambda_f)?;
    d.set_item("fidelity_sq", opt.fidelity_sq)?;
    d.set_item("evaluations", opt.evaluations)?;
    d.set_item("scan_lambda", opt.curve.lambda_values)?;
    d.set_item("scan_fidelity_sq", opt.curve.fidelities)?;
    Ok(d)
}

/// Lowest `n_levels` eigenvalues along the sweep.
#[pyfunction]
#[pyo3(signature = (n_logical, seed, tau, protocol="annealing", lambda_f=0.0, n_times=201, n_levels=4, h0=1.0, c=2.0, aux_pin=10.0))]
#[allow(clippy::too_many_arguments)]
fn spectrum<'py>(
    py: Python<'py>,
    n_logical: usize,
    seed: u64,
    tau: f64,
    protocol: &str,
    lambda_f: f64,
    n_times: usize,
    n_levels: usize,
    h0: f64,
    c: f64,
    aux_pin: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = instance(n_logical, seed, tau, h0, c, aux_pin)?;
    let p = parse_protocol(protocol)?;
    let s = py.detach(|| min_gap_scan(&inst, p, lambda_f, n_times, n_levels)).map_err(to_py)?;

    let d = PyDict::new(py);
    d.set_item("times", &s.times)?;
    d.set_item("levels", &s.levels)?;
    d.set_item("min_gap", s.min_gap)?;
    d.set_item("min_gap_position", s.min_gap_position)?;
    Ok(d)
}

/// Run an ensemble from a JSON config (same keys as the CLI ensemble
/// section) and return the per-cell summary as a JSON string.
#[pyfunction]
fn ensemble_summary(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg: EnsembleConfig = serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let stats = py.detach(|| run_ensemble(&cfg)).map_err(to_py)?;
    serde_json::to_string(&stats.cells).map_err(|e| LhzCdError::new_err(e.to_string()))
}

/// Adds every function and the exception type to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LhzCdError", m.py().get_type::<LhzCdError>())?;
    m.add("__version__", lhz::VERSION)?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_summary, m)?)?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "lhz_cd")]
fn lhz_cd_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
