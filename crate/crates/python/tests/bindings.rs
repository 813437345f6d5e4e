use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module<F: for<'py> FnOnce(&Bound<'py, PyModule>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "lhz_cd").unwrap();
        lhz_cd_py::register(&m).unwrap();
        f(&m);
    });
}

#[test]
fn sweep_matches_core() {
    with_module(|m| {
        let kw = PyDict::new(m.py());
        kw.set_item("protocol", "annealing").unwrap();
        kw.set_item("n_samples", 5).unwrap();
        let d = m.getattr("sweep").unwrap().call((3, 7u64, 0.5), Some(&kw)).unwrap();
        let f: f64 = d.get_item("final_fidelity_sq").unwrap().extract().unwrap();
        let t: Vec<f64> = d.get_item("t").unwrap().extract().unwrap();
        assert_eq!(t.len(), 5);

        let inst = lhz::PhysicalInstance::random(3, 7, 1.0, 2.0, 10.0, 0.5).unwrap();
        let opts = lhz::dynamics::SweepOptions::new(lhz::Protocol::Annealing, 0.0).with_samples(5);
        assert_eq!(f, lhz::dynamics::propagate(&inst, &opts).unwrap().final_fidelity_sq);
    });
}

#[test]
fn bad_arguments_raise() {
    with_module(|m| {
        let kw = PyDict::new(m.py());
        kw.set_item("protocol", "sideways").unwrap();
        let err = m.getattr("sweep").unwrap().call((3, 0u64, 1.0), Some(&kw)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(m.py()));

        let err = m.getattr("sweep").unwrap().call1((3, 0u64, -1.0)).unwrap_err();
        assert!(err.to_string().contains("tau"), "{err}");
    });
}

#[test]
fn optimize_and_spectrum_shapes() {
    with_module(|m| {
        let kw = PyDict::new(m.py());
        kw.set_item("n_grid", 5).unwrap();
        kw.set_item("tol", 0.1).unwrap();
        kw.set_item("lambda_bounds", (-2.0, 2.0)).unwrap();
        let d = m.getattr("optimize").unwrap().call((3, 1u64, 0.2), Some(&kw)).unwrap();
        let scan: Vec<f64> = d.get_item("scan_lambda").unwrap().extract().unwrap();
        assert_eq!(scan.len(), 5);

        let s = m.getattr("spectrum").unwrap().call1((3, 1u64, 1.0)).unwrap();
        let levels: Vec<Vec<f64>> = s.get_item("levels").unwrap().extract().unwrap();
        let times: Vec<f64> = s.get_item("times").unwrap().extract().unwrap();
        assert_eq!(levels.len(), times.len());
        assert!(s.get_item("min_gap").unwrap().extract::<f64>().unwrap() > 0.0);
    });
}
