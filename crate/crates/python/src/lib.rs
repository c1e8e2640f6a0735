//! Python bindings for `globfn`.
//!
//! Reports cross the boundary as plain dicts and lists (via JSON), so the
//! Python side never depends on Rust type layouts.

use globfn::experiments::{run_sweep, ExperimentConfig};
use globfn::gallery::GalleryFunction;
use globfn::landscape::{self, GridBox, DEFAULT_TOL};
use globfn::objectives::{self as obj, Exponent};
use globfn::stationarity;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

fn err(e: globfn::Error) -> PyErr {
    match e {
        globfn::Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Rank-one tensor recovery problem with ground truth `y` and order `d`.
#[pyclass(name = "TensorProblem", frozen, module = "globfn_py")]
struct PyTensorProblem {
    inner: obj::TensorProblem,
}

#[pymethods]
impl PyTensorProblem {
    #[new]
    fn new(y: Vec<f64>, d: usize) -> PyResult<Self> {
        Ok(Self { inner: obj::TensorProblem::new(y, d).map_err(err)? })
    }

    #[getter]
    fn truth(&self) -> Vec<f64> {
        self.inner.truth().to_vec()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn eval_f1(&self, x: Vec<f64>) -> PyResult<f64> {
        obj::eval_f1(&self.inner, &x).map_err(err)
    }

    fn eval_fp(&self, x: Vec<f64>, p: f64) -> PyResult<f64> {
        obj::eval_fp(&self.inner, &x, p).map_err(err)
    }

    fn grad_fp(&self, x: Vec<f64>, p: f64) -> PyResult<Vec<f64>> {
        obj::grad_fp(&self.inner, &x, p).map_err(err)
    }

    fn eval_finf(&self, x: Vec<f64>) -> PyResult<f64> {
        obj::eval_finf(&self.inner, &x).map_err(err)
    }

    fn eval_hp(&self, x: Vec<f64>, p: f64) -> PyResult<f64> {
        obj::eval_hp(&self.inner, &x, p).map_err(err)
    }

    fn subgrad_f1(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        obj::subgrad_f1(&self.inner, &x).map_err(err)
    }

    fn in_region_s(&self, x: Vec<f64>) -> PyResult<bool> {
        obj::in_region_s(&self.inner, &x).map_err(err)
    }

    fn closed_form_f1_on_s(&self, x: Vec<f64>) -> PyResult<f64> {
        obj::closed_form_f1_on_s(&self.inner, &x).map_err(err)
    }

    /// Clarke stationarity report as a dict.
    #[pyo3(signature = (x, tol = stationarity::DEFAULT_TOL))]
    fn is_clarke_stationary<'py>(&self, py: Python<'py>, x: Vec<f64>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let report = stationarity::is_clarke_stationary(&self.inner, &x, tol).map_err(err)?;
        to_py(py, &report)
    }

    fn make_remark_point(&self, seed: u64) -> PyResult<Vec<f64>> {
        stationarity::make_remark_point(&self.inner, seed).map_err(err)
    }

    /// Grid verification on the cube `[lo, hi]^n`; returns the report dict.
    #[pyo3(signature = (objective = "f1", lo = -2.0, hi = 2.0, res = 201, p = None, weak = false, tol = DEFAULT_TOL))]
    #[allow(clippy::too_many_arguments)]
    fn verify_landscape<'py>(
        &self,
        py: Python<'py>,
        objective: &str,
        lo: f64,
        hi: f64,
        res: usize,
        p: Option<f64>,
        weak: bool,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let grid = GridBox::cube(self.inner.dim(), lo, hi, res).map_err(err)?;
        let prob = &self.inner;
        let need_p = || p.ok_or_else(|| PyValueError::new_err(format!("objective '{objective}' needs p")));
        let f: Box<landscape::Objective<'_>> = match objective {
            "f1" => Box::new(move |x: &[f64]| obj::eval(prob, x, Exponent::One).expect("grid dimension")),
            "finf" => Box::new(move |x: &[f64]| obj::eval(prob, x, Exponent::Infinity).expect("grid dimension")),
            "fp" => {
                let e = Exponent::finite(need_p()?).map_err(err)?;
                Box::new(move |x: &[f64]| obj::eval(prob, x, e).expect("grid dimension"))
            }
            "hp" => {
                let q = need_p()?;
                Exponent::finite(q).map_err(err)?;
                Box::new(move |x: &[f64]| obj::eval_hp(prob, x, q).expect("grid dimension"))
            }
            other => return Err(PyValueError::new_err(format!("unknown objective '{other}'"))),
        };
        let report = py
            .detach(|| {
                if weak {
                    landscape::verify_weakly_global(&*f, &grid, tol)
                } else {
                    landscape::verify_global(&*f, &grid, tol)
                }
            })
            .map_err(err)?;
        to_py(py, &report)
    }
}

/// Names of the gallery functions.
#[pyfunction]
fn gallery_names() -> Vec<&'static str> {
    GalleryFunction::ALL.iter().map(|f| f.name()).collect()
}

#[pyfunction]
fn gallery_eval(name: &str, x: Vec<f64>) -> PyResult<f64> {
    let f: GalleryFunction = name.parse().map_err(err)?;
    f.eval(&x).map_err(err)
}

/// Verdict string for a gallery function on its verification box.
#[pyfunction]
fn gallery_verify(py: Python<'_>, name: &str) -> PyResult<String> {
    let f: GalleryFunction = name.parse().map_err(err)?;
    let eval = move |x: &[f64]| f.eval(x).expect("gallery boxes lie in the domain");
    let report = py.detach(|| landscape::verify_global(&eval, &f.domain_box(), DEFAULT_TOL)).map_err(err)?;
    Ok(report.verdict.to_string())
}

/// Runs a recovery sweep from `key=value` lines and returns the result dict.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_kv_str(config).map_err(err)?;
    let result = py.detach(|| run_sweep(&cfg)).map_err(err)?;
    to_py(py, &result)
}

#[pyfunction]
fn relative_error(x: Vec<f64>, y: Vec<f64>, d: usize) -> PyResult<f64> {
    globfn::solvers::relative_error(&x, &y, d).map_err(err)
}

#[pymodule]
fn globfn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensorProblem>()?;
    m.add_function(wrap_pyfunction!(gallery_names, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_eval, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    Ok(())
}
