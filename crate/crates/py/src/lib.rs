//! Python bindings for `excursion-lab`.

use pyo3::exceptions::{PyArithmeticError, PyIOError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

use excursion_lab::experiments::{run_verify as verify, ExperimentConfig};
use excursion_lab::{functionals, occupation, path, stats, Error, Orientation, RngStream};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) => PyValueError::new_err(e.to_string()),
        Error::Domain(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
    }
}

fn orientation(name: &str) -> PyResult<Orientation> {
    match name {
        "forward" => Ok(Orientation::Forward),
        "reversed" => Ok(Orientation::Reversed),
        other => Err(PyValueError::new_err(format!(
            "orientation must be 'forward' or 'reversed', got {other:?}"
        ))),
    }
}

#[pyclass(name = "PathGrid", module = "excursion_lab", frozen)]
struct PyPathGrid {
    inner: path::PathGrid,
}

#[pymethods]
impl PyPathGrid {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: path::PathGrid::new(values).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn tent(n_steps: usize) -> PyResult<Self> {
        Ok(Self {
            inner: path::PathGrid::tent(n_steps).map_err(to_py)?,
        })
    }

    #[getter]
    fn n_steps(&self) -> usize {
        self.inner.n_steps()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn value_at(&self, t: f64) -> f64 {
        self.inner.value_at(t)
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __repr__(&self) -> String {
        format!("PathGrid(n_steps={})", self.inner.n_steps())
    }
}

#[pyclass(name = "OccupationProfile", module = "excursion_lab", frozen)]
struct PyOccupationProfile {
    inner: occupation::OccupationProfile,
}

#[pymethods]
impl PyOccupationProfile {
    #[getter]
    fn bin_width(&self) -> f64 {
        self.inner.bin_width()
    }

    #[getter]
    fn n_bins(&self) -> usize {
        self.inner.n_bins()
    }

    #[getter]
    fn occupation(&self) -> Vec<f64> {
        self.inner.occupation().to_vec()
    }

    #[getter]
    fn local_time(&self) -> Vec<f64> {
        self.inner.local_time().to_vec()
    }

    #[getter]
    fn h_edges(&self) -> Vec<f64> {
        self.inner.h_edges().to_vec()
    }

    #[getter]
    fn path_max(&self) -> f64 {
        self.inner.path_max()
    }

    fn cumulative(&self, x: f64) -> f64 {
        self.inner.cumulative(x)
    }

    fn h_inverse(&self, t: f64) -> PyResult<f64> {
        self.inner.h_inverse(t).map_err(to_py)
    }

    fn jeulin_path(&self, n_steps: usize) -> PyResult<PyPathGrid> {
        Ok(PyPathGrid {
            inner: self.inner.jeulin_path(n_steps).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "OccupationProfile(bin_width={}, n_bins={}, path_max={})",
            self.inner.bin_width(),
            self.inner.n_bins(),
            self.inner.path_max()
        )
    }
}

#[pyclass(name = "TestReport", module = "excursion_lab", frozen, get_all)]
struct PyTestReport {
    name: String,
    statistic: f64,
    threshold: f64,
    alpha: f64,
    passed: bool,
    sample_sizes: (usize, usize),
}

impl From<stats::TestReport> for PyTestReport {
    fn from(r: stats::TestReport) -> Self {
        Self {
            name: r.name,
            statistic: r.statistic,
            threshold: r.threshold,
            alpha: r.alpha,
            passed: r.pass,
            sample_sizes: r.sample_sizes,
        }
    }
}

#[pymethods]
impl PyTestReport {
    fn __repr__(&self) -> String {
        format!(
            "TestReport(name={:?}, statistic={}, threshold={}, passed={})",
            self.name,
            self.statistic,
            self.threshold,
            if self.passed { "True" } else { "False" }
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n_steps, seed, stream_index = 0))]
fn sample_excursion(n_steps: usize, seed: u64, stream_index: u64) -> PyResult<PyPathGrid> {
    let inner =
        path::sample_excursion(n_steps, RngStream::new(seed, stream_index)).map_err(to_py)?;
    Ok(PyPathGrid { inner })
}

#[pyfunction]
#[pyo3(signature = (n_steps, seed, stream_index = 0))]
fn sample_brownian_bridge(n_steps: usize, seed: u64, stream_index: u64) -> PyResult<PyPathGrid> {
    let inner =
        path::sample_brownian_bridge(n_steps, RngStream::new(seed, stream_index)).map_err(to_py)?;
    Ok(PyPathGrid { inner })
}

#[pyfunction]
fn occupation_profile(path: &PyPathGrid, bin_width: f64) -> PyResult<PyOccupationProfile> {
    let inner = occupation::occupation_profile(&path.inner, bin_width).map_err(to_py)?;
    Ok(PyOccupationProfile { inner })
}

#[pyfunction]
fn path_max(path: &PyPathGrid) -> f64 {
    occupation::path_max(&path.inner)
}

#[pyfunction]
fn weighted_area(path: &PyPathGrid, n: u32) -> PyResult<f64> {
    functionals::weighted_area(&path.inner, n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (path, n, orientation = "forward"))]
fn inverse_integral(path: &PyPathGrid, n: u32, orientation: &str) -> PyResult<f64> {
    functionals::inverse_integral(&path.inner, n, self::orientation(orientation)?).map_err(to_py)
}

#[pyfunction]
fn l2_integral(profile: &PyOccupationProfile, n: u32) -> PyResult<f64> {
    functionals::l2_integral(&profile.inner, n).map_err(to_py)
}

#[pyfunction]
fn min_functional(profile: &PyOccupationProfile, n: u32) -> PyResult<f64> {
    functionals::min_functional(&profile.inner, n).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (path, n, n_sub = None))]
fn min_bruteforce(path: &PyPathGrid, n: u32, n_sub: Option<usize>) -> PyResult<f64> {
    match n_sub {
        Some(m) => functionals::min_bruteforce_with(&path.inner, n, m),
        None => functionals::min_bruteforce(&path.inner, n),
    }
    .map_err(to_py)
}

#[pyfunction]
fn gs_statistic(path: &PyPathGrid, profile: &PyOccupationProfile) -> f64 {
    functionals::gs_statistic(&path.inner, &profile.inner)
}

#[pyfunction]
fn prop_statistic(path: &PyPathGrid, profile: &PyOccupationProfile, n: u32) -> PyResult<f64> {
    functionals::prop_statistic(&path.inner, &profile.inner, n).map_err(to_py)
}

#[pyfunction]
fn brownian_from_excursion(path: &PyPathGrid) -> PyResult<PyPathGrid> {
    let inner = functionals::brownian_from_excursion(&path.inner).map_err(to_py)?;
    Ok(PyPathGrid { inner })
}

#[pyfunction]
fn weighted_bm_integral(w_path: &PyPathGrid, n: u32) -> PyResult<f64> {
    functionals::weighted_bm_integral(&w_path.inner, n).map_err(to_py)
}

#[pyfunction]
fn normal_cdf(z: f64) -> f64 {
    stats::normal_cdf(z)
}

#[pyfunction]
#[pyo3(signature = (xs, mean, variance, alpha = 0.001))]
fn ks_one_sample_normal(
    xs: Vec<f64>,
    mean: f64,
    variance: f64,
    alpha: f64,
) -> PyResult<PyTestReport> {
    Ok(
        stats::ks_one_sample_normal("ks_one_sample_normal", &xs, mean, variance, alpha)
            .map_err(to_py)?
            .into(),
    )
}

#[pyfunction]
#[pyo3(signature = (xs, ys, alpha = 0.001))]
fn ks_two_sample(xs: Vec<f64>, ys: Vec<f64>, alpha: f64) -> PyResult<PyTestReport> {
    Ok(stats::ks_two_sample("ks_two_sample", &xs, &ys, alpha)
        .map_err(to_py)?
        .into())
}

/// Runs the identity suite. `config_json` holds any subset of the
/// ExperimentConfig fields; the report comes back as a JSON string.
#[pyfunction]
#[pyo3(signature = (config_json = None))]
fn run_verify(py: Python<'_>, config_json: Option<&str>) -> PyResult<String> {
    let config: ExperimentConfig = match config_json {
        Some(text) => serde_json::from_str(text).map_err(|e| to_py(e.into()))?,
        None => ExperimentConfig::default(),
    };
    let report = py.detach(|| verify(&config)).map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| to_py(e.into()))
}

#[pymodule(name = "excursion_lab")]
fn excursion_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPathGrid>()?;
    m.add_class::<PyOccupationProfile>()?;
    m.add_class::<PyTestReport>()?;
    m.add_function(wrap_pyfunction!(sample_excursion, m)?)?;
    m.add_function(wrap_pyfunction!(sample_brownian_bridge, m)?)?;
    m.add_function(wrap_pyfunction!(occupation_profile, m)?)?;
    m.add_function(wrap_pyfunction!(path_max, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_area, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_integral, m)?)?;
    m.add_function(wrap_pyfunction!(l2_integral, m)?)?;
    m.add_function(wrap_pyfunction!(min_functional, m)?)?;
    m.add_function(wrap_pyfunction!(min_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(gs_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(prop_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(brownian_from_excursion, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_bm_integral, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(ks_one_sample_normal, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
