//! Python bindings for the 1-bit compressed sensing library: the domain
//! types, the recovery algorithms, the probability laws, and a JSON-driven
//! entry point to the benchmark harness.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use onebit_cs as cs;
use onebit_cs::bench;
use onebit_cs::history::AlphaMode;

fn value_err(e: cs::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An exactly K-sparse unit-norm signal.
#[pyclass(frozen, name = "SparseSignal")]
struct PySparseSignal {
    inner: cs::SparseSignal,
}

#[pymethods]
impl PySparseSignal {
    /// Wraps a list of coefficients that already has unit 2-norm.
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: cs::SparseSignal::new(values).map_err(value_err)?,
        })
    }

    /// Builds a signal by normalizing arbitrary coefficients.
    #[staticmethod]
    fn from_unnormalized(values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: cs::SparseSignal::from_unnormalized(values).map_err(value_err)?,
        })
    }

    /// Draws a random signal: k distinct support positions, standard
    /// normal values, unit normalization.
    #[staticmethod]
    fn generate(n: usize, k: usize, seed: u64) -> PyResult<Self> {
        let mut rng = cs::Rng::from_seed(seed);
        Ok(Self {
            inner: cs::gen_sparse_signal(n, k, &mut rng).map_err(value_err)?,
        })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support().to_vec()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn sparsity(&self) -> usize {
        self.inner.sparsity()
    }

    fn __repr__(&self) -> String {
        format!(
            "SparseSignal(n={}, k={})",
            self.inner.dimension(),
            self.inner.sparsity()
        )
    }
}

/// Dense M x N measurement matrix.
#[pyclass(frozen, name = "MeasurementEnsemble")]
struct PyMeasurementEnsemble {
    inner: cs::MeasurementEnsemble,
}

#[pymethods]
impl PyMeasurementEnsemble {
    /// Wraps a list of equal-length rows.
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("rows must have equal lengths"));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(Self {
            inner: cs::MeasurementEnsemble::from_row_major(entries, m, n).map_err(value_err)?,
        })
    }

    /// Draws an i.i.d. standard normal matrix.
    #[staticmethod]
    fn generate(m: usize, n: usize, seed: u64) -> PyResult<Self> {
        let mut rng = cs::Rng::from_seed(seed);
        Ok(Self {
            inner: cs::gen_measurement_matrix(m, n, &mut rng).map_err(value_err)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn row(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.m() {
            return Err(PyValueError::new_err(format!("row {i} out of range")));
        }
        Ok(self.inner.row(i).to_vec())
    }

    fn column(&self, j: usize) -> PyResult<Vec<f64>> {
        if j >= self.inner.n() {
            return Err(PyValueError::new_err(format!("column {j} out of range")));
        }
        Ok(self.inner.column(j))
    }

    fn __repr__(&self) -> String {
        format!(
            "MeasurementEnsemble(m={}, n={})",
            self.inner.m(),
            self.inner.n()
        )
    }
}

/// A vector of 1-bit measurements, each exactly -1 or +1.
#[pyclass(frozen, name = "BitMeasurements")]
struct PyBitMeasurements {
    inner: cs::BitMeasurements,
}

#[pymethods]
impl PyBitMeasurements {
    #[new]
    #[pyo3(signature = (bits, flip_ratio = 0.0))]
    fn new(bits: Vec<i8>, flip_ratio: f64) -> PyResult<Self> {
        Ok(Self {
            inner: cs::BitMeasurements::new(bits, flip_ratio).map_err(value_err)?,
        })
    }

    #[getter]
    fn bits(&self) -> Vec<i8> {
        self.inner.bits().to_vec()
    }

    #[getter]
    fn flip_ratio(&self) -> f64 {
        self.inner.flip_ratio()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "BitMeasurements(m={}, flip_ratio={})",
            self.inner.len(),
            self.inner.flip_ratio()
        )
    }
}

/// Outcome of one recovery run.
#[pyclass(frozen, name = "RecoveryResult")]
struct PyRecoveryResult {
    inner: cs::RecoveryResult,
}

#[pymethods]
impl PyRecoveryResult {
    #[getter]
    fn x_star(&self) -> Vec<f64> {
        self.inner.x_star.clone()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support.clone()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.coefficients.clone()
    }

    #[getter]
    fn candidate_support(&self) -> Option<Vec<usize>> {
        self.inner
            .candidate_support
            .as_ref()
            .map(|c| c.indices().to_vec())
    }

    #[getter]
    fn alpha_used(&self) -> Option<f64> {
        self.inner.alpha_used
    }

    #[getter]
    fn iterations(&self) -> Option<usize> {
        self.inner.iterations
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.wall_time
    }

    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.label()
    }

    #[getter]
    fn ok(&self) -> bool {
        self.inner.status.is_success()
    }

    fn __repr__(&self) -> String {
        format!(
            "RecoveryResult(status='{}', support={:?})",
            self.inner.status.label(),
            self.inner.support
        )
    }
}

fn alpha_mode_from_args(alpha: Option<f64>, alpha0: f64, tau: f64) -> AlphaMode {
    match alpha {
        Some(value) => AlphaMode::Fixed { alpha: value },
        None => AlphaMode::Adaptive { alpha0, tau },
    }
}

/// Clean measurements sign(A x).
#[pyfunction]
fn measure(a: &PyMeasurementEnsemble, x: &PySparseSignal) -> PyResult<PyBitMeasurements> {
    Ok(PyBitMeasurements {
        inner: cs::measure(&a.inner, &x.inner).map_err(value_err)?,
    })
}

/// Independently negates each bit with probability rho.
#[pyfunction]
fn apply_sign_flips(y: &PyBitMeasurements, rho: f64, seed: u64) -> PyResult<PyBitMeasurements> {
    let mut rng = cs::Rng::from_seed(seed);
    Ok(PyBitMeasurements {
        inner: cs::apply_sign_flips(&y.inner, rho, &mut rng).map_err(value_err)?,
    })
}

/// Relative error ||x - x_star|| / ||x||.
#[pyfunction]
fn recovery_error(x: &PySparseSignal, x_star: Vec<f64>) -> PyResult<f64> {
    cs::recovery_error(&x.inner, &x_star).map_err(value_err)
}

/// Percentage of true support indices present in the estimate.
#[pyfunction]
fn support_detection_accuracy(true_supp: Vec<usize>, est_supp: Vec<usize>) -> PyResult<f64> {
    cs::support_detection_accuracy(&true_supp, &est_supp).map_err(value_err)
}

/// Noiseless mismatch probability arccos(x)/pi.
#[pyfunction]
fn app_probability(x: f64) -> PyResult<f64> {
    cs::app_probability(x).map_err(value_err)
}

/// Mismatch probability under sign-flip noise.
#[pyfunction]
fn flip_probability(x: f64, rho: f64) -> PyResult<f64> {
    cs::flip_probability(x, rho).map_err(value_err)
}

/// Expected Hamming distance M * P(x, rho).
#[pyfunction]
fn expected_hamming(x: f64, rho: f64, m: usize) -> PyResult<f64> {
    cs::expected_hamming(x, rho, m).map_err(value_err)
}

/// Lower bound on the probability that the larger coefficient wins the
/// Hamming comparison.
#[pyfunction]
fn lemma2_lower_bound(m: usize, rho: f64, eps: f64) -> PyResult<f64> {
    cs::lemma2_lower_bound(m, rho, eps).map_err(value_err)
}

/// Redundancy factor 1 + alpha0 * exp(-tau * m / n).
#[pyfunction]
fn adaptive_alpha(m: usize, n: usize, alpha0: f64, tau: f64) -> PyResult<f64> {
    cs::adaptive_alpha(m, n, alpha0, tau).map_err(value_err)
}

/// Positions where the bits disagree with the sign of a real column.
#[pyfunction]
fn hamming_distance(y: &PyBitMeasurements, column: Vec<f64>) -> PyResult<usize> {
    cs::hamming_distance(&y.inner, &column).map_err(value_err)
}

/// Amplitude proxies cos(pi * H(y, A_j) / M) for every column.
#[pyfunction]
fn estimate_proxy(y: &PyBitMeasurements, a: &PyMeasurementEnsemble) -> PyResult<Vec<f64>> {
    Ok(cs::estimate_proxy(&y.inner, &a.inner)
        .map_err(value_err)?
        .h()
        .to_vec())
}

/// Indices of the l largest magnitudes (ties toward the smaller index).
#[pyfunction]
fn find_supp(magnitudes: Vec<f64>, l: usize) -> PyResult<Vec<usize>> {
    Ok(cs::find_supp(&magnitudes, l, 1.0)
        .map_err(value_err)?
        .indices()
        .to_vec())
}

/// Keeps the k largest-magnitude entries.
#[pyfunction]
fn hard_threshold(v: Vec<f64>, k: usize) -> PyResult<Vec<f64>> {
    cs::hard_threshold(&v, k).map_err(value_err)
}

/// v / ||v||.
#[pyfunction]
fn normalize(v: Vec<f64>) -> PyResult<Vec<f64>> {
    cs::normalize(&v).map_err(value_err)
}

/// Full recovery: Hamming proxy, candidate support of round(alpha*k)
/// columns, least squares, hard threshold, normalization. `alpha=None`
/// selects the adaptive schedule `1 + alpha0*exp(-tau*m/n)`.
#[pyfunction]
#[pyo3(signature = (y, a, k, alpha = None, alpha0 = 4.0, tau = 1.0))]
fn history_recover(
    py: Python<'_>,
    y: &PyBitMeasurements,
    a: &PyMeasurementEnsemble,
    k: usize,
    alpha: Option<f64>,
    alpha0: f64,
    tau: f64,
) -> PyResult<PyRecoveryResult> {
    let params =
        cs::HistoryParams::new(k, alpha_mode_from_args(alpha, alpha0, tau)).map_err(value_err)?;
    let inner = py
        .detach(|| cs::history_recover(&y.inner, &a.inner, &params))
        .map_err(value_err)?;
    Ok(PyRecoveryResult { inner })
}

/// Runs only the least-squares stage on a caller-supplied support.
#[pyfunction]
fn history_recover_with_support(
    py: Python<'_>,
    y: &PyBitMeasurements,
    a: &PyMeasurementEnsemble,
    support: Vec<usize>,
    k: usize,
) -> PyResult<PyRecoveryResult> {
    let inner = py
        .detach(|| cs::history_recover_with_support(&y.inner, &a.inner, &support, k))
        .map_err(value_err)?;
    Ok(PyRecoveryResult { inner })
}

/// BIHT-l2 baseline.
#[pyfunction]
#[pyo3(signature = (y, a, k, max_iters = 200, step_size = 1.0))]
fn biht_l2_recover(
    py: Python<'_>,
    y: &PyBitMeasurements,
    a: &PyMeasurementEnsemble,
    k: usize,
    max_iters: usize,
    step_size: f64,
) -> PyResult<PyRecoveryResult> {
    let params = cs::BihtParams::new(k, max_iters, step_size).map_err(value_err)?;
    let inner = py
        .detach(|| cs::biht_l2_recover(&y.inner, &a.inner, &params))
        .map_err(value_err)?;
    Ok(PyRecoveryResult { inner })
}

/// Passive baseline; `gamma=None` selects sqrt(log(n)/m).
#[pyfunction]
#[pyo3(signature = (y, a, k, gamma = None))]
fn passive_recover(
    py: Python<'_>,
    y: &PyBitMeasurements,
    a: &PyMeasurementEnsemble,
    k: usize,
    gamma: Option<f64>,
) -> PyResult<PyRecoveryResult> {
    let params = match gamma {
        Some(g) => cs::PassiveParams::new(k, g),
        None => cs::PassiveParams::with_default_gamma(k, a.inner.n(), a.inner.m()),
    }
    .map_err(value_err)?;
    let inner = py
        .detach(|| cs::passive_recover(&y.inner, &a.inner, &params))
        .map_err(value_err)?;
    Ok(PyRecoveryResult { inner })
}

/// Monte-Carlo law checks; returns (all_passed, report_lines).
#[pyfunction]
fn verify_laws(py: Python<'_>, samples: usize, seed: u64) -> PyResult<(bool, Vec<String>)> {
    let report = py
        .detach(|| cs::verify_laws(samples, seed))
        .map_err(value_err)?;
    Ok((report.all_passed(), report.lines()))
}

/// Trial seed derivation used by the benchmark harness.
#[pyfunction]
fn derive_seed(
    base_seed: u64,
    experiment: &str,
    m: usize,
    n: usize,
    k: usize,
    trial: usize,
) -> u64 {
    cs::derive_seed(base_seed, experiment, m, n, k, trial)
}

/// Runs a benchmark sweep described by a JSON config (the same format the
/// command line accepts) and returns the records as CSV text.
#[pyfunction]
#[pyo3(signature = (config_json, threads = 0))]
fn run_sweep_json(py: Python<'_>, config_json: &str, threads: usize) -> PyResult<String> {
    let config = bench::SweepConfig::from_json(config_json).map_err(value_err)?;
    let records = py
        .detach(|| bench::run_sweep(&config, threads))
        .map_err(value_err)?;
    String::from_utf8(bench::csv_bytes(&records)).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn onebit_cs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySparseSignal>()?;
    m.add_class::<PyMeasurementEnsemble>()?;
    m.add_class::<PyBitMeasurements>()?;
    m.add_class::<PyRecoveryResult>()?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(apply_sign_flips, m)?)?;
    m.add_function(wrap_pyfunction!(recovery_error, m)?)?;
    m.add_function(wrap_pyfunction!(support_detection_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(app_probability, m)?)?;
    m.add_function(wrap_pyfunction!(flip_probability, m)?)?;
    m.add_function(wrap_pyfunction!(expected_hamming, m)?)?;
    m.add_function(wrap_pyfunction!(lemma2_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(adaptive_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(hamming_distance, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_proxy, m)?)?;
    m.add_function(wrap_pyfunction!(find_supp, m)?)?;
    m.add_function(wrap_pyfunction!(hard_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(history_recover, m)?)?;
    m.add_function(wrap_pyfunction!(history_recover_with_support, m)?)?;
    m.add_function(wrap_pyfunction!(biht_l2_recover, m)?)?;
    m.add_function(wrap_pyfunction!(passive_recover, m)?)?;
    m.add_function(wrap_pyfunction!(verify_laws, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep_json, m)?)?;
    Ok(())
}
