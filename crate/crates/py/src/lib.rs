//! Python module `a2a_encode`.
//!
//! Field elements cross the boundary as plain integers in `[0, q)`.
//! Protocol runs return `(output, CostReport)`.

use a2a_core::bounds::{self, Algorithm};
use a2a_core::dft::run_dft as core_run_dft;
use a2a_core::linalg::{self, MatrixFq};
use a2a_core::netsim::{dump_trace, trace_to_jsonl, CostReport, SystemConfig};
use a2a_core::vandermonde::{self as vdm, VdmParams};
use a2a_core::{Error, Fe, PrimeField, TransformDirection};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(a2a_encode, ModelViolation, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    let debug = format!("{e:?}");
    let name: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
    let msg = format!("{name}: {e}");
    match e {
        Error::Violation(_) | Error::NonTermination { .. } => ModelViolation::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn elems(field: &PrimeField, xs: &[u64]) -> PyResult<Vec<Fe>> {
    xs.iter()
        .map(|&v| {
            if v < field.modulus() as u64 {
                Ok(field.elem(v))
            } else {
                Err(PyValueError::new_err(format!("{v} is not a residue mod {}", field.modulus())))
            }
        })
        .collect()
}

fn ints(xs: &[Fe]) -> Vec<u32> {
    xs.iter().map(|v| v.value()).collect()
}

#[pyclass(name = "PrimeField", frozen)]
pub struct PyPrimeField {
    inner: PrimeField,
}

#[pymethods]
impl PyPrimeField {
    #[new]
    fn new(q: u64) -> PyResult<Self> {
        PrimeField::new(q).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.modulus()
    }

    #[getter]
    fn generator(&self) -> u32 {
        self.inner.generator().value()
    }

    fn root_of_unity(&self, order: usize) -> PyResult<u32> {
        self.inner.root_of_unity(order).map(|v| v.value()).map_err(to_py)
    }

    fn inv(&self, v: u64) -> PyResult<u32> {
        elems(&self.inner, &[v])?[0].inv().map(|r| r.value()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("PrimeField(q={}, generator={})", self.inner.modulus(), self.inner.generator())
    }
}

#[pyclass(name = "Matrix", frozen)]
pub struct PyMatrix {
    inner: MatrixFq,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(field: &PyPrimeField, rows: Vec<Vec<u64>>) -> PyResult<Self> {
        let f = &field.inner;
        for row in &rows {
            elems(f, row)?;
        }
        MatrixFq::from_rows(f, &rows).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn random(field: &PyPrimeField, rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            inner: linalg::random_matrix(&field.inner, rows, cols, seed),
        }
    }

    #[staticmethod]
    fn identity(field: &PyPrimeField, n: usize) -> Self {
        Self {
            inner: MatrixFq::identity(&field.inner, n),
        }
    }

    #[staticmethod]
    fn dft(field: &PyPrimeField, k: usize) -> PyResult<Self> {
        linalg::dft_matrix(&field.inner, k).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn vandermonde(field: &PyPrimeField, points: Vec<u64>) -> PyResult<Self> {
        let pts = elems(&field.inner, &points)?;
        linalg::vandermonde(&field.inner, &pts).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn lagrange(field: &PyPrimeField, omega: Vec<u64>, alpha: Vec<u64>) -> PyResult<Self> {
        let f = &field.inner;
        linalg::lagrange_matrix(f, &elems(f, &omega)?, &elems(f, &alpha)?)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        MatrixFq::from_text(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().modulus()
    }

    fn tolist(&self) -> Vec<Vec<u32>> {
        (0..self.inner.rows()).map(|i| ints(self.inner.row(i))).collect()
    }

    fn invert(&self) -> PyResult<Self> {
        self.inner.invert().map(|inner| Self { inner }).map_err(to_py)
    }

    fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        self.inner.mul(&other.inner).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __eq__(&self, other: &PyMatrix) -> bool {
        self.inner == other.inner
    }

    /// Row vector times matrix.
    fn apply(&self, x: Vec<u64>) -> PyResult<Vec<u32>> {
        let x = elems(self.inner.field(), &x)?;
        linalg::mat_vec_mul(&x, &self.inner).map(|y| ints(&y)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{} over F_{})", self.inner.rows(), self.inner.cols(), self.inner.field().modulus())
    }
}

#[pyclass(name = "SystemConfig", frozen)]
pub struct PySystemConfig {
    inner: SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (k, p, field, trace = false, beta = 1.0, tau = 1.0, round_limit = None))]
    fn new(
        k: usize,
        p: usize,
        field: &PyPrimeField,
        trace: bool,
        beta: f64,
        tau: f64,
        round_limit: Option<usize>,
    ) -> PyResult<Self> {
        let mut inner = SystemConfig::new(k, p, &field.inner)
            .map_err(to_py)?
            .with_trace(trace)
            .with_costs(beta, tau);
        if let Some(limit) = round_limit {
            inner = inner.with_round_limit(limit);
        }
        Ok(Self { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field.modulus()
    }

    fn __repr__(&self) -> String {
        format!("SystemConfig(k={}, p={}, q={})", self.inner.k, self.inner.p, self.inner.field.modulus())
    }
}

#[pyclass(name = "CostReport", frozen)]
pub struct PyCostReport {
    inner: CostReport,
    beta: f64,
    tau: f64,
}

#[pymethods]
impl PyCostReport {
    #[getter]
    fn c1(&self) -> usize {
        self.inner.c1
    }

    #[getter]
    fn c2(&self) -> usize {
        self.inner.c2
    }

    #[getter]
    fn d(&self) -> Vec<usize> {
        self.inner.d.clone()
    }

    #[getter]
    fn violations(&self) -> Vec<String> {
        self.inner.violations.iter().map(|v| v.to_string()).collect()
    }

    /// `C1 * beta + C2 * tau`, defaulting to the run's configured costs.
    #[pyo3(signature = (beta = None, tau = None))]
    fn total_cost(&self, beta: Option<f64>, tau: Option<f64>) -> f64 {
        self.inner.total_cost(beta.unwrap_or(self.beta), tau.unwrap_or(self.tau))
    }

    fn trace_jsonl(&self) -> PyResult<String> {
        dump_trace(&self.inner).map(trace_to_jsonl).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("CostReport(c1={}, c2={}, d={:?})", self.inner.c1, self.inner.c2, self.inner.d)
    }
}

type RunResult = PyResult<(Vec<u32>, PyCostReport)>;

fn wrap(config: &PySystemConfig, r: a2a_core::Result<(Vec<Fe>, CostReport)>) -> RunResult {
    let (y, inner) = r.map_err(to_py)?;
    Ok((
        ints(&y),
        PyCostReport {
            inner,
            beta: config.inner.beta_startup,
            tau: config.inner.tau_per_element,
        },
    ))
}

fn direction(inverse: bool) -> TransformDirection {
    if inverse {
        TransformDirection::Inverse
    } else {
        TransformDirection::Forward
    }
}

/// Prepare-and-shoot: computes `x · a` for any square `a`.
#[pyfunction]
fn run_universal(config: &PySystemConfig, a: &PyMatrix, x: Vec<u64>) -> RunResult {
    let x = elems(&config.inner.field, &x)?;
    wrap(config, a2a_core::run_universal(&config.inner, &a.inner, &x))
}

/// Butterfly DFT; the computed matrix is `dft_matrix(config)`.
#[pyfunction]
#[pyo3(signature = (config, x, inverse = false))]
fn run_dft(config: &PySystemConfig, x: Vec<u64>, inverse: bool) -> RunResult {
    let x = elems(&config.inner.field, &x)?;
    wrap(config, core_run_dft(&config.inner, &x, direction(inverse)))
}

/// The row-permuted DFT matrix the butterfly computes.
#[pyfunction]
fn dft_matrix(config: &PySystemConfig) -> PyResult<PyMatrix> {
    let params = a2a_core::dft_params(&config.inner).map_err(to_py)?;
    Ok(PyMatrix {
        inner: params.computed_matrix(),
    })
}

fn grid(config: &PySystemConfig, phi: Option<Vec<usize>>) -> PyResult<VdmParams> {
    vdm::vdm_params(&config.inner, phi.as_deref()).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (config, x, phi = None, inverse = false))]
fn run_vandermonde(config: &PySystemConfig, x: Vec<u64>, phi: Option<Vec<usize>>, inverse: bool) -> RunResult {
    let params = grid(config, phi)?;
    let x = elems(&config.inner.field, &x)?;
    wrap(config, vdm::run_vandermonde(&config.inner, &params, &x, direction(inverse)))
}

/// Grid parameters as a dict: `h`, `z`, `m`, `phi`, `points`, `e`.
#[pyfunction]
#[pyo3(signature = (config, phi = None))]
fn vandermonde_params<'py>(py: Python<'py>, config: &PySystemConfig, phi: Option<Vec<usize>>) -> PyResult<Bound<'py, PyDict>> {
    let p = grid(config, phi)?;
    let d = PyDict::new(py);
    d.set_item("h", p.h)?;
    d.set_item("z", p.z)?;
    d.set_item("m", p.m)?;
    d.set_item("points", ints(&p.points()))?;
    d.set_item("phi", p.phi)?;
    d.set_item("e", p.e)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (config, phi = None))]
fn vandermonde_target(config: &PySystemConfig, phi: Option<Vec<usize>>) -> PyResult<PyMatrix> {
    Ok(PyMatrix {
        inner: vdm::target_matrix(&grid(config, phi)?),
    })
}

#[pyfunction]
fn run_lagrange(config: &PySystemConfig, phi_omega: Vec<usize>, phi_alpha: Vec<usize>, x: Vec<u64>) -> RunResult {
    let x = elems(&config.inner.field, &x)?;
    wrap(config, vdm::run_lagrange(&config.inner, &phi_omega, &phi_alpha, &x))
}

/// `x · g` for a `K x N` matrix on `config.k = N` processors.
#[pyfunction]
fn run_orchestrated(config: &PySystemConfig, g: &PyMatrix, x: Vec<u64>) -> RunResult {
    let x = elems(&config.inner.field, &x)?;
    wrap(config, a2a_core::run_orchestrated(&config.inner, &g.inner, &x))
}

/// Prepare-and-shoot parameters as a dict.
#[pyfunction]
fn ps_params<'py>(py: Python<'py>, k: usize, p: usize) -> PyResult<Bound<'py, PyDict>> {
    let pr = a2a_core::ps_params(k, p).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("l", pr.l)?;
    d.set_item("t_p", pr.t_p)?;
    d.set_item("t_s", pr.t_s)?;
    d.set_item("m", pr.m)?;
    d.set_item("n", pr.n)?;
    d.set_item("rounds", pr.rounds())?;
    d.set_item("c2", pr.predicted_c2())?;
    Ok(d)
}

#[pyfunction]
fn c1_lower(k: usize, p: usize) -> usize {
    bounds::c1_lower_universal(k, p)
}

/// `(real, ceiling)` lower bound on `C2` for universal algorithms.
#[pyfunction]
fn c2_lower(k: usize, p: usize) -> (f64, usize) {
    bounds::c2_lower_universal(k, p)
}

#[pyfunction]
#[pyo3(signature = (k, p, algo, field = None))]
fn predict_costs(k: usize, p: usize, algo: &str, field: Option<&PyPrimeField>) -> PyResult<(usize, usize)> {
    let algo: Algorithm = algo.parse().map_err(to_py)?;
    bounds::predict_costs(k, p, algo, field.map(|f| &f.inner)).map_err(to_py)
}

#[pymodule]
fn a2a_encode(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPrimeField>()?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyCostReport>()?;
    m.add("ModelViolation", m.py().get_type::<ModelViolation>())?;
    m.add_function(wrap_pyfunction!(run_universal, m)?)?;
    m.add_function(wrap_pyfunction!(run_dft, m)?)?;
    m.add_function(wrap_pyfunction!(dft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(run_vandermonde, m)?)?;
    m.add_function(wrap_pyfunction!(vandermonde_params, m)?)?;
    m.add_function(wrap_pyfunction!(vandermonde_target, m)?)?;
    m.add_function(wrap_pyfunction!(run_lagrange, m)?)?;
    m.add_function(wrap_pyfunction!(run_orchestrated, m)?)?;
    m.add_function(wrap_pyfunction!(ps_params, m)?)?;
    m.add_function(wrap_pyfunction!(c1_lower, m)?)?;
    m.add_function(wrap_pyfunction!(c2_lower, m)?)?;
    m.add_function(wrap_pyfunction!(predict_costs, m)?)?;
    Ok(())
}
