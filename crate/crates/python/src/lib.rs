//! Python bindings: the matrix type, spectra and norms, entrywise forms, the
//! randomized checkers and the partial-trace search. Reports come back as
//! plain dictionaries.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use svineq::ensembles::support_function_gap as support_gap;
use svineq::forms::{apply_form, EntrywiseForm};
use svineq::matrix::{self, ComplexMatrix};
use svineq::norms::{self, Weight};
use svineq::ptrace::{self, QuestionInstance, SearchConfig};
use svineq::suite::{self, Factorization, InequalityId, KSelect, SuiteConfig, DEFAULT_TOLERANCE};
use svineq::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) | Error::Budget { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPyErr<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPyErr<T> for svineq::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = svineq::report::to_json_string(value);
    py.import("json")?.call_method1("loads", (text,))
}

/// A dense complex matrix, built from a list of rows.
#[pyclass(name = "Matrix", module = "svineq_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMatrix {
    inner: ComplexMatrix,
}

impl From<ComplexMatrix> for PyMatrix {
    fn from(inner: ComplexMatrix) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(PyValueError::new_err("all rows must have the same length"));
        }
        Ok(ComplexMatrix::new(r, c, rows.into_iter().flatten().collect()).py()?.into())
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        ComplexMatrix::identity(n).into()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(ComplexMatrix::from_json(text).py()?.into())
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        self.inner.data().chunks(self.inner.cols()).map(<[Complex64]>::to_vec).collect()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<Complex64> {
        let (i, j) = idx;
        if i >= self.inner.rows() || j >= self.inner.cols() {
            return Err(pyo3::exceptions::PyIndexError::new_err(format!("index ({i}, {j}) out of range")));
        }
        Ok(self.inner.get(i, j))
    }

    fn adjoint(&self) -> Self {
        self.inner.adjoint().into()
    }

    fn transpose(&self) -> Self {
        self.inner.transpose().into()
    }

    fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(self.inner.matmul(&other.inner).py()?.into())
    }

    fn __add__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(self.inner.try_add(&other.inner).py()?.into())
    }

    fn __sub__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(self.inner.try_sub(&other.inner).py()?.into())
    }

    fn __eq__(&self, other: &PyMatrix) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

fn weight(weights: Vec<f64>, k: usize) -> PyResult<Weight> {
    Weight::new(weights, k).py()
}

#[pyfunction]
fn singular_values(a: &PyMatrix) -> PyResult<Vec<f64>> {
    Ok(matrix::singular_values(&a.inner).py()?.values().to_vec())
}

/// Thin SVD `(U, s, V)` with `A = U diag(s) V*`.
#[pyfunction]
fn svd(a: &PyMatrix) -> PyResult<(PyMatrix, Vec<f64>, PyMatrix)> {
    let d = matrix::svd(&a.inner).py()?;
    Ok((d.u.into(), d.s.values().to_vec(), d.v.into()))
}

/// `(X, Y)` with `A = X* Y`.
#[pyfunction]
fn factor_sqrt(a: &PyMatrix) -> PyResult<(PyMatrix, PyMatrix)> {
    let (x, y) = matrix::factor_sqrt(&a.inner).py()?;
    Ok((x.into(), y.into()))
}

#[pyfunction]
fn kronecker(a: &PyMatrix, b: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(matrix::kronecker(&a.inner, &b.inner).py()?.into())
}

#[pyfunction]
fn partial_trace_first(m: &PyMatrix, n: usize) -> PyResult<PyMatrix> {
    Ok(matrix::partial_trace_first(&m.inner, n).py()?.into())
}

#[pyfunction]
fn column_norms(a: &PyMatrix) -> PyResult<Vec<f64>> {
    Ok(matrix::column_norms(&a.inner).py()?.lengths().to_vec())
}

#[pyfunction]
fn kyfan_norm(a: &PyMatrix, k: usize) -> PyResult<f64> {
    norms::kyfan_norm(&a.inner, k).py()
}

#[pyfunction]
fn weighted_kyfan_norm(a: &PyMatrix, weights: Vec<f64>, k: usize) -> PyResult<f64> {
    norms::weighted_kyfan_norm(&a.inner, &weight(weights, k)?).py()
}

#[pyfunction]
fn weighted_column_norm(a: &PyMatrix, weights: Vec<f64>, k: usize) -> PyResult<f64> {
    norms::weighted_column_norm(&a.inner, &weight(weights, k)?).py()
}

#[pyfunction]
fn weighted_vector_k_norm(x: Vec<f64>, weights: Vec<f64>, k: usize) -> PyResult<f64> {
    norms::weighted_vector_k_norm(&x, &weight(weights, k)?).py()
}

#[pyfunction]
fn dual_weighted_vector_k_norm(x: Vec<f64>, weights: Vec<f64>, k: usize) -> PyResult<f64> {
    norms::dual_weighted_vector_k_norm(&x, &weight(weights, k)?).py()
}

/// Gap between the enumerated extreme-point support function and the dual norm.
#[pyfunction]
fn support_function_gap(x: Vec<f64>, weights: Vec<f64>, k: usize) -> PyResult<f64> {
    support_gap(&x, &weight(weights, k)?).py()
}

#[pyfunction]
fn hadamard_product(a: &PyMatrix, b: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(apply_form(&EntrywiseForm::hadamard(a.inner.rows()), &a.inner, &b.inner).py()?.into())
}

#[pyfunction]
fn fan_product(a: &PyMatrix, b: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(apply_form(&EntrywiseForm::fan(a.inner.rows()), &a.inner, &b.inner).py()?.into())
}

#[pyfunction]
fn phi(a: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(svineq::forms::phi(&a.inner).py()?.into())
}

#[pyfunction]
fn psi(b: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(svineq::forms::psi(&b.inner).py()?.into())
}

#[pyfunction]
fn inequality_ids() -> Vec<&'static str> {
    InequalityId::ALL.iter().map(|id| id.as_str()).collect()
}

/// Runs one checker and returns its report.
#[pyfunction]
#[pyo3(signature = (ineq, n, trials = 1000, seed = 0, tolerance = DEFAULT_TOLERANCE, k = None, factorization = "given", form = "hadamard"))]
#[allow(clippy::too_many_arguments)]
fn check<'py>(
    py: Python<'py>,
    ineq: &str,
    n: usize,
    trials: u64,
    seed: u64,
    tolerance: f64,
    k: Option<usize>,
    factorization: &str,
    form: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let id: InequalityId = ineq.parse().py()?;
    let factorization: Factorization = factorization.parse().py()?;
    let form = match form {
        "hadamard" => EntrywiseForm::hadamard(n),
        "fan" => EntrywiseForm::fan(n),
        other => return Err(PyValueError::new_err(format!("unknown form {other:?} (expected hadamard or fan)"))),
    };
    let checker = id.checker(n, factorization, Some(&form)).py()?;
    let cfg = SuiteConfig {
        n,
        trials,
        seed,
        tolerance,
        k: k.map_or(KSelect::All, KSelect::Only),
    };
    let report = py.detach(|| suite::run_check(checker.as_ref(), &cfg)).py()?;
    to_dict(py, &report)
}

#[pyfunction]
fn reproduce_fan_counterexample(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_dict(py, &suite::reproduce_fan_counterexample().py()?)
}

/// `Tr₁[(A ⊗ I + I ⊗ A)(B ⊗ I − I ⊗ B)]`, cross-checked against its closed form.
#[pyfunction]
fn lhs_operator(a: &PyMatrix, b: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(ptrace::lhs_operator(&a.inner, &b.inner).py()?.into())
}

#[pyfunction]
fn question_margin(a: &PyMatrix, b: &PyMatrix, question: u8, k: usize) -> PyResult<f64> {
    let inst = QuestionInstance::new(a.inner.clone(), b.inner.clone(), question.try_into().py()?, k).py()?;
    ptrace::question_margin(&inst).py()
}

#[pyfunction]
#[pyo3(signature = (question, n, budget, restarts = 8, seed = 0, commuting = false, k = None, tolerance = DEFAULT_TOLERANCE))]
#[allow(clippy::too_many_arguments)]
fn search_counterexample(
    py: Python<'_>,
    question: u8,
    n: usize,
    budget: u64,
    restarts: u64,
    seed: u64,
    commuting: bool,
    k: Option<usize>,
    tolerance: f64,
) -> PyResult<Bound<'_, PyAny>> {
    let cfg = SearchConfig {
        question: question.try_into().py()?,
        n,
        k: k.map_or(KSelect::All, KSelect::Only),
        budget,
        restarts,
        seed,
        commuting,
        tolerance,
    };
    let result = py.detach(|| ptrace::search_counterexample(&cfg)).py()?;
    to_dict(py, &result)
}

#[pymodule]
fn svineq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(svd, m)?)?;
    m.add_function(wrap_pyfunction!(factor_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(partial_trace_first, m)?)?;
    m.add_function(wrap_pyfunction!(column_norms, m)?)?;
    m.add_function(wrap_pyfunction!(kyfan_norm, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_kyfan_norm, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_column_norm, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_vector_k_norm, m)?)?;
    m.add_function(wrap_pyfunction!(dual_weighted_vector_k_norm, m)?)?;
    m.add_function(wrap_pyfunction!(support_function_gap, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_product, m)?)?;
    m.add_function(wrap_pyfunction!(fan_product, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(inequality_ids, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_fan_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(lhs_operator, m)?)?;
    m.add_function(wrap_pyfunction!(question_margin, m)?)?;
    m.add_function(wrap_pyfunction!(search_counterexample, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
