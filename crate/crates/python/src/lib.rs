//! Python bindings. Numbers cross the boundary as exact strings (`"1/2"`,
//! `"(3/2)^(1/2)"`); inputs may be ints, strings, floats or `Fraction`s.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use umgh::oracle::brute_dghp;
use umgh::space::{diameter, spectrum};
use umgh::{FiniteSpace, Scalar};

create_exception!(umgh_py, UmghError, PyValueError);

fn err(e: umgh::Error) -> PyErr {
    UmghError::new_err(e.to_string())
}

fn scalar(obj: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    let text: String = obj.str()?.extract()?;
    text.parse().map_err(|_| UmghError::new_err(format!("ParseError not a number: {text:?}")))
}

fn matrix(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Vec<Vec<Scalar>>> {
    rows.iter().map(|r| r.iter().map(scalar).collect()).collect()
}

fn rows_text<S: FiniteSpace>(x: &S) -> Vec<Vec<String>> {
    x.to_rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()
}

#[pyclass(frozen, name = "UltrametricSpace")]
struct PyUltrametric(umgh::UltrametricSpace);

#[pymethods]
impl PyUltrametric {
    #[new]
    #[pyo3(signature = (rows, labels=None))]
    fn new(rows: Vec<Vec<Bound<'_, PyAny>>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        umgh::UltrametricSpace::new(matrix(rows)?, labels).map(PyUltrametric).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn dist(&self, i: usize, j: usize) -> PyResult<String> {
        if i >= self.0.len() || j >= self.0.len() {
            return Err(pyo3::exceptions::PyIndexError::new_err("point index out of range"));
        }
        Ok(self.0.dist(i, j).to_string())
    }

    fn rows(&self) -> Vec<Vec<String>> {
        rows_text(&self.0)
    }

    fn spectrum(&self) -> Vec<String> {
        spectrum(&self.0).values().iter().map(|v| v.to_string()).collect()
    }

    fn diameter(&self) -> String {
        diameter(&self.0).to_string()
    }

    /// Closed quotient at level `t`, one point per class.
    fn closed_quotient(&self, t: &Bound<'_, PyAny>) -> PyResult<Self> {
        let t = scalar(t)?;
        Ok(PyUltrametric(umgh::UMTree::from_space(&self.0).closed_quotient(&t).to_matrix()))
    }

    fn __repr__(&self) -> String {
        format!("UltrametricSpace({} points, diameter {})", self.0.len(), diameter(&self.0))
    }
}

#[pyclass(frozen, name = "MetricSpace")]
struct PyMetric(umgh::MetricSpace);

#[pymethods]
impl PyMetric {
    #[new]
    #[pyo3(signature = (rows, labels=None))]
    fn new(rows: Vec<Vec<Bound<'_, PyAny>>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        umgh::MetricSpace::new(matrix(rows)?, labels).map(PyMetric).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        rows_text(&self.0)
    }

    fn single_linkage(&self) -> PyUltrametric {
        PyUltrametric(umgh::single_linkage(&self.0))
    }

    fn abs_ultrametricity(&self) -> String {
        umgh::abs_ultrametricity(&self.0).to_string()
    }
}

#[pyclass(frozen, name = "UltraDissimilaritySpace")]
struct PyDissimilarity(umgh::UltraDissimilaritySpace);

#[pymethods]
impl PyDissimilarity {
    #[new]
    #[pyo3(signature = (rows, labels=None))]
    fn new(rows: Vec<Vec<Bound<'_, PyAny>>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        umgh::UltraDissimilaritySpace::new(matrix(rows)?, labels).map(PyDissimilarity).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        rows_text(&self.0)
    }

    fn births(&self) -> Vec<String> {
        (0..self.0.len()).map(|i| self.0.birth(i).to_string()).collect()
    }
}

fn options(budget: Option<u64>, threads: usize) -> umgh::DghOptions {
    let mut opts = umgh::DghOptions::from_env();
    if let Some(b) = budget {
        opts.budget = b;
    }
    opts.threads = threads.max(1);
    opts
}

fn exponent(p: &Bound<'_, PyAny>) -> PyResult<umgh::PExponent> {
    let text: String = p.str()?.extract()?;
    text.parse().map_err(err)
}

/// Gromov-Hausdorff ultrametric between two ultrametric spaces.
#[pyfunction]
fn ugh(x: &PyUltrametric, y: &PyUltrametric) -> String {
    umgh::ugh(&x.0, &y.0).to_string()
}

/// Gromov-Hausdorff ultrametric between two ultra-dissimilarity spaces.
#[pyfunction]
fn ugh_dissimilarity(x: &PyDissimilarity, y: &PyDissimilarity) -> String {
    umgh::ugh_dissimilarity(&x.0, &y.0).to_string()
}

/// Exact `d_GH` and a witness correspondence as label pairs.
#[pyfunction]
#[pyo3(signature = (x, y, method="dp", budget=None, threads=1))]
fn dgh(
    py: Python<'_>,
    x: &PyUltrametric,
    y: &PyUltrametric,
    method: &str,
    budget: Option<u64>,
    threads: usize,
) -> PyResult<(String, Vec<(String, String)>)> {
    let method = match method {
        "dp" => umgh::Method::Dp,
        "rec" => umgh::Method::Rec,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}; expected \"dp\" or \"rec\""))),
    };
    let opts = options(budget, threads);
    let (a, b) = (&x.0, &y.0);
    let r = py.detach(|| umgh::dgh_exact(a, b, method, &opts)).map_err(err)?;
    Ok((r.distance.to_string(), r.correspondence.labeled(a, b)))
}

/// `d_GH^(p)` for a positive integer `p` or `"inf"`.
#[pyfunction]
#[pyo3(signature = (x, y, p, budget=None))]
fn dghp(py: Python<'_>, x: &PyUltrametric, y: &PyUltrametric, p: &Bound<'_, PyAny>, budget: Option<u64>) -> PyResult<String> {
    let e = exponent(p)?;
    let opts = options(budget, 1);
    let (a, b) = (&x.0, &y.0);
    py.detach(|| umgh::dghp(a, b, &e, &opts)).map(|v| v.to_string()).map_err(err)
}

/// Brute-force `d_GH^(p)` over all correspondences (at most 5 points each).
#[pyfunction]
fn brute_force(x: &PyUltrametric, y: &PyUltrametric, p: &Bound<'_, PyAny>) -> PyResult<String> {
    let e = exponent(p)?;
    brute_dghp(&x.0, &y.0, &e).map(|r| r.value.to_string()).map_err(err)
}

/// `(value, additive_bound)` for two metric spaces.
#[pyfunction]
fn approx_dgh(x: &PyMetric, y: &PyMetric) -> PyResult<(String, String)> {
    let r = umgh::approx_dgh(&x.0, &y.0, &umgh::DghOptions::from_env()).map_err(err)?;
    Ok((r.value.to_string(), r.additive_bound.to_string()))
}

#[pymodule]
fn umgh_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUltrametric>()?;
    m.add_class::<PyMetric>()?;
    m.add_class::<PyDissimilarity>()?;
    m.add_function(wrap_pyfunction!(ugh, m)?)?;
    m.add_function(wrap_pyfunction!(ugh_dissimilarity, m)?)?;
    m.add_function(wrap_pyfunction!(dgh, m)?)?;
    m.add_function(wrap_pyfunction!(dghp, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(approx_dgh, m)?)?;
    m.add("UmghError", m.py().get_type::<UmghError>())?;
    Ok(())
}
