//! Python bindings: expressions, scenarios and analysis runs.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use volex_core::analysis::{self, RunOptions};
use volex_core::exprdsl::Expr;
use volex_core::scenario::{self, Analysis};
use volex_core::{Error, ErrorClass};

create_exception!(volex, VolexError, PyException);
create_exception!(volex, InputError, VolexError);
create_exception!(volex, NumericalError, VolexError);

fn to_py(e: Error) -> PyErr {
    match e.class() {
        ErrorClass::Input => InputError::new_err(e.to_string()),
        ErrorClass::Numerical => NumericalError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A closed-form expression over named coordinates.
#[pyclass(name = "Expression", frozen)]
struct PyExpression {
    inner: Expr,
}

#[pymethods]
impl PyExpression {
    #[new]
    fn new(source: &str, coordinates: Vec<String>) -> PyResult<Self> {
        let inner = Expr::parse(source, &coordinates).map_err(|e| InputError::new_err(e.to_string()))?;
        Ok(PyExpression { inner })
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.inner.coordinates().to_vec()
    }

    fn eval(&self, point: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&point).map_err(|e| to_py(e.into()))
    }

    /// `(value, gradient, hessian)` at `point`.
    fn jet(&self, point: Vec<f64>) -> PyResult<(f64, Vec<f64>, Vec<Vec<f64>>)> {
        let j = self.inner.eval_jet2(&point).map_err(|e| to_py(e.into()))?;
        Ok((j.value(), j.grad().to_vec(), j.hess_rows()))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expression('{}')", self.inner)
    }
}

/// A validated scenario: chart, metric, optional field and analysis list.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    inner: scenario::Scenario,
}

fn parse_analyses(names: Option<Vec<String>>) -> PyResult<Vec<Analysis>> {
    names
        .unwrap_or_default()
        .iter()
        .map(|n| {
            Analysis::ALL
                .into_iter()
                .find(|a| a.id() == n)
                .ok_or_else(|| PyValueError::new_err(format!("unknown analysis `{n}`")))
        })
        .collect()
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyScenario { inner: scenario::load_scenario(&path).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyScenario { inner: scenario::parse_scenario(text).map_err(to_py)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.inner.chart().names().to_vec()
    }

    #[getter]
    fn analyses(&self) -> Vec<String> {
        self.inner.analyses.iter().map(|a| a.id().to_string()).collect()
    }

    fn sample_points(&self) -> Vec<Vec<f64>> {
        self.inner.sample_points()
    }

    /// `(ricci, scalar)` at `point`.
    fn curvature(&self, point: Vec<f64>) -> PyResult<(Vec<Vec<f64>>, f64)> {
        let c = self.inner.manifold.curvature(&point).map_err(to_py)?;
        Ok((c.ricci, c.scalar))
    }

    /// `div ξ` of the scenario's vector field at `point`.
    fn divergence(&self, point: Vec<f64>) -> PyResult<f64> {
        let xi = self.inner.field(Analysis::Flow).map_err(to_py)?;
        self.inner.manifold.divergence(xi, &point).map_err(to_py)
    }

    /// Run analyses (the scenario's own list by default) and return the report as a dict.
    #[pyo3(signature = (analyses=None, grid=None, tol=None))]
    fn run<'py>(
        &self,
        py: Python<'py>,
        analyses: Option<Vec<String>>,
        grid: Option<usize>,
        tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let analyses = parse_analyses(analyses)?;
        let report = analysis::run(&self.inner, &analyses, &RunOptions { grid, tol }).map_err(to_py)?;
        json_to_py(py, &report.to_json().map_err(to_py)?)
    }

    fn __repr__(&self) -> String {
        format!("Scenario('{}', dim={})", self.inner.name, self.inner.dim())
    }
}

#[pymodule]
fn volex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyExpression>()?;
    m.add_class::<PyScenario>()?;
    m.add("VolexError", py.get_type::<VolexError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("ANALYSES", Analysis::ALL.iter().map(|a| a.id()).collect::<Vec<_>>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
