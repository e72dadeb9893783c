//! Python bindings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dyntr::stream::{self, RunError, RunOptions};
use dyntr::{oracle, Edge, EngineKind, Mode};

type Pairs = Vec<(u32, u32)>;

fn edges(pairs: Pairs) -> Vec<Edge> {
    pairs.into_iter().map(Edge::from).collect()
}

fn pairs(edges: Vec<Edge>) -> Pairs {
    edges.into_iter().map(|e| (e.tail, e.head)).collect()
}

fn mode(s: &str) -> PyResult<Mode> {
    s.parse().map_err(PyValueError::new_err)
}

fn engine_err(e: dyntr::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A dynamic transitive reduction engine.
///
/// `kind` is one of "comb", "alg" or "oracle"; `mode` is "dag" or "general".
#[pyclass(name = "Engine")]
struct PyEngine {
    inner: Box<dyn dyntr::Engine + Send>,
}

#[pymethods]
impl PyEngine {
    #[new]
    #[pyo3(signature = (n, mode = "dag", kind = "comb", seed = 0))]
    fn new(n: usize, mode: &str, kind: &str, seed: u64) -> PyResult<Self> {
        let kind: EngineKind = kind.parse().map_err(PyValueError::new_err)?;
        Ok(PyEngine { inner: kind.build(n, self::mode(mode)?, seed) })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.graph().n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.graph().m()
    }

    #[getter]
    fn elementary_ops(&self) -> u64 {
        self.inner.elementary_ops()
    }

    /// Inserts edges that all touch `center`.
    fn insert(&mut self, center: u32, edges: Pairs) -> PyResult<()> {
        self.inner.insert_centered(center, &self::edges(edges)).map_err(engine_err)
    }

    fn delete(&mut self, edges: Pairs) -> PyResult<()> {
        self.inner.delete_edges(&self::edges(edges)).map_err(engine_err)
    }

    fn edges(&self) -> Pairs {
        pairs(self.inner.graph().edges())
    }

    fn reduction(&self) -> Pairs {
        pairs(self.inner.tr_edges())
    }

    fn is_redundant(&self, x: u32, y: u32) -> PyResult<bool> {
        self.inner.is_redundant(Edge::new(x, y)).map_err(engine_err)
    }

    fn __repr__(&self) -> String {
        format!("Engine(n={}, mode={:?}, kind={:?}, m={})", self.n(), self.mode(), self.name(), self.m())
    }
}

/// Brute-force reduction of a static graph on vertices `1..=n`.
#[pyfunction]
#[pyo3(signature = (n, edges, mode = "dag"))]
fn brute_reduction(n: usize, edges: Pairs, mode: &str) -> PyResult<Pairs> {
    let edges = self::edges(edges);
    Ok(pairs(match self::mode(mode)? {
        Mode::Dag => oracle::brute_tr_dag_of(n, &edges).map_err(engine_err)?,
        Mode::General => oracle::brute_tr_general_of(n, &edges),
    }))
}

/// `None` if `reduction` is a valid reduction of `edges`, else the reason.
#[pyfunction]
fn validity_violation(n: usize, edges: Pairs, reduction: Pairs) -> Option<String> {
    let mut tr = self::edges(reduction);
    tr.sort_unstable();
    oracle::validity_violation(n, &self::edges(edges), &tr)
}

/// Replays a stream in the text format and returns the query answers.
#[pyfunction]
#[pyo3(signature = (text, engine = "comb", check = false, seed = 0))]
fn run_stream(text: &str, engine: &str, check: bool, seed: u64) -> PyResult<String> {
    let engine: EngineKind = engine.parse().map_err(PyValueError::new_err)?;
    stream::run_stream(text, &RunOptions { engine, check, seed })
        .map(|o| o.output)
        .map_err(|e| match e {
            RunError::Parse { .. } | RunError::Engine { .. } => PyValueError::new_err(e.to_string()),
            _ => PyRuntimeError::new_err(e.to_string()),
        })
}

#[pymodule]
fn pydyntr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEngine>()?;
    m.add_function(wrap_pyfunction!(brute_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(validity_violation, m)?)?;
    m.add_function(wrap_pyfunction!(run_stream, m)?)?;
    Ok(())
}
