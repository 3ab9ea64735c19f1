//! Python module `compact_routing`: graph generation, scheme preprocessing,
//! routing and evaluation.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use compact_routing::analysis::bound_rows;
use compact_routing::graph::{
    generate as generate_graph, is_connected, is_strongly_connected, read_graph, write_graph, DistanceOracle,
    GeneratorConfig, GraphKind, WeightedGraph, INFINITE,
};
use compact_routing::hierarchy::{build_with_oracle, HierarchyConfig};
use compact_routing::scheme::{stretch_bound_f64, PreprocessError, SchemeKind, SchemeState, StateMeta};
use compact_routing::sim::{EvalOptions, PairSet};

create_exception!(compact_routing, InvariantError, PyException, "A routing scheme broke one of its guarantees.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn invariant_err(e: impl std::fmt::Display) -> PyErr {
    InvariantError::new_err(e.to_string())
}

/// Weighted graph with ports in insertion order.
#[pyclass(name = "Graph", module = "compact_routing")]
#[derive(Clone)]
struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    /// Parses the text format (`n m directed|undirected` then `u v w` lines).
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: read_graph(text).map_err(value_err)? })
    }

    fn to_text(&self) -> String {
        write_graph(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.is_directed()
    }

    fn edges(&self) -> Vec<(usize, usize, u64)> {
        self.inner.edges()
    }

    /// Shortest path length `u -> v`, or `None` when unreachable.
    fn distance(&self, u: usize, v: usize) -> PyResult<Option<u64>> {
        let n = self.inner.n();
        if u >= n || v >= n {
            return Err(value_err(format!("vertex out of range for n = {n}")));
        }
        let d = compact_routing::graph::dijkstra(&self.inner, u, compact_routing::graph::Direction::Forward).dist[v];
        Ok((d != INFINITE).then_some(d))
    }

    fn __repr__(&self) -> String {
        let kind = if self.inner.is_directed() { "directed" } else { "undirected" };
        format!("Graph(n={}, m={}, {kind})", self.inner.n(), self.inner.m())
    }
}

/// Random connected graph. `kind` is `erdos-renyi`, `random-geometric` or
/// `directed-strongly-connected`.
#[pyfunction]
#[pyo3(signature = (kind, n, density, seed = 0, wmin = 1, wmax = 100))]
fn generate(kind: &str, n: usize, density: f64, seed: u64, wmin: u64, wmax: u64) -> PyResult<PyGraph> {
    let kind: GraphKind = kind.parse().map_err(value_err)?;
    let cfg = GeneratorConfig::new(kind, n, density, seed).weights(wmin, wmax);
    Ok(PyGraph { inner: generate_graph(&cfg).map_err(value_err)? })
}

/// A preprocessed routing scheme.
#[pyclass(name = "Scheme", module = "compact_routing")]
struct PyScheme {
    meta: StateMeta,
    state: SchemeState,
}

fn preprocess_error(e: PreprocessError) -> PyErr {
    match e {
        PreprocessError::Invariant(_) | PreprocessError::Tree(_) => invariant_err(e),
        other => value_err(other),
    }
}

#[pymethods]
impl PyScheme {
    /// Builds the hierarchy and tables of `scheme` (`undirected-rt`,
    /// `directed-7`, `directed-hop` or `average`). A disconnected graph is
    /// rejected unless `augment` is set.
    #[staticmethod]
    #[pyo3(signature = (graph, scheme, k = 3, seed = 0, budget = 3.0, augment = false))]
    fn preprocess(graph: &PyGraph, scheme: &str, k: usize, seed: u64, budget: f64, augment: bool) -> PyResult<Self> {
        let kind: SchemeKind = scheme.parse().map_err(value_err)?;
        let mut g = graph.inner.clone();
        let n = g.n();
        let connected = if g.is_directed() { is_strongly_connected(&g) } else { is_connected(&g) };
        let mut dummy = None;
        if !connected {
            if !augment {
                return Err(value_err("graph is not connected; pass augment=True"));
            }
            let (aug, d) = g.augment();
            dummy = Some((d, aug.weight(0, d).unwrap_or(INFINITE)));
            g = aug;
        }
        let oracle = DistanceOracle::new(&g);
        let cfg = HierarchyConfig::new(k, seed).budget(budget).bound_first_clusters(kind == SchemeKind::Directed7);
        let h = build_with_oracle(&oracle, cfg).map_err(value_err)?;
        let state = SchemeState::preprocess(kind, g, h).map_err(preprocess_error)?;
        let meta = StateMeta { k, seed: state.hierarchy().seed, n, budget, dummy };
        Ok(Self { meta, state })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (meta, state) = SchemeState::from_json(text).map_err(value_err)?;
        Ok(Self { meta, state })
    }

    fn to_json(&self) -> String {
        self.state.to_json(&self.meta)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.state.kind().name()
    }

    #[getter]
    fn k(&self) -> usize {
        self.meta.k
    }

    /// Seed the hierarchy was finally built with.
    #[getter]
    fn seed(&self) -> u64 {
        self.meta.seed
    }

    #[getter]
    fn n(&self) -> usize {
        self.meta.n
    }

    /// Routes `s -> t` and returns `length`, `hops` and the visited `path`.
    fn route<'py>(&self, py: Python<'py>, s: usize, t: usize) -> PyResult<Bound<'py, PyDict>> {
        if s >= self.meta.n || t >= self.meta.n {
            return Err(value_err(format!("vertex out of range for n = {}", self.meta.n)));
        }
        let trace = self.state.route(s, t).map_err(invariant_err)?;
        let out = PyDict::new_bound(py);
        out.set_item("length", trace.length)?;
        out.set_item("hops", trace.hops())?;
        out.set_item("path", trace.vertices())?;
        out.set_item("header_words", trace.max_header_words)?;
        Ok(out)
    }

    /// Routes `all` pairs or `sample:<count>:<seed>` in both directions and
    /// returns the summary statistics.
    #[pyo3(signature = (pairs = "all"))]
    fn evaluate<'py>(&self, py: Python<'py>, pairs: &str) -> PyResult<Bound<'py, PyDict>> {
        let set: PairSet = pairs.parse().map_err(value_err)?;
        let oracle = DistanceOracle::new(self.state.graph());
        let mut opts = EvalOptions::new(set);
        opts.dummy = self.meta.dummy;
        let r = py.allow_threads(|| self.state.evaluate(&oracle, &opts)).map_err(invariant_err)?;
        let out = PyDict::new_bound(py);
        out.set_item("pairs", r.pairs.len())?;
        out.set_item("max_one_way_stretch", r.max_one_way_stretch)?;
        out.set_item("avg_one_way_stretch", r.avg_one_way_stretch)?;
        out.set_item("max_roundtrip_stretch", r.max_roundtrip_stretch)?;
        out.set_item("avg_roundtrip_stretch", r.avg_roundtrip_stretch)?;
        out.set_item("max_header_words", r.max_header_words)?;
        out.set_item("audit_violations", r.audit_violations)?;
        Ok(out)
    }

    /// Table sizes over the original vertices.
    fn storage<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.state.storage(self.meta.dummy.map(|d| d.0));
        let out = PyDict::new_bound(py);
        out.set_item("avg_entries", s.avg_entries)?;
        out.set_item("max_entries", s.max_entries)?;
        out.set_item("total_entries", s.total_entries)?;
        out.set_item("max_words", s.max_words)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Scheme({}, k={}, n={})", self.state.kind(), self.meta.k, self.meta.n)
    }
}

/// One-way stretch bound of the average scheme; `k` must be at least 2.
#[pyfunction]
fn stretch_bound(k: usize) -> PyResult<f64> {
    if k < 2 {
        return Err(value_err("k must be at least 2"));
    }
    Ok(stretch_bound_f64(k))
}

/// `(k, stretch, stretch / k)` rows.
#[pyfunction]
fn bounds_table(ks: Vec<usize>) -> PyResult<Vec<(usize, f64, f64)>> {
    if let Some(k) = ks.iter().find(|&&k| k < 2) {
        return Err(value_err(format!("k must be at least 2, got {k}")));
    }
    Ok(bound_rows(&ks).iter().map(|r| (r.k, r.stretch, r.ratio())).collect())
}

#[pymodule]
#[pyo3(name = "compact_routing")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(stretch_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_table, m)?)?;
    m.add("InvariantError", m.py().get_type_bound::<InvariantError>())?;
    Ok(())
}
