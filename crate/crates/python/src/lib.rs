//! Python bindings: the graph type, the finite-field constructions, and the
//! certificate/search operations, exposed with plain Python types (dicts,
//! lists, tuples). Rationals are returned as "num/den" strings to stay exact.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pseudoturan_core::construct;
use pseudoturan_core::embed::{self, EmbedParams};
use pseudoturan_core::field::FieldSpec;
use pseudoturan_core::forbid;
use pseudoturan_core::graph::{self, EmbedMode};
use pseudoturan_core::order::{self, OrderingCertificate};
use pseudoturan_core::spectral;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field_for(q: u64) -> PyResult<FieldSpec> {
    let mut p = 2;
    while p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    let mut h = 0;
    let mut rest = q;
    while rest > 1 {
        if !rest.is_multiple_of(p) {
            return Err(value_err(format!("{q} is not a prime power")));
        }
        rest /= p;
        h += 1;
    }
    FieldSpec::new(p, h).map_err(value_err)
}

/// Immutable simple graph with bit-vector adjacency.
#[pyclass(name = "Graph", from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph { inner: graph::Graph::from_edges(n, &edges).map_err(value_err)? })
    }

    #[staticmethod]
    fn petersen() -> PyGraph {
        PyGraph { inner: graph::Graph::petersen() }
    }

    #[staticmethod]
    fn named(name: &str) -> PyResult<PyGraph> {
        graph::named_pattern(name)
            .map(|inner| PyGraph { inner })
            .ok_or_else(|| value_err(format!("unknown pattern {name:?}")))
    }

    #[staticmethod]
    fn random_gnp(n: usize, p: f64, seed: u64) -> PyGraph {
        PyGraph { inner: graph::Graph::random_gnp(n, p, seed) }
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<PyGraph> {
        Ok(PyGraph { inner: graph::read_edge_list(std::path::Path::new(path)).map_err(value_err)? })
    }

    fn write(&self, path: &str) -> PyResult<()> {
        graph::write_edge_list(&self.inner, std::path::Path::new(path)).map_err(value_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.inner.has_edge(u, v)
    }

    fn degree(&self, v: usize) -> usize {
        self.inner.degree(v)
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn regular_degree(&self) -> Option<usize> {
        self.inner.regular_degree()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.inner.neighbors(v).collect()
    }

    fn common_neighbors(&self, u: usize, v: usize) -> Vec<usize> {
        self.inner.common_neighbors(u, v)
    }

    fn induced(&self, verts: Vec<usize>) -> PyResult<PyGraph> {
        Ok(PyGraph { inner: self.inner.induced(&verts).map_err(value_err)? })
    }

    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(|l| l.to_vec())
    }

    fn label_scheme(&self) -> Option<String> {
        self.inner.label_scheme().map(str::to_string)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

// --- constructions ---------------------------------------------------------

#[pyfunction]
fn cubic_cayley(p: u64) -> PyResult<PyGraph> {
    Ok(PyGraph { inner: construct::cubic_cayley(p).map_err(value_err)? })
}

#[pyfunction]
#[pyo3(signature = (p, h=1))]
fn kopparty(p: u64, h: usize) -> PyResult<PyGraph> {
    Ok(PyGraph { inner: construct::kopparty(p, h).map_err(value_err)? })
}

#[pyfunction]
fn ak_graph(r: usize, q: u64) -> PyResult<PyGraph> {
    let fs = field_for(q)?;
    Ok(PyGraph { inner: construct::ak_graph(r, &fs).map_err(value_err)? })
}

#[pyfunction]
fn nonsquare_subgraph(g: &PyGraph) -> PyResult<PyGraph> {
    Ok(PyGraph { inner: construct::nonsquare_subgraph(&g.inner).map_err(value_err)? })
}

#[pyfunction]
fn even_t_construction(t: usize, q: u64) -> PyResult<PyGraph> {
    let fs = field_for(q)?;
    Ok(PyGraph { inner: construct::even_t_construction(t, &fs).map_err(value_err)? })
}

#[pyfunction]
fn distance_graph(q: u64) -> PyResult<PyGraph> {
    let fs = field_for(q)?;
    Ok(PyGraph { inner: construct::distance_graph(&fs).map_err(value_err)? })
}

// --- spectra and certificates ----------------------------------------------

fn spectrum_dict<'py>(
    py: Python<'py>,
    s: &spectral::SpectralSummary,
    full: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lambda1", s.lambda1)?;
    d.set_item("lambda", s.lambda)?;
    d.set_item(
        "method",
        match s.method {
            spectral::SpectralMethod::CharacterSum => "character-sum",
            spectral::SpectralMethod::DenseNumeric => "dense-numeric",
        },
    )?;
    if full {
        d.set_item("eigenvalues", s.eigenvalues.clone())?;
    }
    Ok(d)
}

/// Dense numeric spectrum; set full=True for the whole eigenvalue list.
#[pyfunction]
#[pyo3(signature = (g, full=false))]
fn spectrum<'py>(py: Python<'py>, g: &PyGraph, full: bool) -> PyResult<Bound<'py, PyDict>> {
    let s = spectral::spectrum_dense(&g.inner).map_err(value_err)?;
    spectrum_dict(py, &s, full)
}

/// Exact character-sum spectrum of the cubic Cayley construction.
#[pyfunction]
#[pyo3(signature = (p, full=false))]
fn cubic_cayley_spectrum<'py>(py: Python<'py>, p: u64, full: bool) -> PyResult<Bound<'py, PyDict>> {
    let spec = construct::cubic_cayley_spec(p).map_err(value_err)?;
    spectrum_dict(py, &spectral::cayley_spectrum(&spec), full)
}

#[pyfunction]
fn lambda_nontrivial(g: &PyGraph) -> PyResult<f64> {
    spectral::lambda_nontrivial(&g.inner).map_err(value_err)
}

#[pyfunction]
fn weil_audit(p: u64) -> PyResult<f64> {
    spectral::weil_audit(p).map_err(value_err)
}

#[pyfunction]
fn jumbled_cert<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let c = spectral::jumbled_cert(&g.inner).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("density", c.density.to_string())?;
    d.set_item("alpha", c.alpha)?;
    d.set_item("provenance", c.provenance.to_string())?;
    d.set_item("optimality_ratio", c.optimality_ratio)?;
    Ok(d)
}

#[pyfunction]
fn sample_discrepancy(g: &PyGraph, density: f64, trials: u64, seed: u64) -> f64 {
    graph::sample_discrepancy(&g.inner, density, trials, seed)
}

// --- forbidden subgraphs ----------------------------------------------------

#[pyfunction]
fn is_triangle_free(g: &PyGraph) -> bool {
    forbid::is_triangle_free(&g.inner)
}

#[pyfunction]
fn triangle_witness(g: &PyGraph) -> Option<(usize, usize, usize)> {
    forbid::triangle_witness(&g.inner)
}

#[pyfunction]
fn is_k23_free(g: &PyGraph) -> bool {
    forbid::is_k23_free(&g.inner)
}

/// Exact clique number if it is at most cap, otherwise None.
#[pyfunction]
fn clique_number(g: &PyGraph, cap: usize) -> Option<usize> {
    match forbid::clique_number(&g.inner, cap) {
        forbid::CliqueNumber::Exact(k) => Some(k),
        forbid::CliqueNumber::ExceedsCap(_) => None,
    }
}

/// Host vertices of an embedding of `pattern`, or None. Raises RuntimeError
/// when the node budget runs out.
#[pyfunction]
#[pyo3(signature = (g, pattern, induced=false, budget=100_000_000))]
fn contains_pattern(
    g: &PyGraph,
    pattern: &PyGraph,
    induced: bool,
    budget: u64,
) -> PyResult<Option<Vec<usize>>> {
    let mode = if induced { EmbedMode::Induced } else { EmbedMode::Subgraph };
    match forbid::contains_pattern(&g.inner, &pattern.inner, mode, budget) {
        forbid::PatternSearch::Found(e) => Ok(Some(e.map)),
        forbid::PatternSearch::NotFound => Ok(None),
        forbid::PatternSearch::BudgetExceeded => {
            Err(PyRuntimeError::new_err("search budget exhausted; result unknown"))
        }
    }
}

// --- ordering parameters -----------------------------------------------------

fn cert_dict<'py>(
    py: Python<'py>,
    d: num_rational::Ratio<i64>,
    cert: &OrderingCertificate,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("d", d.to_string())?;
    out.set_item("two_d", cert.two_d)?;
    out.set_item("ordering", cert.ordering.clone())?;
    out.set_item("breakpoints", cert.breakpoints.clone())?;
    Ok(out)
}

#[pyfunction]
fn d2<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let (d, cert) = order::d2(&g.inner).map_err(value_err)?;
    cert_dict(py, d, &cert)
}

#[pyfunction]
fn dhat2<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let (d, cert) = order::dhat2(&g.inner).map_err(value_err)?;
    cert_dict(py, d, &cert)
}

#[pyfunction]
#[pyo3(signature = (g, restarts=200, seed=0))]
fn dhat2_heuristic<'py>(
    py: Python<'py>,
    g: &PyGraph,
    restarts: u32,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let (d, cert) = order::dhat2_heuristic(&g.inner, restarts, seed).map_err(value_err)?;
    cert_dict(py, d, &cert)
}

#[pyfunction]
fn eval_d2(g: &PyGraph, ordering: Vec<usize>) -> PyResult<u32> {
    order::eval_d2(&g.inner, &ordering).map_err(value_err)
}

#[pyfunction]
fn eval_dhat2(g: &PyGraph, ordering: Vec<usize>, breakpoints: Vec<usize>, two_d: u32) -> PyResult<u32> {
    let cert = OrderingCertificate { ordering, breakpoints, two_d };
    order::eval_dhat2(&g.inner, &cert).map_err(value_err)
}

/// Exact rational upper bound on the density exponent, as "num/den".
#[pyfunction]
fn exp_upper(g: &PyGraph) -> PyResult<String> {
    Ok(order::exp_upper(&g.inner).map_err(value_err)?.to_string())
}

// --- embedding ----------------------------------------------------------------

/// Runs the staged pipeline; returns a dict with either "map" or "failure",
/// plus the per-stage trace.
#[pyfunction]
#[pyo3(signature = (g, density, relaxed=false))]
fn embed_petersen<'py>(
    py: Python<'py>,
    g: &PyGraph,
    density: f64,
    relaxed: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let params = if relaxed { EmbedParams::relaxed(density) } else { EmbedParams::paper(density) };
    let out = PyDict::new(py);
    match embed::embed_petersen(&g.inner, &params) {
        Ok(res) => {
            out.set_item("map", res.embedding.map)?;
            let trace: Vec<(usize, String, usize, usize)> = res
                .trace
                .into_iter()
                .map(|s| (s.stage, s.name, s.target, s.achieved))
                .collect();
            out.set_item("trace", trace)?;
        }
        Err(fail) => {
            out.set_item("failure", (fail.stage, fail.name, fail.reason))?;
        }
    }
    Ok(out)
}

#[pyfunction]
fn check_embedding_preconditions<'py>(
    py: Python<'py>,
    n: usize,
    p: f64,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = embed::check_embedding_preconditions(n, p, alpha);
    let out = PyDict::new(py);
    out.set_item("alpha_bound", r.alpha_bound)?;
    out.set_item("alpha_ok", r.alpha_ok)?;
    out.set_item("density_floor", r.density_floor)?;
    out.set_item("density_ok", r.density_ok)?;
    out.set_item("quad_ok", r.quad_ok)?;
    Ok(out)
}

#[pymodule]
fn pseudoturan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(cubic_cayley, m)?)?;
    m.add_function(wrap_pyfunction!(kopparty, m)?)?;
    m.add_function(wrap_pyfunction!(ak_graph, m)?)?;
    m.add_function(wrap_pyfunction!(nonsquare_subgraph, m)?)?;
    m.add_function(wrap_pyfunction!(even_t_construction, m)?)?;
    m.add_function(wrap_pyfunction!(distance_graph, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(cubic_cayley_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_nontrivial, m)?)?;
    m.add_function(wrap_pyfunction!(weil_audit, m)?)?;
    m.add_function(wrap_pyfunction!(jumbled_cert, m)?)?;
    m.add_function(wrap_pyfunction!(sample_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(is_triangle_free, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_witness, m)?)?;
    m.add_function(wrap_pyfunction!(is_k23_free, m)?)?;
    m.add_function(wrap_pyfunction!(clique_number, m)?)?;
    m.add_function(wrap_pyfunction!(contains_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(d2, m)?)?;
    m.add_function(wrap_pyfunction!(dhat2, m)?)?;
    m.add_function(wrap_pyfunction!(dhat2_heuristic, m)?)?;
    m.add_function(wrap_pyfunction!(eval_d2, m)?)?;
    m.add_function(wrap_pyfunction!(eval_dhat2, m)?)?;
    m.add_function(wrap_pyfunction!(exp_upper, m)?)?;
    m.add_function(wrap_pyfunction!(embed_petersen, m)?)?;
    m.add_function(wrap_pyfunction!(check_embedding_preconditions, m)?)?;
    Ok(())
}
