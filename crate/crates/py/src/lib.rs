//! Python bindings. Graphs, morphisms and generator sets are wrapped as
//! classes; diagrams, instances and certificates cross the boundary as JSON.

use goodcolim::diagrams::{linearize as linearize_diagram, validate_smooth, Diagram};
use goodcolim::graphcat::{are_isomorphic, pushout as compute_pushout};
use goodcolim::soa::{
    classical_soa, eliminate_retract as eliminate, fat_soa, rlp_check as check_rlp, split_idempotent as split,
    RetractCertificate, RetractOutcome,
};
use goodcolim::suite::{run_suite, SuiteConfig, DEFAULT_SEED, RETRACT_BUDGET};
use goodcolim::{ChainPresentation, FactorizationCertificate, SmoothDiagram};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(err)
}

fn dump(value: &impl Serialize) -> PyResult<String> {
    serde_json::to_string_pretty(value).map_err(err)
}

fn limits(max_vertices: usize) -> PyResult<goodcolim::Limits> {
    if max_vertices == 0 {
        return Err(PyValueError::new_err("max_vertices must be positive"));
    }
    Ok(goodcolim::Limits::default().with_max_vertices(max_vertices))
}

fn gens_or_default(gens: Option<&Generators>) -> goodcolim::GeneratorSet {
    gens.map_or_else(goodcolim::GeneratorSet::standard, |g| g.0.clone())
}

/// A finite directed multigraph on vertices `0..vertices`.
#[pyclass(name = "Graph", module = "goodcolim", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGraph(goodcolim::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (vertices, edges = Vec::new()))]
    fn new(vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        goodcolim::Graph::new(vertices, edges).map(PyGraph).map_err(err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    fn is_isomorphic(&self, other: &PyGraph) -> bool {
        are_isomorphic(&self.0, &other.0)
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.0)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text).map(PyGraph)
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(name = "GraphMorphism", module = "goodcolim", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyMorphism(goodcolim::GraphMorphism);

#[pymethods]
impl PyMorphism {
    #[new]
    #[pyo3(signature = (dom, cod, vmap, emap = Vec::new()))]
    fn new(dom: &PyGraph, cod: &PyGraph, vmap: Vec<usize>, emap: Vec<usize>) -> PyResult<Self> {
        goodcolim::GraphMorphism::new(dom.0.clone(), cod.0.clone(), vmap, emap).map(PyMorphism).map_err(err)
    }

    #[staticmethod]
    fn identity(g: &PyGraph) -> Self {
        PyMorphism(goodcolim::GraphMorphism::identity(&g.0))
    }

    /// The unique map out of the empty graph.
    #[staticmethod]
    fn initial(g: &PyGraph) -> Self {
        PyMorphism(goodcolim::GraphMorphism::initial(&g.0))
    }

    #[getter]
    fn dom(&self) -> PyGraph {
        PyGraph(self.0.dom().clone())
    }

    #[getter]
    fn cod(&self) -> PyGraph {
        PyGraph(self.0.cod().clone())
    }

    #[getter]
    fn vmap(&self) -> Vec<usize> {
        self.0.vmap().to_vec()
    }

    #[getter]
    fn emap(&self) -> Vec<usize> {
        self.0.emap().to_vec()
    }

    /// `self` followed by `next`.
    fn then(&self, next: &PyMorphism) -> PyResult<Self> {
        self.0.then(&next.0).map(PyMorphism).map_err(err)
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    fn is_iso(&self) -> bool {
        self.0.is_iso()
    }

    fn is_idempotent(&self) -> bool {
        self.0.is_idempotent()
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.0)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text).map(PyMorphism)
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(name = "GeneratorSet", module = "goodcolim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Generators(goodcolim::GeneratorSet);

#[pymethods]
impl Generators {
    #[new]
    fn new(name: String, members: Vec<PyRef<'_, PyMorphism>>) -> Self {
        Generators(goodcolim::GeneratorSet::new(name, members.iter().map(|m| m.0.clone()).collect()))
    }

    /// `{∅ -> V1, V2 -> E1}`.
    #[staticmethod]
    fn standard() -> Self {
        Generators(goodcolim::GeneratorSet::standard())
    }

    #[getter]
    fn members(&self) -> Vec<PyMorphism> {
        self.0.members().iter().cloned().map(PyMorphism).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.0)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text).map(Generators)
    }
}

/// `f = right ∘ left_map` with its evidence.
#[pyclass(name = "FactorizationCertificate", module = "goodcolim", frozen)]
struct Factorization(FactorizationCertificate);

#[pymethods]
impl Factorization {
    #[getter]
    fn converged(&self) -> bool {
        self.0.status.converged()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.status.iterations()
    }

    #[getter]
    fn stages(&self) -> Vec<PyGraph> {
        self.0.iterations.stages.iter().cloned().map(PyGraph).collect()
    }

    #[getter]
    fn middle(&self) -> PyGraph {
        PyGraph(self.0.middle().clone())
    }

    #[getter]
    fn left_map(&self) -> PyMorphism {
        PyMorphism(self.0.left_map.clone())
    }

    #[getter]
    fn right(&self) -> PyMorphism {
        PyMorphism(self.0.right.clone())
    }

    #[pyo3(signature = (generators = None, max_vertices = 8))]
    fn verify(&self, generators: Option<&Generators>, max_vertices: usize) -> PyResult<()> {
        self.0.verify(&gens_or_default(generators), &limits(max_vertices)?).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.0)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text).map(Factorization)
    }
}

/// Factors `f` by the fat (default) or classical small object argument.
#[pyfunction]
#[pyo3(signature = (f, mode = "fat", budget = 8, generators = None, max_vertices = 8))]
fn factorize(
    f: &PyMorphism,
    mode: &str,
    budget: usize,
    generators: Option<&Generators>,
    max_vertices: usize,
) -> PyResult<Factorization> {
    let gens = gens_or_default(generators);
    let limits = limits(max_vertices)?;
    let cert = match mode {
        "fat" => fat_soa(&f.0, &gens, budget, &limits),
        "classical" => classical_soa(&f.0, &gens, budget, &limits),
        other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    cert.map(Factorization).map_err(err)
}

/// Whether `p` has the right lifting property against the generators.
#[pyfunction]
#[pyo3(signature = (p, generators = None, max_vertices = 8))]
fn rlp_check(p: &PyMorphism, generators: Option<&Generators>, max_vertices: usize) -> PyResult<bool> {
    check_rlp(&p.0, &gens_or_default(generators), &limits(max_vertices)?).map(|r| r.holds).map_err(err)
}

/// The pushout of `f: A -> B` and `g: A -> C` as `(apex, B -> apex, C -> apex)`.
#[pyfunction]
fn pushout(f: &PyMorphism, g: &PyMorphism) -> PyResult<(PyGraph, PyMorphism, PyMorphism)> {
    let (po, _) = compute_pushout(&f.0, &g.0).map_err(err)?;
    Ok((PyGraph(po.apex), PyMorphism(po.left), PyMorphism(po.right)))
}

/// Splits an idempotent as `(image, section, retraction)`.
#[pyfunction]
fn split_idempotent(f: &PyMorphism) -> PyResult<(PyGraph, PyMorphism, PyMorphism)> {
    let s = split(&f.0, None).map_err(err)?;
    Ok((PyGraph(s.image), PyMorphism(s.section), PyMorphism(s.retraction)))
}

/// Names of the limit elements where a diagram (JSON) fails to be smooth.
#[pyfunction]
fn smoothness_violations(diagram: &str) -> PyResult<Vec<String>> {
    let d: Diagram = parse(diagram)?;
    let report = validate_smooth(&d).map_err(err)?;
    Ok(report.violations.into_iter().map(|v| v.element).collect())
}

/// Linearizes a smooth diagram (JSON) and returns the chain presentation as JSON.
#[pyfunction]
#[pyo3(signature = (diagram, generators = None, max_vertices = 8))]
fn linearize(diagram: &str, generators: Option<&Generators>, max_vertices: usize) -> PyResult<String> {
    let d: SmoothDiagram = parse(diagram)?;
    let chain = linearize_diagram(&d, &gens_or_default(generators), &limits(max_vertices)?).map_err(err)?;
    dump(&chain)
}

/// Presents the image of `idempotent` on the colimit of `diagram` (JSON) as
/// cellular; returns the certificate as JSON, or `None` when the search gave up.
#[pyfunction]
#[pyo3(signature = (diagram, idempotent, budget = RETRACT_BUDGET, generators = None, max_vertices = 8))]
fn eliminate_retract(
    diagram: &str,
    idempotent: &PyMorphism,
    budget: usize,
    generators: Option<&Generators>,
    max_vertices: usize,
) -> PyResult<Option<String>> {
    let d: SmoothDiagram = parse(diagram)?;
    match eliminate(&d, &idempotent.0, &gens_or_default(generators), budget, &limits(max_vertices)?).map_err(err)? {
        RetractOutcome::Certified(cert) => dump(&cert).map(Some),
        RetractOutcome::Inconclusive { .. } => Ok(None),
    }
}

/// Re-checks a factorization, retract or chain certificate given as JSON.
#[pyfunction]
#[pyo3(signature = (certificate, generators = None, max_vertices = 8))]
fn verify(certificate: &str, generators: Option<&Generators>, max_vertices: usize) -> PyResult<()> {
    let gens = gens_or_default(generators);
    let limits = limits(max_vertices)?;
    let value: serde_json::Value = parse(certificate)?;
    let r = if value.get("mode").is_some() {
        serde_json::from_value::<FactorizationCertificate>(value).map_err(err)?.verify(&gens, &limits)
    } else if value.get("split").is_some() {
        serde_json::from_value::<RetractCertificate>(value).map_err(err)?.verify(&gens, &limits)
    } else if value.get("link_certificates").is_some() {
        serde_json::from_value::<ChainPresentation>(value).map_err(err)?.verify(&gens)
    } else {
        return Err(PyValueError::new_err("not a factorization, retract or chain certificate"));
    };
    r.map_err(err)
}

/// Runs the property suite; returns `(exit_code, report_json)`.
#[pyfunction]
#[pyo3(signature = (seed = DEFAULT_SEED, count = 200, max_size = 6, budget = 8))]
fn suite(py: Python<'_>, seed: u64, count: usize, max_size: usize, budget: usize) -> PyResult<(i32, String)> {
    let config = SuiteConfig { seed, count, max_size, budget, ..SuiteConfig::default() };
    let report = py.detach(|| run_suite(&config)).map_err(err)?;
    Ok((report.exit_code(), report.to_json()))
}

#[pymodule]
#[pyo3(name = "goodcolim")]
fn goodcolim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyMorphism>()?;
    m.add_class::<Generators>()?;
    m.add_class::<Factorization>()?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(rlp_check, m)?)?;
    m.add_function(wrap_pyfunction!(pushout, m)?)?;
    m.add_function(wrap_pyfunction!(split_idempotent, m)?)?;
    m.add_function(wrap_pyfunction!(smoothness_violations, m)?)?;
    m.add_function(wrap_pyfunction!(linearize, m)?)?;
    m.add_function(wrap_pyfunction!(eliminate_retract, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(suite, m)?)?;
    Ok(())
}
