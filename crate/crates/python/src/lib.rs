//! Python bindings: graphs, generation, cleaning, query planning and
//! experiment runs. Structured results come back as plain dicts and lists.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use linkclass::graph::{load_edge_list, write_edge_list};
use linkclass::harness::experiment::{run_trials, ExperimentInput};
use linkclass::harness::{self, Algorithm, ExperimentConfig, GeneratorSpec, InputSpec, PositiveClass};
use linkclass::labeling::{p_stochastic_flip, FlipMode, LabelAssignment};
use linkclass::treecutter::TreeOptions;
use linkclass::{CountingOracle, Error, Sign, SignedGraph};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_python<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn sign_of(v: i64) -> PyResult<Sign> {
    match v {
        1 => Ok(Sign::Positive),
        -1 => Ok(Sign::Negative),
        _ => Err(PyValueError::new_err(format!("sign must be +1 or -1, got {v}"))),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// Undirected signed graph with dense node ids `0..node_count`.
#[pyclass(name = "SignedGraph", module = "linkclass", frozen)]
struct PySignedGraph {
    inner: SignedGraph,
}

#[pymethods]
impl PySignedGraph {
    /// Builds a graph from `(u, v, sign)` triples with sign in {+1, -1}.
    #[new]
    fn new(node_count: usize, edges: Vec<(usize, usize, i64)>) -> PyResult<Self> {
        let edges = edges
            .into_iter()
            .map(|(u, v, s)| Ok((u, v, sign_of(s)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = SignedGraph::from_signed_edges(node_count, &edges).map_err(to_py)?;
        Ok(PySignedGraph { inner })
    }

    /// Reads an edge-list file. Node ids are renumbered densely in order of
    /// first appearance.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        let loaded = load_edge_list(BufReader::new(file)).map_err(to_py)?;
        Ok(PySignedGraph {
            inner: loaded.graph,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = File::create(path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        let mut out = BufWriter::new(file);
        write_edge_list(&mut out, &self.inner, None).map_err(to_py)?;
        out.flush().map_err(|e| PyOSError::new_err(e.to_string()))
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn negative_count(&self) -> usize {
        self.inner.negative_count()
    }

    /// `(u, v, sign)` for every edge, indexed by edge id.
    fn edges(&self) -> Vec<(usize, usize, i8)> {
        self.inner
            .graph()
            .edges()
            .iter()
            .zip(self.inner.signs())
            .map(|(&(u, v), s)| (u, v, s.to_i8()))
            .collect()
    }

    fn is_connected(&self) -> bool {
        self.inner.graph().is_connected()
    }

    #[pyo3(signature = (diameter = false))]
    fn stats<'py>(&self, py: Python<'py>, diameter: bool) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &harness::stats(&self.inner, diameter))
    }

    /// Copy with signs flipped p-stochastically; returns the graph and the
    /// label sidecar `{p, mode, seed, flipped_count}`.
    #[pyo3(signature = (p, mode = "iid", seed = 0))]
    fn perturb<'py>(
        &self,
        py: Python<'py>,
        p: f64,
        mode: &str,
        seed: u64,
    ) -> PyResult<(PySignedGraph, Bound<'py, PyAny>)> {
        let base = LabelAssignment::unperturbed(self.inner.signs().to_vec());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = p_stochastic_flip(&base, p, parse::<FlipMode>(mode)?, &mut rng).map_err(to_py)?;
        let inner = labels.realize(self.inner.graph()).map_err(to_py)?;
        Ok((PySignedGraph { inner }, to_python(py, &labels.sidecar(Some(seed)))?))
    }

    fn __repr__(&self) -> String {
        format!(
            "SignedGraph(nodes={}, edges={}, negative={})",
            self.inner.node_count(),
            self.inner.edge_count(),
            self.inner.negative_count()
        )
    }
}

/// Planted two-cluster graph with consistent labels. Returns the graph and
/// the cluster (0 or 1) of every node.
#[pyfunction]
#[pyo3(signature = (nodes, edges, split = 0.5, negative_fraction = None, seed = 0))]
fn generate_planted(
    nodes: usize,
    edges: usize,
    split: f64,
    negative_fraction: Option<f64>,
    seed: u64,
) -> PyResult<(PySignedGraph, Vec<u8>)> {
    let planted = harness::generate_planted_graph(&GeneratorSpec {
        nodes,
        target_edges: edges,
        cluster_split: split,
        negative_fraction_target: negative_fraction,
        seed,
    })
    .map_err(to_py)?;
    let sides = planted.clustering.side.iter().map(|&s| s as u8).collect();
    Ok((PySignedGraph { inner: planted.graph }, sides))
}

/// Cleans a directed snapshot file; returns the graph, the snapshot id of
/// every node and the cleaning report.
#[pyfunction]
fn clean_snapshot<'py>(
    py: Python<'py>,
    path: &str,
) -> PyResult<(PySignedGraph, Vec<u64>, Bound<'py, PyAny>)> {
    let file = File::open(path).map_err(|e| PyOSError::new_err(e.to_string()))?;
    let cleaned = harness::clean_directed_snapshot(BufReader::new(file)).map_err(to_py)?;
    let report = to_python(py, &cleaned.report)?;
    Ok((PySignedGraph { inner: cleaned.graph }, cleaned.original_ids, report))
}

#[derive(Serialize)]
struct PlanView {
    query_edges: Vec<usize>,
    test_edges: Vec<usize>,
    predictions: Vec<linkclass::plan::Prediction>,
    mistakes: usize,
    max_circuit: usize,
    mean_circuit: f64,
    stats: linkclass::plan::PlanStats,
}

/// Plans queries with `algorithm`, reveals the graph's own signs on the
/// query set and predicts the rest.
#[pyfunction]
#[pyo3(signature = (graph, algorithm, k = None, seed = 0, shuffle = true))]
fn predict<'py>(
    py: Python<'py>,
    graph: &PySignedGraph,
    algorithm: &str,
    k: Option<usize>,
    seed: u64,
    shuffle: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let algorithm = parse::<Algorithm>(algorithm)?;
    let g = graph.inner.graph();
    let options = if shuffle {
        TreeOptions::shuffled()
    } else {
        TreeOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = algorithm
        .plan(g, k.unwrap_or(2), options, &mut rng)
        .map_err(to_py)?;
    let mut oracle = CountingOracle::new(graph.inner.signs());
    let mut record = plan.execute(g, &mut oracle).map_err(to_py)?;
    let mistakes = record.score(graph.inner.signs());
    let view = PlanView {
        query_edges: record.partition.query_edges.clone(),
        test_edges: record.partition.test_edges.clone(),
        max_circuit: record.max_circuit(),
        mean_circuit: record.mean_circuit(),
        predictions: record.predictions,
        mistakes,
        stats: plan.stats,
    };
    to_python(py, &view)
}

/// Seeded trials on `graph`, whose signs are the ground truth. Returns the
/// per-trial rows and the summary.
#[pyfunction]
#[pyo3(signature = (
    graph, algorithm, k = None, p = 0.0, flip_mode = "iid", trials = 10, seed = 0,
    positive_class = "minority", record_timing = true
))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    graph: &PySignedGraph,
    algorithm: &str,
    k: Option<usize>,
    p: f64,
    flip_mode: &str,
    trials: usize,
    seed: u64,
    positive_class: &str,
    record_timing: bool,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let algorithm = parse::<Algorithm>(algorithm)?;
    let mut cfg = ExperimentConfig::new(algorithm, InputSpec::File("<python>".into()));
    cfg.k = k.or(cfg.k);
    cfg.p = p;
    cfg.flip_mode = parse(flip_mode)?;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.positive_class = parse::<PositiveClass>(positive_class)?;
    cfg.record_timing = record_timing;
    graph.inner.graph().ensure_connected().map_err(to_py)?;
    let input = ExperimentInput::from_signed(graph.inner.clone());
    let outcome = py
        .detach(|| run_trials(&cfg, &input))
        .map_err(to_py)?;
    if let Some(f) = outcome.failures.first() {
        return Err(PyValueError::new_err(format!("trial {} failed: {}", f.trial, f.error)));
    }
    Ok((to_python(py, &outcome.results)?, to_python(py, &outcome.summary)?))
}

/// F-measure of `predicted` against `truth` for `positive_class` (+1 or -1).
#[pyfunction]
#[pyo3(signature = (predicted, truth, positive_class = -1))]
fn f_measure(predicted: Vec<i64>, truth: Vec<i64>, positive_class: i64) -> PyResult<f64> {
    let signs = |v: Vec<i64>| v.into_iter().map(sign_of).collect::<PyResult<Vec<_>>>();
    harness::f_measure(&signs(predicted)?, &signs(truth)?, sign_of(positive_class)?).map_err(to_py)
}

#[pymodule(name = "linkclass")]
fn linkclass_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySignedGraph>()?;
    m.add_function(wrap_pyfunction!(generate_planted, m)?)?;
    m.add_function(wrap_pyfunction!(clean_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(f_measure, m)?)?;
    m.add("ALGORITHMS", Algorithm::ALL.map(|a| a.as_str()).to_vec())?;
    Ok(())
}
