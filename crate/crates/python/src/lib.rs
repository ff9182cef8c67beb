//! Python bindings. Evidence, conflicts, partitions and the three solvers.

use dscluster::bench::{gen_exhaustive, gen_random};
use dscluster::partition::lowest_element_assignment;
use dscluster::rng::rng_from_seed;
use dscluster::{EvidenceSet, FocalSet, Frame, Method, NetworkParams, Partition, RunOptions, SimpleEvidence};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: dscluster::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A simple support function: `mass` on `focal`, the rest on the frame.
#[pyclass(name = "Evidence", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyEvidence(SimpleEvidence);

#[pymethods]
impl PyEvidence {
    #[new]
    #[pyo3(signature = (focal, mass, id=0))]
    fn new(focal: Vec<usize>, mass: f64, id: usize) -> PyResult<Self> {
        let focal = FocalSet::from_elements(focal).map_err(value_error)?;
        dscluster::make_evidence(focal, mass, id).map(Self).map_err(value_error)
    }

    #[getter]
    fn id(&self) -> usize {
        self.0.id
    }

    #[getter]
    fn focal(&self) -> Vec<usize> {
        self.0.focal.elements()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    fn __repr__(&self) -> String {
        format!("Evidence(focal={:?}, mass={}, id={})", self.0.focal.elements(), self.0.mass, self.0.id)
    }
}

fn unwrap_all(evidence: &[PyRef<'_, PyEvidence>]) -> Vec<SimpleEvidence> {
    evidence.iter().map(|e| e.0).collect()
}

fn wrap_all(evidence: Vec<SimpleEvidence>) -> Vec<PyEvidence> {
    evidence.into_iter().map(PyEvidence).collect()
}

fn partition(evidence: &[SimpleEvidence], assignment: Vec<usize>, r: usize) -> PyResult<Partition> {
    Partition::new(evidence, assignment, r).map_err(value_error)
}

#[pyfunction]
fn pairwise_conflict(a: PyRef<'_, PyEvidence>, b: PyRef<'_, PyEvidence>) -> f64 {
    dscluster::pairwise_conflict(&a.0, &b.0)
}

#[pyfunction]
fn weight_of_conflict(c: f64) -> PyResult<f64> {
    dscluster::weight_of_conflict(c).map_err(value_error)
}

/// Conflict of combining all pieces of evidence.
#[pyfunction]
fn combine_conflict(evidence: Vec<PyRef<'_, PyEvidence>>) -> f64 {
    dscluster::combine_conflict(&unwrap_all(&evidence))
}

#[pyfunction]
fn brute_force_conflict(evidence: Vec<PyRef<'_, PyEvidence>>) -> PyResult<f64> {
    dscluster::brute_force_conflict(&unwrap_all(&evidence)).map_err(value_error)
}

#[pyfunction]
fn metaconflict(evidence: Vec<PyRef<'_, PyEvidence>>, assignment: Vec<usize>, r: usize) -> PyResult<f64> {
    let p = partition(&unwrap_all(&evidence), assignment, r)?;
    Ok(dscluster::metaconflict(&p))
}

#[pyfunction]
fn log_sum_objective(evidence: Vec<PyRef<'_, PyEvidence>>, assignment: Vec<usize>, r: usize) -> PyResult<f64> {
    let p = partition(&unwrap_all(&evidence), assignment, r)?;
    dscluster::log_sum_objective(&p).map_err(value_error)
}

/// Returns `(assignment, mcf)` of the exhaustive optimum.
#[pyfunction]
fn brute_force_min_mcf(evidence: Vec<PyRef<'_, PyEvidence>>, r: usize) -> PyResult<(Vec<usize>, f64)> {
    let (p, mcf) = dscluster::brute_force_min_mcf(&unwrap_all(&evidence), r).map_err(value_error)?;
    Ok((p.assignment().to_vec(), mcf))
}

/// Cluster index `min(focal) - 1` for each piece of evidence.
#[pyfunction]
#[pyo3(name = "lowest_element_assignment")]
fn py_lowest_element_assignment(evidence: Vec<PyRef<'_, PyEvidence>>, r: usize) -> Vec<usize> {
    lowest_element_assignment(&unwrap_all(&evidence), r)
}

/// Hill climbing from `assignment`. Returns `(assignment, mcf, moves)`.
#[pyfunction]
#[pyo3(signature = (evidence, assignment, r, max_moves=None))]
fn optimize(
    evidence: Vec<PyRef<'_, PyEvidence>>,
    assignment: Vec<usize>,
    r: usize,
    max_moves: Option<usize>,
) -> PyResult<(Vec<usize>, f64, usize)> {
    let e = unwrap_all(&evidence);
    let budget = max_moves.unwrap_or_else(|| dscluster::iterative::default_move_budget(e.len(), r));
    let (p, trace) = dscluster::optimize(partition(&e, assignment, r)?, &e, budget);
    Ok((p.assignment().to_vec(), dscluster::metaconflict(&p), trace.steps.len()))
}

#[pyfunction]
#[pyo3(name = "gen_exhaustive")]
fn py_gen_exhaustive(r: usize, seed: u64) -> PyResult<Vec<PyEvidence>> {
    gen_exhaustive(r, &mut rng_from_seed(seed)).map(wrap_all).map_err(value_error)
}

#[pyfunction]
#[pyo3(name = "gen_random")]
fn py_gen_random(frame_size: usize, n_evidence: usize, seed: u64) -> PyResult<Vec<PyEvidence>> {
    gen_random(frame_size, n_evidence, &mut rng_from_seed(seed))
        .map(wrap_all)
        .map_err(value_error)
}

/// Evidence from an evidence-set JSON document.
#[pyfunction]
fn evidence_from_json(text: &str) -> PyResult<Vec<PyEvidence>> {
    EvidenceSet::from_json(text)
        .map(|s| wrap_all(s.evidence))
        .map_err(value_error)
}

#[pyfunction]
fn evidence_to_json(frame_size: usize, evidence: Vec<PyRef<'_, PyEvidence>>) -> PyResult<String> {
    let frame = Frame::new(frame_size).map_err(value_error)?;
    EvidenceSet::new(frame, unwrap_all(&evidence))
        .map(|s| s.to_json())
        .map_err(value_error)
}

/// Shipped network parameters as JSON.
#[pyfunction]
fn default_params() -> String {
    NetworkParams::default().to_json()
}

/// Outcome of one solver run.
#[pyclass(name = "RunReport", frozen)]
struct PyRunReport(dscluster::RunReport);

#[pymethods]
impl PyRunReport {
    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.as_str()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[getter]
    fn final_mcf(&self) -> f64 {
        self.0.final_mcf
    }

    #[getter]
    fn assignment(&self) -> Vec<usize> {
        self.0.final_partition.assignment.clone()
    }

    #[getter]
    fn neural_iterations(&self) -> usize {
        self.0.neural_iterations
    }

    #[getter]
    fn iterative_moves(&self) -> usize {
        self.0.iterative_moves
    }

    #[getter]
    fn crisp(&self) -> Option<bool> {
        self.0.crisp
    }

    #[getter]
    fn decode_mcf(&self) -> Option<f64> {
        self.0.decode_mcf
    }

    /// `(phase, iteration, mcf)` triples.
    #[getter]
    fn trace(&self) -> Vec<(&'static str, usize, f64)> {
        self.0
            .mcf_trace
            .iter()
            .map(|p| (p.phase.as_str(), p.iteration, p.mcf))
            .collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json_line()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunReport(method={}, final_mcf={}, neural_iterations={}, iterative_moves={})",
            self.0.method, self.0.final_mcf, self.0.neural_iterations, self.0.iterative_moves
        )
    }
}

/// Runs `method` ("neural", "iterative" or "hybrid") on the evidence.
#[pyfunction]
#[pyo3(signature = (method, evidence, r, seed=0, params=None, trace=false, initial_assignment=None))]
fn run(
    method: &str,
    evidence: Vec<PyRef<'_, PyEvidence>>,
    r: usize,
    seed: u64,
    params: Option<&str>,
    trace: bool,
    initial_assignment: Option<Vec<usize>>,
) -> PyResult<PyRunReport> {
    let method: Method = method.parse().map_err(value_error)?;
    let params = match params {
        Some(text) => NetworkParams::from_json(text).map_err(value_error)?,
        None => NetworkParams::default(),
    };
    let opts = RunOptions {
        trace,
        initial_assignment,
        ..RunOptions::default()
    };
    dscluster::run_single(method, &unwrap_all(&evidence), r, &params, seed, &opts)
        .map(PyRunReport)
        .map_err(value_error)
}

#[pymodule]
fn dscluster_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEvidence>()?;
    m.add_class::<PyRunReport>()?;
    m.add_function(wrap_pyfunction!(pairwise_conflict, m)?)?;
    m.add_function(wrap_pyfunction!(weight_of_conflict, m)?)?;
    m.add_function(wrap_pyfunction!(combine_conflict, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_conflict, m)?)?;
    m.add_function(wrap_pyfunction!(metaconflict, m)?)?;
    m.add_function(wrap_pyfunction!(log_sum_objective, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_min_mcf, m)?)?;
    m.add_function(wrap_pyfunction!(py_lowest_element_assignment, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(py_gen_exhaustive, m)?)?;
    m.add_function(wrap_pyfunction!(py_gen_random, m)?)?;
    m.add_function(wrap_pyfunction!(evidence_from_json, m)?)?;
    m.add_function(wrap_pyfunction!(evidence_to_json, m)?)?;
    m.add_function(wrap_pyfunction!(default_params, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
