//! Python bindings: instances, generators, MAC search, weight learners and
//! the statistics used by the benchmark harness.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use coevo_csp::baselines::{hc_learn as hc_learn_core, rndi_learn as rndi_learn_core, HcParams, RndiParams};
use coevo_csp::bench::{self, ExperimentConfig};
use coevo_csp::coevo::{learn_weights as coevo_learn, CoevoParams};
use coevo_csp::gen::{gen_geo, gen_model_d, gen_model_rb, GeoParams, ModelDParams, ModelRbParams};
use coevo_csp::io::{load_instance, parse_native, parse_xcsp, serialize_native, write_xcsp};
use coevo_csp::{mac_search, Assignment, ConstraintWeights, CspInstance, Error, HeuristicSpec, Outcome, SearchLimits};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::Contract(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn heuristic(name: &str) -> PyResult<HeuristicSpec> {
    name.parse().map_err(py_err)
}

fn weights_for(inst: &CspInstance, w: Option<Vec<f64>>) -> PyResult<ConstraintWeights> {
    match w {
        None => Ok(ConstraintWeights::uniform(inst.num_constraints())),
        Some(v) if v.len() == inst.num_constraints() => ConstraintWeights::from_vec(v).map_err(py_err),
        Some(v) => Err(PyValueError::new_err(format!(
            "{} weights for {} constraints",
            v.len(),
            inst.num_constraints()
        ))),
    }
}

/// A binary CSP instance.
#[pyclass(name = "Instance", module = "coevo_csp", frozen)]
struct PyInstance {
    inner: CspInstance,
}

#[pymethods]
impl PyInstance {
    /// Read a file; `.xml` is parsed as XCSP 2.1, anything else as native JSON.
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyInstance { inner: load_instance(&path).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_native(text: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: parse_native(text).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_xcsp(text: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: parse_xcsp(text).map_err(py_err)? })
    }

    /// Model D: `e` distinct pairs, each forbidding round(tightness·d²) tuples.
    #[staticmethod]
    #[pyo3(signature = (n, d, e, tightness, seed = 0))]
    fn model_d(n: usize, d: usize, e: usize, tightness: f64, seed: u64) -> PyResult<Self> {
        let inner = gen_model_d(&ModelDParams { n, d, e, tightness, seed }).map_err(py_err)?;
        Ok(PyInstance { inner })
    }

    /// Model RB. Returns `(instance, planted)` where `planted` is the hidden
    /// solution when `forced`, else None.
    #[staticmethod]
    #[pyo3(signature = (n, p, alpha = 0.8, r = 0.8, forced = true, seed = 0))]
    fn model_rb(n: usize, p: f64, alpha: f64, r: f64, forced: bool, seed: u64) -> PyResult<(Self, Option<Vec<i64>>)> {
        let rb = gen_model_rb(&ModelRbParams { n, alpha, r, p, forced, seed }).map_err(py_err)?;
        Ok((PyInstance { inner: rb.instance }, rb.planted.and_then(|a| a.to_values())))
    }

    #[staticmethod]
    #[pyo3(signature = (n, d, distance, tightness, seed = 0))]
    fn geometric(n: usize, d: usize, distance: f64, tightness: f64, seed: u64) -> PyResult<Self> {
        let inner = gen_geo(&GeoParams { n, d, distance, tightness, seed }).map_err(py_err)?;
        Ok(PyInstance { inner })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    #[getter]
    fn num_constraints(&self) -> usize {
        self.inner.num_constraints()
    }

    fn domain(&self, var: usize) -> PyResult<Vec<i64>> {
        if var >= self.inner.num_vars() {
            return Err(PyValueError::new_err(format!("no variable {var}")));
        }
        Ok(self.inner.domain(var).values().to_vec())
    }

    /// Constraint scopes in id order.
    fn scopes(&self) -> Vec<(usize, usize)> {
        self.inner.constraints().iter().map(|c| c.scope()).collect()
    }

    fn check(&self, constraint: usize, x: i64, y: i64) -> PyResult<bool> {
        if constraint >= self.inner.num_constraints() {
            return Err(PyValueError::new_err(format!("no constraint {constraint}")));
        }
        self.inner.check(constraint, x, y).map_err(py_err)
    }

    fn is_solution(&self, values: Vec<i64>) -> PyResult<bool> {
        self.inner.is_solution(&Assignment::total(values)).map_err(py_err)
    }

    fn to_native(&self) -> String {
        serialize_native(&self.inner)
    }

    fn to_xcsp(&self) -> String {
        write_xcsp(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(name={:?}, vars={}, constraints={})",
            self.inner.name(),
            self.inner.num_vars(),
            self.inner.num_constraints()
        )
    }
}

/// MAC search. Returns a dict with `outcome`, `nodes`, `wipeouts`,
/// `elapsed`, `solution` (list or None) and the final `weights`.
#[pyfunction]
#[pyo3(signature = (instance, heuristic = "dom_wdeg", weights = None, node_cap = None, timeout = None, seed = 0))]
fn solve<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    heuristic: &str,
    weights: Option<Vec<f64>>,
    node_cap: Option<u64>,
    timeout: Option<f64>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let h = self::heuristic(heuristic)?;
    let limits = SearchLimits::new(node_cap, timeout).map_err(py_err)?;
    let mut w = weights_for(&instance.inner, weights)?;
    let stats = py.detach(|| mac_search(&instance.inner, h, &mut w, limits, seed)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("outcome", stats.outcome.label())?;
    out.set_item("nodes", stats.nodes)?;
    out.set_item("wipeouts", stats.wipeouts)?;
    out.set_item("elapsed", stats.elapsed)?;
    let solution = match &stats.outcome {
        Outcome::Sat(a) => a.to_values(),
        _ => None,
    };
    out.set_item("solution", solution)?;
    out.set_item("weights", w.into_vec())?;
    Ok(out)
}

/// Coevolutionary weight learning; returns one weight per constraint.
#[pyfunction]
#[pyo3(signature = (
    instance, generations = 10, pop_size = 50, history_len = 10, encounters_per_gen = 20,
    crossover_rate = 0.9, mutation_rate = 0.01, ranking_bias = 2.0, tournament_size = 2, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn learn_weights(
    py: Python<'_>,
    instance: &PyInstance,
    generations: usize,
    pop_size: usize,
    history_len: usize,
    encounters_per_gen: usize,
    crossover_rate: f64,
    mutation_rate: f64,
    ranking_bias: f64,
    tournament_size: usize,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let params = CoevoParams {
        pop_size,
        history_len,
        encounters_per_gen,
        crossover_rate,
        mutation_rate,
        ranking_bias,
        tournament_size,
        generations,
        seed,
    };
    let w = py.detach(|| coevo_learn(&instance.inner, &params)).map_err(py_err)?;
    Ok(w.into_vec())
}

type Probe = (String, u64, u64);

/// RNDI probing. Returns `(weights, probes)` with one `(outcome, nodes,
/// wipeouts)` tuple per probe.
#[pyfunction]
#[pyo3(signature = (instance, restarts = 50, node_cap_factor = 10, seed = 0))]
fn rndi_learn(
    py: Python<'_>,
    instance: &PyInstance,
    restarts: usize,
    node_cap_factor: u64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<Probe>)> {
    let p = RndiParams { restarts, node_cap_factor, final_heuristic: HeuristicSpec::Wdeg, seed };
    let learned = py.detach(|| rndi_learn_core(&instance.inner, &p)).map_err(py_err)?;
    let probes = learned
        .probes
        .iter()
        .map(|s| (s.outcome.label().to_string(), s.nodes, s.wipeouts))
        .collect();
    Ok((learned.weights.into_vec(), probes))
}

/// Hill-climbing weight learning; returns one weight per constraint.
#[pyfunction]
#[pyo3(signature = (instance, iterations_total = 100, cutoff = 50, seed = 0))]
fn hc_learn(py: Python<'_>, instance: &PyInstance, iterations_total: usize, cutoff: usize, seed: u64) -> PyResult<Vec<f64>> {
    let p = HcParams { iterations_total, cutoff, seed };
    let learned = py.detach(|| hc_learn_core(&instance.inner, &p)).map_err(py_err)?;
    Ok(learned.weights.into_vec())
}

/// Returns a dict with `u`, `u_a`, `u_b`, two-sided `p` and `exact`.
#[pyfunction]
fn mann_whitney_u<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = bench::mann_whitney_u(&a, &b).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("u", r.u)?;
    out.set_item("u_a", r.u_a)?;
    out.set_item("u_b", r.u_b)?;
    out.set_item("p", r.p)?;
    out.set_item("exact", r.exact)?;
    Ok(out)
}

#[pyfunction]
fn vargha_delaney_a(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    bench::vargha_delaney_a(&a, &b).map_err(py_err)
}

/// Runs an experiment described by a JSON config (the same fields as the
/// bench TOML, with a single `method`) and returns the run CSV text.
#[pyfunction]
#[pyo3(signature = (config_json, jobs = 1))]
fn run_experiment(py: Python<'_>, config_json: &str, jobs: usize) -> PyResult<String> {
    let cfg: ExperimentConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(format!("config: {e}")))?;
    let records = py.detach(|| bench::run_experiment_jobs(&cfg, jobs)).map_err(py_err)?;
    Ok(bench::records_to_csv(&records))
}

#[pyfunction]
fn heuristics() -> Vec<&'static str> {
    HeuristicSpec::ALL.iter().map(|h| h.name()).collect()
}

#[pymodule(name = "coevo_csp")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(learn_weights, m)?)?;
    m.add_function(wrap_pyfunction!(rndi_learn, m)?)?;
    m.add_function(wrap_pyfunction!(hc_learn, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney_u, m)?)?;
    m.add_function(wrap_pyfunction!(vargha_delaney_a, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(heuristics, m)?)?;
    Ok(())
}
