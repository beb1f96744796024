//! Python extension module exposing the main operator, channel, entropy,
//! design and decoupling operations.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qdecouple::circuits::{circuit_design_sweep, CircuitModel, GateSet};
use qdecouple::decouple::{
    decoupling_bound, empirical_decoupling_error, haar_l2_identity, BoundMode, DecouplingSource,
};
use qdecouple::designs::{clifford1q_ensemble, design_delta, DeltaMethod};
use qdecouple::entropy::{min_entropy, smooth_min_entropy};
use qdecouple::qmath::{self, SystemLayout};
use qdecouple::report::{self, load_fixture, ExperimentConfig};

fn err(e: qdecouple::Error) -> PyErr {
    use qdecouple::Error as E;
    match e {
        E::Numeric(_) | E::Violation(_) | E::Io { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn layout_of(factors: Vec<(String, usize)>) -> PyResult<SystemLayout> {
    SystemLayout::new(factors).map_err(err)
}

/// A dense operator on a labeled tensor product of finite-dimensional
/// factors.
#[pyclass(name = "Operator", skip_from_py_object)]
#[derive(Clone)]
struct PyOperator {
    inner: qmath::Operator,
}

#[pymethods]
impl PyOperator {
    /// Parses the JSON container `{layout, re, im}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let json = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyOperator {
            inner: qmath::Operator::from_json(&json).map_err(err)?,
        })
    }

    #[staticmethod]
    fn max_entangled(d: usize, label_a: &str, label_b: &str) -> PyResult<Self> {
        Ok(PyOperator {
            inner: qmath::Operator::max_entangled(d, label_a, label_b).map_err(err)?,
        })
    }

    #[staticmethod]
    fn mixed_state(factors: Vec<(String, usize)>) -> PyResult<Self> {
        Ok(PyOperator {
            inner: qmath::Operator::mixed_state(layout_of(factors)?),
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json())
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn labels(&self) -> Vec<String> {
        self.inner
            .layout()
            .labels()
            .into_iter()
            .map(str::to_owned)
            .collect()
    }

    /// Trace as an (re, im) pair.
    fn trace(&self) -> (f64, f64) {
        let t = self.inner.trace();
        (t.re, t.im)
    }

    fn trace_norm(&self) -> f64 {
        self.inner.trace_norm()
    }

    fn partial_trace(&self, over: Vec<String>) -> PyResult<Self> {
        let refs: Vec<&str> = over.iter().map(String::as_str).collect();
        Ok(PyOperator {
            inner: self.inner.partial_trace(&refs).map_err(err)?,
        })
    }

    /// Conditional min-entropy H_min(A|B) in bits; A is named by `a_labels`.
    fn min_entropy(&self, a_labels: Vec<String>) -> PyResult<f64> {
        let refs: Vec<&str> = a_labels.iter().map(String::as_str).collect();
        Ok(min_entropy(&self.inner, &refs).map_err(err)?.value)
    }

    /// Certified lower bound on the ε-smooth min-entropy, in bits.
    fn smooth_min_entropy(&self, a_labels: Vec<String>, eps: f64) -> PyResult<f64> {
        let refs: Vec<&str> = a_labels.iter().map(String::as_str).collect();
        Ok(smooth_min_entropy(&self.inner, &refs, eps)
            .map_err(err)?
            .value)
    }
}

/// A linear map between operator spaces, stored as a Choi matrix.
#[pyclass(name = "Channel", skip_from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: qmath::Channel,
}

#[pymethods]
impl PyChannel {
    #[staticmethod]
    fn identity(factors: Vec<(String, usize)>) -> PyResult<Self> {
        Ok(PyChannel {
            inner: qmath::Channel::identity(layout_of(factors)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn dephasing(factors: Vec<(String, usize)>) -> PyResult<Self> {
        Ok(PyChannel {
            inner: qmath::Channel::dephasing(layout_of(factors)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn depolarizing(factors: Vec<(String, usize)>) -> PyResult<Self> {
        Ok(PyChannel {
            inner: qmath::Channel::depolarizing(layout_of(factors)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn partial_trace(factors: Vec<(String, usize)>, over: Vec<String>) -> PyResult<Self> {
        let refs: Vec<&str> = over.iter().map(String::as_str).collect();
        Ok(PyChannel {
            inner: qmath::Channel::partial_trace_channel(layout_of(factors)?, &refs)
                .map_err(err)?,
        })
    }

    fn to_choi(&self) -> PyOperator {
        PyOperator {
            inner: self.inner.to_choi(),
        }
    }

    fn apply(&self, x: &PyOperator) -> PyResult<PyOperator> {
        Ok(PyOperator {
            inner: self.inner.apply(&x.inner).map_err(err)?,
        })
    }
}

/// A state on A⊗R together with a channel on A: the object the decoupling
/// bounds and experiments operate on.
#[pyclass(name = "DecouplingInstance")]
struct PyDecouplingInstance {
    inner: qdecouple::decouple::DecouplingInstance,
}

#[pymethods]
impl PyDecouplingInstance {
    #[new]
    fn new(rho: &PyOperator, channel: &PyChannel) -> PyResult<Self> {
        Ok(PyDecouplingInstance {
            inner: qdecouple::decouple::DecouplingInstance::new(
                rho.inner.clone(),
                channel.inner.clone(),
            )
            .map_err(err)?,
        })
    }

    /// Built-in fixture by name (bell-identity, bell-trace, product-mixed,
    /// measurement) or path to a fixture JSON file.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(PyDecouplingInstance {
            inner: load_fixture(name).map_err(err)?,
        })
    }

    fn haar_bound(&self) -> PyResult<f64> {
        decoupling_bound(&self.inner, BoundMode::Haar).map_err(err)
    }

    fn approx_bound(&self, delta: f64) -> PyResult<f64> {
        decoupling_bound(&self.inner, BoundMode::Approx { delta }).map_err(err)
    }

    fn smooth_bound(&self, delta: f64, eps: f64) -> PyResult<f64> {
        decoupling_bound(&self.inner, BoundMode::Smooth { delta, eps }).map_err(err)
    }

    /// Exact decoupling error averaged over the single-qubit Clifford
    /// ensemble; returns (mean, exact_flag).
    fn empirical_clifford(&self) -> PyResult<(f64, bool)> {
        let ens = clifford1q_ensemble();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = empirical_decoupling_error(&self.inner, &DecouplingSource::Ensemble(&ens), &mut rng)
            .map_err(err)?;
        Ok((e.mean, e.exact))
    }

    /// Monte Carlo decoupling error over Haar unitaries; returns
    /// (mean, stderr).
    fn empirical_haar(&self, trials: usize, seed: u64) -> PyResult<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = empirical_decoupling_error(
            &self.inner,
            &DecouplingSource::Haar { n_trials: trials },
            &mut rng,
        )
        .map_err(err)?;
        Ok((e.mean, e.stderr))
    }
}

/// Lower and upper certified bounds on the design error δ of the
/// single-qubit Clifford ensemble; `method` is "diamond" or
/// "choi-trace-bounds".
#[pyfunction]
fn clifford_delta(method: &str) -> PyResult<(f64, f64)> {
    let m = match method {
        "diamond" => DeltaMethod::Diamond,
        "choi-trace-bounds" => DeltaMethod::ChoiTraceBounds,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}"
            )))
        }
    };
    design_delta(&clifford1q_ensemble(), m).map_err(err)
}

/// Depth sweep of the random-circuit design-quality proxy; returns rows of
/// (t, delta_estimate, stderr).
#[pyfunction]
fn circuit_sweep(
    n_qubits: usize,
    t_values: Vec<usize>,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<(usize, f64, f64)>> {
    let model = CircuitModel::new(n_qubits, GateSet::HaarU4, 0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = circuit_design_sweep(&model, &t_values, trials, &mut rng).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.t, r.delta_estimate, r.stderr))
        .collect())
}

/// Monte Carlo check of the Haar 2-norm identity with identity maps on both
/// sides; returns ((mean, stderr), closed_form).
#[pyfunction]
fn identity_check(d: usize, trials: usize, seed: u64) -> PyResult<((f64, f64), f64)> {
    let t = qmath::Channel::identity(SystemLayout::single("T", d)).map_err(err)?;
    let e = qmath::Channel::identity(SystemLayout::single("E", d)).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_l2_identity(&t, &e, trials, &mut rng).map_err(err)
}

/// Runs a full experiment from a JSON config string and returns the report
/// as a JSON string.
#[pyfunction]
fn run_experiment(config_json: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(err)?;
    let report = report::run(&config).map_err(err)?;
    serde_json::to_string_pretty(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn qdecouple_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyDecouplingInstance>()?;
    m.add_function(wrap_pyfunction!(clifford_delta, m)?)?;
    m.add_function(wrap_pyfunction!(circuit_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
