//! Python bindings for the prime-running core crate.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use prime_running::bias::{self, decimal_string, rational_to_f64, BiasVector};
use prime_running::cli::config::parse_q_spec;
use prime_running::cramer::{self, CramerModel, ExpectationMode};
use prime_running::error::Error;
use prime_running::primes::{self, ResidueClass};
use prime_running::running::{self, DirectionMap, LatticePath, PathMode, RunningTable};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Argument(_) | Error::CheckpointMismatch(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyfunction]
fn prime_floor(n: u64) -> u64 {
    primes::prime_floor(n)
}

#[pyfunction]
fn prime_count(x: u64) -> u64 {
    primes::prime_count(x)
}

#[pyfunction]
fn pi_ap(x: u64, d: u64, a: u64) -> PyResult<u64> {
    let cls = ResidueClass::new(d, a).map_err(to_py_err)?;
    Ok(primes::pi_ap(x, cls))
}

#[pyclass(name = "RunningTable")]
struct PyRunningTable {
    inner: RunningTable,
}

#[pymethods]
impl PyRunningTable {
    #[getter]
    fn d(&self) -> u64 {
        self.inner.d
    }

    #[getter]
    fn checkpoints(&self) -> Vec<u64> {
        self.inner.checkpoints.clone()
    }

    #[getter]
    fn reversed(&self) -> bool {
        self.inner.reversed
    }

    /// phi(x; d, a) at checkpoint index `row`.
    fn value(&self, row: usize, a: u64) -> PyResult<u64> {
        if row >= self.inner.checkpoints.len() {
            return Err(PyValueError::new_err("row out of range"));
        }
        Ok(self.inner.value(row, a))
    }

    fn row(&self, row: usize) -> PyResult<Vec<u64>> {
        self.inner
            .phi
            .get(row)
            .cloned()
            .ok_or_else(|| PyValueError::new_err("row out of range"))
    }

    fn rescaled_bias(&self, row: usize, a: u64) -> PyResult<f64> {
        if row >= self.inner.checkpoints.len() {
            return Err(PyValueError::new_err("row out of range"));
        }
        self.inner.rescaled_bias_at(row, a).map_err(to_py_err)
    }
}

#[pyfunction]
#[pyo3(signature = (x, d, checkpoints, reversed=false))]
fn running_table(x: u64, d: u64, checkpoints: Vec<u64>, reversed: bool) -> PyResult<PyRunningTable> {
    let inner = if reversed {
        running::reversed_running_table(x, d, &checkpoints)
    } else {
        running::running_table(x, d, &checkpoints)
    }
    .map_err(to_py_err)?;
    Ok(PyRunningTable { inner })
}

#[pyfunction]
fn race(x: u64, d: u64, a: u64, b: u64) -> PyResult<i64> {
    running::race(x, d, a, b).map_err(to_py_err)
}

#[pyfunction]
fn rescaled_bias(x: u64, d: u64, a: u64) -> PyResult<f64> {
    let cls = ResidueClass::new(d, a).map_err(to_py_err)?;
    running::rescaled_bias(x, cls).map_err(to_py_err)
}

#[pyclass(name = "LatticePath")]
struct PyLatticePath {
    inner: LatticePath,
}

#[pymethods]
impl PyLatticePath {
    #[getter]
    fn samples(&self) -> Vec<(u64, i64, i64)> {
        self.inner.samples.clone()
    }

    #[getter]
    fn max_abs(&self) -> u64 {
        self.inner.max_abs
    }

    fn final_position(&self) -> (i64, i64) {
        self.inner.final_position()
    }
}

fn build_map(d: u64, map: Option<Vec<(u64, (i64, i64))>>) -> PyResult<DirectionMap> {
    match map {
        Some(assignments) => DirectionMap::new(d, &assignments).map_err(to_py_err),
        None if d == 5 => Ok(DirectionMap::mod5_default()),
        None => Err(PyValueError::new_err(
            "a direction map is required for moduli other than 5",
        )),
    }
}

/// Prime walk: step at each prime by the direction of its class mod d.
#[pyfunction]
#[pyo3(signature = (n, d=5, map=None, stride=1))]
fn walk_path(
    n: u64,
    d: u64,
    map: Option<Vec<(u64, (i64, i64))>>,
    stride: u64,
) -> PyResult<PyLatticePath> {
    let map = build_map(d, map)?;
    let inner = running::lattice_path(n, &map, stride, PathMode::Walk).map_err(to_py_err)?;
    Ok(PyLatticePath { inner })
}

/// Prime run: move every step in the direction of the last prime's class.
#[pyfunction]
#[pyo3(signature = (n, d=5, map=None, stride=1))]
fn run_path(
    n: u64,
    d: u64,
    map: Option<Vec<(u64, (i64, i64))>>,
    stride: u64,
) -> PyResult<PyLatticePath> {
    let map = build_map(d, map)?;
    let inner = running::lattice_path(n, &map, stride, PathMode::Run).map_err(to_py_err)?;
    Ok(PyLatticePath { inner })
}

#[pyclass(name = "BiasVector")]
struct PyBiasVector {
    inner: BiasVector,
}

#[pymethods]
impl PyBiasVector {
    #[getter]
    fn d(&self) -> u64 {
        self.inner.d
    }

    /// Reduced classes mod d in ascending order.
    fn classes(&self) -> Vec<u64> {
        self.inner.entries.keys().copied().collect()
    }

    /// Exact value as a "numer/denom" string.
    fn rational(&self, a: u64) -> PyResult<String> {
        let r = self.inner.entry(a).map_err(to_py_err)?;
        Ok(format!("{}/{}", r.numer(), r.denom()))
    }

    fn value(&self, a: u64) -> PyResult<f64> {
        Ok(rational_to_f64(self.inner.entry(a).map_err(to_py_err)?))
    }

    #[pyo3(signature = (a, places=4))]
    fn decimal(&self, a: u64, places: u32) -> PyResult<String> {
        Ok(decimal_string(self.inner.entry(a).map_err(to_py_err)?, places))
    }
}

/// Exact model bias constants R_Q(d; a). `q_spec` accepts an integer,
/// `<T>#`, or `<m>*<T>#`; method is "auto", "brute", or "recursion".
#[pyfunction]
#[pyo3(signature = (d, q_spec, method="auto"))]
fn bias_vector(d: u64, q_spec: &str, method: &str) -> PyResult<PyBiasVector> {
    let q = parse_q_spec(q_spec).map_err(to_py_err)?;
    let inner = match method {
        "brute" => BiasVector::brute(q, d),
        "recursion" => BiasVector::recursion(&q, d),
        "auto" => bias::bias_vector_auto(&q, d),
        other => return Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    }
    .map_err(to_py_err)?;
    Ok(PyBiasVector { inner })
}

/// Bias constants at Q = lcm(d, T#).
#[pyfunction]
fn primorial_bias_table(d: u64, t: u64) -> PyResult<PyBiasVector> {
    let inner = bias::primorial_bias_table(d, t).map_err(to_py_err)?;
    Ok(PyBiasVector { inner })
}

/// The diverging product Q_T(d; a), as (rational string, float).
#[pyfunction]
fn q_t_product(d: u64, a: u64, t: u64) -> PyResult<(String, f64)> {
    let r = bias::q_t_product(d, a, t).map_err(to_py_err)?;
    Ok((format!("{}/{}", r.numer(), r.denom()), rational_to_f64(&r)))
}

/// One sampled sequence of model primes; returns (mc_primes, overshoot).
#[pyfunction]
fn sample_sequence(x: u64, q: u64, seed: u64) -> PyResult<(Vec<u64>, Option<u64>)> {
    let model = CramerModel::new(q).map_err(to_py_err)?;
    let seq = cramer::sample_sequence(x, &model, seed).map_err(to_py_err)?;
    Ok((seq.mc_primes, seq.overshoot))
}

/// Random running function of one sampled sequence.
#[pyfunction]
fn phi_tilde(x: u64, q: u64, d: u64, a: u64, seed: u64) -> PyResult<u64> {
    let model = CramerModel::new(q).map_err(to_py_err)?;
    let seq = cramer::sample_sequence(x, &model, seed).map_err(to_py_err)?;
    cramer::phi_tilde(&seq, d, a).map_err(to_py_err)
}

/// E[phi_tilde(x; d, a)]; mode is "series" (exact truncated series) or
/// "asymptotic" (x/phi(d) + R_Q(d;a) x/ln x).
#[pyfunction]
#[pyo3(signature = (x, q, d, a, mode="series"))]
fn expected_phi_tilde(x: u64, q: u64, d: u64, a: u64, mode: &str) -> PyResult<f64> {
    let model = CramerModel::new(q).map_err(to_py_err)?;
    let mode = match mode {
        "series" => ExpectationMode::Series,
        "asymptotic" => ExpectationMode::Asymptotic,
        other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    };
    cramer::expected_phi_tilde(x, &model, d, a, mode).map_err(to_py_err)
}

/// Monte Carlo trials; returns a dict with mean, variance, and values.
#[pyfunction]
#[pyo3(signature = (x, q, d, a, trials=500, seed=42))]
fn monte_carlo(
    py: Python<'_>,
    x: u64,
    q: u64,
    d: u64,
    a: u64,
    trials: u64,
    seed: u64,
) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let model = CramerModel::new(q).map_err(to_py_err)?;
    let stats = cramer::monte_carlo_stats(x, &model, d, a, trials, seed).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("n_trials", stats.n_trials)?;
    dict.set_item("mean", stats.mean)?;
    dict.set_item("variance", stats.variance)?;
    dict.set_item("values", stats.values)?;
    Ok(dict.into())
}

#[pymodule]
fn prime_running_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(prime_floor, m)?)?;
    m.add_function(wrap_pyfunction!(prime_count, m)?)?;
    m.add_function(wrap_pyfunction!(pi_ap, m)?)?;
    m.add_function(wrap_pyfunction!(running_table, m)?)?;
    m.add_function(wrap_pyfunction!(race, m)?)?;
    m.add_function(wrap_pyfunction!(rescaled_bias, m)?)?;
    m.add_function(wrap_pyfunction!(walk_path, m)?)?;
    m.add_function(wrap_pyfunction!(run_path, m)?)?;
    m.add_function(wrap_pyfunction!(bias_vector, m)?)?;
    m.add_function(wrap_pyfunction!(primorial_bias_table, m)?)?;
    m.add_function(wrap_pyfunction!(q_t_product, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(phi_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(expected_phi_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_class::<PyRunningTable>()?;
    m.add_class::<PyLatticePath>()?;
    m.add_class::<PyBiasVector>()?;
    Ok(())
}
