//! Python bindings: interval generation, detection, metrics and test signals.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use seedbs::detect::{IcChoice, IntervalMode, Selection, SigmaRule, ThresholdRule, DEFAULT_DECAY};
use seedbs::intervals::Layer;
use seedbs::{metrics, DetectConfig, Error, Interval, NoiseModel, SeededParams, SignalSpec};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn interval_tuples(intervals: &[Interval]) -> Vec<(Option<u32>, usize, usize)> {
    intervals
        .iter()
        .map(|iv| {
            let layer = match iv.layer {
                Layer::Seeded(k) => Some(k),
                Layer::Random => None,
            };
            (layer, iv.left, iv.right)
        })
        .collect()
}

/// Seeded intervals as `(layer, left, right)` tuples covering `left+1..=right`.
#[pyfunction]
#[pyo3(signature = (length, decay = DEFAULT_DECAY, min_len = 2))]
fn seeded_intervals(
    length: usize,
    decay: f64,
    min_len: usize,
) -> PyResult<Vec<(Option<u32>, usize, usize)>> {
    let params = SeededParams::new(length, decay, min_len).map_err(to_py)?;
    Ok(interval_tuples(
        &seedbs::seeded_intervals(&params).map_err(to_py)?,
    ))
}

/// Uniformly random intervals; the layer entry is `None`.
#[pyfunction]
#[pyo3(signature = (length, count, min_len = 2, seed = 0))]
fn random_intervals(
    length: usize,
    count: usize,
    min_len: usize,
    seed: u64,
) -> PyResult<Vec<(Option<u32>, usize, usize)>> {
    Ok(interval_tuples(
        &seedbs::random_intervals(length, count, min_len, seed).map_err(to_py)?,
    ))
}

/// Sum of interval lengths of the seeded collection.
#[pyfunction]
#[pyo3(signature = (length, decay = DEFAULT_DECAY, min_len = 2))]
fn total_interval_length(length: usize, decay: f64, min_len: usize) -> PyResult<u64> {
    let params = SeededParams::new(length, decay, min_len).map_err(to_py)?;
    Ok(seedbs::total_interval_length(
        &seedbs::seeded_intervals(&params).map_err(to_py)?,
    ))
}

/// Result of [`detect`].
#[pyclass(frozen, get_all, module = "pyseedbs")]
struct Detection {
    changepoints: Vec<usize>,
    /// Gain of the candidate that introduced each change point.
    gains: Vec<f64>,
    /// Fitted segment means.
    means: Vec<f64>,
    threshold: f64,
    sigma_hat: f64,
    ic: Option<String>,
    ic_score: Option<f64>,
    total_length: u64,
}

#[pymethods]
impl Detection {
    fn __repr__(&self) -> String {
        format!(
            "Detection(changepoints={:?}, threshold={}, sigma_hat={})",
            self.changepoints, self.threshold, self.sigma_hat
        )
    }
}

/// Change points of `series` (0-based positions where a new segment starts).
#[pyfunction]
#[pyo3(signature = (
    series, *, decay = DEFAULT_DECAY, random = None, seed = 0, min_len = 2,
    selection = "greedy", ic = "ssic", theta = 1.01, alpha = None,
    threshold = None, sigma = None, max_changepoints = None,
))]
#[allow(clippy::too_many_arguments)]
fn detect(
    py: Python<'_>,
    series: Vec<f64>,
    decay: f64,
    random: Option<usize>,
    seed: u64,
    min_len: usize,
    selection: &str,
    ic: &str,
    theta: f64,
    alpha: Option<f64>,
    threshold: Option<f64>,
    sigma: Option<f64>,
    max_changepoints: Option<usize>,
) -> PyResult<Detection> {
    let mut cfg = DetectConfig {
        intervals: match random {
            Some(count) => IntervalMode::Random {
                count,
                min_len,
                seed,
            },
            None => IntervalMode::Seeded { decay, min_len },
        },
        max_changepoints,
        ..DetectConfig::default()
    };
    cfg.selection = match selection {
        "greedy" => Selection::Greedy,
        "not" => Selection::Not,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown selection {other:?}"
            )))
        }
    };
    cfg.ic = match (ic, alpha) {
        ("none", _) => IcChoice::None,
        ("ssic", _) => IcChoice::Ssic(theta),
        ("bic", _) => IcChoice::Bic,
        ("constant", Some(a)) => IcChoice::Constant(a),
        ("constant", None) => return Err(PyValueError::new_err("ic='constant' needs alpha")),
        (other, _) => return Err(PyValueError::new_err(format!("unknown ic {other:?}"))),
    };
    if let Some(t) = threshold {
        cfg.threshold = ThresholdRule::Fixed(t);
    }
    if let Some(s) = sigma {
        cfg.sigma = SigmaRule::Fixed(s);
    }
    let found = py.detach(|| seedbs::detect(&series, &cfg)).map_err(to_py)?;
    Ok(Detection {
        changepoints: found.changepoints().to_vec(),
        gains: found.gains.clone(),
        means: found.segmentation.means().to_vec(),
        threshold: found.threshold,
        sigma_hat: found.sigma_hat,
        ic: found.ic.map(|(k, _)| k.to_string()),
        ic_score: found.ic.map(|(_, s)| s),
        total_length: found.total_length,
    })
}

/// Mean squared error of the piecewise-mean fit of `est` against `truth`.
#[pyfunction]
fn mse(est: Vec<usize>, series: Vec<f64>, truth: Vec<f64>) -> PyResult<f64> {
    metrics::mse(&est, &series, &truth).map_err(to_py)
}

#[pyfunction]
fn hausdorff(est: Vec<usize>, truth: Vec<usize>, length: usize) -> f64 {
    metrics::hausdorff(&est, &truth, length)
}

#[pyfunction]
fn v_measure(est: Vec<usize>, truth: Vec<usize>, length: usize) -> f64 {
    metrics::v_measure(&est, &truth, length)
}

/// `len(truth) - len(est)`.
#[pyfunction]
fn count_error(est: Vec<usize>, truth: Vec<usize>) -> i64 {
    metrics::count_error(&est, &truth)
}

/// Piecewise-constant test signal.
#[pyclass(frozen, module = "pyseedbs")]
struct Signal(SignalSpec);

#[pymethods]
impl Signal {
    /// One of `Signal.names()`.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        SignalSpec::bundled(name).map(Signal).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SignalSpec::from_json(text, "<string>")
            .map(Signal)
            .map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        seedbs::signals::load_signal_spec(path)
            .map(Signal)
            .map_err(to_py)
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        SignalSpec::bundled_names().collect()
    }

    /// Copy of this signal repeated `times` back to back.
    fn repeated(&self, times: usize) -> PyResult<Self> {
        let mut spec = self.0.clone();
        spec.repeat = times;
        spec.validate().map_err(to_py)?;
        Ok(Signal(spec))
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    /// Length after repetition.
    fn __len__(&self) -> usize {
        self.0.rendered_len()
    }

    #[getter]
    fn sigma(&self) -> Option<f64> {
        self.0.sigma
    }

    #[getter]
    fn changepoints(&self) -> Vec<usize> {
        self.0.effective_changepoints()
    }

    #[getter]
    fn levels(&self) -> Vec<f64> {
        self.0.effective_levels()
    }

    fn mean(&self) -> Vec<f64> {
        self.0.render()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// `reps` noisy copies; `sigma` defaults to the signal's own noise level.
    #[pyo3(signature = (sigma = None, seed = 0, reps = 1))]
    fn simulate(&self, sigma: Option<f64>, seed: u64, reps: usize) -> PyResult<Vec<Vec<f64>>> {
        let noise = NoiseModel::new(sigma.or(self.0.sigma).unwrap_or(1.0), seed).map_err(to_py)?;
        seedbs::signals::simulate(&self.0, &noise, reps).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Signal(name={:?}, length={}, changepoints={})",
            self.0.name,
            self.0.rendered_len(),
            self.0.effective_changepoints().len()
        )
    }
}

#[pymodule]
pub fn pyseedbs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_DECAY", DEFAULT_DECAY)?;
    m.add_function(wrap_pyfunction!(seeded_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(random_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(total_interval_length, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(v_measure, m)?)?;
    m.add_function(wrap_pyfunction!(count_error, m)?)?;
    m.add_class::<Detection>()?;
    m.add_class::<Signal>()?;
    Ok(())
}
