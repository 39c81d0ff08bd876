//! Python bindings. Build with the `extension-module` feature and import
//! the resulting shared library as `hosync`.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hosync::io::ConfigFile;
use hosync::metrics::{Epsilon, MetricConfig};
use hosync::reservoir::{self, Sample, TrainOptions};
use hosync::sweep::{arnold_sweep_with, SweepOptions};
use hosync::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyIOError::new_err(m),
        Error::Stalled(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "OscillatorParams", get_all, set_all)]
struct PyOscillatorParams {
    capacitance: f64,
    supply_current: f64,
    threshold_voltage: f64,
    hold_voltage: f64,
    on_resistance: f64,
    noise_sigma: f64,
}

impl PyOscillatorParams {
    fn inner(&self) -> hosync::OscillatorParams {
        hosync::OscillatorParams {
            capacitance: self.capacitance,
            supply_current: self.supply_current,
            threshold_voltage: self.threshold_voltage,
            hold_voltage: self.hold_voltage,
            on_resistance: self.on_resistance,
            noise_sigma: self.noise_sigma,
        }
    }
}

#[pymethods]
impl PyOscillatorParams {
    /// SI units throughout; omitted values take the library defaults.
    #[new]
    #[pyo3(signature = (supply_current, capacitance=None, threshold_voltage=None, hold_voltage=None, on_resistance=None, noise_sigma=None))]
    fn new(
        supply_current: f64,
        capacitance: Option<f64>,
        threshold_voltage: Option<f64>,
        hold_voltage: Option<f64>,
        on_resistance: Option<f64>,
        noise_sigma: Option<f64>,
    ) -> Self {
        let d = hosync::OscillatorParams::default();
        Self {
            capacitance: capacitance.unwrap_or(d.capacitance),
            supply_current,
            threshold_voltage: threshold_voltage.unwrap_or(d.threshold_voltage),
            hold_voltage: hold_voltage.unwrap_or(d.hold_voltage),
            on_resistance: on_resistance.unwrap_or(d.on_resistance),
            noise_sigma: noise_sigma.unwrap_or(d.noise_sigma),
        }
    }

    fn validate(&self) -> PyResult<()> {
        self.inner().validate().map_err(to_py)
    }

    fn own_frequency(&self) -> f64 {
        hosync::own_frequency(&self.inner())
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner())
    }
}

#[pyclass(name = "NetworkConfig")]
struct PyNetworkConfig(hosync::NetworkConfig);

#[pymethods]
impl PyNetworkConfig {
    /// `coupling[i][j]` is the threshold drop (V) on `j` while `i` is on.
    #[new]
    #[pyo3(signature = (oscillators, coupling=None, seed=0))]
    fn new(oscillators: Vec<PyRef<'_, PyOscillatorParams>>, coupling: Option<Vec<Vec<f64>>>, seed: u64) -> PyResult<Self> {
        let params: Vec<_> = oscillators.iter().map(|p| p.inner()).collect();
        let mut cfg = hosync::NetworkConfig::uncoupled(params, seed);
        if let Some(rows) = coupling {
            cfg.coupling = hosync::CouplingMatrix::from_rows(&rows).map_err(to_py)?;
        }
        cfg.validate().map_err(to_py)?;
        Ok(Self(cfg))
    }

    /// The network section of a TOML configuration file.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let file = ConfigFile::parse_validated(text).map_err(to_py)?;
        file.network().map(Self).map_err(to_py)
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.0.seed = seed;
    }

    #[getter]
    fn supply_currents(&self) -> Vec<f64> {
        self.0.oscillators.iter().map(|p| p.supply_current).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "SyncMetrics", get_all, frozen)]
struct PySyncMetrics {
    m_i: u64,
    m_j: u64,
    shr_value: f64,
    mu: f64,
    synchronized: bool,
}

#[pymethods]
impl PySyncMetrics {
    fn __repr__(&self) -> String {
        format!(
            "SyncMetrics(shr={}:{}, shr_value={}, mu={}, synchronized={})",
            self.m_j, self.m_i, self.shr_value, self.mu, self.synchronized
        )
    }
}

impl From<hosync::SyncMetrics> for PySyncMetrics {
    fn from(m: hosync::SyncMetrics) -> Self {
        Self {
            m_i: m.m_i,
            m_j: m.m_j,
            shr_value: m.shr_value,
            mu: m.mu,
            synchronized: m.synchronized,
        }
    }
}

/// Spike times of every oscillator after `warmup` spikes, `record` each.
#[pyfunction]
#[pyo3(signature = (config, warmup=50, record=1000))]
fn simulate(py: Python<'_>, config: &PyNetworkConfig, warmup: usize, record: usize) -> PyResult<Vec<Vec<f64>>> {
    let cfg = config.0.clone();
    let trains = py
        .detach(move || hosync::simulate(&cfg, warmup, record))
        .map_err(to_py)?;
    Ok(trains.into_iter().map(|t| t.times).collect())
}

/// SHR and μ of two spike trains. Give `epsilon` (seconds) for an absolute
/// coincidence window, else `epsilon_isi_fraction` of the shorter mean ISI.
#[pyfunction]
#[pyo3(signature = (train_i, train_j, epsilon=None, epsilon_isi_fraction=0.05, mu_threshold=90.0, min_oscillations=50, max_oscillations=1000))]
fn compute_shr_mu(
    train_i: Vec<f64>,
    train_j: Vec<f64>,
    epsilon: Option<f64>,
    epsilon_isi_fraction: f64,
    mu_threshold: f64,
    min_oscillations: usize,
    max_oscillations: usize,
) -> PyResult<PySyncMetrics> {
    let cfg = MetricConfig {
        epsilon: epsilon.map_or(Epsilon::RelativeToIsi(epsilon_isi_fraction), Epsilon::Absolute),
        mu_th: mu_threshold,
        min_oscillations,
        max_oscillations,
    };
    let ti = hosync::SpikeTrain::new(0, train_i).map_err(to_py)?;
    let tj = hosync::SpikeTrain::new(1, train_j).map_err(to_py)?;
    hosync::compute_shr_mu(&ti, &tj, &cfg).map(Into::into).map_err(to_py)
}

/// Runs the `[sweep]` of a TOML configuration. Returns rows
/// `(x_value, y_value, m_i, m_j, shr_value, mu_percent, synchronized, error_flag)`.
#[pyfunction]
#[pyo3(signature = (config_toml, workers=0))]
#[allow(clippy::type_complexity)]
fn sweep(py: Python<'_>, config_toml: &str, workers: usize) -> PyResult<Vec<(f64, f64, u64, u64, f64, f64, bool, i32)>> {
    let spec = ConfigFile::parse_validated(config_toml)
        .and_then(|c| c.sweep_spec())
        .map_err(to_py)?;
    let map = py
        .detach(move || arnold_sweep_with(&spec, &SweepOptions { workers, progress: None }))
        .map_err(to_py)?;
    Ok(hosync::io::map_rows(&map)
        .into_iter()
        .map(|r| (r.x_value, r.y_value, r.m_i, r.m_j, r.shr_value, r.mu_percent, r.synchronized, r.error_flag))
        .collect())
}

/// XOR truth table through the `[pipeline]` of a TOML configuration.
/// Rows `(x, y, i_p1, i_p2, shr, sigma, q)`.
#[pyfunction]
fn xor_truth_table(py: Python<'_>, config_toml: &str) -> PyResult<Vec<(u8, u8, f64, f64, f64, f64, u8)>> {
    let pipeline = ConfigFile::parse_validated(config_toml)
        .and_then(|c| c.pipeline())
        .map_err(to_py)?;
    let rows = py
        .detach(move || {
            reservoir::XorCase::truth_table()
                .iter()
                .map(|c| reservoir::run_xor(c.x, c.y, &pipeline))
                .collect::<hosync::Result<Vec<_>>>()
        })
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.x, r.y, r.currents[0], r.currents.get(1).copied().unwrap_or(0.0), r.shr, r.sigma, r.q))
        .collect())
}

/// Σ = w_B + Σ w_k x_k + Σ w_Z z.
#[pyfunction]
fn readout_sum(inputs: Vec<f64>, features: Vec<f64>, bias_weight: f64, input_weights: Vec<f64>, feature_weights: Vec<f64>) -> PyResult<f64> {
    let n = reservoir::ReadoutNeuron {
        bias_weight,
        input_weights,
        feature_weights,
    };
    reservoir::readout_sum(&inputs, &features, &n).map_err(to_py)
}

/// Pocket perceptron on `(inputs, features, label)` samples. Returns
/// `(bias_weight, input_weights, feature_weights, correct, total)`.
#[pyfunction]
#[pyo3(signature = (samples, learning_rate=1.0, max_epochs=1000))]
#[allow(clippy::type_complexity)]
fn train_readout(samples: Vec<(Vec<f64>, Vec<f64>, u8)>, learning_rate: f64, max_epochs: usize) -> PyResult<(f64, Vec<f64>, Vec<f64>, usize, usize)> {
    let data: Vec<Sample> = samples
        .into_iter()
        .map(|(inputs, features, label)| Sample {
            inputs,
            features,
            label,
        })
        .collect();
    let r = reservoir::train_readout_with(
        &data,
        &TrainOptions {
            learning_rate,
            max_epochs,
        },
    )
    .map_err(to_py)?;
    Ok((r.neuron.bias_weight, r.neuron.input_weights, r.neuron.feature_weights, r.correct, r.total))
}

#[pymodule]
#[pyo3(name = "hosync")]
fn hosync_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOscillatorParams>()?;
    m.add_class::<PyNetworkConfig>()?;
    m.add_class::<PySyncMetrics>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(compute_shr_mu, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(xor_truth_table, m)?)?;
    m.add_function(wrap_pyfunction!(readout_sum, m)?)?;
    m.add_function(wrap_pyfunction!(train_readout, m)?)?;
    Ok(())
}
