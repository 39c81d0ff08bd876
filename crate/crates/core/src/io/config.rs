//! The TOML configuration file.
//!
//! Field names carry their units; values are converted to SI on load by
//! division (`981 uA` becomes `981 / 1e6` A). One file describes the network
//! and, optionally, the metric, the simulation length, a sweep and the XOR
//! pipeline; each command reads the sections it needs.
//!
//! ```toml
//! seed = 1
//!
//! [simulation]
//! warmup_spikes = 50
//! record_spikes = 1000
//!
//! [[oscillator]]
//! supply_current_uA = 981.0
//! capacitance_nF = 100.0        # default
//! threshold_voltage_V = 5.0     # default
//! hold_voltage_V = 1.5          # default
//! on_resistance_ohm = 1000.0    # default
//! noise_sigma_mV = 20.0         # default
//!
//! [coupling]                    # either a full matrix or one uniform value
//! delta_V = [[0.0, 0.3], [0.3, 0.0]]
//!
//! [[drive]]
//! spike_times_s = [1e-3, 2e-3]
//! pulse_width_us = 50.0
//! delta_ext_V = [0.2, 0.0]
//!
//! [metric]
//! epsilon_isi_fraction = 0.05   # or epsilon_us = ...
//! mu_threshold_percent = 90.0
//! min_oscillations = 50
//! max_oscillations = 1000
//!
//! [sweep]
//! observed_pair = [0, 1]
//! base_seed = 1                 # defaults to `seed`
//! x = { param = "supply_current_uA", oscillator = 0, min = 574.0, max = 990.0, steps = 50 }
//! y = { param = "supply_current_uA", oscillator = 1, min = 574.0, max = 990.0, steps = 50 }
//!
//! [pipeline]
//! observed_pair = [0, 1]
//! encoding = { offsets_uA = [638.0, 574.0], gains_uA = [343.0, 416.0] }
//! readout = { bias_weight = 1.12, input_weights = [-0.8, 0.78], feature_weights = [-1.0] }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Epsilon, MetricConfig};
use crate::oscillator::{defaults, CouplingMatrix, ExternalDrive, NetworkConfig, OscillatorParams};
use crate::reservoir::{InputEncoding, PipelineConfig, ReadoutNeuron, ReservoirRun};
use crate::simulate::SimOptions;
use crate::sweep::{Axis, ParamPath, SweepSpec};

const MICRO: f64 = 1e6;
const NANO: f64 = 1e9;
const MILLI: f64 = 1e3;

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub supply_current_uA: f64,
    #[serde(default = "d_capacitance")]
    pub capacitance_nF: f64,
    #[serde(default = "d_threshold")]
    pub threshold_voltage_V: f64,
    #[serde(default = "d_hold")]
    pub hold_voltage_V: f64,
    #[serde(default = "d_on_resistance")]
    pub on_resistance_ohm: f64,
    #[serde(default = "d_noise")]
    pub noise_sigma_mV: f64,
}

fn d_capacitance() -> f64 {
    defaults::CAPACITANCE * NANO
}
fn d_threshold() -> f64 {
    defaults::THRESHOLD_VOLTAGE
}
fn d_hold() -> f64 {
    defaults::HOLD_VOLTAGE
}
fn d_on_resistance() -> f64 {
    defaults::ON_RESISTANCE
}
fn d_noise() -> f64 {
    defaults::NOISE_SIGMA * MILLI
}

impl OscillatorSpec {
    pub fn to_params(&self) -> OscillatorParams {
        OscillatorParams {
            capacitance: self.capacitance_nF / NANO,
            supply_current: self.supply_current_uA / MICRO,
            threshold_voltage: self.threshold_voltage_V,
            hold_voltage: self.hold_voltage_V,
            on_resistance: self.on_resistance_ohm,
            noise_sigma: self.noise_sigma_mV / MILLI,
        }
    }

    /// Inverse of [`to_params`](Self::to_params), up to rounding.
    pub fn from_params(p: &OscillatorParams) -> Self {
        Self {
            supply_current_uA: p.supply_current * MICRO,
            capacitance_nF: p.capacitance * NANO,
            threshold_voltage_V: p.threshold_voltage,
            hold_voltage_V: p.hold_voltage,
            on_resistance_ohm: p.on_resistance,
            noise_sigma_mV: p.noise_sigma * MILLI,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_V: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_V: Option<f64>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub spike_times_s: Vec<f64>,
    pub pulse_width_us: f64,
    pub delta_ext_V: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default = "d_warmup")]
    pub warmup_spikes: usize,
    #[serde(default = "d_record")]
    pub record_spikes: usize,
}

fn d_warmup() -> usize {
    defaults::WARMUP_SPIKES
}
fn d_record() -> usize {
    1000
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            warmup_spikes: d_warmup(),
            record_spikes: d_record(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_isi_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_us: Option<f64>,
    #[serde(default = "d_mu")]
    pub mu_threshold_percent: f64,
    #[serde(default = "d_min_osc")]
    pub min_oscillations: usize,
    #[serde(default = "d_max_osc")]
    pub max_oscillations: usize,
}

fn d_mu() -> f64 {
    MetricConfig::default().mu_th
}
fn d_min_osc() -> usize {
    MetricConfig::default().min_oscillations
}
fn d_max_osc() -> usize {
    MetricConfig::default().max_oscillations
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self {
            epsilon_isi_fraction: None,
            epsilon_us: None,
            mu_threshold_percent: d_mu(),
            min_oscillations: d_min_osc(),
            max_oscillations: d_max_osc(),
        }
    }
}

impl MetricSpec {
    pub fn to_metric(&self) -> Result<MetricConfig> {
        let epsilon = match (self.epsilon_isi_fraction, self.epsilon_us) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid("metric: give epsilon_isi_fraction or epsilon_us, not both"))
            }
            (Some(f), None) => Epsilon::RelativeToIsi(f),
            (None, Some(us)) => Epsilon::Absolute(us / MICRO),
            (None, None) => MetricConfig::default().epsilon,
        };
        let cfg = MetricConfig {
            epsilon,
            mu_th: self.mu_threshold_percent,
            min_oscillations: self.min_oscillations,
            max_oscillations: self.max_oscillations,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parameter names accepted by sweep axes.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisParam {
    supply_current_uA,
    capacitance_nF,
    threshold_voltage_V,
    noise_sigma_mV,
    coupling_V,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: AxisParam,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillator: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<usize>,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn to_axis(&self) -> Result<Axis> {
        let osc = || {
            self.oscillator
                .ok_or_else(|| Error::invalid(format!("axis {:?} needs `oscillator`", self.param)))
        };
        let (path, scale) = match self.param {
            AxisParam::supply_current_uA => (ParamPath::SupplyCurrent { oscillator: osc()? }, MICRO),
            AxisParam::capacitance_nF => (ParamPath::Capacitance { oscillator: osc()? }, NANO),
            AxisParam::threshold_voltage_V => (ParamPath::ThresholdVoltage { oscillator: osc()? }, 1.0),
            AxisParam::noise_sigma_mV => (ParamPath::NoiseSigma { oscillator: osc()? }, MILLI),
            AxisParam::coupling_V => match (self.from, self.to) {
                (Some(from), Some(to)) => (ParamPath::Coupling { from, to }, 1.0),
                _ => return Err(Error::invalid("axis coupling_V needs `from` and `to`")),
            },
        };
        Ok(Axis {
            path,
            min: self.min / scale,
            max: self.max / scale,
            steps: self.steps,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub x: AxisSpec,
    pub y: AxisSpec,
    #[serde(default = "d_pair")]
    pub observed_pair: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
}

fn d_pair() -> (usize, usize) {
    (0, 1)
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingSpec {
    pub offsets_uA: Vec<f64>,
    pub gains_uA: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSection {
    #[serde(default = "d_pair")]
    pub observed_pair: (usize, usize),
    pub encoding: EncodingSpec,
    pub readout: ReadoutNeuron,
}

/// A whole configuration file, in file units.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_voltages_V: Option<Vec<f64>>,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineSection>,
    // arrays of tables last, so the serialized form stays valid TOML
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSpec>,
    #[serde(default, rename = "oscillator")]
    pub oscillators: Vec<OscillatorSpec>,
    #[serde(default, rename = "drive", skip_serializing_if = "Vec::is_empty")]
    pub drives: Vec<DriveSpec>,
}

/// 1-based line of the `k`-th occurrence of an array-of-tables header.
fn header_line(src: &str, header: &str, k: usize) -> Option<usize> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with(header))
        .nth(k)
        .map(|(n, _)| n + 1)
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

impl ConfigFile {
    /// Parses TOML text. Syntax and schema errors carry the offending line.
    pub fn parse(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(src, s.start));
            Error::parse(line, e.message().trim())
        })
    }

    /// Parses and validates; validation errors on an oscillator or drive
    /// are prefixed with the line of its table header.
    pub fn parse_validated(src: &str) -> Result<Self> {
        let cfg = Self::parse(src)?;
        if let Err(e) = cfg.validate() {
            return Err(locate(src, e));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_validated(&src).map_err(|e| match e {
            Error::Parse { line, msg } => Error::parse(line, format!("{}: {msg}", path.display())),
            Error::InvalidParams(msg) => Error::invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid(format!("config cannot be written as TOML: {e}")))
    }

    /// Replaces the network seed, and the sweep base seed if there is a sweep.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Some(s) = &mut self.sweep {
            s.base_seed = Some(seed);
        }
    }

    /// Checks everything that the present sections imply.
    pub fn validate(&self) -> Result<()> {
        // metrics-only files may omit the network
        if !self.oscillators.is_empty() || self.coupling.is_some() || !self.drives.is_empty() {
            self.network()?;
        }
        self.metric.to_metric()?;
        if self.sweep.is_some() {
            self.sweep_spec()?;
        }
        if self.pipeline.is_some() {
            self.pipeline()?;
        }
        Ok(())
    }

    pub fn network(&self) -> Result<NetworkConfig> {
        let oscillators: Vec<OscillatorParams> = self.oscillators.iter().map(OscillatorSpec::to_params).collect();
        let n = oscillators.len();
        let coupling = match &self.coupling {
            None => CouplingMatrix::zeros(n),
            Some(CouplingSpec {
                delta_V: Some(rows),
                uniform_V: None,
            }) => {
                let m = CouplingMatrix::from_rows(rows)?;
                if m.n() != n {
                    return Err(Error::invalid(format!(
                        "coupling.delta_V is {0}x{0} but there are {n} oscillators",
                        m.n()
                    )));
                }
                m
            }
            Some(CouplingSpec {
                delta_V: None,
                uniform_V: Some(d),
            }) => CouplingMatrix::uniform(n, *d),
            Some(_) => return Err(Error::invalid("coupling: give exactly one of delta_V or uniform_V")),
        };
        let drives = self
            .drives
            .iter()
            .map(|d| ExternalDrive {
                spike_times: d.spike_times_s.clone(),
                pulse_width: d.pulse_width_us / MICRO,
                delta_ext: d.delta_ext_V.clone(),
            })
            .collect();
        let cfg = NetworkConfig {
            oscillators,
            coupling,
            drives,
            initial_voltages: self.initial_voltages_V.clone(),
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions::new(self.simulation.warmup_spikes, self.simulation.record_spikes)
    }

    pub fn metric_config(&self) -> Result<MetricConfig> {
        self.metric.to_metric()
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let s = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::invalid("config has no [sweep] section"))?;
        let spec = SweepSpec {
            axis_x: s.x.to_axis()?,
            axis_y: s.y.to_axis()?,
            template: self.network()?,
            metric: self.metric.to_metric()?,
            observed_pair: s.observed_pair,
            base_seed: s.base_seed.unwrap_or(self.seed),
            warmup_spikes: self.simulation.warmup_spikes,
            record_spikes: self.simulation.record_spikes,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let p = self
            .pipeline
            .as_ref()
            .ok_or_else(|| Error::invalid("config has no [pipeline] section"))?;
        let encoding = InputEncoding {
            offsets: p.encoding.offsets_uA.iter().map(|v| v / MICRO).collect(),
            gains: p.encoding.gains_uA.iter().map(|v| v / MICRO).collect(),
        };
        if encoding.offsets.len() != encoding.gains.len() {
            return Err(Error::ArityMismatch {
                expected: encoding.offsets.len(),
                got: encoding.gains.len(),
            });
        }
        let network = self.network()?;
        if encoding.arity() > network.len() {
            return Err(Error::invalid(format!(
                "pipeline encodes {} inputs but the network has {} oscillators",
                encoding.arity(),
                network.len()
            )));
        }
        if p.readout.input_weights.len() != encoding.arity() {
            return Err(Error::ArityMismatch {
                expected: encoding.arity(),
                got: p.readout.input_weights.len(),
            });
        }
        let (i, j) = p.observed_pair;
        if i == j || i >= network.len() || j >= network.len() {
            return Err(Error::invalid(format!("pipeline observed pair ({i}, {j}) is out of range")));
        }
        let run = ReservoirRun {
            pair: p.observed_pair,
            metric: self.metric.to_metric()?,
            warmup_spikes: self.simulation.warmup_spikes,
            record_spikes: self.simulation.record_spikes,
        };
        Ok(PipelineConfig {
            encoding,
            network,
            run,
            readout: p.readout.clone(),
        })
    }
}

/// Attaches the header line of the offending `[[oscillator]]` or `[[drive]]`
/// table to a validation message of the form `oscillator k: ...`.
fn locate(src: &str, e: Error) -> Error {
    let Error::InvalidParams(msg) = &e else { return e };
    for (prefix, header) in [("oscillator ", "[[oscillator]]"), ("drive ", "[[drive]]")] {
        let Some(rest) = msg.strip_prefix(prefix) else { continue };
        let k: Option<usize> = rest.split(':').next().and_then(|s| s.trim().parse().ok());
        if let Some(line) = k.and_then(|k| header_line(src, header, k)) {
            return Error::invalid(format!("line {line}: {msg}"));
        }
    }
    e
}
