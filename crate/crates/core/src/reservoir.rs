//! Oscillator reservoir with a single threshold readout neuron.
//!
//! Inputs are mapped affinely onto supply currents, the coupled pair is
//! simulated, and the resulting SHR value is the extra feature `Z` that makes
//! XOR linearly separable for one neuron:
//!
//! ```text
//! I_k = offset_k + gain_k * input_k
//! Σ   = w_0 + Σ_k w_k * input_k + Σ_m v_m * feature_m
//! Q   = 1 if Σ < 0, else 0
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{compute_shr_mu, MetricConfig, SyncMetrics};
use crate::oscillator::{defaults, NetworkConfig};
use crate::simulate::{simulate_with, SimOptions};

/// Affine map from inputs to supply currents (amperes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEncoding {
    pub offsets: Vec<f64>,
    pub gains: Vec<f64>,
}

impl InputEncoding {
    /// `I_p1 = 638 µA + 343 µA * X`, `I_p2 = 574 µA + 416 µA * Y`.
    pub fn xor_reference() -> Self {
        Self {
            offsets: vec![638.0e-6, 574.0e-6],
            gains: vec![343.0e-6, 416.0e-6],
        }
    }

    pub fn arity(&self) -> usize {
        self.offsets.len()
    }
}

pub fn encode_inputs(inputs: &[f64], enc: &InputEncoding) -> Result<Vec<f64>> {
    if enc.gains.len() != enc.offsets.len() {
        return Err(Error::ArityMismatch {
            expected: enc.offsets.len(),
            got: enc.gains.len(),
        });
    }
    if inputs.len() != enc.arity() {
        return Err(Error::ArityMismatch {
            expected: enc.arity(),
            got: inputs.len(),
        });
    }
    inputs
        .iter()
        .zip(enc.offsets.iter().zip(&enc.gains))
        .enumerate()
        .map(|(channel, (&x, (&o, &g)))| {
            let current = o + g * x;
            if current > 0.0 {
                Ok(current)
            } else {
                Err(Error::EncodingDomain { channel, current })
            }
        })
        .collect()
}

/// Output neuron weights (`W_R`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNeuron {
    pub bias_weight: f64,
    pub input_weights: Vec<f64>,
    pub feature_weights: Vec<f64>,
}

impl ReadoutNeuron {
    /// `Σ = 1.12 - 0.8 X + 0.78 Y - SHR`.
    pub fn xor_reference() -> Self {
        Self {
            bias_weight: 1.12,
            input_weights: vec![-0.8, 0.78],
            feature_weights: vec![-1.0],
        }
    }

    pub fn zeros(n_inputs: usize, n_features: usize) -> Self {
        Self {
            bias_weight: 0.0,
            input_weights: vec![0.0; n_inputs],
            feature_weights: vec![0.0; n_features],
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            bias_weight: self.bias_weight * c,
            input_weights: self.input_weights.iter().map(|w| w * c).collect(),
            feature_weights: self.feature_weights.iter().map(|w| w * c).collect(),
        }
    }

    pub fn decide(&self, inputs: &[f64], features: &[f64]) -> Result<u8> {
        readout_sum(inputs, features, self).map(activation)
    }
}

pub fn readout_sum(inputs: &[f64], features: &[f64], neuron: &ReadoutNeuron) -> Result<f64> {
    if inputs.len() != neuron.input_weights.len() {
        return Err(Error::ArityMismatch {
            expected: neuron.input_weights.len(),
            got: inputs.len(),
        });
    }
    if features.len() != neuron.feature_weights.len() {
        return Err(Error::ArityMismatch {
            expected: neuron.feature_weights.len(),
            got: features.len(),
        });
    }
    let dot = |w: &[f64], x: &[f64]| w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>();
    Ok(neuron.bias_weight + dot(&neuron.input_weights, inputs) + dot(&neuron.feature_weights, features))
}

/// Threshold activation; the boundary `Σ = 0` maps to 0.
pub fn activation(sigma: f64) -> u8 {
    u8::from(sigma < 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorCase {
    pub x: u8,
    pub y: u8,
    pub expected_q: u8,
}

impl XorCase {
    /// Rows in the order (1,1), (1,0), (0,1), (0,0).
    pub fn truth_table() -> [XorCase; 4] {
        [(1, 1), (1, 0), (0, 1), (0, 0)].map(|(x, y)| XorCase {
            x,
            y,
            expected_q: x ^ y,
        })
    }

    pub fn inputs(&self) -> [f64; 2] {
        [f64::from(self.x), f64::from(self.y)]
    }
}

/// Simulation settings used when the reservoir is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirRun {
    pub pair: (usize, usize),
    pub metric: MetricConfig,
    pub warmup_spikes: usize,
    pub record_spikes: usize,
}

impl ReservoirRun {
    pub fn new(pair: (usize, usize), metric: MetricConfig) -> Self {
        Self {
            pair,
            metric,
            warmup_spikes: defaults::WARMUP_SPIKES,
            record_spikes: metric.max_oscillations,
        }
    }
}

/// Simulates `config` and returns the metrics of oscillator pair `run.pair`.
pub fn reservoir_metrics(config: &NetworkConfig, run: &ReservoirRun) -> Result<SyncMetrics> {
    let (i, j) = run.pair;
    if i >= config.len() || j >= config.len() || i == j {
        return Err(Error::invalid(format!(
            "pair ({i}, {j}) is not a pair of distinct oscillators of a {}-oscillator network",
            config.len()
        )));
    }
    let trains = simulate_with(config, &SimOptions::new(run.warmup_spikes, run.record_spikes))?;
    compute_shr_mu(&trains[i], &trains[j], &run.metric)
}

/// The reservoir feature `Z`: SHR of the pair, 0 when unsynchronized.
pub fn reservoir_feature(config: &NetworkConfig, pair: (usize, usize), metric_cfg: &MetricConfig) -> Result<f64> {
    reservoir_metrics(config, &ReservoirRun::new(pair, *metric_cfg)).map(|m| m.shr_value)
}

/// Produces reservoir features for an input vector and its encoded currents.
pub trait FeatureSource {
    fn features(&self, inputs: &[f64], currents: &[f64]) -> Result<FeatureSample>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSample {
    pub features: Vec<f64>,
    pub metrics: Option<SyncMetrics>,
}

/// Features by full simulation: currents are written into oscillators
/// `0..currents.len()` of the template.
#[derive(Debug, Clone)]
pub struct SimulatedReservoir<'a> {
    pub template: &'a NetworkConfig,
    pub run: ReservoirRun,
}

impl FeatureSource for SimulatedReservoir<'_> {
    fn features(&self, _inputs: &[f64], currents: &[f64]) -> Result<FeatureSample> {
        if currents.len() > self.template.len() {
            return Err(Error::ArityMismatch {
                expected: self.template.len(),
                got: currents.len(),
            });
        }
        let mut cfg = self.template.clone();
        for (p, &c) in cfg.oscillators.iter_mut().zip(currents) {
            p.supply_current = c;
        }
        let m = reservoir_metrics(&cfg, &self.run)?;
        Ok(FeatureSample {
            features: vec![m.shr_value],
            metrics: Some(m),
        })
    }
}

/// Features looked up by exact input vector, bypassing simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedFeatures(pub Vec<(Vec<f64>, Vec<f64>)>);

impl FixedFeatures {
    /// SHR values {1, 1/3, 2, 2/3} for inputs (1,1), (1,0), (0,1), (0,0).
    pub fn xor_reference() -> Self {
        Self(vec![
            (vec![1.0, 1.0], vec![1.0]),
            (vec![1.0, 0.0], vec![1.0 / 3.0]),
            (vec![0.0, 1.0], vec![2.0]),
            (vec![0.0, 0.0], vec![2.0 / 3.0]),
        ])
    }
}

impl FeatureSource for FixedFeatures {
    fn features(&self, inputs: &[f64], _currents: &[f64]) -> Result<FeatureSample> {
        self.0
            .iter()
            .find(|(x, _)| x.as_slice() == inputs)
            .map(|(_, f)| FeatureSample {
                features: f.clone(),
                metrics: None,
            })
            .ok_or_else(|| Error::invalid(format!("no fixed features for inputs {inputs:?}")))
    }
}

/// Encoding, network and readout of the XOR reservoir.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub encoding: InputEncoding,
    pub network: NetworkConfig,
    pub run: ReservoirRun,
    pub readout: ReadoutNeuron,
}

/// One evaluated row: inputs, currents, feature, Σ and Q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XorRow {
    pub x: u8,
    pub y: u8,
    pub currents: Vec<f64>,
    pub shr: f64,
    pub metrics: Option<SyncMetrics>,
    pub sigma: f64,
    pub q: u8,
}

pub fn run_xor_with(x: u8, y: u8, encoding: &InputEncoding, readout: &ReadoutNeuron, source: &dyn FeatureSource) -> Result<XorRow> {
    let inputs = [f64::from(x), f64::from(y)];
    let currents = encode_inputs(&inputs, encoding)?;
    let sample = source.features(&inputs, &currents)?;
    let sigma = readout_sum(&inputs, &sample.features, readout)?;
    Ok(XorRow {
        x,
        y,
        shr: sample.features.first().copied().unwrap_or(0.0),
        currents,
        metrics: sample.metrics,
        sigma,
        q: activation(sigma),
    })
}

/// encode → simulate → SHR → Σ → Q.
pub fn run_xor(x: u8, y: u8, pipeline: &PipelineConfig) -> Result<XorRow> {
    let source = SimulatedReservoir {
        template: &pipeline.network,
        run: pipeline.run,
    };
    run_xor_with(x, y, &pipeline.encoding, &pipeline.readout, &source)
}

/// All four truth-table rows in table order.
pub fn xor_truth_table(encoding: &InputEncoding, readout: &ReadoutNeuron, source: &dyn FeatureSource) -> Result<Vec<XorRow>> {
    XorCase::truth_table()
        .iter()
        .map(|c| run_xor_with(c.x, c.y, encoding, readout, source))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub inputs: Vec<f64>,
    pub features: Vec<f64>,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub learning_rate: f64,
    pub max_epochs: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            max_epochs: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub neuron: ReadoutNeuron,
    pub correct: usize,
    pub total: usize,
    pub epochs: usize,
    pub converged: bool,
}

impl TrainReport {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

fn count_correct(neuron: &ReadoutNeuron, data: &[Sample]) -> usize {
    data.iter()
        .filter(|s| neuron.decide(&s.inputs, &s.features).ok() == Some(s.label))
        .count()
}

pub fn train_readout(dataset: &[Sample]) -> Result<TrainReport> {
    train_readout_with(dataset, &TrainOptions::default())
}

/// Perceptron rule on `(1, inputs, features)` with zero initial weights and
/// fixed sample order. Keeps the best weights seen (pocket) so inseparable
/// data still yields a usable neuron and an honest accuracy.
pub fn train_readout_with(dataset: &[Sample], opts: &TrainOptions) -> Result<TrainReport> {
    let first = dataset
        .first()
        .ok_or_else(|| Error::invalid("training set is empty"))?;
    let (ni, nf) = (first.inputs.len(), first.features.len());
    for s in dataset {
        if s.inputs.len() != ni {
            return Err(Error::ArityMismatch {
                expected: ni,
                got: s.inputs.len(),
            });
        }
        if s.features.len() != nf {
            return Err(Error::ArityMismatch {
                expected: nf,
                got: s.features.len(),
            });
        }
        if s.label > 1 {
            return Err(Error::invalid(format!("label must be 0 or 1 (got {})", s.label)));
        }
    }

    let mut w = ReadoutNeuron::zeros(ni, nf);
    let mut best = (count_correct(&w, dataset), w.clone());
    let mut epochs = 0;
    while best.0 < dataset.len() && epochs < opts.max_epochs {
        epochs += 1;
        for s in dataset {
            let q = w.decide(&s.inputs, &s.features)?;
            if q == s.label {
                continue;
            }
            // label 1 wants Σ < 0, label 0 wants Σ >= 0
            let step = if s.label == 1 { -opts.learning_rate } else { opts.learning_rate };
            w.bias_weight += step;
            for (wk, x) in w.input_weights.iter_mut().zip(&s.inputs) {
                *wk += step * x;
            }
            for (wk, x) in w.feature_weights.iter_mut().zip(&s.features) {
                *wk += step * x;
            }
            let c = count_correct(&w, dataset);
            if c > best.0 {
                best = (c, w.clone());
            }
        }
    }
    let (correct, neuron) = best;
    Ok(TrainReport {
        neuron,
        correct,
        total: dataset.len(),
        epochs,
        converged: correct == dataset.len(),
    })
}
