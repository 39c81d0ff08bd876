//! Arnold-tongue maps: a template network evaluated over a 2-D grid of two
//! scalar parameters.
//!
//! Each cell is an independent task. Its network seed is
//! [`cell_seed`](crate::seed::cell_seed)`(base_seed, x, y)`, so a map is
//! bit-identical for any worker count and any scheduling order.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricConfig, SyncMetrics};
use crate::oscillator::{defaults, NetworkConfig};
use crate::reservoir::{train_readout, InputEncoding, ReadoutNeuron, ReservoirRun, Sample, TrainReport, XorCase};
use crate::seed::cell_seed;

/// A scalar field of a [`NetworkConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "param", rename_all = "snake_case")]
pub enum ParamPath {
    SupplyCurrent { oscillator: usize },
    Capacitance { oscillator: usize },
    ThresholdVoltage { oscillator: usize },
    NoiseSigma { oscillator: usize },
    Coupling { from: usize, to: usize },
}

impl ParamPath {
    fn check(&self, cfg: &NetworkConfig) -> Result<()> {
        let n = cfg.len();
        let ok = match *self {
            ParamPath::SupplyCurrent { oscillator }
            | ParamPath::Capacitance { oscillator }
            | ParamPath::ThresholdVoltage { oscillator }
            | ParamPath::NoiseSigma { oscillator } => oscillator < n,
            ParamPath::Coupling { from, to } => from < n && to < n && from != to,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("{self:?} does not resolve in a {n}-oscillator network")))
        }
    }

    pub fn apply(&self, cfg: &mut NetworkConfig, value: f64) {
        match *self {
            ParamPath::SupplyCurrent { oscillator } => cfg.oscillators[oscillator].supply_current = value,
            ParamPath::Capacitance { oscillator } => cfg.oscillators[oscillator].capacitance = value,
            ParamPath::ThresholdVoltage { oscillator } => cfg.oscillators[oscillator].threshold_voltage = value,
            ParamPath::NoiseSigma { oscillator } => cfg.oscillators[oscillator].noise_sigma = value,
            ParamPath::Coupling { from, to } => cfg.coupling.set(from, to, value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub path: ParamPath,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    /// Inclusive linear spacing over `[min, max]`.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis_x: Axis,
    pub axis_y: Axis,
    pub template: NetworkConfig,
    pub metric: MetricConfig,
    pub observed_pair: (usize, usize),
    pub base_seed: u64,
    #[serde(default = "default_warmup")]
    pub warmup_spikes: usize,
    #[serde(default = "default_record")]
    pub record_spikes: usize,
}

fn default_warmup() -> usize {
    defaults::WARMUP_SPIKES
}

fn default_record() -> usize {
    1000
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("x", &self.axis_x), ("y", &self.axis_y)] {
            if a.steps < 2 {
                return Err(Error::invalid(format!("axis {name} needs at least 2 steps")));
            }
            if !(a.min < a.max) {
                return Err(Error::invalid(format!("axis {name} needs min < max")));
            }
            a.path.check(&self.template)?;
        }
        self.metric.validate()?;
        let (i, j) = self.observed_pair;
        if i == j || i >= self.template.len() || j >= self.template.len() {
            return Err(Error::invalid(format!("observed pair ({i}, {j}) is out of range")));
        }
        if self.record_spikes == 0 {
            return Err(Error::invalid("record_spikes must be >= 1"));
        }
        Ok(())
    }

    fn run(&self) -> ReservoirRun {
        ReservoirRun {
            pair: self.observed_pair,
            metric: self.metric,
            warmup_spikes: self.warmup_spikes,
            record_spikes: self.record_spikes,
        }
    }

    /// Template with cell `(ix, iy)`'s axis values and seed applied.
    pub fn cell_config(&self, ix: usize, iy: usize) -> NetworkConfig {
        let mut cfg = self.template.clone();
        self.axis_x.path.apply(&mut cfg, self.axis_x.values()[ix]);
        self.axis_y.path.apply(&mut cfg, self.axis_y.values()[iy]);
        cfg.seed = cell_seed(self.base_seed, ix, iy);
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Metrics(SyncMetrics),
    Failed { code: i32, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub ix: usize,
    pub iy: usize,
    pub x_value: f64,
    pub y_value: f64,
    pub outcome: CellOutcome,
}

impl Cell {
    pub fn metrics(&self) -> Option<&SyncMetrics> {
        match &self.outcome {
            CellOutcome::Metrics(m) => Some(m),
            CellOutcome::Failed { .. } => None,
        }
    }
}

/// Row-major grid, `axis_y` outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArnoldMap {
    pub spec: SweepSpec,
    pub cells: Vec<Cell>,
}

impl ArnoldMap {
    pub fn steps(&self) -> (usize, usize) {
        (self.spec.axis_x.steps, self.spec.axis_y.steps)
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[iy * self.spec.axis_x.steps + ix]
    }
}

/// Worker count and an optional `(done, total)` progress callback.
#[derive(Default)]
pub struct SweepOptions<'a> {
    /// 0 selects rayon's default pool.
    pub workers: usize,
    pub progress: Option<&'a (dyn Fn(usize, usize) + Sync)>,
}

pub fn arnold_sweep(spec: &SweepSpec) -> Result<ArnoldMap> {
    arnold_sweep_with(spec, &SweepOptions::default())
}

pub fn arnold_sweep_with(spec: &SweepSpec, opts: &SweepOptions<'_>) -> Result<ArnoldMap> {
    spec.validate()?;
    let (nx, ny) = (spec.axis_x.steps, spec.axis_y.steps);
    let xs = spec.axis_x.values();
    let ys = spec.axis_y.values();
    let run = spec.run();
    let done = AtomicUsize::new(0);
    let total = nx * ny;

    let eval = |k: usize| {
        let (ix, iy) = (k % nx, k / nx);
        let cfg = spec.cell_config(ix, iy);
        let outcome = match crate::reservoir::reservoir_metrics(&cfg, &run) {
            Ok(m) => CellOutcome::Metrics(m),
            Err(e) => CellOutcome::Failed {
                code: e.category_code(),
                message: e.to_string(),
            },
        };
        if let Some(cb) = opts.progress {
            cb(done.fetch_add(1, Ordering::Relaxed) + 1, total);
        }
        Cell {
            ix,
            iy,
            x_value: xs[ix],
            y_value: ys[iy],
            outcome,
        }
    };

    let cells: Vec<Cell> = if opts.workers == 0 {
        (0..total).into_par_iter().map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
        pool.install(|| (0..total).into_par_iter().map(eval).collect())
    };
    Ok(ArnoldMap {
        spec: spec.clone(),
        cells,
    })
}

/// Number of distinct synchronized states and the cells occupying each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncStateCount {
    pub n_s: usize,
    /// `(m_i, m_j) -> cell count`.
    pub tallies: BTreeMap<(u64, u64), usize>,
}

impl SyncStateCount {
    /// True when the state `SHR = m_j : m_i` occurs.
    pub fn contains(&self, m_i: u64, m_j: u64) -> bool {
        self.tallies.contains_key(&(m_i, m_j))
    }
}

pub fn count_sync_states(map: &ArnoldMap) -> SyncStateCount {
    count_sync_states_in(map.cells.iter().filter_map(Cell::metrics))
}

pub fn count_sync_states_in<'a>(cells: impl IntoIterator<Item = &'a SyncMetrics>) -> SyncStateCount {
    let mut tallies = BTreeMap::new();
    for m in cells.into_iter().filter(|m| m.synchronized) {
        *tallies.entry((m.m_i, m.m_j)).or_insert(0) += 1;
    }
    SyncStateCount {
        n_s: tallies.len(),
        tallies,
    }
}

/// Four map cells that implement XOR with a trained readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XorOperatingPoint {
    pub encoding: InputEncoding,
    /// SHR feature per truth-table row (1,1), (1,0), (0,1), (0,0).
    pub features: [f64; 4],
    /// `(ix, iy)` of each row's cell.
    pub cells: [(usize, usize); 4],
    pub readout: ReadoutNeuron,
    pub report: TrainReport,
}

/// Searches axis-aligned rectangles `x_lo < x_hi`, `y_lo < y_hi` of a
/// supply-current map for four cells whose SHR values make XOR separable.
///
/// Four XOR points lifted by `z` are separable by a plane iff
/// `z(0,0) + z(1,1) != z(1,0) + z(0,1)` (the two diagonals of the unit square
/// meet at their midpoints). Rectangles are ranked by that gap and the
/// perceptron is trained on the best ones until one reaches 4/4.
pub fn find_xor_operating_points(map: &ArnoldMap) -> Option<XorOperatingPoint> {
    let spec = &map.spec;
    let osc_x = match (spec.axis_x.path, spec.axis_y.path) {
        (ParamPath::SupplyCurrent { oscillator: 0 }, ParamPath::SupplyCurrent { oscillator: 1 }) => 0,
        (ParamPath::SupplyCurrent { oscillator: 1 }, ParamPath::SupplyCurrent { oscillator: 0 }) => 1,
        _ => return None,
    };
    // input X drives oscillator 0, input Y oscillator 1
    let (vals0, vals1) = if osc_x == 0 {
        (spec.axis_x.values(), spec.axis_y.values())
    } else {
        (spec.axis_y.values(), spec.axis_x.values())
    };
    let at = |i0: usize, i1: usize| if osc_x == 0 { (i0, i1) } else { (i1, i0) };
    let z = |(ix, iy): (usize, usize)| map.cell(ix, iy).metrics().map(|m| m.shr_value);

    let mut ranked: Vec<(f64, [usize; 4])> = Vec::new();
    for l0 in 0..vals0.len() {
        for h0 in l0 + 1..vals0.len() {
            for l1 in 0..vals1.len() {
                for h1 in l1 + 1..vals1.len() {
                    let (Some(z11), Some(z10), Some(z01), Some(z00)) =
                        (z(at(h0, h1)), z(at(h0, l1)), z(at(l0, h1)), z(at(l0, l1)))
                    else {
                        continue;
                    };
                    let gap = (z00 + z11 - z10 - z01).abs();
                    if gap > 1e-9 {
                        ranked.push((gap, [l0, h0, l1, h1]));
                    }
                }
            }
        }
    }
    // stable sort keeps grid order among equal gaps
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    for &(_, [l0, h0, l1, h1]) in ranked.iter().take(64) {
        let cells = [at(h0, h1), at(h0, l1), at(l0, h1), at(l0, l1)];
        let features = cells.map(|c| z(c).unwrap_or(0.0));
        let data: Vec<Sample> = XorCase::truth_table()
            .iter()
            .zip(features)
            .map(|(c, f)| Sample {
                inputs: c.inputs().to_vec(),
                features: vec![f],
                label: c.expected_q,
            })
            .collect();
        let Ok(report) = train_readout(&data) else { continue };
        if !report.converged {
            continue;
        }
        return Some(XorOperatingPoint {
            encoding: InputEncoding {
                offsets: vec![vals0[l0], vals1[l1]],
                gains: vec![vals0[h0] - vals0[l0], vals1[h1] - vals1[l1]],
            },
            features,
            cells,
            readout: report.neuron.clone(),
            report,
        });
    }
    None
}
