//! The `hosync` commands. Each command reads its inputs, writes its
//! artifacts into the output directory, finishes with a `manifest.json`
//! there, and returns what it computed so the binary can print it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hosync::io::{self, ConfigFile, RunManifest};
use hosync::metrics::{compute_shr_mu, SyncMetrics};
use hosync::reservoir::{run_xor, train_readout_with, TrainOptions, TrainReport, XorCase, XorRow};
use hosync::simulate::simulate_with;
use hosync::sweep::{arnold_sweep_with, count_sync_states, ArnoldMap, SweepOptions};
use hosync::{Error, Result};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Global {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    /// 0 lets the sweep pick a worker count.
    pub workers: usize,
    pub seed: Option<u64>,
}

impl Global {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            ..Self::default()
        }
    }

    fn prepare_out(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::Io(format!("{}: {e}", self.out.display())))?;
        Ok(&self.out)
    }

    /// The configuration with `--seed` applied; `required` commands fail
    /// without `--config`.
    pub fn load_config(&self, command: &str, required: bool) -> Result<ConfigFile> {
        let mut cfg = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None if required => {
                return Err(Error::InvalidParams(format!("`{command}` needs --config <path>")));
            }
            None => ConfigFile::parse("")?,
        };
        if let Some(s) = self.seed {
            cfg.override_seed(s);
        }
        Ok(cfg)
    }
}

fn write(dir: &Path, name: &str, data: impl AsRef<[u8]>, manifest: &mut RunManifest) -> Result<()> {
    std::fs::write(dir.join(name), data).map_err(|e| Error::Io(format!("{name}: {e}")))?;
    manifest.add_artifact(dir, name)
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Simulates the configured network; writes `osc_<k>.txt` per oscillator.
pub fn cmd_simulate(g: &Global) -> Result<RunManifest> {
    let cfg = g.load_config("simulate", true)?;
    let net = cfg.network()?;
    let opts = cfg.sim_options();
    let trains = simulate_with(&net, &opts).map_err(|e| match e {
        Error::Stalled(msg) => Error::Stalled(format!(
            "{msg}; oscillators: {}",
            net.oscillators
                .iter()
                .map(|p| format!(
                    "[I_p {} A, C {} F, U_th {} V, U_h {} V, R_on {} ohm]",
                    p.supply_current, p.capacitance, p.threshold_voltage, p.hold_voltage, p.on_resistance
                ))
                .collect::<Vec<_>>()
                .join(", ")
        )),
        other => other,
    })?;
    let dir = g.prepare_out()?;
    let mut manifest = RunManifest::new("simulate", cfg.to_toml()?, vec![("network".into(), net.seed)]);
    let comments = [
        format!("seed {}", net.seed),
        format!("warmup_spikes {} record_spikes {}", opts.warmup_spikes, opts.record_spikes),
        "unit s".to_string(),
    ];
    for t in &trains {
        let name = format!("osc_{}.txt", t.oscillator_index);
        write(dir, &name, io::format_spike_train(t, &comments), &mut manifest)?;
    }
    manifest.finish(dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub i: usize,
    pub j: usize,
    pub m_i: u64,
    pub m_j: u64,
    pub shr_value: f64,
    pub mu_percent: f64,
    pub synchronized: bool,
}

impl PairRow {
    fn new(i: usize, j: usize, m: &SyncMetrics) -> Self {
        Self {
            i,
            j,
            m_i: m.m_i,
            m_j: m.m_j,
            shr_value: m.shr_value,
            mu_percent: m.mu,
            synchronized: m.synchronized,
        }
    }
}

/// SHR/μ for every requested pair of train files (all pairs `i < j` by
/// default; indices are positions in `files`). Writes `metrics.csv`.
pub fn cmd_metrics(g: &Global, files: &[PathBuf], pairs: Option<&[(usize, usize)]>) -> Result<(Vec<PairRow>, RunManifest)> {
    if files.len() < 2 {
        return Err(Error::InvalidParams(format!("metrics needs at least 2 train files, got {}", files.len())));
    }
    let cfg = g.load_config("metrics", false)?;
    let metric = cfg.metric_config()?;
    let trains = files
        .iter()
        .enumerate()
        .map(|(k, f)| io::read_spike_train(f, k))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<(usize, usize)> = (0..files.len())
        .flat_map(|i| (i + 1..files.len()).map(move |j| (i, j)))
        .collect();
    let pairs = pairs.unwrap_or(&all);
    let mut rows = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i >= trains.len() || j >= trains.len() || i == j {
            return Err(Error::InvalidParams(format!("pair ({i}, {j}) does not name two distinct files")));
        }
        let m = compute_shr_mu(&trains[i], &trains[j], &metric).map_err(|e| match e {
            Error::InsufficientData(msg) => Error::InsufficientData(format!("pair ({i}, {j}): {msg}")),
            other => other,
        })?;
        rows.push(PairRow::new(i, j, &m));
    }
    let dir = g.prepare_out()?;
    let mut manifest = RunManifest::new("metrics", cfg.to_toml()?, Vec::new());
    write(dir, "metrics.csv", csv_string(&rows)?, &mut manifest)?;
    Ok((rows, manifest.finish(dir)?))
}

pub fn format_metrics(rows: &[PairRow]) -> String {
    let mut s = format!("{:>4} {:>4}  {:>9}  {:>10}  {:>8}  sync\n", "i", "j", "SHR", "value", "mu %");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>4} {:>4}  {:>9}  {:>10.6}  {:>8.3}  {}",
            r.i,
            r.j,
            format!("{}:{}", r.m_j, r.m_i),
            r.shr_value,
            r.mu_percent,
            if r.synchronized { "yes" } else { "no" }
        );
    }
    s
}

/// Runs the configured sweep; writes `map.csv` and `map.pgm`.
pub fn cmd_sweep(g: &Global, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> Result<(ArnoldMap, RunManifest)> {
    let cfg = g.load_config("sweep", true)?;
    let spec = cfg.sweep_spec()?;
    let map = arnold_sweep_with(
        &spec,
        &SweepOptions {
            workers: g.workers,
            progress,
        },
    )?;
    let dir = g.prepare_out()?;
    let mut manifest = RunManifest::new("sweep", cfg.to_toml()?, vec![("base".into(), spec.base_seed)]);
    write(dir, "map.csv", io::format_map_csv(&io::map_rows(&map))?, &mut manifest)?;
    write(dir, "map.pgm", io::Pgm::from_map(&map).to_plain(), &mut manifest)?;
    Ok((map, manifest.finish(dir)?))
}

pub fn format_sweep_summary(map: &ArnoldMap) -> String {
    let (w, h) = map.steps();
    let failed = map.cells.iter().filter(|c| c.metrics().is_none()).count();
    let states = count_sync_states(map);
    let mut s = format!("{w}x{h} cells, {failed} failed, N_s = {}\n", states.n_s);
    for ((m_i, m_j), n) in &states.tallies {
        let _ = writeln!(s, "  {m_j}:{m_i}  {n} cells");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XorCsvRow {
    pub x: u8,
    pub y: u8,
    pub i_p1_a: f64,
    pub i_p2_a: f64,
    pub m_i: u64,
    pub m_j: u64,
    pub shr_value: f64,
    pub mu_percent: f64,
    pub sigma: f64,
    pub q: u8,
}

/// The XOR truth table through the full pipeline; writes `xor.csv`.
/// `weights` replaces the configured readout.
pub fn cmd_xor(g: &Global, weights: Option<&Path>) -> Result<(Vec<XorRow>, RunManifest)> {
    let mut cfg = g.load_config("xor", true)?;
    if let Some(p) = weights {
        let src = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        let neuron = io::parse_weights(&src)?;
        match &mut cfg.pipeline {
            Some(pl) => pl.readout = neuron,
            None => return Err(Error::InvalidParams("config has no [pipeline] section".into())),
        }
    }
    let pipeline = cfg.pipeline()?;
    let rows = XorCase::truth_table()
        .iter()
        .map(|c| run_xor(c.x, c.y, &pipeline))
        .collect::<Result<Vec<_>>>()?;
    let csv_rows: Vec<XorCsvRow> = rows
        .iter()
        .map(|r| {
            let (m_i, m_j, mu) = r.metrics.as_ref().map_or((0, 0, 0.0), |m| (m.m_i, m.m_j, m.mu));
            XorCsvRow {
                x: r.x,
                y: r.y,
                i_p1_a: r.currents[0],
                i_p2_a: r.currents.get(1).copied().unwrap_or(0.0),
                m_i,
                m_j,
                shr_value: r.shr,
                mu_percent: mu,
                sigma: r.sigma,
                q: r.q,
            }
        })
        .collect();
    let dir = g.prepare_out()?;
    let mut manifest = RunManifest::new("xor", cfg.to_toml()?, vec![("network".into(), pipeline.network.seed)]);
    write(dir, "xor.csv", csv_string(&csv_rows)?, &mut manifest)?;
    Ok((rows, manifest.finish(dir)?))
}

/// Rows in the column order X, Y, I_p1, I_p2, SHR, Σ, Q.
pub fn format_xor(rows: &[XorRow]) -> String {
    let mut s = format!(
        "{:>2} {:>2}  {:>9}  {:>9}  {:>7} {:>9}  {:>9}  {}\n",
        "X", "Y", "I_p1 uA", "I_p2 uA", "SHR", "", "Sigma", "Q"
    );
    let mut correct = 0;
    for r in rows {
        let label = r.metrics.as_ref().filter(|m| m.synchronized).map_or("-".to_string(), |m| m.ratio_label());
        let _ = writeln!(
            s,
            "{:>2} {:>2}  {:>9.3}  {:>9.3}  {:>7} {:>9.6}  {:>9.6}  {}",
            r.x,
            r.y,
            r.currents[0] * 1e6,
            r.currents.get(1).map_or(0.0, |c| c * 1e6),
            label,
            r.shr,
            r.sigma,
            r.q
        );
        if r.q == r.x ^ r.y {
            correct += 1;
        }
    }
    let _ = writeln!(s, "XOR truth table reproduced: {correct}/{}", rows.len());
    s
}

/// Trains the readout on a dataset CSV; writes `weights.toml`.
pub fn cmd_train(g: &Global, dataset: &Path, opts: &TrainOptions) -> Result<(TrainReport, RunManifest)> {
    let cfg = g.load_config("train", false)?;
    let samples = io::read_dataset(dataset)?;
    let report = train_readout_with(&samples, opts)?;
    let dataset_digest = io::sha256_hex(&std::fs::read(dataset)?);
    let dir = g.prepare_out()?;
    let config = format!("{}\n# dataset sha256 {dataset_digest}\n", cfg.to_toml()?);
    let mut manifest = RunManifest::new("train", config, Vec::new());
    let header = [
        format!("trained on {}", dataset.display()),
        format!(
            "accuracy {}/{} after {} epochs (learning rate {}, converged {})",
            report.correct, report.total, report.epochs, opts.learning_rate, report.converged
        ),
    ];
    write(dir, "weights.toml", io::format_weights(&report.neuron, &header)?, &mut manifest)?;
    Ok((report, manifest.finish(dir)?))
}

pub fn format_train(report: &TrainReport) -> String {
    let n = &report.neuron;
    format!(
        "accuracy {}/{} ({:.1}%), {} epochs, converged: {}\nbias {}  inputs {:?}  features {:?}\n",
        report.correct,
        report.total,
        100.0 * report.accuracy(),
        report.epochs,
        report.converged,
        n.bias_weight,
        n.input_weights,
        n.feature_weights
    )
}
