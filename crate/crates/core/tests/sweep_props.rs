use hosync::metrics::MetricConfig;
use hosync::oscillator::{CouplingMatrix, NetworkConfig, OscillatorParams};
use hosync::reservoir::{reservoir_metrics, ReservoirRun};
use hosync::sweep::{arnold_sweep, arnold_sweep_with, count_sync_states, Axis, ParamPath, SweepOptions, SweepSpec};

fn toy(steps: usize, delta: f64, sigma: f64) -> SweepSpec {
    let mut p = OscillatorParams::with_current(600e-6);
    p.noise_sigma = sigma;
    let mut template = NetworkConfig::uncoupled(vec![p, p], 0);
    template.coupling = CouplingMatrix::uniform(2, delta);
    SweepSpec {
        axis_x: Axis {
            path: ParamPath::SupplyCurrent { oscillator: 0 },
            min: 500e-6,
            max: 800e-6,
            steps,
        },
        axis_y: Axis {
            path: ParamPath::SupplyCurrent { oscillator: 1 },
            min: 500e-6,
            max: 800e-6,
            steps,
        },
        template,
        metric: MetricConfig {
            max_oscillations: 300,
            ..MetricConfig::default()
        },
        observed_pair: (0, 1),
        base_seed: 17,
        warmup_spikes: 30,
        record_spikes: 300,
    }
}

fn run(spec: &SweepSpec) -> ReservoirRun {
    ReservoirRun {
        pair: spec.observed_pair,
        metric: spec.metric,
        warmup_spikes: spec.warmup_spikes,
        record_spikes: spec.record_spikes,
    }
}

#[test]
fn every_cell_is_its_own_simulation() {
    let spec = toy(4, 0.4, 0.02);
    let map = arnold_sweep(&spec).unwrap();
    assert_eq!(map.cells.len(), 16);
    for c in &map.cells {
        let alone = reservoir_metrics(&spec.cell_config(c.ix, c.iy), &run(&spec)).unwrap();
        assert_eq!(c.metrics(), Some(&alone), "cell ({}, {})", c.ix, c.iy);
    }
}

#[test]
fn moving_one_column_leaves_the_others_alone() {
    let spec = toy(3, 0.4, 0.02);
    let mut moved = spec.clone();
    moved.axis_x.max = 950e-6;
    let (a, b) = (arnold_sweep(&spec).unwrap(), arnold_sweep(&moved).unwrap());
    for iy in 0..3 {
        // column 0 keeps its value; columns 1 and 2 move
        assert_eq!(a.cell(0, iy), b.cell(0, iy));
        assert_ne!(a.cell(2, iy).x_value, b.cell(2, iy).x_value);
    }
}

#[test]
fn worker_count_does_not_change_the_map() {
    let spec = toy(6, 0.4, 0.02);
    let one = arnold_sweep_with(&spec, &SweepOptions { workers: 1, progress: None }).unwrap();
    for workers in [2, 3, 7] {
        let many = arnold_sweep_with(&spec, &SweepOptions { workers, progress: None }).unwrap();
        assert_eq!(format!("{one:?}"), format!("{many:?}"));
    }
}

#[test]
fn coupled_diagonal_locks_one_to_one() {
    let map = arnold_sweep(&toy(5, 0.4, 0.02)).unwrap();
    for k in 0..5 {
        let m = map.cell(k, k).metrics().unwrap();
        assert!(m.synchronized && (m.m_i, m.m_j) == (1, 1), "cell ({k}, {k}): {m:?}");
    }
}

#[test]
fn uncoupled_detuned_cells_stay_unsynchronized() {
    let map = arnold_sweep(&toy(5, 0.0, 0.02)).unwrap();
    for c in map.cells.iter().filter(|c| c.ix.abs_diff(c.iy) >= 2) {
        let m = c.metrics().unwrap();
        assert!(!m.synchronized, "cell ({}, {}): {m:?}", c.ix, c.iy);
        assert_eq!(m.shr_value, 0.0);
    }
}

#[test]
fn progress_reaches_the_total() {
    let spec = toy(3, 0.4, 0.0);
    let seen = std::sync::Mutex::new(Vec::new());
    let cb = |done: usize, total: usize| seen.lock().unwrap().push((done, total));
    arnold_sweep_with(&spec, &SweepOptions { workers: 2, progress: Some(&cb) }).unwrap();
    let mut seen = seen.into_inner().unwrap();
    seen.sort();
    assert_eq!(seen.last(), Some(&(9, 9)));
    assert!(seen.iter().all(|&(_, t)| t == 9));
}

#[test]
fn state_count_on_a_coupled_map() {
    let map = arnold_sweep(&toy(5, 0.4, 0.02)).unwrap();
    let n = count_sync_states(&map);
    assert!(n.contains(1, 1));
    assert_eq!(n.n_s, n.tallies.len());
    assert!(n.tallies.values().sum::<usize>() <= map.cells.len());
}
