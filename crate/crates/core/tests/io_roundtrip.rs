use proptest::prelude::*;

use hosync::io::{
    format_dataset, format_map_csv, format_spike_train, format_weights, gray_level, map_rows, parse_dataset,
    parse_map_csv, parse_spike_train, parse_weights, read_spike_train, write_spike_train, ConfigFile, Pgm,
    RunManifest,
};
use hosync::metrics::MetricConfig;
use hosync::oscillator::{CouplingMatrix, NetworkConfig, OscillatorParams};
use hosync::reservoir::{ReadoutNeuron, Sample};
use hosync::simulate::SpikeTrain;
use hosync::sweep::{arnold_sweep, Axis, ParamPath, SweepSpec};

fn increasing_times() -> impl Strategy<Value = Vec<f64>> {
    (any::<f64>().prop_filter("finite", |t| t.is_finite()), prop::collection::vec(1e-12f64..1e3, 0..200)).prop_map(
        |(start, gaps)| {
            let start = start.clamp(-1e6, 1e6);
            let mut t = start;
            let mut v = vec![start];
            for g in gaps {
                let next = t + g;
                if next > t {
                    v.push(next);
                    t = next;
                }
            }
            v
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn spike_files_round_trip_bit_exactly(times in increasing_times(), index in 0usize..64) {
        let train = SpikeTrain::new(index, times).unwrap();
        let text = format_spike_train(&train, &["seed 3".into(), "two\nlines".into()]);
        prop_assert_eq!(parse_spike_train(&text, 999).unwrap(), train);
    }

    #[test]
    fn datasets_round_trip(rows in prop::collection::vec((prop::collection::vec(-1e3f64..1e3, 2), prop::collection::vec(-1e3f64..1e3, 1), 0u8..=1), 1..20)) {
        let samples: Vec<Sample> = rows.into_iter().map(|(inputs, features, label)| Sample { inputs, features, label }).collect();
        prop_assert_eq!(parse_dataset(&format_dataset(&samples).unwrap()).unwrap(), samples);
    }

    #[test]
    fn weights_round_trip(b in -1e3f64..1e3, w in prop::collection::vec(-1e3f64..1e3, 0..4), z in prop::collection::vec(-1e3f64..1e3, 0..3)) {
        let n = ReadoutNeuron { bias_weight: b, input_weights: w, feature_weights: z };
        prop_assert_eq!(parse_weights(&format_weights(&n, &["trained".into()]).unwrap()).unwrap(), n);
    }

    #[test]
    fn gray_scale_is_monotone(a in 0.01f64..100.0, b in 0.01f64..100.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(gray_level(lo, true) <= gray_level(hi, true));
        prop_assert!(gray_level(lo, true) >= 1);
        prop_assert_eq!(gray_level(lo, false), 0);
    }
}

#[test]
fn gray_scale_anchor_points() {
    assert_eq!(gray_level(1.0 / 8.0, true), 1);
    assert_eq!(gray_level(1.0 / 64.0, true), 1);
    assert_eq!(gray_level(1.0, true), 128);
    assert_eq!(gray_level(8.0, true), 255);
    assert_eq!(gray_level(100.0, true), 255);
    // log2(2) = 1: 1 + round(254 * 4 / 6) = 170
    assert_eq!(gray_level(2.0, true), 170);
}

fn small_map() -> hosync::ArnoldMap {
    let mut p = OscillatorParams::with_current(600e-6);
    p.noise_sigma = 0.02;
    let mut template = NetworkConfig::uncoupled(vec![p, p], 0);
    template.coupling = CouplingMatrix::uniform(2, 0.4);
    let spec = SweepSpec {
        axis_x: Axis {
            path: ParamPath::SupplyCurrent { oscillator: 0 },
            min: 300e-6,
            max: 900e-6,
            steps: 5,
        },
        axis_y: Axis {
            path: ParamPath::SupplyCurrent { oscillator: 1 },
            min: 300e-6,
            max: 900e-6,
            steps: 4,
        },
        template,
        metric: MetricConfig {
            max_oscillations: 200,
            ..MetricConfig::default()
        },
        observed_pair: (0, 1),
        base_seed: 5,
        warmup_spikes: 20,
        record_spikes: 200,
    };
    arnold_sweep(&spec).unwrap()
}

#[test]
fn csv_and_pgm_agree_cell_for_cell() {
    let map = small_map();
    let rows = parse_map_csv(&format_map_csv(&map_rows(&map)).unwrap()).unwrap();
    assert_eq!(rows, map_rows(&map));
    let plain = Pgm::parse(Pgm::from_map(&map).to_plain().as_bytes()).unwrap();
    let raw = Pgm::parse(&Pgm::from_map(&map).to_raw()).unwrap();
    assert_eq!(plain, raw);
    assert_eq!((plain.width, plain.height), (5, 4));
    for c in &map.cells {
        let row = &rows[c.iy * 5 + c.ix];
        assert_eq!((row.x_value, row.y_value), (c.x_value, c.y_value));
        assert_eq!(plain.at_cell(c.ix, c.iy), gray_level(row.shr_value, row.synchronized));
    }
    // y runs bottom to top: the first image row is the largest y
    assert_eq!(plain.pixels[0], plain.at_cell(0, 3));
}

#[test]
fn spike_file_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("osc_1.txt");
    let train = SpikeTrain::new(1, vec![1e-3, 2.5e-3, 4.0000000001e-3]).unwrap();
    write_spike_train(&path, &train, &[]).unwrap();
    assert_eq!(read_spike_train(&path, 0).unwrap(), train);
    let e = read_spike_train(dir.path().join("missing.txt"), 0).unwrap_err();
    assert_eq!(e.category_code(), 7);
}

#[test]
fn unsorted_spike_file_names_the_line() {
    let e = parse_spike_train("# oscillator 0\n0.1\n0.3\n0.2\n", 0).unwrap_err();
    assert_eq!(e.category_code(), 3);
    assert!(e.to_string().contains("line 4"), "{e}");
}

#[test]
fn manifest_detects_changed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.txt"), b"abc").unwrap();
    let mut m = RunManifest::new("simulate", "seed = 1\n".into(), vec![("network".into(), 1)]);
    m.add_artifact(dir.path(), "a.txt").unwrap();
    assert_eq!(
        m.artifacts[0].sha256,
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    );
    let m = m.finish(dir.path()).unwrap();
    assert_eq!(RunManifest::read(dir.path()).unwrap(), m);
    assert!(m.verify(dir.path()).unwrap().is_empty());
    std::fs::write(dir.path().join("a.txt"), b"abd").unwrap();
    assert_eq!(m.verify(dir.path()).unwrap(), vec!["a.txt".to_string()]);
}

#[test]
fn shipped_configs_survive_a_toml_round_trip() {
    for src in [hosync::calibration::CALIBRATED_TOML, include_str!("../data/toy_sweep.toml")] {
        let cfg = ConfigFile::parse_validated(src).unwrap();
        let again = ConfigFile::parse_validated(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.network().unwrap(), cfg.network().unwrap());
    }
}
