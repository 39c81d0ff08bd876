//! The shipped calibrated two-oscillator reservoir.
//!
//! The circuit constants of the reference reservoir are not known, so the
//! network in `data/xor_calibrated.toml` was found by search. The search
//! used symmetric coupling `Δ`, independent constants per oscillator, and
//! the fixed XOR encoding (`I_p1` 638/981 µA, `I_p2` 574/990 µA). Each
//! candidate was scored on four things:
//!
//! - the SHR at the four corners;
//! - a 50×50 map of the rectangle: 1:1 on the diagonal, the side rule, and
//!   the number of locked states;
//! - the stability of each corner under ±10 µA and a change of noise seed.
//!
//! Result, with SHR = F2/F1:
//!
//! | X Y | uncoupled F1, F2 (Hz) | F2/F1 | locked SHR | reference SHR |
//! |-----|-----------------------|-------|------------|---------------|
//! | 1 1 | 675.9, 888.6          | 1.315 | 1:1        | 1:1           |
//! | 1 0 | 675.9, 517.3          | 0.765 | 2:3        | 1:3           |
//! | 0 1 | 440.0, 888.6          | 2.020 | 2:1        | 2:1           |
//! | 0 0 | 440.0, 517.3          | 1.176 | 1:1        | 2:3           |
//!
//! All four corners lock with μ = 100. The reference readout
//! (`1.12 − 0.8 X + 0.78 Y − Z`) classifies these SHRs correctly, with
//! margins of 0.10, 0.35, 0.10 and 0.12, so it is shipped unchanged.
//!
//! Two of the locked ratios differ from the reference values:
//!
//! - **Why.** Lowering a threshold only makes an oscillator fire earlier, so
//!   coupling can only pull the slower one up. Over the rectangle the
//!   uncoupled F2/F1 spans a factor of about 2.6, while 1:3 and 2:1 are a
//!   factor of 6 apart. No searched network locked 1:3 and 2:1 on the same
//!   map.
//! - **Consequence.** The map holds 1:1, 2:1, 2:3 and 3:4 but never 1:3.
//!   The state-count part of the tongue-structure acceptance check
//!   therefore fails.
//!
//! Noise is set to 10 mV. At 20 mV the (1, 0) corner sits near the edge of
//! its tongue (μ ≈ 98); at 10 mV every corner stays at μ = 100 across noise
//! seeds.

use crate::io::ConfigFile;
use crate::reservoir::PipelineConfig;
use crate::sweep::SweepSpec;

/// The calibrated configuration file, also shipped as `data/xor_calibrated.toml`.
pub const CALIBRATED_TOML: &str = include_str!("../data/xor_calibrated.toml");

pub fn calibrated_config() -> ConfigFile {
    ConfigFile::parse_validated(CALIBRATED_TOML).expect("shipped calibration is valid")
}

pub fn calibrated_pipeline() -> PipelineConfig {
    calibrated_config().pipeline().expect("shipped calibration has a pipeline")
}

/// The calibrated network swept over the XOR operating rectangle
/// (`I_p1` 638..981 µA on x, `I_p2` 574..990 µA on y), `steps` per axis.
pub fn table_rectangle_sweep(steps: usize) -> SweepSpec {
    let mut cfg = calibrated_config();
    if let Some(s) = &mut cfg.sweep {
        s.x.steps = steps;
        s.y.steps = steps;
    }
    cfg.sweep_spec().expect("shipped calibration has a sweep")
}
