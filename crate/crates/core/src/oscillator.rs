//! Lumped model of a threshold-switch relaxation oscillator network.
//!
//! Each oscillator is a capacitor `C` charged by a constant current source
//! `I_p` and shunted by a two-state switch:
//!
//! * **off**: open circuit, `dV/dt = I_p / C` (linear ramp);
//! * **on**: resistor `R_on` to ground, `V` relaxes exponentially toward
//!   `I_p * R_on` with time constant `R_on * C`.
//!
//! The switch turns on when `V` reaches the effective threshold and turns off
//! when `V` decays to the hold voltage `U_h`. While oscillator `i` is on, the
//! threshold of every other oscillator `j` is lowered by `delta[i][j]`
//! (thermal coupling). External spike drives lower thresholds the same way for
//! `pulse_width` seconds after each drive spike.
//!
//! All quantities are SI (seconds, volts, amperes, farads, ohms).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jitter is drawn from a Gaussian truncated at this many standard deviations.
pub const NOISE_TRUNCATION_SIGMAS: f64 = 4.0;

/// Default circuit constants.
pub mod defaults {
    pub const THRESHOLD_VOLTAGE: f64 = 5.0;
    pub const HOLD_VOLTAGE: f64 = 1.5;
    pub const ON_RESISTANCE: f64 = 1.0e3;
    pub const CAPACITANCE: f64 = 100.0e-9;
    pub const NOISE_SIGMA: f64 = 20.0e-3;
    pub const WARMUP_SPIKES: usize = 50;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub capacitance: f64,
    pub supply_current: f64,
    pub threshold_voltage: f64,
    pub hold_voltage: f64,
    pub on_resistance: f64,
    /// Standard deviation of the per-cycle threshold jitter, volts.
    pub noise_sigma: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            capacitance: defaults::CAPACITANCE,
            supply_current: 500.0e-6,
            threshold_voltage: defaults::THRESHOLD_VOLTAGE,
            hold_voltage: defaults::HOLD_VOLTAGE,
            on_resistance: defaults::ON_RESISTANCE,
            noise_sigma: defaults::NOISE_SIGMA,
        }
    }
}

impl OscillatorParams {
    /// Default circuit with the given supply current and no noise.
    pub fn with_current(supply_current: f64) -> Self {
        Self {
            supply_current,
            noise_sigma: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.capacitance,
            self.supply_current,
            self.threshold_voltage,
            self.hold_voltage,
            self.on_resistance,
            self.noise_sigma,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("oscillator parameters must be finite"));
        }
        if self.capacitance <= 0.0 {
            return Err(Error::invalid(format!("capacitance must be > 0 (got {})", self.capacitance)));
        }
        if self.supply_current <= 0.0 {
            return Err(Error::invalid(format!(
                "supply current must be > 0 (got {})",
                self.supply_current
            )));
        }
        if self.on_resistance <= 0.0 {
            return Err(Error::invalid(format!(
                "on resistance must be > 0 (got {})",
                self.on_resistance
            )));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::invalid(format!("noise sigma must be >= 0 (got {})", self.noise_sigma)));
        }
        if self.threshold_voltage <= self.hold_voltage {
            return Err(Error::invalid(format!(
                "threshold voltage U_th = {} must exceed hold voltage U_h = {}",
                self.threshold_voltage, self.hold_voltage
            )));
        }
        let floor = self.on_state_asymptote();
        if self.hold_voltage <= floor {
            return Err(Error::invalid(format!(
                "hold voltage U_h = {} must exceed I_p * R_on = {floor} (switch would never turn off)",
                self.hold_voltage
            )));
        }
        Ok(())
    }

    /// Voltage the capacitor relaxes toward while the switch is on.
    pub fn on_state_asymptote(&self) -> f64 {
        self.supply_current * self.on_resistance
    }

    pub fn time_constant(&self) -> f64 {
        self.on_resistance * self.capacitance
    }

    /// Off-phase duration of a ramp from `U_h` to `U_th`.
    pub fn charge_time(&self) -> f64 {
        self.capacitance * (self.threshold_voltage - self.hold_voltage) / self.supply_current
    }

    /// On-phase duration of a decay from `U_th` to `U_h`.
    pub fn discharge_time(&self) -> f64 {
        self.discharge_time_from(self.threshold_voltage)
    }

    /// On-phase duration of a decay from `v_start` down to `U_h`.
    pub fn discharge_time_from(&self, v_start: f64) -> f64 {
        let floor = self.on_state_asymptote();
        self.time_constant() * ((v_start - floor) / (self.hold_voltage - floor)).ln()
    }
}

/// Free-running spike frequency of an uncoupled, noiseless oscillator.
pub fn own_frequency(params: &OscillatorParams) -> f64 {
    1.0 / (params.charge_time() + params.discharge_time())
}

/// Threshold reductions between oscillators. `get(i, j)` is the drop applied
/// to oscillator `j` while oscillator `i` is on. The diagonal is always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    n: usize,
    delta: Vec<f64>,
}

impl CouplingMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            delta: vec![0.0; n * n],
        }
    }

    /// Every off-diagonal entry equal to `delta`.
    pub fn uniform(n: usize, delta: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.delta[i * n + j] = delta;
                }
            }
        }
        m
    }

    /// Builds from rows; diagonal entries are forced to zero.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "coupling row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                if i != j {
                    m.delta[i * n + j] = d;
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.delta[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, delta: f64) {
        if from != to {
            self.delta[from * self.n + to] = delta;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.delta.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Sum of all reductions that can act on oscillator `to` at once.
    pub fn column_sum(&self, to: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, to)).sum()
    }
}

/// A spike sequence fed into the network as a dynamic input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalDrive {
    pub spike_times: Vec<f64>,
    pub pulse_width: f64,
    /// Threshold reduction per target oscillator while a pulse is active.
    pub delta_ext: Vec<f64>,
}

impl ExternalDrive {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.pulse_width > 0.0 && self.pulse_width.is_finite()) {
            return Err(Error::invalid(format!(
                "drive pulse width must be > 0 (got {})",
                self.pulse_width
            )));
        }
        if self.delta_ext.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: self.delta_ext.len(),
            });
        }
        if self.delta_ext.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("drive threshold reductions must be finite and >= 0"));
        }
        if self.spike_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("drive spike times must be finite"));
        }
        if self.spike_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("drive spike times must be strictly increasing"));
        }
        Ok(())
    }

    /// Largest number of this drive's pulses that are active simultaneously.
    pub fn max_overlap(&self) -> usize {
        let t = &self.spike_times;
        let mut best = 0;
        let mut lo = 0;
        for hi in 0..t.len() {
            // pulses are half-open [t, t + w)
            while t[hi] >= t[lo] + self.pulse_width {
                lo += 1;
            }
            best = best.max(hi - lo + 1);
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub oscillators: Vec<OscillatorParams>,
    pub coupling: CouplingMatrix,
    #[serde(default)]
    pub drives: Vec<ExternalDrive>,
    /// Capacitor voltages at t = 0. Defaults to all zero.
    #[serde(default)]
    pub initial_voltages: Option<Vec<f64>>,
    pub seed: u64,
}

impl NetworkConfig {
    /// Uncoupled network with no drives.
    pub fn uncoupled(oscillators: Vec<OscillatorParams>, seed: u64) -> Self {
        let n = oscillators.len();
        Self {
            oscillators,
            coupling: CouplingMatrix::zeros(n),
            drives: Vec::new(),
            initial_voltages: None,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    /// Worst-case threshold drop on oscillator `j` from every coupling source,
    /// every overlapping drive pulse and the truncated noise tail together.
    pub fn worst_case_drop(&self, j: usize) -> f64 {
        let drives: f64 = self
            .drives
            .iter()
            .map(|d| d.delta_ext[j] * d.max_overlap() as f64)
            .sum();
        self.coupling.column_sum(j) + drives + NOISE_TRUNCATION_SIGMAS * self.oscillators[j].noise_sigma
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::invalid("network has no oscillators"));
        }
        if self.coupling.n() != n {
            return Err(Error::invalid(format!(
                "coupling matrix is {0}x{0} but there are {n} oscillators",
                self.coupling.n()
            )));
        }
        for (k, p) in self.oscillators.iter().enumerate() {
            p.validate().map_err(|e| Error::invalid(format!("oscillator {k}: {e}")))?;
        }
        for i in 0..n {
            for j in 0..n {
                let d = self.coupling.get(i, j);
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::invalid(format!("coupling delta[{i}][{j}] = {d} must be >= 0")));
                }
            }
        }
        for (k, d) in self.drives.iter().enumerate() {
            d.validate(n).map_err(|e| Error::invalid(format!("drive {k}: {e}")))?;
        }
        if let Some(v0) = &self.initial_voltages {
            if v0.len() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: v0.len(),
                });
            }
            for (k, (&v, p)) in v0.iter().zip(&self.oscillators).enumerate() {
                if !(v.is_finite() && v >= 0.0 && v < p.threshold_voltage) {
                    return Err(Error::invalid(format!(
                        "initial voltage of oscillator {k} must lie in [0, U_th)"
                    )));
                }
            }
        }
        for (j, p) in self.oscillators.iter().enumerate() {
            let lowest = p.threshold_voltage - self.worst_case_drop(j);
            if lowest <= p.hold_voltage {
                return Err(Error::invalid(format!(
                    "oscillator {j}: worst-case effective threshold {lowest} V (coupling, drives, \
                     4 sigma noise) does not exceed hold voltage U_h = {} V",
                    p.hold_voltage
                )));
            }
        }
        Ok(())
    }
}
