//! Exact event-driven integration of a [`NetworkConfig`].
//!
//! Between events every oscillator follows a closed-form trajectory (linear
//! charge ramp or exponential discharge) and every effective threshold is
//! constant, so the next event time is solved analytically. Events are switch
//! on/off transitions and drive pulse edges. Whenever a threshold changes, the
//! pending crossing times are re-solved from each oscillator's phase anchor.
//!
//! Tie-breaking at identical timestamps: drive pulse ends, then drive pulse
//! starts, then scheduled oscillator events in ascending index, then induced
//! switch-ons (an oscillator whose voltage already sits above its lowered
//! threshold) in ascending index until none remain.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oscillator::{NetworkConfig, OscillatorParams, NOISE_TRUNCATION_SIGMAS};
use crate::seed::oscillator_stream_seed;

/// Switch-on times of one oscillator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrain {
    pub oscillator_index: usize,
    pub times: Vec<f64>,
}

impl SpikeTrain {
    /// Checks that the times are finite and strictly increasing.
    pub fn new(oscillator_index: usize, times: Vec<f64>) -> Result<Self> {
        if let Some(k) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::invalid(format!("spike {k} is not finite")));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "spike times must be strictly increasing (entries {k} and {})",
                k + 1
            )));
        }
        Ok(Self {
            oscillator_index,
            times,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Mean inter-spike interval, `None` with fewer than two spikes.
    pub fn mean_isi(&self) -> Option<f64> {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) if self.times.len() >= 2 => Some((b - a) / (self.times.len() - 1) as f64),
            _ => None,
        }
    }
}

/// Limits that turn a runaway simulation into [`Error::Stalled`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimBudget {
    /// Maximum number of processed event timestamps.
    pub max_events: u64,
    /// Longest simulated stretch without any switch-on, as a multiple of the
    /// slowest oscillator's uncoupled first-cycle duration.
    pub max_silent_periods: f64,
}

impl Default for SimBudget {
    fn default() -> Self {
        Self {
            max_events: 200_000_000,
            max_silent_periods: 1000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub warmup_spikes: usize,
    pub record_spikes: usize,
    pub budget: SimBudget,
}

impl SimOptions {
    pub fn new(warmup_spikes: usize, record_spikes: usize) -> Self {
        Self {
            warmup_spikes,
            record_spikes,
            budget: SimBudget::default(),
        }
    }
}

/// Runs the network until every oscillator has recorded `record_spikes`
/// spikes after discarding its first `warmup_spikes`.
pub fn simulate(config: &NetworkConfig, warmup_spikes: usize, record_spikes: usize) -> Result<Vec<SpikeTrain>> {
    simulate_with(config, &SimOptions::new(warmup_spikes, record_spikes))
}

pub fn simulate_with(config: &NetworkConfig, opts: &SimOptions) -> Result<Vec<SpikeTrain>> {
    if opts.record_spikes == 0 {
        return Err(Error::invalid("record_spikes must be >= 1"));
    }
    let mut net = Network::new(config)?;
    let n = config.len();
    let silent_limit = opts.budget.max_silent_periods
        * config
            .oscillators
            .iter()
            .map(|p| p.capacitance * p.threshold_voltage / p.supply_current + p.discharge_time())
            .fold(0.0, f64::max);

    let mut seen = vec![0usize; n];
    let mut trains: Vec<Vec<f64>> = vec![Vec::with_capacity(opts.record_spikes); n];
    let mut fired = Vec::with_capacity(n);
    let mut last_spike = 0.0;
    let mut events = 0u64;
    while trains.iter().any(|t| t.len() < opts.record_spikes) {
        net.step(&mut fired);
        events += 1;
        let t = net.time();
        if fired.is_empty() {
            if t - last_spike > silent_limit {
                return Err(Error::Stalled(format!(
                    "no switch-on event during {:.3e} s of simulated time (t = {t:.6e} s)",
                    t - last_spike
                )));
            }
        } else {
            last_spike = t;
        }
        if events > opts.budget.max_events {
            let counts: Vec<usize> = trains.iter().map(Vec::len).collect();
            return Err(Error::Stalled(format!(
                "event budget of {} exhausted at t = {t:.6e} s with recorded spike counts {counts:?}",
                opts.budget.max_events
            )));
        }
        for &k in &fired {
            seen[k] += 1;
            if seen[k] > opts.warmup_spikes {
                trains[k].push(t);
            }
        }
    }
    Ok(trains
        .into_iter()
        .enumerate()
        .map(|(oscillator_index, times)| SpikeTrain {
            oscillator_index,
            times,
        })
        .collect())
}

#[derive(Debug, Clone)]
struct OscState {
    on: bool,
    /// Phase anchor: the trajectory is closed-form from (t0, v0).
    t0: f64,
    v0: f64,
    jitter: f64,
    rng: ChaCha8Rng,
    /// Next scheduled event and, for the off phase, the threshold it assumed.
    next: f64,
    next_threshold: f64,
}

#[derive(Debug, Clone, Default)]
struct DriveState {
    next_start: usize,
    next_end: usize,
}

/// Integration state of one run. Holds a borrowed, validated configuration.
#[derive(Debug, Clone)]
pub struct Network<'a> {
    cfg: &'a NetworkConfig,
    t: f64,
    osc: Vec<OscState>,
    drives: Vec<DriveState>,
}

fn draw_jitter(p: &OscillatorParams, rng: &mut ChaCha8Rng) -> f64 {
    if p.noise_sigma == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, p.noise_sigma).expect("validated sigma");
    let cap = NOISE_TRUNCATION_SIGMAS * p.noise_sigma;
    loop {
        let x: f64 = normal.sample(rng);
        if x.abs() <= cap {
            return x;
        }
    }
}

impl<'a> Network<'a> {
    pub fn new(cfg: &'a NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        let osc = cfg
            .oscillators
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut rng = ChaCha8Rng::seed_from_u64(oscillator_stream_seed(cfg.seed, k));
                let jitter = draw_jitter(p, &mut rng);
                let v0 = cfg.initial_voltages.as_ref().map_or(0.0, |v| v[k]);
                OscState {
                    on: false,
                    t0: 0.0,
                    v0,
                    jitter,
                    rng,
                    next: f64::INFINITY,
                    next_threshold: f64::NAN,
                }
            })
            .collect();
        let mut net = Self {
            cfg,
            t: 0.0,
            osc,
            drives: vec![DriveState::default(); cfg.drives.len()],
        };
        // initial voltages may already sit above threshold
        let mut fired = Vec::new();
        net.induce_switch_ons(&mut fired);
        net.reschedule();
        Ok(net)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn is_on(&self, i: usize) -> bool {
        self.osc[i].on
    }

    /// Capacitor voltage of oscillator `j` at the current time.
    pub fn voltage(&self, j: usize) -> f64 {
        self.voltage_at(j, self.t)
    }

    fn voltage_at(&self, j: usize, t: f64) -> f64 {
        let s = &self.osc[j];
        let p = &self.cfg.oscillators[j];
        if s.on {
            let floor = p.on_state_asymptote();
            floor + (s.v0 - floor) * (-(t - s.t0) / p.time_constant()).exp()
        } else {
            s.v0 + p.supply_current / p.capacitance * (t - s.t0)
        }
    }

    fn active_pulses(&self, d: usize) -> usize {
        self.drives[d].next_start - self.drives[d].next_end
    }

    /// `U_th - sum of reductions from on-neighbours and active drive pulses +
    /// this cycle's jitter`.
    pub fn effective_threshold(&self, j: usize) -> f64 {
        let p = &self.cfg.oscillators[j];
        let mut thr = p.threshold_voltage;
        for (i, s) in self.osc.iter().enumerate() {
            if s.on && i != j {
                thr -= self.cfg.coupling.get(i, j);
            }
        }
        for (d, drive) in self.cfg.drives.iter().enumerate() {
            thr -= self.active_pulses(d) as f64 * drive.delta_ext[j];
        }
        thr + self.osc[j].jitter
    }

    fn next_drive_event(&self) -> f64 {
        self.cfg
            .drives
            .iter()
            .zip(&self.drives)
            .map(|(d, s)| {
                let start = d.spike_times.get(s.next_start).copied().unwrap_or(f64::INFINITY);
                let end = if s.next_end < s.next_start {
                    d.spike_times[s.next_end] + d.pulse_width
                } else {
                    f64::INFINITY
                };
                start.min(end)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn reschedule(&mut self) {
        for j in 0..self.osc.len() {
            let p = &self.cfg.oscillators[j];
            let (next, thr) = if self.osc[j].on {
                let s = &self.osc[j];
                let floor = p.on_state_asymptote();
                let dt = p.time_constant() * ((s.v0 - floor) / (p.hold_voltage - floor)).ln();
                (s.t0 + dt, f64::NAN)
            } else {
                let thr = self.effective_threshold(j);
                let s = &self.osc[j];
                let t = s.t0 + p.capacitance * (thr - s.v0) / p.supply_current;
                (t.max(self.t), thr)
            };
            self.osc[j].next = next;
            self.osc[j].next_threshold = thr;
        }
    }

    fn switch_on(&mut self, j: usize, v: f64) {
        let s = &mut self.osc[j];
        s.on = true;
        s.t0 = self.t;
        s.v0 = v;
    }

    fn switch_off(&mut self, j: usize) {
        let p = self.cfg.oscillators[j];
        let s = &mut self.osc[j];
        s.on = false;
        s.t0 = self.t;
        s.v0 = p.hold_voltage;
        s.jitter = draw_jitter(&p, &mut s.rng);
    }

    fn induce_switch_ons(&mut self, fired: &mut Vec<usize>) {
        loop {
            let mut changed = false;
            for j in 0..self.osc.len() {
                if !self.osc[j].on {
                    let v = self.voltage(j);
                    if v >= self.effective_threshold(j) {
                        self.switch_on(j, v);
                        fired.push(j);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Advances to the next event time and processes everything scheduled
    /// there. `fired` receives the indices that switched on, in order.
    pub fn step(&mut self, fired: &mut Vec<usize>) {
        fired.clear();
        let t_drive = self.next_drive_event();
        let t_osc = self.osc.iter().map(|s| s.next).fold(f64::INFINITY, f64::min);
        let t = t_drive.min(t_osc);
        debug_assert!(t.is_finite(), "oscillators always have a finite next event");
        self.t = t;

        if t_drive == t {
            for (d, drive) in self.cfg.drives.iter().enumerate() {
                let s = &mut self.drives[d];
                while s.next_end < s.next_start && drive.spike_times[s.next_end] + drive.pulse_width == t {
                    s.next_end += 1;
                }
                while drive.spike_times.get(s.next_start) == Some(&t) {
                    s.next_start += 1;
                }
            }
        }

        if t_osc == t {
            for j in 0..self.osc.len() {
                if self.osc[j].next != t {
                    continue;
                }
                if self.osc[j].on {
                    self.switch_off(j);
                } else {
                    let assumed = self.osc[j].next_threshold;
                    // an earlier same-time switch-off may have raised the threshold
                    if self.effective_threshold(j) <= assumed {
                        self.switch_on(j, assumed);
                        fired.push(j);
                    }
                }
            }
        }

        self.induce_switch_ons(fired);
        self.reschedule();
    }
}
