#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hosync::metrics::{Epsilon, MetricConfig};
use hosync::simulate::SpikeTrain;

/// Two synthetic trains locked at `m_i` : `m_j` spikes per common period
/// `period`, with uniform jitter in `[-jitter, jitter]` on every spike and
/// each spike dropped with probability `dropout`.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub m_i: u64,
    pub m_j: u64,
    pub period: f64,
    pub periods: usize,
    pub offset: f64,
    pub jitter: f64,
    pub dropout: f64,
}

impl Synthetic {
    pub fn nominal_isi(&self) -> (f64, f64) {
        (self.period / self.m_i as f64, self.period / self.m_j as f64)
    }

    pub fn generate(&self, rng: &mut ChaCha8Rng) -> (SpikeTrain, SpikeTrain) {
        let mut one = |m: u64, offset: f64| {
            let step = self.period / m as f64;
            let mut times = Vec::new();
            for k in 0..self.periods * m as usize {
                if rng.random_bool(self.dropout) {
                    continue;
                }
                let j = if self.jitter > 0.0 {
                    rng.random_range(-self.jitter..=self.jitter)
                } else {
                    0.0
                };
                times.push(offset + k as f64 * step + j);
            }
            times
        };
        let a = one(self.m_i, 0.0);
        let b = one(self.m_j, self.offset);
        (SpikeTrain::new(0, a).unwrap(), SpikeTrain::new(1, b).unwrap())
    }
}

/// A random instance in the ranges used by the oracle-equivalence check:
/// ratio in {1..5}², jitter up to ε/2 between paired spikes, 5% dropout,
/// trains short enough for the brute-force oracle.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (SpikeTrain, SpikeTrain, MetricConfig) {
    let m_i = rng.random_range(1..=5u64);
    let m_j = rng.random_range(1..=5u64);
    let period = rng.random_range(0.5e-3..5e-3);
    let max_m = m_i.max(m_j) as usize;
    let periods = rng.random_range(70..=450 / max_m).max(70 / m_i.min(m_j) as usize + 1);
    let mut s = Synthetic {
        m_i,
        m_j,
        period,
        periods,
        offset: 0.0,
        jitter: 0.0,
        dropout: 0.05,
    };
    let (isi_i, isi_j) = s.nominal_isi();
    let isi = isi_i.min(isi_j);
    let relative = rng.random_bool(0.5);
    let frac = 0.05;
    // nominal ε; dropout only lengthens mean ISIs, so the resolved relative ε
    // is never smaller than this
    let eps = frac * isi;
    // per-spike jitter of ε/4 keeps paired spikes within ε/2 of each other
    s.jitter = eps / 4.0;
    // some pairs aligned, some offset beyond ε
    s.offset = if rng.random_bool(0.7) { 0.0 } else { rng.random_range(2.0 * eps..isi - 2.0 * eps) };
    let (a, b) = s.generate(rng);
    let cfg = MetricConfig {
        epsilon: if relative { Epsilon::RelativeToIsi(frac) } else { Epsilon::Absolute(eps) },
        mu_th: 90.0,
        min_oscillations: 50,
        max_oscillations: rng.random_range(50..=500),
    };
    (a, b, cfg)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
