//! High-order synchronization value (SHR) and synchronization efficiency (μ).
//!
//! Procedure for a pair of spike trains `(i, j)`:
//!
//! 1. Window: each train keeps its most recent `max_oscillations` spikes, then
//!    both are cropped to start at the later of the two first retained spikes.
//! 2. Coincidences: greedy earliest-first matching of spikes with
//!    `|t_i - t_j| <= epsilon`; each spike joins at most one coincidence.
//! 3. Between consecutive coincidences count `M_i` and `M_j`, the spikes of
//!    each train in the half-open interval `[c_k, c_{k+1})`, and reduce the
//!    pair by its gcd.
//! 4. The modal reduced pattern gives `SHR_{i,j} = M_j : M_i`.
//! 5. `μ = 100 * (spikes inside modal-pattern intervals) / (spikes inside all
//!    intervals)`, both trains counted.
//!
//! With the `M_i` counting above, a locked pair satisfies `F_j / F_i = M_j / M_i`,
//! so `shr_value` is the frequency ratio of oscillator `j` to oscillator `i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::gcd;
use crate::simulate::SpikeTrain;

/// Coincidence half-window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Epsilon {
    /// Seconds.
    Absolute(f64),
    /// Fraction of the shorter of the two windowed mean inter-spike intervals.
    RelativeToIsi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub epsilon: Epsilon,
    /// Synchronization threshold, percent.
    pub mu_th: f64,
    pub min_oscillations: usize,
    pub max_oscillations: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            epsilon: Epsilon::RelativeToIsi(0.05),
            mu_th: 90.0,
            min_oscillations: 50,
            max_oscillations: 1000,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        let eps = match self.epsilon {
            Epsilon::Absolute(e) | Epsilon::RelativeToIsi(e) => e,
        };
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be > 0 (got {eps})")));
        }
        if !(self.mu_th > 0.0 && self.mu_th <= 100.0) {
            return Err(Error::invalid(format!("mu_th must lie in (0, 100] (got {})", self.mu_th)));
        }
        if self.min_oscillations == 0 || self.min_oscillations > self.max_oscillations {
            return Err(Error::invalid(format!(
                "need 1 <= min_oscillations <= max_oscillations (got {} and {})",
                self.min_oscillations, self.max_oscillations
            )));
        }
        Ok(())
    }
}

/// Occurrences of one reduced interval pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternCount {
    pub m_i: u64,
    pub m_j: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncMetrics {
    /// Reduced modal pattern; `(0, 0)` when no interval exists.
    pub m_i: u64,
    pub m_j: u64,
    /// `m_j / m_i` when synchronized, otherwise 0.
    pub shr_value: f64,
    /// Percent in `[0, 100]`.
    pub mu: f64,
    pub synchronized: bool,
    /// Reduced patterns in ascending `(m_i, m_j)` order.
    pub pattern_histogram: Vec<PatternCount>,
}

impl SyncMetrics {
    pub fn unsynchronized() -> Self {
        Self {
            m_i: 0,
            m_j: 0,
            shr_value: 0.0,
            mu: 0.0,
            synchronized: false,
            pattern_histogram: Vec::new(),
        }
    }

    /// `"m_j:m_i"` as written for SHR, or `"-"` when unsynchronized.
    pub fn ratio_label(&self) -> String {
        if self.synchronized {
            format!("{}:{}", self.m_j, self.m_i)
        } else {
            "-".to_string()
        }
    }
}

pub fn is_synchronized(metrics: &SyncMetrics, mu_th: f64) -> bool {
    metrics.mu >= mu_th
}

/// Greedy earliest-first coincidence matching.
///
/// Both inputs must be sorted. Returns index pairs in chronological order.
pub fn detect_synchronous_events(train_i: &[f64], train_j: &[f64], epsilon: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut a, mut b) = (0, 0);
    while a < train_i.len() && b < train_j.len() {
        let (ti, tj) = (train_i[a], train_j[b]);
        if (ti - tj).abs() <= epsilon {
            out.push((a, b));
            a += 1;
            b += 1;
        } else if ti < tj {
            a += 1;
        } else {
            b += 1;
        }
    }
    out
}

/// Applies the analysis window to a pair of trains.
pub(crate) fn window<'a>(ti: &'a [f64], tj: &'a [f64], max_oscillations: usize) -> (&'a [f64], &'a [f64]) {
    let ti = &ti[ti.len().saturating_sub(max_oscillations)..];
    let tj = &tj[tj.len().saturating_sub(max_oscillations)..];
    let start = match (ti.first(), tj.first()) {
        (Some(&a), Some(&b)) => a.max(b),
        _ => return (ti, tj),
    };
    let crop = |t: &'a [f64]| &t[t.partition_point(|&x| x < start)..];
    (crop(ti), crop(tj))
}

pub(crate) fn resolve_epsilon(eps: Epsilon, ti: &[f64], tj: &[f64]) -> f64 {
    match eps {
        Epsilon::Absolute(e) => e,
        Epsilon::RelativeToIsi(f) => {
            let isi = |t: &[f64]| {
                if t.len() >= 2 {
                    (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64
                } else {
                    f64::INFINITY
                }
            };
            f * isi(ti).min(isi(tj))
        }
    }
}

pub(crate) fn check_lengths(ti: &[f64], tj: &[f64], cfg: &MetricConfig) -> Result<()> {
    cfg.validate()?;
    for (name, t) in [("i", ti), ("j", tj)] {
        if t.len() < cfg.min_oscillations {
            return Err(Error::InsufficientData(format!(
                "train {name} has {} spikes, at least {} required",
                t.len(),
                cfg.min_oscillations
            )));
        }
    }
    Ok(())
}

#[derive(Default)]
struct PatternTally {
    count: usize,
    spikes: u64,
    first: usize,
}

pub fn compute_shr_mu(train_i: &SpikeTrain, train_j: &SpikeTrain, cfg: &MetricConfig) -> Result<SyncMetrics> {
    shr_mu_from_times(&train_i.times, &train_j.times, cfg)
}

/// [`compute_shr_mu`] on raw sorted time slices.
pub fn shr_mu_from_times(ti: &[f64], tj: &[f64], cfg: &MetricConfig) -> Result<SyncMetrics> {
    check_lengths(ti, tj, cfg)?;
    let (ti, tj) = window(ti, tj, cfg.max_oscillations);
    let eps = resolve_epsilon(cfg.epsilon, ti, tj);
    let events = detect_synchronous_events(ti, tj, eps);
    if events.len() < 2 {
        return Ok(SyncMetrics::unsynchronized());
    }

    let mut tallies: BTreeMap<(u64, u64), PatternTally> = BTreeMap::new();
    let mut total = 0u64;
    for (k, w) in events.windows(2).enumerate() {
        let mi = (w[1].0 - w[0].0) as u64;
        let mj = (w[1].1 - w[0].1) as u64;
        let g = gcd(mi, mj);
        let tally = tallies.entry((mi / g, mj / g)).or_insert(PatternTally {
            first: k,
            ..Default::default()
        });
        tally.count += 1;
        tally.spikes += mi + mj;
        total += mi + mj;
    }

    // most intervals, then most spikes covered, then earliest first occurrence
    let (&(m_i, m_j), modal) = tallies
        .iter()
        .max_by(|(_, a), (_, b)| {
            a.count
                .cmp(&b.count)
                .then(a.spikes.cmp(&b.spikes))
                .then(b.first.cmp(&a.first))
        })
        .expect("at least one interval");

    let mu = 100.0 * modal.spikes as f64 / total as f64;
    let synchronized = mu >= cfg.mu_th;
    Ok(SyncMetrics {
        m_i,
        m_j,
        shr_value: if synchronized { m_j as f64 / m_i as f64 } else { 0.0 },
        mu,
        synchronized,
        pattern_histogram: tallies
            .iter()
            .map(|(&(m_i, m_j), t)| PatternCount {
                m_i,
                m_j,
                count: t.count,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic(period: f64, n: usize, offset: f64) -> Vec<f64> {
        (0..n).map(|k| offset + period * k as f64).collect()
    }

    fn cfg_abs(eps: f64) -> MetricConfig {
        MetricConfig {
            epsilon: Epsilon::Absolute(eps),
            ..Default::default()
        }
    }

    #[test]
    fn identical_trains_match_pairwise() {
        let t = [0.0, 1.0, 2.0];
        assert_eq!(detect_synchronous_events(&t, &t, 0.01), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn small_offset_still_matches() {
        let a = periodic(1.0, 20, 0.0);
        let b = periodic(1.0, 20, 0.004);
        let ev = detect_synchronous_events(&a, &b, 0.01);
        assert_eq!(ev.len(), 20);
        assert!(ev.iter().all(|&(x, y)| x == y));
    }

    #[test]
    fn half_period_offset_never_matches() {
        assert!(detect_synchronous_events(&[0.0, 1.0, 2.0], &[0.5, 1.5, 2.5], 0.01).is_empty());
    }

    #[test]
    fn greedy_takes_earliest_partner() {
        // 0.0 could pair with 0.008; 0.015 is left over
        assert_eq!(detect_synchronous_events(&[0.0, 0.015], &[0.008], 0.01), vec![(0, 0)]);
    }

    #[test]
    fn aligned_unit_trains_lock_one_to_one() {
        let t = SpikeTrain::new(0, periodic(1.0, 100, 0.0)).unwrap();
        let m = compute_shr_mu(&t, &t, &cfg_abs(0.01)).unwrap();
        assert_eq!((m.m_i, m.m_j), (1, 1));
        assert_eq!(m.shr_value, 1.0);
        assert_eq!(m.mu, 100.0);
        assert!(m.synchronized);
    }

    #[test]
    fn half_rate_partner_gives_one_to_two() {
        let a = periodic(1.0, 100, 0.0);
        let b = periodic(2.0, 50, 0.0);
        let m = shr_mu_from_times(&a, &b, &cfg_abs(0.01)).unwrap();
        assert_eq!((m.m_i, m.m_j), (2, 1));
        assert_eq!(m.shr_value, 0.5);
        assert_eq!(m.mu, 100.0);
        assert!(m.synchronized);
        assert_eq!(m.ratio_label(), "1:2");
    }

    #[test]
    fn too_short_is_insufficient() {
        let a = periodic(1.0, 10, 0.0);
        let err = shr_mu_from_times(&a, &a, &MetricConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn no_coincidence_is_unsynchronized() {
        let a = periodic(1.0, 100, 0.0);
        let b = periodic(1.0, 100, 0.5);
        let m = shr_mu_from_times(&a, &b, &cfg_abs(0.01)).unwrap();
        assert_eq!(m, SyncMetrics::unsynchronized());
    }

    #[test]
    fn threshold_is_inclusive() {
        let mut m = SyncMetrics::unsynchronized();
        m.mu = 100.0;
        assert!(is_synchronized(&m, 90.0));
        m.mu = 89.9;
        assert!(!is_synchronized(&m, 90.0));
        m.mu = 90.0;
        assert!(is_synchronized(&m, 90.0));
    }

    #[test]
    fn relative_epsilon_uses_shorter_isi() {
        let a = periodic(1.0, 11, 0.0);
        let b = periodic(2.0, 6, 0.0);
        assert!((resolve_epsilon(Epsilon::RelativeToIsi(0.05), &a, &b) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn window_keeps_recent_and_crops_to_common_start() {
        let a = periodic(1.0, 100, 0.0);
        let b = periodic(3.0, 40, 0.0);
        let (wa, wb) = window(&a, &b, 20);
        assert_eq!(wa.len(), 20);
        assert_eq!(wa[0], 80.0);
        assert!(wb.iter().all(|&t| t >= 80.0));
        assert_eq!(wb[0], 81.0);
    }

    #[test]
    fn modal_tie_prefers_more_spikes() {
        // intervals: (1,1),(1,1),(2,2)->(1,1) ... build a tie on count with
        // different coverage: patterns (1,2) x2 covering 3 each vs (2,3) x2 covering 5 each
        let mut ti = vec![0.0];
        let mut tj = vec![0.0];
        let mut t = 0.0;
        for &(mi, mj) in &[(1usize, 2usize), (2, 3), (1, 2), (2, 3)] {
            let span = 6.0;
            for k in 1..mi {
                ti.push(t + span * k as f64 / mi as f64);
            }
            for k in 1..mj {
                tj.push(t + span * k as f64 / mj as f64 + 0.3);
            }
            t += span;
            ti.push(t);
            tj.push(t);
        }
        let cfg = MetricConfig {
            epsilon: Epsilon::Absolute(0.01),
            min_oscillations: 1,
            ..Default::default()
        };
        let m = shr_mu_from_times(&ti, &tj, &cfg).unwrap();
        assert_eq!((m.m_i, m.m_j), (2, 3));
        assert!((m.mu - 100.0 * 10.0 / 16.0).abs() < 1e-12);
        assert!(!m.synchronized);
        assert_eq!(m.shr_value, 0.0);
    }
}
