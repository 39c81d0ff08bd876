//! Brute-force reference for [`crate::metrics::compute_shr_mu`].
//!
//! Shares no code with the metrics module: coincidences come from a full
//! scan of all candidate spike pairs, interval counts from scanning whole
//! trains, and ratio reduction from trial division. Quadratic or worse, so
//! inputs are capped at [`ORACLE_CAP`] spikes per train. Intended for tests.

use crate::error::{Error, Result};
use crate::metrics::{Epsilon, MetricConfig, PatternCount, SyncMetrics};
use crate::simulate::SpikeTrain;

pub const ORACLE_CAP: usize = 500;

fn reduce_by_trial_division(mut a: u64, mut b: u64) -> (u64, u64) {
    let mut d = a.min(b);
    while d > 1 {
        if a.is_multiple_of(d) && b.is_multiple_of(d) {
            a /= d;
            b /= d;
            d = a.min(b);
        } else {
            d -= 1;
        }
    }
    (a, b)
}

fn windowed(train: &[f64], other: &[f64], max: usize) -> Vec<f64> {
    let keep = |t: &[f64]| -> Vec<f64> {
        let skip = if t.len() > max { t.len() - max } else { 0 };
        t.iter().skip(skip).copied().collect()
    };
    let mine = keep(train);
    let theirs = keep(other);
    let start = match (mine.first(), theirs.first()) {
        (Some(a), Some(b)) => if a > b { *a } else { *b },
        _ => return mine,
    };
    mine.into_iter().filter(|&t| t >= start).collect()
}

fn count_in(train: &[f64], lo: f64, hi: f64) -> u64 {
    train.iter().filter(|&&t| t >= lo && t < hi).count() as u64
}

pub fn shr_brute_force_oracle(train_i: &SpikeTrain, train_j: &SpikeTrain, cfg: &MetricConfig) -> Result<SyncMetrics> {
    let (ri, rj) = (&train_i.times, &train_j.times);
    for t in [ri, rj] {
        if t.len() > ORACLE_CAP {
            return Err(Error::OracleCap(t.len(), ORACLE_CAP));
        }
    }
    cfg.validate()?;
    if ri.len() < cfg.min_oscillations || rj.len() < cfg.min_oscillations {
        return Err(Error::InsufficientData("train shorter than min_oscillations".into()));
    }
    let ti = windowed(ri, rj, cfg.max_oscillations);
    let tj = windowed(rj, ri, cfg.max_oscillations);
    let eps = match cfg.epsilon {
        Epsilon::Absolute(e) => e,
        Epsilon::RelativeToIsi(f) => {
            let mean = |t: &[f64]| {
                if t.len() < 2 {
                    f64::INFINITY
                } else {
                    (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64
                }
            };
            let (a, b) = (mean(&ti), mean(&tj));
            f * if a < b { a } else { b }
        }
    };

    let mut candidates = Vec::new();
    for (a, &x) in ti.iter().enumerate() {
        for (b, &y) in tj.iter().enumerate() {
            if (x - y).abs() <= eps {
                candidates.push((a, b));
            }
        }
    }

    // repeatedly take the admissible candidate whose earlier spike is
    // earliest (ties: whose later spike is earliest)
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut pick: Option<((usize, usize), (f64, f64))> = None;
        for &(a, b) in &candidates {
            if let Some(&(la, lb)) = chosen.last() {
                if a <= la || b <= lb {
                    continue;
                }
            }
            let (x, y) = (ti[a], tj[b]);
            let key = if x < y { (x, y) } else { (y, x) };
            let better = match pick {
                None => true,
                Some((_, k)) => key.0 < k.0 || (key.0 == k.0 && key.1 < k.1),
            };
            if better {
                pick = Some(((a, b), key));
            }
        }
        match pick {
            Some((p, _)) => chosen.push(p),
            None => break,
        }
    }
    if chosen.len() < 2 {
        return Ok(SyncMetrics::unsynchronized());
    }

    // (pattern, count, spikes, first occurrence)
    let mut patterns: Vec<((u64, u64), usize, u64, usize)> = Vec::new();
    let mut total = 0;
    for k in 0..chosen.len() - 1 {
        let (a0, b0) = chosen[k];
        let (a1, b1) = chosen[k + 1];
        let mi = count_in(&ti, ti[a0], ti[a1]);
        let mj = count_in(&tj, tj[b0], tj[b1]);
        total += mi + mj;
        let key = reduce_by_trial_division(mi, mj);
        match patterns.iter_mut().find(|p| p.0 == key) {
            Some(p) => {
                p.1 += 1;
                p.2 += mi + mj;
            }
            None => patterns.push((key, 1, mi + mj, k)),
        }
    }
    let mut modal = patterns[0];
    for &p in &patterns[1..] {
        let wins = p.1 > modal.1 || (p.1 == modal.1 && (p.2 > modal.2 || (p.2 == modal.2 && p.3 < modal.3)));
        if wins {
            modal = p;
        }
    }
    let mu = 100.0 * modal.2 as f64 / total as f64;
    let synchronized = mu >= cfg.mu_th;
    let ((m_i, m_j), ..) = modal;
    let mut histogram: Vec<PatternCount> = patterns
        .iter()
        .map(|&((m_i, m_j), count, ..)| PatternCount { m_i, m_j, count })
        .collect();
    histogram.sort();
    Ok(SyncMetrics {
        m_i,
        m_j,
        shr_value: if synchronized { m_j as f64 / m_i as f64 } else { 0.0 },
        mu,
        synchronized,
        pattern_histogram: histogram,
    })
}
