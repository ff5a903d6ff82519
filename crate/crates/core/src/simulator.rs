//! Monte Carlo estimate of the expected maximum chunk size.
//!
//! An arrangement is a sequence of `n` gold alignments, each flagged 1-to-1
//! or not. Position `t` is a hard delimiter when `t` and both neighbours are
//! 1-to-1; chunks are the runs of non-delimiter positions, and the statistic
//! is the longest such run. Flags are drawn i.i.d. Bernoulli(`r`).
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Trials are processed in fixed blocks of
//! [`TRIAL_BLOCK`]; block `b` uses stream `b` of that generator, so results
//! are identical for any number of worker threads.

use std::io::Write;

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const TRIAL_BLOCK: u64 = 1024;
pub const MAX_EXACT_N: usize = 20;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Number of gold alignments.
    pub n: usize,
    /// Probability that an alignment is 1-to-1.
    pub r: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::out_of_range("n", self.n, ">= 1"));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::out_of_range("r", self.r, "in [0, 1]"));
        }
        if self.trials == 0 {
            return Err(Error::out_of_range("trials", self.trials, ">= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    pub flags: Vec<bool>,
}

pub fn sample_arrangement<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Arrangement> {
    cfg.validate()?;
    let coin = Bernoulli::new(cfg.r).expect("r validated");
    Ok(Arrangement {
        flags: (0..cfg.n).map(|_| coin.sample(rng)).collect(),
    })
}

/// Longest run of non-delimiter positions. Never 0 for `n >= 1`, because the
/// first and last positions cannot be delimiters.
pub fn max_chunk_size(flags: &[bool]) -> usize {
    let n = flags.len();
    let mut best = 0;
    let mut run = 0;
    for t in 0..n {
        let delimiter = t >= 1 && t + 1 < n && flags[t - 1] && flags[t] && flags[t + 1];
        if delimiter {
            run = 0;
        } else {
            run += 1;
            best = best.max(run);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Sample mean and standard error of [`max_chunk_size`] over `cfg.trials`
/// arrangements.
pub fn expected_max_chunk(cfg: &SimConfig) -> Result<Estimate> {
    cfg.validate()?;
    let coin = Bernoulli::new(cfg.r).expect("r validated");
    let blocks = cfg.trials.div_ceil(TRIAL_BLOCK);
    // Integer sums keep the reduction exact and order-independent.
    let (sum, sum_sq) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let count = TRIAL_BLOCK.min(cfg.trials - b * TRIAL_BLOCK);
            let mut flags = vec![false; cfg.n];
            let (mut s, mut s2) = (0u128, 0u128);
            for _ in 0..count {
                for f in flags.iter_mut() {
                    *f = coin.sample(&mut rng);
                }
                let g = max_chunk_size(&flags) as u128;
                s += g;
                s2 += g * g;
            }
            (s, s2)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = cfg.trials as f64;
    let mean = sum as f64 / t;
    let stderr = if cfg.trials > 1 {
        // sum of squared deviations = sum_sq - sum^2 / trials, computed exactly
        let num = sum_sq * cfg.trials as u128 - sum * sum;
        let var = num as f64 / (t * (t - 1.0));
        (var / t).sqrt()
    } else {
        0.0
    };
    Ok(Estimate { mean, stderr })
}

fn max_chunk_bits(mask: u32, n: usize) -> u32 {
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let interior = if n >= 3 { full & !1 & !(1 << (n - 1)) } else { 0 };
    let delimiters = mask & (mask << 1) & (mask >> 1) & interior;
    let mut rest = !delimiters & full;
    let mut longest = 0;
    while rest != 0 {
        rest &= rest >> 1;
        longest += 1;
    }
    longest
}

/// Exact expectation by enumerating all `2^n` arrangements.
pub fn exhaustive_expected_max_chunk(n: usize, r: f64) -> Result<f64> {
    if n == 0 || n > MAX_EXACT_N {
        return Err(Error::out_of_range("n", n, "1 <= n <= 20"));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::out_of_range("r", r, "in [0, 1]"));
    }
    let weight: Vec<f64> = (0..=n)
        .map(|k| r.powi(k as i32) * (1.0 - r).powi((n - k) as i32))
        .collect();
    Ok((0u32..1 << n)
        .map(|mask| weight[mask.count_ones() as usize] * f64::from(max_chunk_bits(mask, n)))
        .sum())
}

/// Largest [`max_chunk_size`] over all arrangements of length `n` with
/// exactly `non_one_to_one` false flags.
pub fn worst_case_max_chunk(n: usize, non_one_to_one: usize) -> Result<usize> {
    if n == 0 || n > MAX_EXACT_N || non_one_to_one > n {
        return Err(Error::out_of_range("n", n, "1 <= n <= 20 and m <= n"));
    }
    Ok((0u32..1 << n)
        .filter(|mask| n - mask.count_ones() as usize == non_one_to_one)
        .map(|mask| max_chunk_bits(mask, n) as usize)
        .max()
        .unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub r: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// One row per `(n, r)` pair, `n` outermost. With `exact`, enumeration
/// replaces sampling and the standard error is 0.
pub fn sweep(n_list: &[usize], r_list: &[f64], trials: u64, seed: u64, exact: bool) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() || r_list.is_empty() {
        return Err(Error::Validation("sweep needs at least one n and one r".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len() * r_list.len());
    for &n in n_list {
        for &r in r_list {
            let est = if exact {
                Estimate {
                    mean: exhaustive_expected_max_chunk(n, r)?,
                    stderr: 0.0,
                }
            } else {
                expected_max_chunk(&SimConfig { n, r, trials, seed })?
            };
            rows.push(SweepRow {
                n,
                r,
                mean: est.mean,
                stderr: est.stderr,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,r,mean,stderr")?;
    for row in rows {
        writeln!(out, "{},{},{:.6},{:.6}", row.n, row.r, row.mean, row.stderr)?;
    }
    Ok(())
}
