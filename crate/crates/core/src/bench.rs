//! Per-trial timing of the online learners.

use std::time::Instant;

use rand::Rng;

use crate::bases::{Basis, BasisKind};
use crate::qbayes::{QBayes, QBayesParams};
use crate::rng::rng_from_seed;
use crate::scs::{AlphaMode, ScsEngine, ScsOptions};
use crate::Result;

/// Trials run before timing starts.
pub const WARMUP_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub kind: BasisKind,
    pub n: usize,
    pub trials: usize,
    /// Median wall time of one predict + update, in microseconds.
    pub median_usec: f64,
    /// Active-set size at the last timed trial.
    pub active: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Times `trials` predict + update rounds of the SCS engine on a stream
/// that switches between two labelings with 16 cuts each, after
/// [`WARMUP_TRIALS`] untimed rounds.
pub fn bench_scs(kind: BasisKind, n: usize, trials: usize, seed: u64, allow_quadratic: bool) -> Result<BenchRow> {
    let mut engine = ScsEngine::with_options(Basis::new(kind, n)?, AlphaMode::Fixed(0.01), ScsOptions { allow_quadratic })?;
    let mut rng = rng_from_seed(seed);
    let cut_points: Vec<Vec<usize>> = (0..2).map(|_| (0..16).map(|_| rng.random_range(0..n)).collect()).collect();
    let label = |which: usize, v: usize| -> i8 {
        let flips = cut_points[which].iter().filter(|&&c| c <= v).count();
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let mut times = Vec::with_capacity(trials);
    let mut active = 0;
    for t in 0..WARMUP_TRIALS + trials {
        let v = rng.random_range(0..n);
        let y = label(t / 500 % 2, v);
        let start = Instant::now();
        let outcome = engine.step(v, y)?;
        let elapsed = start.elapsed();
        if t >= WARMUP_TRIALS {
            times.push(elapsed.as_secs_f64() * 1e6);
            active = outcome.active;
        }
    }
    Ok(BenchRow { kind, n, trials, median_usec: median(&mut times), active })
}

/// Least-squares fit `y = a + b x` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { intercept, slope, r2 }
}

/// How Q-BAY's per-trial time grows with its mistake count.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `(mean mistake count, median per-trial microseconds)` per bucket.
    pub buckets: Vec<(f64, f64)>,
    /// Fit of time against mistake count.
    pub linear: LinearFit,
    /// Fit of log time against log mistake count; its slope is the growth
    /// exponent.
    pub log_log: LinearFit,
}

/// Runs Q-BAY (`α > 0`, so every mistake adds a candidate reset point) on
/// uniformly random labels until `mistakes` mistakes, bucketing trial times
/// by the mistake count at prediction time.
pub fn bench_qbayes_growth(n: usize, mistakes: usize, bucket: usize, seed: u64) -> Result<GrowthReport> {
    let mut qb = QBayes::new(n, QBayesParams::new(0.25, 0.1)?)?;
    let mut rng = rng_from_seed(seed);
    let buckets_n = mistakes.div_ceil(bucket);
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); buckets_n];
    let mut warm = 0;
    while (qb.mistakes() as usize) < mistakes {
        let v = rng.random_range(0..n);
        let y = if rng.random_bool(0.5) { 1 } else { -1 };
        let m = qb.mistakes() as usize;
        let start = Instant::now();
        qb.step(v, y)?;
        let us = start.elapsed().as_secs_f64() * 1e6;
        warm += 1;
        if warm > 10 {
            samples[m / bucket].push(us);
        }
    }
    let mut buckets = Vec::new();
    for (b, times) in samples.iter_mut().enumerate() {
        if !times.is_empty() {
            let center = (b * bucket) as f64 + bucket as f64 / 2.0;
            buckets.push((center, median(times)));
        }
    }
    let xs: Vec<f64> = buckets.iter().map(|b| b.0).collect();
    let ys: Vec<f64> = buckets.iter().map(|b| b.1).collect();
    let linear = linear_fit(&xs, &ys);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(1e-3).ln()).collect();
    let log_log = linear_fit(&lx, &ly);
    Ok(GrowthReport { buckets, linear, log_log })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn exact_line_fits_perfectly() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn btree_bench_reports_log_active_set() {
        let row = bench_scs(BasisKind::BinaryTree, 1024, 200, 1, false).unwrap();
        assert_eq!(row.active, 2 * 11);
        assert!(row.median_usec > 0.0);
    }

    #[test]
    fn full_basis_is_gated() {
        assert!(bench_scs(BasisKind::Full, 8192, 10, 1, false).is_err());
    }
}
