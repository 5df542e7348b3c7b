//! Closed-form mistake bounds and parameter tunings. Logarithms are base 2.

use crate::bases::{j_divergence, BasisError, Comparator};

/// Upper clamp for tuned `θ`, keeping it strictly below one half.
pub const THETA_CEILING: f64 = 0.5 - 1e-9;

fn log2_inv(x: f64) -> f64 {
    -x.log2()
}

/// `k * log2(1/x)` with the convention `0 * ∞ = 0`.
fn weighted_log2_inv(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * log2_inv(x)
    }
}

/// Specialists mistake bound from its aggregated ingredients: the inverse mass of
/// the first comparator, the sum of inverse masses over all trials and the
/// total number of newly introduced specialists.
pub fn specialists_bound_terms(inv_pi_first: f64, sum_inv_pi: f64, sum_j: f64, alpha: f64, basis_size: usize) -> f64 {
    let e = basis_size as f64;
    let share = weighted_log2_inv(sum_inv_pi, 1.0 - alpha);
    let switch = if sum_j == 0.0 { 0.0 } else { sum_j * (e / alpha).log2() };
    inv_pi_first * e.log2() + share + switch
}

/// Aggregated ingredients of a comparator schedule given as
/// `(trials, comparator)` segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparatorSummary {
    pub inv_pi_first: f64,
    pub sum_inv_pi: f64,
    pub sum_j: f64,
}

pub fn summarize_comparators(schedule: &[(usize, Comparator)]) -> Result<ComparatorSummary, BasisError> {
    let mut summary = ComparatorSummary { inv_pi_first: 0.0, sum_inv_pi: 0.0, sum_j: 0.0 };
    if let Some((_, first)) = schedule.first() {
        summary.inv_pi_first = first.len() as f64;
    }
    for (i, (trials, c)) in schedule.iter().enumerate() {
        summary.sum_inv_pi += *trials as f64 * c.len() as f64;
        if i > 0 {
            summary.sum_j += j_divergence(&schedule[i - 1].1, c)? as f64;
        }
    }
    Ok(summary)
}

/// Mistake bound for switching cluster specialists over a schedule of
/// consistent, well-formed comparators. Returns `+∞` when `α` is 0 and new
/// specialists appear, or when `α` is 1.
pub fn specialists_bound(schedule: &[(usize, Comparator)], alpha: f64) -> Result<f64, BasisError> {
    let Some((_, first)) = schedule.first() else {
        return Ok(0.0);
    };
    let s = summarize_comparators(schedule)?;
    Ok(specialists_bound_terms(s.inv_pi_first, s.sum_inv_pi, s.sum_j, alpha, first.basis().size()))
}

/// The `α` minimising the bound: `ΣJ / (Σ_t 1/π_t + ΣJ)`, or 0 without switches.
pub fn optimal_alpha_terms(sum_inv_pi: f64, sum_j: f64) -> f64 {
    if sum_j == 0.0 {
        0.0
    } else {
        sum_j / (sum_inv_pi + sum_j)
    }
}

pub fn optimal_alpha(schedule: &[(usize, Comparator)]) -> Result<f64, BasisError> {
    let s = summarize_comparators(schedule)?;
    Ok(optimal_alpha_terms(s.sum_inv_pi, s.sum_j))
}

/// Per-segment statistics of a switching labeling sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentStats {
    n: usize,
    trials: usize,
    starts: Vec<usize>,
    cuts: Vec<usize>,
}

impl SegmentStats {
    /// `starts` are 0-based first trials of each segment (the first must be
    /// 0); `cuts` are the spine cut sizes of the segment labelings.
    pub fn new(n: usize, trials: usize, starts: Vec<usize>, cuts: Vec<usize>) -> Result<Self, String> {
        if n < 2 {
            return Err(format!("need n >= 2, got {n}"));
        }
        if starts.is_empty() || starts[0] != 0 {
            return Err("first segment must start at trial 0".into());
        }
        if starts.len() != cuts.len() {
            return Err("starts and cuts have different lengths".into());
        }
        if starts.windows(2).any(|w| w[0] >= w[1]) || *starts.last().unwrap() >= trials {
            return Err("segment starts must increase and lie before the last trial".into());
        }
        if let Some(&c) = cuts.iter().find(|&&c| c > n - 1) {
            return Err(format!("cut size {c} exceeds n - 1"));
        }
        Ok(SegmentStats { n, trials, starts, cuts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn segments(&self) -> usize {
        self.starts.len()
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    pub fn mean_cut(&self) -> f64 {
        self.cuts.iter().sum::<usize>() as f64 / self.cuts.len() as f64
    }

    pub fn lengths(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.starts.windows(2).map(|w| w[1] - w[0]).collect();
        out.push(self.trials - self.starts.last().unwrap());
        out
    }
}

/// The switch-reset halving bound
/// `(|K|-1) log 1/α + (T-|K|) log 1/(1-α) + |K| + |K| Φ̄ log 1/θ + |K| (n-1-Φ̄) log 1/(1-θ)`
/// evaluated with `T = trials`.
pub fn switch_reset_bound(stats: &SegmentStats, alpha: f64, theta: f64, trials: f64) -> f64 {
    let k = stats.segments() as f64;
    let t = trials;
    let phi = stats.mean_cut();
    let n1 = (stats.n - 1) as f64;
    weighted_log2_inv(k - 1.0, alpha)
        + weighted_log2_inv(t - k, 1.0 - alpha)
        + k
        + weighted_log2_inv(k * phi, theta)
        + weighted_log2_inv(k * (n1 - phi), 1.0 - theta)
}

fn clamp_theta(raw: f64, floor: f64) -> f64 {
    if raw < floor {
        log::warn!("tuned theta {raw} below floor; using {floor}");
        floor
    } else if raw > THETA_CEILING {
        log::warn!("tuned theta {raw} not below one half; using {THETA_CEILING}");
        THETA_CEILING
    } else {
        raw
    }
}

/// `θ = Φ̄ / (n - 1)`, clamped to `[1/(2(n-1)), ½)`.
pub fn switch_reset_theta(stats: &SegmentStats) -> f64 {
    let n1 = (stats.n - 1) as f64;
    clamp_theta(stats.mean_cut() / n1, 0.5 / n1)
}

/// `θ = Φ̄_G / |E|` from mean cut sizes on the original graph, clamped to
/// `[1/(2|E|), ½)`.
pub fn experiment_theta(mean_graph_cut: f64, edges: usize) -> f64 {
    let e = edges.max(1) as f64;
    clamp_theta(mean_graph_cut / e, 0.5 / e)
}

/// `α = (|K| - 1) / (M - 1)`, or 0 for a single segment.
pub fn switch_reset_alpha(segments: usize, mistakes: f64) -> f64 {
    if segments <= 1 {
        0.0
    } else {
        ((segments - 1) as f64 / (mistakes - 1.0).max(1.0)).min(0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub mistakes: f64,
    pub alpha: f64,
    pub theta: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `M = bound(T = M)` under the self-referential tuning
/// `α = (|K|-1)/(M-1)`, `θ = Φ̄/(n-1)` by iteration from `M = trials`.
pub fn switch_reset_fixed_point(stats: &SegmentStats) -> FixedPoint {
    let theta = switch_reset_theta(stats);
    let mut m = stats.trials as f64;
    for iteration in 1..=50 {
        let alpha = switch_reset_alpha(stats.segments(), m);
        let t = m.max(stats.segments() as f64);
        let next = switch_reset_bound(stats, alpha, theta, t);
        if (next - m).abs() <= 1e-9 * m.max(1.0) {
            return FixedPoint { mistakes: next, alpha, theta, iterations: iteration, converged: true };
        }
        m = next;
    }
    FixedPoint { mistakes: m, alpha: switch_reset_alpha(stats.segments(), m), theta, iterations: 50, converged: false }
}

/// Order-of-growth expression `ΣΦ_k log(n/Φ̄) + |K| log|K| + |K| log log T`,
/// for reporting only.
pub fn switch_reset_asymptotic(stats: &SegmentStats) -> f64 {
    let k = stats.segments() as f64;
    let phi = stats.mean_cut().max(1.0);
    let sum_phi: f64 = stats.cuts.iter().sum::<usize>() as f64;
    let loglog = (stats.trials as f64).log2().max(1.0).log2().max(0.0);
    sum_phi * (stats.n as f64 / phi).log2() + k * k.log2() + k * loglog
}

/// `α = Σ_{k≥2} (Φ_k + 1) / Σ_{t=2}^T (Φ_t + 1)`.
pub fn scs_alpha_experiment(stats: &SegmentStats) -> f64 {
    if stats.segments() <= 1 || stats.trials < 2 {
        return 0.0;
    }
    let numer: f64 = stats.cuts[1..].iter().map(|&c| (c + 1) as f64).sum();
    let all: f64 = stats.lengths().iter().zip(&stats.cuts).map(|(&len, &c)| (len * (c + 1)) as f64).sum();
    let denom = all - (stats.cuts[0] + 1) as f64;
    numer / denom
}

/// Mistake bound for an unweighted majority vote: `2 ΣM_i / r`.
pub fn bound_majority(member_mistakes: &[u64]) -> f64 {
    assert!(!member_mistakes.is_empty(), "ensemble must have at least one member");
    2.0 * member_mistakes.iter().sum::<u64>() as f64 / member_mistakes.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{min_cover_full, BasisKind};
    use crate::graph::Labeling;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn specialists_bound_without_switches() {
        let u = Labeling::new(vec![1, 1, -1, -1]).unwrap();
        let c = min_cover_full(&u).unwrap();
        close(specialists_bound(&[(50, c.clone())], 0.0).unwrap(), 2.0 * 20f64.log2(), 1e-12);
        close(specialists_bound(&[(50, c)], 0.0).unwrap(), 8.6439, 1e-4);
        let size = crate::bases::basis_size(BasisKind::Full, 9);
        close(specialists_bound_terms(3.0, 300.0, 0.0, 0.0, size), 3.0 * (size as f64).log2(), 1e-12);
    }

    #[test]
    fn specialists_bound_infinite_when_alpha_degenerate() {
        assert_eq!(specialists_bound_terms(1.0, 10.0, 2.0, 0.0, 20), f64::INFINITY);
        assert_eq!(specialists_bound_terms(1.0, 10.0, 2.0, 1.0, 20), f64::INFINITY);
    }

    #[test]
    fn optimal_alpha_values_and_grid_minimality() {
        close(optimal_alpha_terms(8.0, 2.0), 0.2, 1e-15);
        assert_eq!(optimal_alpha_terms(8.0, 0.0), 0.0);
        let (inv_first, sum_inv, sum_j, size) = (3.0, 400.0, 7.0, 110);
        let best = optimal_alpha_terms(sum_inv, sum_j);
        let at_best = specialists_bound_terms(inv_first, sum_inv, sum_j, best, size);
        for i in 1..1000 {
            let a = i as f64 / 1000.0;
            assert!(specialists_bound_terms(inv_first, sum_inv, sum_j, a, size) >= at_best - 1e-9);
        }
    }

    #[test]
    fn switch_reset_examples() {
        let stats = SegmentStats::new(5, 10, vec![0], vec![1]).unwrap();
        let expected = 1.0 + 2.0 + 3.0 * (4.0f64 / 3.0).log2();
        close(switch_reset_bound(&stats, 0.0, 0.25, 1.0), expected, 1e-12);
        close(expected, 4.245, 1e-3);
    }

    #[test]
    fn theta_is_clamped() {
        let flat = SegmentStats::new(9, 10, vec![0], vec![0]).unwrap();
        close(switch_reset_theta(&flat), 1.0 / 16.0, 1e-15);
        let busy = SegmentStats::new(3, 10, vec![0], vec![2]).unwrap();
        assert!(switch_reset_theta(&busy) < 0.5);
    }

    #[test]
    fn fixed_point_converges() {
        let stats = SegmentStats::new(256, 2000, vec![0, 500, 1000, 1500], vec![3, 5, 4, 6]).unwrap();
        let fp = switch_reset_fixed_point(&stats);
        assert!(fp.converged);
        let again = switch_reset_bound(&stats, switch_reset_alpha(4, fp.mistakes), fp.theta, fp.mistakes);
        close(again, fp.mistakes, 1e-6 * fp.mistakes);
    }

    #[test]
    fn experiment_alpha() {
        let starts: Vec<usize> = (0..10).map(|k| k * 100).collect();
        let stats = SegmentStats::new(50, 1000, starts, vec![4; 10]).unwrap();
        close(scs_alpha_experiment(&stats), 9.0 / 999.0, 1e-15);
        let single = SegmentStats::new(50, 1000, vec![0], vec![4]).unwrap();
        assert_eq!(scs_alpha_experiment(&single), 0.0);
    }

    #[test]
    fn majority_bound() {
        assert_eq!(bound_majority(&[2, 2, 2]), 4.0);
        assert_eq!(bound_majority(&[7]), 14.0);
    }

    #[test]
    fn bounds_are_monotone_in_cuts_and_divergence() {
        for cut in 0..20 {
            let a = SegmentStats::new(64, 500, vec![0, 250], vec![cut, cut]).unwrap();
            let b = SegmentStats::new(64, 500, vec![0, 250], vec![cut + 1, cut + 1]).unwrap();
            assert!(switch_reset_bound(&b, 0.01, 0.1, 500.0) >= switch_reset_bound(&a, 0.01, 0.1, 500.0));
            let j = cut as f64;
            assert!(specialists_bound_terms(3.0, 900.0, j + 1.0, 0.05, 100) >= specialists_bound_terms(3.0, 900.0, j, 0.05, 100));
        }
    }
}
