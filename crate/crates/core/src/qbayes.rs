//! Conservative quasi-Bayes prediction under a switch-reset Ising-chain prior
//! on the spine.
//!
//! The model draws a labeling of the spine with probability
//! `½ θ^Φ (1-θ)^(n-1-Φ)` and, after each trial, resets it with probability
//! `α`. The predictor only conditions on the trials it got wrong, so its
//! clock `t` counts mistakes plus one.
//!
//! The posterior over the time `s` of the last reset is tracked by dynamic
//! programming. Segment `s` (created after the `s`-th mistake) stores the
//! evidence `log p(D_[1,s])` at creation, the log-likelihood of the data it
//! has seen since, and the observed labels keyed by spine position. Given a
//! reset at `s`, the label of a position depends only on its nearest observed
//! neighbours in that segment, which an ordered map finds in `O(log n)`.
//! Everything is held in log space.

use std::collections::BTreeMap;
use std::ops::Bound::{Excluded, Unbounded};

use thiserror::Error;

use crate::graph::Labeling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QBayesError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("observed label at position {position} has zero probability under every segment")]
    ZeroEvidence { position: usize },
    #[error("update called without a preceding predict")]
    Protocol,
    #[error("position {position} out of range for spine length {n}")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("a sequence with {switches} switches has zero probability when alpha = 0")]
    ImpossibleSwitches { switches: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBayesParams {
    theta: f64,
    alpha: f64,
}

impl QBayesParams {
    pub fn new(theta: f64, alpha: f64) -> Result<Self, QBayesError> {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(QBayesError::Parameter(format!("theta must lie in (0, 0.5), got {theta}")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(QBayesError::Parameter(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        Ok(QBayesParams { theta, alpha })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `ln(a + b)` from `ln a` and `ln b`.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln(1 + e^x)` for `x <= 0`.
fn log1p_exp(x: f64) -> f64 {
    x.exp().ln_1p()
}

/// `ln(1 - e^x)` for `x <= 0`.
fn log1m_exp(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        (-x.exp_m1()).ln()
    }
}

/// Probability that two spine positions `distance` apart carry equal
/// (`same_label`) or opposite labels under the chain prior.
pub fn chain_conditional(theta: f64, distance: usize, same_label: bool) -> f64 {
    let c = (1.0 - 2.0 * theta).powi(distance as i32);
    if same_label {
        0.5 * (1.0 + c)
    } else {
        0.5 * (1.0 - c)
    }
}

/// Nearest observed neighbours of `v`: an exact hit, or the closest on each
/// side, as `(distance, label)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Neighbours {
    None,
    One { d: usize, y: i8 },
    Two { a: usize, yl: i8, b: usize, yr: i8 },
}

fn neighbours(map: &BTreeMap<usize, i8>, v: usize) -> Neighbours {
    if let Some(&y) = map.get(&v) {
        return Neighbours::One { d: 0, y };
    }
    let left = map.range(..v).next_back().map(|(&p, &y)| (v - p, y));
    let right = map.range((Excluded(v), Unbounded)).next().map(|(&p, &y)| (p - v, y));
    match (left, right) {
        (None, None) => Neighbours::None,
        (Some((d, y)), None) | (None, Some((d, y))) => Neighbours::One { d, y },
        (Some((a, yl)), Some((b, yr))) => Neighbours::Two { a, yl, b, yr },
    }
}

/// Per-segment conditional label distribution, kept as log-probabilities of
/// each label and the signed difference `P(+) - P(-)` as `(sign, ln |·|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Conditional {
    log_plus: f64,
    log_minus: f64,
    diff_sign: i8,
    log_abs_diff: f64,
}

fn conditional(nb: Neighbours, ln_q: f64) -> Conditional {
    let ln_half = -std::f64::consts::LN_2;
    let by_label = |y: i8, log_same: f64, log_other: f64| {
        if y > 0 {
            (log_same, log_other)
        } else {
            (log_other, log_same)
        }
    };
    match nb {
        Neighbours::None => Conditional { log_plus: ln_half, log_minus: ln_half, diff_sign: 0, log_abs_diff: f64::NEG_INFINITY },
        Neighbours::One { d, y } => {
            let x = d as f64 * ln_q;
            let (log_plus, log_minus) = by_label(y, ln_half + log1p_exp(x), ln_half + log1m_exp(x));
            Conditional { log_plus, log_minus, diff_sign: y, log_abs_diff: x }
        }
        Neighbours::Two { a, yl, b, yr } => {
            let (la, lb) = (a as f64 * ln_q, b as f64 * ln_q);
            if yl == yr {
                let denom = log1p_exp(la + lb);
                let same = ln_half + log1p_exp(la) + log1p_exp(lb) - denom;
                let other = ln_half + log1m_exp(la) + log1m_exp(lb) - denom;
                let (log_plus, log_minus) = by_label(yl, same, other);
                Conditional { log_plus, log_minus, diff_sign: yl, log_abs_diff: log_add(la, lb) - denom }
            } else {
                let denom = log1m_exp(la + lb);
                let left = ln_half + log1p_exp(la) + log1m_exp(lb) - denom;
                let right = ln_half + log1m_exp(la) + log1p_exp(lb) - denom;
                let (log_plus, log_minus) = by_label(yl, left, right);
                let (diff_sign, log_abs_diff) = if a == b {
                    (0, f64::NEG_INFINITY)
                } else if a < b {
                    (yl, la + log1m_exp(lb - la) - denom)
                } else {
                    (yr, lb + log1m_exp(la - lb) - denom)
                };
                Conditional { log_plus, log_minus, diff_sign, log_abs_diff }
            }
        }
    }
}

/// Probability that position `v` is labelled `+1` given the observed labels
/// in `map`, under the chain prior with cut probability `theta`.
pub fn nn_marginal(map: &BTreeMap<usize, i8>, v: usize, theta: f64) -> f64 {
    let c = conditional(neighbours(map, v), (1.0 - 2.0 * theta).ln());
    c.log_plus.exp()
}

#[derive(Debug, Clone)]
struct Segment {
    start: usize,
    evidence: f64,
    loglik: f64,
    labels: BTreeMap<usize, i8>,
}

#[derive(Debug, Clone)]
struct Pending {
    position: usize,
    prediction: i8,
    log_weight_total: f64,
    conditionals: Vec<Conditional>,
    log_weights: Vec<f64>,
}

/// The conservative quasi-Bayes predictor on a spine of `n` positions.
#[derive(Debug, Clone)]
pub struct QBayes {
    params: QBayesParams,
    n: usize,
    ln_q: f64,
    ln_alpha: f64,
    ln_stay: f64,
    segments: Vec<Segment>,
    log_evidence: f64,
    mistakes: usize,
    pending: Option<Pending>,
}

impl QBayes {
    pub fn new(n: usize, params: QBayesParams) -> Result<Self, QBayesError> {
        if n == 0 {
            return Err(QBayesError::Parameter("spine length must be positive".into()));
        }
        Ok(QBayes {
            params,
            n,
            ln_q: (1.0 - 2.0 * params.theta).ln(),
            ln_alpha: params.alpha.ln(),
            ln_stay: (-params.alpha).ln_1p(),
            segments: vec![Segment { start: 0, evidence: 0.0, loglik: 0.0, labels: BTreeMap::new() }],
            log_evidence: 0.0,
            mistakes: 0,
            pending: None,
        })
    }

    pub fn params(&self) -> QBayesParams {
        self.params
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes as u64
    }

    /// Natural log of the probability of the mistaken trials seen so far.
    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    /// Number of live candidate reset points.
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Observed labels held by the segment that starts after mistake `start`.
    pub fn segment_labels(&self, start: usize) -> Option<&BTreeMap<usize, i8>> {
        self.segments.iter().find(|s| s.start == start).map(|s| &s.labels)
    }

    fn log_prior(&self, start: usize) -> f64 {
        let t = self.mistakes + 1;
        if start == 0 {
            (t - 1) as f64 * self.ln_stay
        } else {
            self.ln_alpha + (t - start - 1) as f64 * self.ln_stay
        }
    }

    fn log_weights(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.evidence + s.loglik + self.log_prior(s.start)).collect()
    }

    /// Difference between the cached evidence and the evidence recomputed by
    /// marginalising over reset points; zero up to rounding.
    pub fn consistency_gap(&self) -> f64 {
        (log_sum_exp(self.log_weights()) - self.log_evidence).abs()
    }

    /// Predicts the label at `position`, returning it with the posterior
    /// probability that the label is `+1`.
    pub fn predict(&mut self, position: usize) -> Result<(i8, f64), QBayesError> {
        if position >= self.n {
            return Err(QBayesError::PositionOutOfRange { position, n: self.n });
        }
        let log_weights = self.log_weights();
        let total = log_sum_exp(log_weights.iter().copied());
        let conditionals: Vec<Conditional> = self.segments.iter().map(|s| conditional(neighbours(&s.labels, position), self.ln_q)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (c, w) in conditionals.iter().zip(&log_weights) {
            match c.diff_sign {
                1 => pos.push(w - total + c.log_abs_diff),
                -1 => neg.push(w - total + c.log_abs_diff),
                _ => {}
            }
        }
        let (lp, ln) = (log_sum_exp(pos), log_sum_exp(neg));
        let prediction = if ln > lp { -1 } else { 1 };
        let marginal = 0.5 * (1.0 + lp.exp() - ln.exp());
        self.pending = Some(Pending { position, prediction, log_weight_total: total, conditionals, log_weights });
        Ok((prediction, marginal))
    }

    /// Reveals the label for the pending trial; returns whether it was a
    /// mistake. Only mistakes change the state.
    pub fn update(&mut self, label: i8) -> Result<bool, QBayesError> {
        if label != 1 && label != -1 {
            return Err(QBayesError::Parameter(format!("label must be -1 or +1, got {label}")));
        }
        let pending = self.pending.take().ok_or(QBayesError::Protocol)?;
        if pending.prediction == label {
            return Ok(false);
        }
        let pick = |c: &Conditional| if label > 0 { c.log_plus } else { c.log_minus };
        let log_p = log_sum_exp(pending.conditionals.iter().zip(&pending.log_weights).map(|(c, w)| w + pick(c))) - pending.log_weight_total;
        if log_p == f64::NEG_INFINITY || log_p.is_nan() {
            return Err(QBayesError::ZeroEvidence { position: pending.position });
        }
        self.log_evidence += log_p;
        for (seg, c) in self.segments.iter_mut().zip(&pending.conditionals) {
            seg.loglik += pick(c);
            seg.labels.insert(pending.position, label);
        }
        self.segments.retain(|s| s.loglik > f64::NEG_INFINITY);
        self.mistakes += 1;
        if self.params.alpha > 0.0 {
            self.segments.push(Segment { start: self.mistakes, evidence: self.log_evidence, loglik: 0.0, labels: BTreeMap::new() });
        }
        Ok(true)
    }

    pub fn step(&mut self, position: usize, label: i8) -> Result<(i8, bool), QBayesError> {
        let (prediction, _) = self.predict(position)?;
        Ok((prediction, self.update(label)?))
    }
}

/// Natural log of `α^(|K|-1) (1-α)^(T-|K|) Π_k p(u_k)` for a per-trial
/// sequence of spine labelings, where `K` holds the trials whose labeling
/// differs from the previous one (and the first trial).
pub fn sequence_log_probability(labelings: &[Labeling], params: QBayesParams) -> Result<f64, QBayesError> {
    let Some(first) = labelings.first() else {
        return Ok(0.0);
    };
    let n = first.len();
    let ln_theta = params.theta.ln();
    let ln_keep = (-params.theta).ln_1p();
    let log_single = |u: &Labeling| {
        let cut = (1..n).filter(|&i| u[i] != u[i - 1]).count();
        -std::f64::consts::LN_2 + cut as f64 * ln_theta + (n - 1 - cut) as f64 * ln_keep
    };
    let mut total = log_single(first);
    let mut segments = 1;
    for w in labelings.windows(2) {
        if w[1].len() != n {
            return Err(QBayesError::Parameter("labelings have different lengths".into()));
        }
        if w[1] != w[0] {
            segments += 1;
            total += log_single(&w[1]);
        }
    }
    if segments > 1 && params.alpha == 0.0 {
        return Err(QBayesError::ImpossibleSwitches { switches: segments - 1 });
    }
    let t = labelings.len();
    if segments > 1 {
        total += (segments - 1) as f64 * params.alpha.ln();
    }
    total += (t - segments) as f64 * (-params.alpha).ln_1p();
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn chain_conditional_values() {
        close(chain_conditional(0.25, 2, true), 0.625, 1e-15);
        for (theta, d) in [(0.1, 1), (0.3, 7), (0.49, 3)] {
            close(chain_conditional(theta, d, true) + chain_conditional(theta, d, false), 1.0, 1e-15);
        }
        close(chain_conditional(0.4999999, 1, true), 0.5, 1e-6);
    }

    #[test]
    fn nn_marginal_values() {
        let mut map = BTreeMap::new();
        close(nn_marginal(&map, 4, 0.25), 0.5, 0.0);
        map.insert(1, 1);
        map.insert(4, -1);
        close(nn_marginal(&map, 3, 0.25), 0.357_142_857_142_857, 1e-12);
        close(nn_marginal(&map, 1, 0.25), 1.0, 0.0);
        close(nn_marginal(&map, 5, 0.25), chain_conditional(0.25, 1, false), 1e-15);
    }

    #[test]
    fn first_prediction_is_half_and_plus() {
        let mut q = QBayes::new(5, QBayesParams::new(0.2, 0.1).unwrap()).unwrap();
        assert_eq!(q.predict(3).unwrap(), (1, 0.5));
    }

    #[test]
    fn first_mistake_creates_second_segment() {
        let mut q = QBayes::new(5, QBayesParams::new(0.2, 0.1).unwrap()).unwrap();
        q.predict(3).unwrap();
        assert!(q.update(-1).unwrap());
        assert_eq!(q.segment_count(), 2);
        assert_eq!(q.segment_labels(0).unwrap().len(), 1);
        assert!(q.segment_labels(1).unwrap().is_empty());
        close(q.log_evidence(), 0.5f64.ln(), 1e-15);
    }

    #[test]
    fn correct_trial_changes_nothing() {
        let mut q = QBayes::new(6, QBayesParams::new(0.2, 0.3).unwrap()).unwrap();
        q.step(2, -1).unwrap();
        let before = format!("{:?}", q.segments);
        let (p, _) = q.predict(3).unwrap();
        assert!(!q.update(p).unwrap());
        assert_eq!(format!("{:?}", q.segments), before);
    }

    #[test]
    fn evidence_stays_consistent() {
        let mut q = QBayes::new(10, QBayesParams::new(0.15, 0.2).unwrap()).unwrap();
        let labels = [1, -1, -1, 1, 1, -1, 1, 1, -1, -1];
        for t in 0..60 {
            let v = (t * 7) % 10;
            let y = if t > 30 { -labels[v] } else { labels[v] };
            q.step(v, y).unwrap();
            assert!(q.consistency_gap() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QBayesParams::new(0.5, 0.1).is_err());
        assert!(QBayesParams::new(0.0, 0.1).is_err());
        assert!(QBayesParams::new(0.2, 1.0).is_err());
    }

    #[test]
    fn sequence_probability_examples() {
        let p = QBayesParams::new(0.25, 0.3).unwrap();
        let u = Labeling::constant(3, 1);
        close(sequence_log_probability(std::slice::from_ref(&u), p).unwrap(), (0.5 * 0.75 * 0.75f64).ln(), 1e-12);
        let seq = vec![u.clone(); 4];
        close(sequence_log_probability(&seq, p).unwrap(), (0.5 * 0.75 * 0.75f64).ln() + 3.0 * 0.7f64.ln(), 1e-12);
        let v = Labeling::new(vec![1, -1, -1]).unwrap();
        let zero = QBayesParams::new(0.25, 0.0).unwrap();
        assert!(matches!(sequence_log_probability(&[u, v], zero), Err(QBayesError::ImpossibleSwitches { switches: 1 })));
    }
}
