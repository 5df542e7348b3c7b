//! Slow, direct reference implementations used by the verification suites
//! and tests. Everything here favours obviousness over speed and is only
//! meant for small inputs.

use std::collections::BTreeMap;

use crate::bases::{Basis, Specialist};
use crate::graph::{Graph, Labeling};

/// Largest spine the exhaustive labeling enumerations accept.
pub const EXHAUSTIVE_MAX_N: usize = 16;

fn check_exhaustive(n: usize) {
    assert!((1..=EXHAUSTIVE_MAX_N).contains(&n), "exhaustive oracle needs 1 <= n <= {EXHAUSTIVE_MAX_N}, got {n}");
}

/// Prior probability of a spine labeling under the Ising chain:
/// `½ θ^Φ (1-θ)^(n-1-Φ)`.
pub fn ising_prior(u: &[i8], theta: f64) -> f64 {
    let cut = u.windows(2).filter(|w| w[0] != w[1]).count();
    let keep = u.len() - 1 - cut;
    0.5 * theta.powi(cut as i32) * (1.0 - theta).powi(keep as i32)
}

fn labels_of_mask(n: usize, mask: u32) -> Vec<i8> {
    (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

/// `Σ_u p(u) Π_{(v,y) ∈ obs} [u_v = y]` by enumerating all `2^n` labelings.
pub fn ising_evidence(n: usize, theta: f64, observations: &[(usize, i8)]) -> f64 {
    check_exhaustive(n);
    (0..1u32 << n)
        .map(|mask| labels_of_mask(n, mask))
        .filter(|u| observations.iter().all(|&(v, y)| u[v] == y))
        .map(|u| ising_prior(&u, theta))
        .sum()
}

/// `P(u_v = +1 | observations)` under the Ising chain prior, by enumeration.
pub fn ising_marginal(n: usize, theta: f64, observations: &[(usize, i8)], v: usize) -> f64 {
    let mut with = observations.to_vec();
    with.push((v, 1));
    ising_evidence(n, theta, &with) / ising_evidence(n, theta, observations)
}

/// Result of the switch-reset enumeration for one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchResetMarginal {
    /// Posterior probability that the queried position is `+1`.
    pub plus: f64,
    /// Probability of the observed labels.
    pub evidence: f64,
}

/// Exhaustive switch-reset model on a spine of `n` positions.
///
/// `observations` are the labels revealed on trials `1..t-1` and `query` is
/// the position asked on trial `t`. Every pattern of resets between
/// consecutive trials is enumerated with prior `α^s (1-α)^(t-1-s)`; within a
/// block of trials without a reset the labeling is drawn once from the
/// Ising chain, whose evidence is itself computed by enumeration.
pub fn switch_reset_marginal(n: usize, theta: f64, alpha: f64, observations: &[(usize, i8)], query: usize) -> SwitchResetMarginal {
    check_exhaustive(n);
    assert!(observations.len() < 20, "too many trials for pattern enumeration");
    let t = observations.len() + 1;
    let gaps = t - 1;
    let mut joint_plus = 0.0;
    let mut evidence = 0.0;
    for pattern in 0..1u32 << gaps {
        let switches = pattern.count_ones() as i32;
        let prior = alpha.powi(switches) * (1.0 - alpha).powi(gaps as i32 - switches);
        if prior == 0.0 {
            continue;
        }
        // Split trials 0..t into blocks; a set bit k means a reset between
        // trial k and trial k + 1.
        let mut blocks: Vec<Vec<(usize, i8)>> = vec![Vec::new()];
        for (k, &obs) in observations.iter().enumerate() {
            if k > 0 && pattern >> (k - 1) & 1 == 1 {
                blocks.push(Vec::new());
            }
            blocks.last_mut().unwrap().push(obs);
        }
        let query_starts_block = gaps > 0 && pattern >> (gaps - 1) & 1 == 1;
        let closed: f64 = if query_starts_block {
            blocks.iter().map(|b| ising_evidence(n, theta, b)).product()
        } else {
            blocks[..blocks.len() - 1].iter().map(|b| ising_evidence(n, theta, b)).product()
        };
        let (last_without, last_with) = if query_starts_block {
            (1.0, ising_evidence(n, theta, &[(query, 1)]))
        } else {
            let last = blocks.last().unwrap();
            let mut with = last.clone();
            with.push((query, 1));
            (ising_evidence(n, theta, last), ising_evidence(n, theta, &with))
        };
        evidence += prior * closed * last_without;
        joint_plus += prior * closed * last_with;
    }
    SwitchResetMarginal { plus: joint_plus / evidence, evidence }
}

/// Conservative nearest-neighbour predictor on the spine: it remembers the
/// label of every position where it erred and predicts the label of the
/// nearest remembered position. Equidistant disagreeing neighbours and an
/// empty memory give `+1`.
#[derive(Debug, Clone, Default)]
pub struct NearestNeighbourSpine {
    memory: Vec<(usize, i8)>,
    mistakes: u64,
}

impl NearestNeighbourSpine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    pub fn predict(&self, v: usize) -> i8 {
        let Some(best) = self.memory.iter().map(|&(p, _)| p.abs_diff(v)).min() else {
            return 1;
        };
        let mut labels = self.memory.iter().filter(|&&(p, _)| p.abs_diff(v) == best).map(|&(_, y)| y);
        let first = labels.next().unwrap();
        if labels.all(|y| y == first) {
            first
        } else {
            1
        }
    }

    pub fn step(&mut self, v: usize, y: i8) -> i8 {
        let prediction = self.predict(v);
        if prediction != y {
            self.memory.retain(|&(p, _)| p != v);
            self.memory.push((v, y));
            self.mistakes += 1;
        }
        prediction
    }
}

/// Every spanning tree of `graph`, found by testing all `(n-1)`-subsets of
/// its edges for acyclicity. Each tree is a sorted edge list.
pub fn spanning_trees(graph: &Graph) -> Vec<Vec<(usize, usize)>> {
    let n = graph.n();
    let edges = graph.edges();
    assert!(edges.len() <= 24, "edge subset enumeration is limited to 24 edges");
    let mut out = Vec::new();
    for mask in 0..1u32 << edges.len() {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                x = parent[x];
            }
            x
        }
        let mut acyclic = true;
        let mut chosen = Vec::new();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if mask >> k & 1 == 0 {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                acyclic = false;
                break;
            }
            parent[ra] = rb;
            chosen.push((a.min(b), a.max(b)));
        }
        if acyclic {
            chosen.sort_unstable();
            out.push(chosen);
        }
    }
    out
}

/// A binary-tree basis interval together with its depth (root = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DepthSpecialist {
    pub specialist: Specialist,
    pub depth: usize,
}

fn tree_intervals(p: usize, q: usize, depth: usize, out: &mut Vec<(usize, usize, usize)>) {
    out.push((p, q, depth));
    if p < q {
        let m = (p + q) / 2;
        tree_intervals(p, m, depth + 1, out);
        tree_intervals(m + 1, q, depth + 1, out);
    }
}

/// Largest spine for [`min_btree_covers`].
pub const MIN_COVER_MAX_N: usize = 64;

/// All minimum-cardinality consistent covers of `u` by binary-tree basis
/// specialists.
///
/// The search is a dynamic program over start positions: `best[p]` is the
/// fewest uniformly labelled tree intervals that tile `p..n`, and every tiling
/// achieving the optimum is enumerated.
pub fn min_btree_covers(u: &Labeling) -> Vec<Vec<DepthSpecialist>> {
    let n = u.len();
    assert!((1..=MIN_COVER_MAX_N).contains(&n), "minimum cover oracle needs 1 <= n <= {MIN_COVER_MAX_N}");
    let mut nodes = Vec::new();
    tree_intervals(0, n - 1, 0, &mut nodes);
    let mut starting_at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(p, q, depth) in &nodes {
        if (p..=q).all(|i| u[i] == u[p]) {
            starting_at[p].push((q, depth));
        }
    }
    let mut best = vec![usize::MAX; n + 1];
    best[n] = 0;
    for p in (0..n).rev() {
        for &(q, _) in &starting_at[p] {
            if best[q + 1] != usize::MAX {
                best[p] = best[p].min(best[q + 1] + 1);
            }
        }
    }
    fn collect(
        p: usize,
        u: &Labeling,
        starting_at: &[Vec<(usize, usize)>],
        best: &[usize],
        prefix: &mut Vec<DepthSpecialist>,
        out: &mut Vec<Vec<DepthSpecialist>>,
    ) {
        if p == u.len() {
            out.push(prefix.clone());
            return;
        }
        for &(q, depth) in &starting_at[p] {
            if best[q + 1] != usize::MAX && best[q + 1] + 1 == best[p] {
                prefix.push(DepthSpecialist { specialist: Specialist::new(p, q, u[p]), depth });
                collect(q + 1, u, starting_at, best, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    collect(0, u, &starting_at, &best, &mut Vec::new(), &mut out);
    out
}

/// Whether every maximal run of `u` is covered by at most two specialists of
/// each depth in `cover`.
pub fn two_per_depth(u: &Labeling, cover: &[DepthSpecialist]) -> bool {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let runs = crate::bases::segments(u);
    for c in cover {
        let run = runs.iter().position(|&(a, b, _)| a <= c.specialist.l && c.specialist.r <= b);
        let Some(run) = run else {
            return false;
        };
        *counts.entry((run, c.depth)).or_default() += 1;
    }
    counts.values().all(|&c| c <= 2)
}

/// Textbook fixed-share specialists: on a mistake every weight is replaced
/// by `(1-α) ω̂ + α / |E|` immediately.
#[derive(Debug, Clone)]
pub struct NaiveFixedShare {
    specialists: Vec<Specialist>,
    weights: Vec<f64>,
    alpha: f64,
    mistakes: u64,
}

impl NaiveFixedShare {
    pub fn new(basis: Basis, alpha: f64) -> Self {
        let specialists: Vec<Specialist> = (0..basis.size()).map(|i| basis.specialist(i).expect("index in range")).collect();
        let size = specialists.len();
        NaiveFixedShare { specialists, weights: vec![1.0 / size as f64; size], alpha, mistakes: 0 }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    /// One trial. Returns the prediction, or `None` if a mistake left no
    /// correct awake mass.
    pub fn step(&mut self, v: usize, y: i8) -> Option<i8> {
        let awake: Vec<usize> = (0..self.specialists.len()).filter(|&i| self.specialists[i].is_awake(v)).collect();
        let margin: f64 = awake.iter().map(|&i| self.weights[i] * self.specialists[i].y as f64).sum();
        let prediction = if margin < 0.0 { -1 } else { 1 };
        if prediction == y {
            return Some(prediction);
        }
        let active: f64 = awake.iter().map(|&i| self.weights[i]).sum();
        let correct: f64 = awake.iter().filter(|&&i| self.specialists[i].y == y).map(|&i| self.weights[i]).sum();
        if correct <= 0.0 {
            return None;
        }
        for &i in &awake {
            self.weights[i] = if self.specialists[i].y == y { self.weights[i] * active / correct } else { 0.0 };
        }
        let uniform = 1.0 / self.weights.len() as f64;
        for w in &mut self.weights {
            *w = (1.0 - self.alpha) * *w + self.alpha * uniform;
        }
        self.mistakes += 1;
        Some(prediction)
    }
}

/// Labeling by position of `mask` over `n` positions (bit `i` set = `+1`).
pub fn labeling_from_mask(n: usize, mask: u32) -> Labeling {
    Labeling::new(labels_of_mask(n, mask)).expect("labels are ±1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::BasisKind;

    #[test]
    fn ising_prior_sums_to_one() {
        for n in 1..=6 {
            let total: f64 = (0..1u32 << n).map(|m| ising_prior(&labels_of_mask(n, m), 0.3)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ising_two_neighbour_example() {
        // + at distance 2 on the left, - at distance 1 on the right.
        let p = ising_marginal(4, 0.25, &[(0, 1), (3, -1)], 2);
        assert!((p - 0.357_142_857_142_857).abs() < 1e-12);
    }

    #[test]
    fn no_observations_gives_half() {
        let m = switch_reset_marginal(5, 0.2, 0.3, &[], 2);
        assert!((m.plus - 0.5).abs() < 1e-15);
        assert!((m.evidence - 1.0).abs() < 1e-15);
    }

    #[test]
    fn certain_reset_forgets_the_past() {
        let m = switch_reset_marginal(4, 0.2, 1.0, &[(1, -1)], 1);
        assert!((m.plus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nearest_neighbour_rules() {
        let mut nn = NearestNeighbourSpine::new();
        assert_eq!(nn.step(3, -1), 1);
        assert_eq!(nn.predict(7), -1);
        assert_eq!(nn.step(7, 1), -1);
        assert_eq!(nn.predict(5), 1);
        assert_eq!(nn.predict(4), -1);
        assert_eq!(nn.predict(6), 1);
        assert_eq!(nn.mistakes(), 2);
    }

    #[test]
    fn k4_has_sixteen_spanning_trees() {
        assert_eq!(spanning_trees(&Graph::complete(4)).len(), 16);
        assert_eq!(spanning_trees(&Graph::cycle(5)).len(), 5);
        assert_eq!(spanning_trees(&Graph::path(4)).len(), 1);
    }

    #[test]
    fn min_cover_examples() {
        let constant = Labeling::constant(8, 1);
        assert_eq!(min_btree_covers(&constant), vec![vec![DepthSpecialist { specialist: Specialist::new(0, 7, 1), depth: 0 }]]);
        let u = Labeling::new(vec![-1, 1, 1, 1, 1, 1, 1, -1]).unwrap();
        let covers = min_btree_covers(&u);
        assert_eq!(covers.len(), 1);
        let inner: Vec<_> = covers[0].iter().filter(|c| c.specialist.y == 1).map(|c| (c.specialist.l, c.specialist.r)).collect();
        assert_eq!(inner, vec![(1, 1), (2, 3), (4, 5), (6, 6)]);
        assert!(two_per_depth(&u, &covers[0]));
    }

    #[test]
    fn naive_engine_predicts_plus_when_fresh() {
        let mut e = NaiveFixedShare::new(Basis::new(BasisKind::Full, 3).unwrap(), 0.1);
        assert_eq!(e.step(1, -1), Some(1));
        let total: f64 = e.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
