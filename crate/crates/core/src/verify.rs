//! Verification suites comparing the fast implementations against the
//! reference oracles and the closed-form guarantees. Each suite returns one
//! [`Check`] per property; the CLI and the acceptance tests both use them.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bases::{cover_btree, hamming_divergence, j_divergence, min_cover_full, Basis, BasisKind, Comparator};
use crate::bounds::{switch_reset_bound, switch_reset_fixed_point, specialists_bound, optimal_alpha, SegmentStats};
use crate::graph::{Graph, Labeling};
use crate::harness::{run_experiment, ExperimentConfig};
use crate::oracle::{labeling_from_mask, min_btree_covers, spanning_trees, switch_reset_marginal, two_per_depth, NaiveFixedShare, NearestNeighbourSpine};
use crate::qbayes::{QBayes, QBayesParams};
use crate::rng::{derive_seed, rng_from_seed, SeededRng};
use crate::scs::{scs_eager_reference, scs_predictions, AlphaMode, ScsEngine};
use crate::spine::{linearize, sample_ust};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SpineCuts,
    Ust,
    Covers,
    Divergence,
    ScsEquivalence,
    QBayesOracle,
    QBayesNn,
    Majority,
    Bounds,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 10] = ["lemma1", "ust", "prop2", "prop3", "scs-equivalence", "qbayes-oracle", "qbayes-nn", "prop6", "bounds", "all"];

    const EACH: [Suite; 9] =
        [Suite::SpineCuts, Suite::Ust, Suite::Covers, Suite::Divergence, Suite::ScsEquivalence, Suite::QBayesOracle, Suite::QBayesNn, Suite::Majority, Suite::Bounds];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SpineCuts => "lemma1",
            Suite::Ust => "ust",
            Suite::Covers => "prop2",
            Suite::Divergence => "prop3",
            Suite::ScsEquivalence => "scs-equivalence",
            Suite::QBayesOracle => "qbayes-oracle",
            Suite::QBayesNn => "qbayes-nn",
            Suite::Majority => "prop6",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`; expected one of {}", Suite::NAMES.join(", ")))
    }
}

/// Runs a suite with its standard sizes.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::SpineCuts => vec![spine_cut_inequalities(1000, seed)?],
        Suite::Ust => vec![ust_k4(16000, seed)?, ust_resistance(20, 2000, seed)?],
        Suite::Covers => cover_checks(8)?,
        Suite::Divergence => vec![divergence_bound(6)?],
        Suite::ScsEquivalence => vec![scs_equivalence(50, 500, seed)?, naive_fixed_share(20, 200, seed)?],
        Suite::QBayesOracle => vec![qbayes_oracle(200, seed)?],
        Suite::QBayesNn => vec![qbayes_nn(100, seed)?],
        Suite::Majority => vec![majority_runs(seed)?],
        Suite::Bounds => bounds(20, 256, 2000, seed)?,
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, seed)?);
            }
            out
        }
    })
}

/// Random connected graph: a random recursive tree plus each remaining pair
/// with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut SeededRng) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable_by_key(|&(a, b)| (a.min(b), a.max(b)));
    edges.dedup_by_key(|e| (e.0.min(e.1), e.0.max(e.1)));
    Graph::new(n, edges).expect("random graph is simple and connected")
}

/// i.i.d. labels with a random bias.
pub fn random_labeling(n: usize, rng: &mut SeededRng) -> Labeling {
    let p: f64 = rng.random_range(0.05..0.95);
    Labeling::new((0..n).map(|_| if rng.random_bool(p) { 1 } else { -1 }).collect()).expect("labels are ±1")
}

/// Spine labeling with exactly `cuts` label changes at random places.
pub fn labeling_with_cuts(n: usize, cuts: usize, rng: &mut SeededRng) -> Labeling {
    let cuts = cuts.min(n - 1);
    let mut at = vec![false; n];
    for c in sample(rng, n - 1, cuts) {
        at[c + 1] = true;
    }
    let mut y: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
    let labels = (0..n)
        .map(|i| {
            if at[i] {
                y = -y;
            }
            y
        })
        .collect();
    Labeling::new(labels).expect("labels are ±1")
}

fn elapsed(start: Instant) -> String {
    format!("{:.2}s", start.elapsed().as_secs_f64())
}

/// `Φ_S(u) <= 2 Φ_R(u) <= 2 Φ_G(u)` on random graphs, labelings and seeds.
pub fn spine_cut_inequalities(triples: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(seed, 0x1e11));
    let mut failures = 0;
    let mut first = None;
    for k in 0..triples {
        let n = rng.random_range(2..=40);
        let p = rng.random_range(0.0..0.3);
        let g = random_connected_graph(n, p, &mut rng);
        let u = random_labeling(n, &mut rng);
        let tree = sample_ust(&g, &mut rng)?;
        let spine = linearize(&tree, &mut rng);
        let (phi_s, phi_r, phi_g) = (spine.spine_cut(&u)?, tree.cut_size(&u)?, g.cut_size(&u)?);
        if !(phi_s <= 2 * phi_r && phi_r <= phi_g) {
            failures += 1;
            first.get_or_insert(format!("triple {k}: n={n} spine={phi_s} tree={phi_r} graph={phi_g}"));
        }
    }
    Ok(Check::new("lemma1", failures == 0, format!("{triples} triples, {failures} violations{} ({})", first.map(|f| format!("; first {f}")).unwrap_or_default(), elapsed(start))))
}

/// Wilson's sampler on `K4` hits the 16 spanning trees uniformly.
pub fn ust_k4(draws: usize, seed: u64) -> Result<Check> {
    let g = Graph::complete(4);
    let trees = spanning_trees(&g);
    let index: HashMap<Vec<(usize, usize)>, usize> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut counts = vec![0usize; trees.len()];
    let mut rng = rng_from_seed(derive_seed(seed, 0x457));
    for _ in 0..draws {
        let t = sample_ust(&g, &mut rng)?;
        let mut edges: Vec<(usize, usize)> = t.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        match index.get(&edges) {
            Some(&i) => counts[i] += 1,
            None => return Ok(Check::new("ust-k4", false, format!("sampled a non-tree {edges:?}"))),
        }
    }
    let expected = draws as f64 / trees.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((trees.len() - 1) as f64).expect("positive degrees of freedom");
    let p = 1.0 - dist.cdf(stat);
    Ok(Check::new("ust-k4", trees.len() == 16 && p > 0.001, format!("{} trees, {draws} draws, chi2={stat:.2}, p={p:.4}", trees.len())))
}

/// Monte Carlo mean of the tree cut against the resistance-weighted cut.
pub fn ust_resistance(pairs: usize, samples: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(seed, 0x4e5));
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..pairs {
        let n = rng.random_range(4..=16);
        let g = random_connected_graph(n, 0.3, &mut rng);
        let u = random_labeling(n, &mut rng);
        let exact = g.resistance_weighted_cut(&u)?;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let c = sample_ust(&g, &mut rng)?.cut_size(&u)? as f64;
            sum += c;
            sum_sq += c * c;
        }
        let m = samples as f64;
        let mean = sum / m;
        let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
        let se = (var / m).sqrt();
        let z = if se > 0.0 { (mean - exact).abs() / se } else if (mean - exact).abs() < 1e-9 { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
        if z > 3.0 {
            failures += 1;
        }
    }
    Ok(Check::new("ust-resistance", failures == 0, format!("{pairs} graphs x {samples} trees, worst |mean - exact| = {worst:.2} SE ({})", elapsed(start))))
}

/// Dyadic covers of every labeling of an `n`-spine: validity, size bound,
/// comparison with the true minimum and the two-per-depth property.
pub fn cover_checks(n: usize) -> Result<Vec<Check>> {
    assert!((3..=16).contains(&n));
    let bound_factor = ((n as f64 / 2.0).log2().ceil()) as usize;
    let (mut invalid, mut over_bound, mut below_min, mut depth_fail, mut oracle_over) = (0, 0, 0, 0, 0);
    let labelings = 1u32 << n;
    for mask in 0..labelings {
        let u = labeling_from_mask(n, mask);
        let phi = (1..n).filter(|&i| u[i] != u[i - 1]).count();
        let bound = 2 * (phi + 1) * bound_factor;
        let cover = cover_btree(&u)?;
        if !cover.is_consistent_with(&u) {
            invalid += 1;
        }
        if cover.len() > bound {
            over_bound += 1;
        }
        let minimum = min_btree_covers(&u);
        let min_size = minimum[0].len();
        if cover.len() < min_size {
            below_min += 1;
        }
        if min_size > bound {
            oracle_over += 1;
        }
        if !minimum.iter().all(|c| two_per_depth(&u, c)) {
            depth_fail += 1;
        }
    }
    Ok(vec![
        Check::new("prop2-cover-valid", invalid == 0, format!("{labelings} labelings, {invalid} covers not consistent")),
        Check::new("prop2-cover-bound", over_bound == 0 && oracle_over == 0, format!("{over_bound} dyadic and {oracle_over} minimum covers above 2(phi+1)ceil(log2(n/2))")),
        Check::new("prop2-cover-vs-minimum", below_min == 0, format!("{below_min} dyadic covers smaller than the brute-force minimum")),
        Check::new("prop2-two-per-depth", depth_fail == 0, format!("{depth_fail} labelings with a minimum cover using three or more same-depth specialists in one run")),
    ])
}

/// `J(μ, μ') <= min(2 H(u, u'), Φ(u') + 1)` for minimal-consistent
/// full-basis comparators over every ordered pair of labelings.
pub fn divergence_bound(n: usize) -> Result<Check> {
    assert!((2..=10).contains(&n));
    let labelings: Vec<Labeling> = (0..1u32 << n).map(|m| labeling_from_mask(n, m)).collect();
    let covers: Vec<Comparator> = labelings.iter().map(min_cover_full).collect::<std::result::Result<_, _>>()?;
    let mut violations = Vec::new();
    let mut pairs = 0;
    for (a, ua) in labelings.iter().enumerate() {
        for (b, ub) in labelings.iter().enumerate() {
            pairs += 1;
            let j = j_divergence(&covers[a], &covers[b])?;
            let h = hamming_divergence(ua, ub)?;
            let phi = covers[b].len() - 1;
            if j > (2 * h).min(phi + 1) {
                violations.push(format!("u={:?} u'={:?} J={j} H={h} cut={phi}", ua.as_slice(), ub.as_slice()));
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{pairs} pairs, 0 violations")
    } else {
        format!("{pairs} pairs, {} violations, e.g. {}", violations.len(), violations.iter().take(2).cloned().collect::<Vec<_>>().join("; "))
    };
    Ok(Check::new("prop3", violations.is_empty(), detail))
}

/// Spine stream with `segments` equal segments, each with its own labeling
/// of at most `max_cuts` cuts.
fn planted_positions(n: usize, trials: usize, segments: usize, max_cuts: usize, rng: &mut SeededRng) -> (Vec<(usize, i8)>, Vec<Labeling>, Vec<usize>) {
    let labelings: Vec<Labeling> = (0..segments).map(|_| {
        let cuts = rng.random_range(1..=max_cuts);
        labeling_with_cuts(n, cuts, rng)
    }).collect();
    let period = trials.div_ceil(segments);
    let stream = (0..trials)
        .map(|t| {
            let v = rng.random_range(0..n);
            (v, labelings[t / period][v])
        })
        .collect();
    (stream, labelings, (0..segments).map(|k| k * period).collect())
}

/// Delayed and eager engines give identical prediction sequences.
pub fn scs_equivalence(configs: usize, trials: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(seed, 0x5c5));
    let mut mismatches = Vec::new();
    let mut total_mistakes = 0;
    for c in 0..configs {
        let kind = if c % 2 == 0 { BasisKind::Full } else { BasisKind::BinaryTree };
        let n = [8, 16, 64][rng.random_range(0..3)];
        let alpha = [0.0, 0.1, 0.5][rng.random_range(0..3)];
        // Without sharing a switch can leave no correct awake mass, so the
        // unshared case uses a single labeling.
        let segments = if alpha == 0.0 { 1 } else { 5 };
        let (stream, _, _) = planted_positions(n, trials, segments, 4, &mut rng);
        let basis = Basis::new(kind, n)?;
        let delayed = scs_predictions(basis, AlphaMode::Fixed(alpha), &stream)?;
        let eager = scs_eager_reference(basis, alpha, &stream)?;
        total_mistakes += delayed.iter().zip(&stream).filter(|(p, (_, y))| *p != y).count();
        if delayed != eager {
            let t = delayed.iter().zip(&eager).position(|(a, b)| a != b).unwrap_or(0);
            mismatches.push(format!("config {c} ({} n={n} alpha={alpha}) first differs at trial {}", kind.name(), t + 1));
        }
    }
    Ok(Check::new(
        "scs-equivalence",
        mismatches.is_empty(),
        format!(
            "{configs} configs x {trials} trials, {total_mistakes} mistakes, {} mismatches{} ({})",
            mismatches.len(),
            mismatches.first().map(|m| format!("; {m}")).unwrap_or_default(),
            elapsed(start)
        ),
    ))
}

/// The delayed engine's weights match a literal fixed-share implementation
/// within `1e-12`.
pub fn naive_fixed_share(configs: usize, trials: usize, seed: u64) -> Result<Check> {
    let mut rng = rng_from_seed(derive_seed(seed, 0xfa5));
    let mut worst: f64 = 0.0;
    let mut prediction_mismatch = 0;
    for c in 0..configs {
        let kind = if c % 2 == 0 { BasisKind::Full } else { BasisKind::BinaryTree };
        let n = [4, 8, 16][rng.random_range(0..3)];
        let alpha = [0.05, 0.1, 0.5][rng.random_range(0..3)];
        let (stream, _, _) = planted_positions(n, trials, 4, 3, &mut rng);
        let basis = Basis::new(kind, n)?;
        let mut engine = ScsEngine::new(basis, AlphaMode::Fixed(alpha))?;
        let mut naive = NaiveFixedShare::new(basis, alpha);
        for &(v, y) in &stream {
            let p = engine.step(v, y)?.prediction;
            if naive.step(v, y) != Some(p) {
                prediction_mismatch += 1;
            }
        }
        for (i, &w) in naive.weights().iter().enumerate() {
            worst = worst.max((engine.weight(i) - w).abs());
        }
    }
    Ok(Check::new(
        "scs-naive-fixed-share",
        prediction_mismatch == 0 && worst <= 1e-12,
        format!("{configs} configs, {prediction_mismatch} prediction mismatches, max weight difference {worst:.3e}"),
    ))
}

/// Q-BAY marginals and evidence against the exhaustive switch-reset model.
pub fn qbayes_oracle(streams: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(seed, 0x0bae));
    let mut worst: f64 = 0.0;
    let mut worst_evidence: f64 = 0.0;
    let mut predictions = 0;
    for _ in 0..streams {
        let n = rng.random_range(2..=6);
        let theta = [0.1, 0.25, 0.4][rng.random_range(0..3)];
        let alpha = [0.0, 0.1, 0.3][rng.random_range(0..3)];
        let mut qb = QBayes::new(n, QBayesParams::new(theta, alpha)?)?;
        let mut truth = random_labeling(n, &mut rng);
        let mut observed: Vec<(usize, i8)> = Vec::new();
        for _ in 0..60 {
            if qb.mistakes() > 5 {
                break;
            }
            if alpha > 0.0 && rng.random_bool(0.2) {
                truth = random_labeling(n, &mut rng);
            }
            let v = rng.random_range(0..n);
            let (_, marginal) = qb.predict(v)?;
            let oracle = switch_reset_marginal(n, theta, alpha, &observed, v);
            worst = worst.max((marginal - oracle.plus).abs());
            worst_evidence = worst_evidence.max((qb.log_evidence() - oracle.evidence.ln()).abs());
            predictions += 1;
            if qb.update(truth[v])? {
                observed.push((v, truth[v]));
            }
        }
    }
    Ok(Check::new(
        "qbayes-oracle",
        worst <= 1e-9 && worst_evidence <= 1e-9,
        format!("{streams} streams, {predictions} predictions, max marginal error {worst:.2e}, max log-evidence error {worst_evidence:.2e} ({})", elapsed(start)),
    ))
}

/// With `α = 0` Q-BAY predicts exactly like conservative 1-NN on the spine.
pub fn qbayes_nn(streams: usize, seed: u64) -> Result<Check> {
    let mut rng = rng_from_seed(derive_seed(seed, 0x0bb1));
    let mut mismatches = 0;
    let mut trials = 0;
    for _ in 0..streams {
        let n = rng.random_range(2..=64);
        let theta = rng.random_range(0.01..0.49);
        let u = labeling_with_cuts(n, rng.random_range(0..=8), &mut rng);
        let mut qb = QBayes::new(n, QBayesParams::new(theta, 0.0)?)?;
        let mut nn = NearestNeighbourSpine::new();
        for _ in 0..300 {
            let v = rng.random_range(0..n);
            let (p, _) = qb.step(v, u[v])?;
            if p != nn.step(v, u[v]) {
                mismatches += 1;
            }
            trials += 1;
        }
    }
    Ok(Check::new("qbayes-nn", mismatches == 0, format!("{streams} streams, {trials} trials, {mismatches} prediction mismatches")))
}

/// Ensemble mistakes never exceed `2 ΣM_i / r` on a batch of harness runs.
pub fn majority_runs(seed: u64) -> Result<Check> {
    let start = Instant::now();
    let graphs = ["grid:8x8", "cycle:60", "path:50"];
    let mut runs = 0;
    let mut failures = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        for ensemble in [1, 3, 5, 9] {
            let text = format!("graph = {g}\nensemble = {ensemble}\ntrials = 400\nswitch_period = 100\ncenters = 3\nseed = {}\n", derive_seed(seed, (i * 16 + ensemble) as u64));
            let result = run_experiment(&ExperimentConfig::parse(&text)?)?;
            for r in &result.algorithms {
                runs += 1;
                if !r.majority_bound_holds() {
                    failures.push(format!("{g} r={ensemble} {}: {} > {}", r.algorithm, r.final_mistakes(), r.majority_bound()));
                }
            }
        }
    }
    Ok(Check::new("prop6", failures.is_empty(), format!("{runs} ensemble runs, {} violations{} ({})", failures.len(), failures.first().map(|f| format!("; {f}")).unwrap_or_default(), elapsed(start))))
}

/// SCS against the specialists bound with oracle comparators and the optimal `α`, and
/// Q-BAY against the switch-reset halving bound at its self-consistent
/// tuning, on planted spine streams with one or four segments.
pub fn bounds(streams: usize, n: usize, trials: usize, seed: u64) -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(seed, 0xb0d));
    let mut scs_fail = [Vec::new(), Vec::new()];
    let mut scs_slack = [f64::INFINITY; 2];
    let mut qb_fail = Vec::new();
    let mut qb_slack = f64::INFINITY;
    for s in 0..streams {
        let segments = if s % 2 == 0 { 1 } else { 4 };
        let (stream, labelings, starts) = planted_positions(n, trials, segments, 6, &mut rng);
        let lengths: Vec<usize> = starts.iter().enumerate().map(|(k, &st)| starts.get(k + 1).copied().unwrap_or(trials) - st).collect();
        for (slot, kind) in [BasisKind::Full, BasisKind::BinaryTree].into_iter().enumerate() {
            let schedule: Vec<(usize, Comparator)> = labelings
                .iter()
                .zip(&lengths)
                .map(|(u, &len)| Ok((len, if kind == BasisKind::Full { min_cover_full(u)? } else { cover_btree(u)? })))
                .collect::<Result<_>>()?;
            let alpha = optimal_alpha(&schedule)?;
            let bound = specialists_bound(&schedule, alpha)?;
            let mut engine = ScsEngine::new(Basis::new(kind, n)?, AlphaMode::Fixed(alpha))?;
            for &(v, y) in &stream {
                engine.step(v, y)?;
            }
            let m = engine.mistakes() as f64;
            scs_slack[slot] = scs_slack[slot].min(bound - m);
            if m > bound {
                scs_fail[slot].push(format!("stream {s}: {m} > {bound:.1}"));
            }
        }
        let cuts = labelings.iter().map(|u| (1..n).filter(|&i| u[i] != u[i - 1]).count()).collect();
        let stats = SegmentStats::new(n, trials, starts.clone(), cuts).map_err(|m| crate::harness::ConfigError::Invalid { key: "segments".into(), message: m })?;
        let fp = switch_reset_fixed_point(&stats);
        let mut qb = QBayes::new(n, QBayesParams::new(fp.theta, fp.alpha)?)?;
        for &(v, y) in &stream {
            qb.step(v, y)?;
        }
        let m = qb.mistakes() as f64;
        let at_m = switch_reset_bound(&stats, fp.alpha, fp.theta, m);
        qb_slack = qb_slack.min((at_m - m).min(fp.mistakes - m));
        if !fp.converged || m > at_m || m > fp.mistakes {
            qb_fail.push(format!("stream {s}: M={m}, bound(T=M)={at_m:.1}, fixed point {:.1} (converged {})", fp.mistakes, fp.converged));
        }
    }
    let describe = |fail: &Vec<String>, slack: f64| format!("{streams} streams, {} violations, min slack {slack:.1}{}", fail.len(), fail.first().map(|f| format!("; {f}")).unwrap_or_default());
    Ok(vec![
        Check::new("bounds-scs-f", scs_fail[0].is_empty(), describe(&scs_fail[0], scs_slack[0])),
        Check::new("bounds-scs-b", scs_fail[1].is_empty(), describe(&scs_fail[1], scs_slack[1])),
        Check::new("bounds-qbayes", qb_fail.is_empty(), format!("{} ({})", describe(&qb_fail, qb_slack), elapsed(start))),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn labeling_with_cuts_has_exact_cut() {
        let mut rng = rng_from_seed(1);
        for cuts in 0..10 {
            let u = labeling_with_cuts(12, cuts, &mut rng);
            assert_eq!((1..12).filter(|&i| u[i] != u[i - 1]).count(), cuts);
        }
    }

    #[test]
    fn small_suites_pass() {
        assert!(spine_cut_inequalities(50, 3).unwrap().passed);
        assert!(cover_checks(4).unwrap().iter().all(|c| c.passed));
        assert!(qbayes_nn(5, 3).unwrap().passed);
        assert!(qbayes_oracle(10, 3).unwrap().passed);
        assert!(scs_equivalence(4, 100, 3).unwrap().passed);
    }
}
