//! Property tests for structural invariants of the learners and bounds.

use proptest::prelude::*;

use switchgraph::bases::{basis_size, cover_btree, hamming_divergence, min_cover_full, segments, Basis, BasisKind};
use switchgraph::bounds::{bound_majority, switch_reset_bound, specialists_bound, optimal_alpha, SegmentStats};
use switchgraph::harness::majority_vote;
use switchgraph::oracle::min_btree_covers;
use switchgraph::qbayes::{QBayes, QBayesParams};
use switchgraph::scs::{scs_eager_reference, scs_predictions, AlphaMode};
use switchgraph::sgp::Sgp;
use switchgraph::{Graph, Labeling, Spine};

fn labeling(bits: &[bool]) -> Labeling {
    Labeling::new(bits.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap()
}

fn kind_strategy() -> impl Strategy<Value = BasisKind> {
    prop_oneof![Just(BasisKind::Full), Just(BasisKind::BinaryTree)]
}

/// A connected graph: a path plus random chords.
fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..2 * n).prop_map(move |extra| {
            let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            Graph::new(n, edges).unwrap()
        })
    })
}

/// A stream of `(position, label)` trials over `n` positions.
fn stream_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Vec<(usize, i8)>> {
    proptest::collection::vec((0..n, any::<bool>()), 1..max_len).prop_map(|v| v.into_iter().map(|(p, b)| (p, if b { 1 } else { -1 })).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn active_sets_are_awake_and_round_trip(kind in kind_strategy(), n in 1usize..160, p_frac in 0.0f64..1.0) {
        let basis = Basis::new(kind, n).unwrap();
        prop_assert_eq!(basis.size(), basis_size(kind, n));
        let p = ((n as f64 * p_frac) as usize).min(n - 1);
        let indices: Vec<usize> = basis.active_indices(p).unwrap().collect();
        prop_assert_eq!(indices.len(), basis.active_count(p).unwrap());
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), indices.len(), "duplicate active index");
        for &i in &indices {
            let s = basis.specialist(i).unwrap();
            prop_assert!(s.is_awake(p));
            prop_assert_eq!(basis.index_of(&s).unwrap(), i);
        }
        match kind {
            BasisKind::Full => prop_assert_eq!(indices.len(), 2 * (p + 1) * (n - p)),
            BasisKind::BinaryTree => {
                let depth = usize::BITS - (n - 1).leading_zeros();
                prop_assert!(indices.len() <= 2 * (depth as usize + 1));
                if n.is_power_of_two() {
                    prop_assert_eq!(indices.len(), 2 * (n.trailing_zeros() as usize + 1));
                }
            }
        }
    }

    #[test]
    fn covers_reproduce_the_labeling(bits in proptest::collection::vec(any::<bool>(), 1..40)) {
        let u = labeling(&bits);
        let full = min_cover_full(&u).unwrap();
        prop_assert!(full.is_consistent_with(&u));
        prop_assert_eq!(full.len(), segments(&u).len());
        let btree = cover_btree(&u).unwrap();
        prop_assert!(btree.is_consistent_with(&u));
        let minimum = min_btree_covers(&u).iter().map(Vec::len).min().unwrap();
        prop_assert_eq!(btree.len(), minimum);
    }

    #[test]
    fn hamming_divergence_is_at_most_twice_hamming(pair in (1usize..48).prop_flat_map(|n| (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(any::<bool>(), n)))) {
        let (u, v) = (labeling(&pair.0), labeling(&pair.1));
        let h = hamming_divergence(&u, &v).unwrap();
        prop_assert!(h <= 2 * u.hamming_distance(&v));
        let cut = |w: &Labeling| segments(w).len() - 1;
        prop_assert!(h <= cut(&u) + cut(&v));
    }

    #[test]
    fn delayed_engine_matches_eager(kind in kind_strategy(), alpha in 1e-3f64..0.5, stream in (2usize..48).prop_flat_map(|n| stream_strategy(n, 300).prop_map(move |s| (n, s)))) {
        let (n, stream) = stream;
        let basis = Basis::new(kind, n).unwrap();
        let delayed = scs_predictions(basis, AlphaMode::Fixed(alpha), &stream).unwrap();
        let eager = scs_eager_reference(basis, alpha, &stream).unwrap();
        prop_assert_eq!(delayed, eager);
    }

    #[test]
    fn qbayes_evidence_stays_consistent(theta in 0.01f64..0.49, alpha in 0.01f64..0.5, stream in (2usize..40).prop_flat_map(|n| stream_strategy(n, 200).prop_map(move |s| (n, s)))) {
        let (n, stream) = stream;
        let mut qb = QBayes::new(n, QBayesParams::new(theta, alpha).unwrap()).unwrap();
        let mut wrong = 0;
        for &(p, y) in &stream {
            let (prediction, plus) = qb.predict(p).unwrap();
            prop_assert!((0.0..=1.0).contains(&plus));
            // The sign is decided in log space; the marginal can round to ½.
            if (plus - 0.5).abs() > 1e-12 {
                prop_assert_eq!(prediction, if plus > 0.5 { 1 } else { -1 });
            }
            wrong += u64::from(qb.update(y).unwrap());
            prop_assert!(qb.consistency_gap() < 1e-8, "gap {}", qb.consistency_gap());
            prop_assert!(qb.log_evidence() <= 1e-12);
        }
        prop_assert_eq!(qb.mistakes(), wrong);
    }

    #[test]
    fn sgp_norm_is_tracked_and_bounded(graph in graph_strategy(24), gamma in 0.5f64..20.0, picks in proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 1..150)) {
        let n = graph.n();
        let mut sgp = Sgp::from_graph(&graph, gamma).unwrap();
        for (idx, b) in picks {
            sgp.step(idx.index(n), if b { 1 } else { -1 }).unwrap();
            let (tracked, exact) = (sgp.norm_sq(), sgp.norm_sq_recomputed());
            prop_assert!((tracked - exact).abs() <= 1e-8 * exact.max(1.0), "tracked {tracked} exact {exact}");
            prop_assert!(tracked <= gamma * gamma * (1.0 + 1e-12));
        }
    }

    #[test]
    fn spine_cut_at_most_twice_graph_cut(graph in graph_strategy(40), seed in any::<u64>(), mask in any::<u64>()) {
        let n = graph.n();
        let (tree, spine) = Spine::sample(&graph, seed).unwrap();
        prop_assert!(tree.is_spanning_tree_of(&graph));
        let mut order = spine.order().to_vec();
        order.sort_unstable();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
        let u = Labeling::from_mask(n, mask);
        let tree_cut = tree.cut_size(&u).unwrap();
        prop_assert!(tree_cut <= graph.cut_size(&u).unwrap());
        prop_assert!(spine.spine_cut(&u).unwrap() <= 2 * tree_cut);
    }

    #[test]
    fn optimal_alpha_minimises_the_switching_bound(labels in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 16), 1..5), lengths in proptest::collection::vec(1usize..200, 5), alpha in 1e-4f64..0.999) {
        let schedule: Vec<_> = labels.iter().zip(&lengths).map(|(bits, &len)| (len, cover_btree(&labeling(bits)).unwrap())).collect();
        let best = optimal_alpha(&schedule).unwrap();
        let at_best = specialists_bound(&schedule, best).unwrap();
        let elsewhere = specialists_bound(&schedule, alpha).unwrap();
        prop_assert!(at_best <= elsewhere + 1e-9 * elsewhere.abs().max(1.0), "best {at_best} at {best}, {elsewhere} at {alpha}");
    }

    #[test]
    fn switch_reset_bound_grows_with_trials(cuts in proptest::collection::vec(0usize..15, 1..6), extra in 0usize..500, alpha in 1e-3f64..0.5, theta in 1e-3f64..0.5) {
        let k = cuts.len();
        let starts: Vec<usize> = (0..k).map(|i| i * 10).collect();
        let trials = 10 * k + extra;
        let stats = SegmentStats::new(16, trials, starts, cuts).unwrap();
        let short = switch_reset_bound(&stats, alpha, theta, trials as f64);
        let long = switch_reset_bound(&stats, alpha, theta, (trials + 1) as f64);
        prop_assert!(long >= short);
        prop_assert!(short >= k as f64);
    }

    #[test]
    fn majority_vote_mistakes_respect_the_ensemble_bound(truth in proptest::collection::vec(any::<bool>(), 1..100), members in 1usize..8, noise in proptest::collection::vec(any::<u8>(), 800)) {
        let r = 2 * members - 1;
        let t = truth.len();
        let y: Vec<i8> = truth.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let votes: Vec<Vec<i8>> = (0..r)
            .map(|i| (0..t).map(|s| if noise[(i * t + s) % noise.len()] < 90 { -y[s] } else { y[s] }).collect())
            .collect();
        let member_mistakes: Vec<u64> = votes.iter().map(|v| v.iter().zip(&y).filter(|(a, b)| a != b).count() as u64).collect();
        let mut majority_mistakes = 0;
        for s in 0..t {
            let ballot: Vec<i8> = votes.iter().map(|v| v[s]).collect();
            let m = majority_vote(&ballot).unwrap();
            let sum: i32 = ballot.iter().map(|&b| i32::from(b)).sum();
            prop_assert_eq!(m, if sum >= 0 { 1 } else { -1 });
            majority_mistakes += u64::from(m != y[s]);
        }
        prop_assert!(majority_mistakes as f64 <= bound_majority(&member_mistakes));
    }
}
