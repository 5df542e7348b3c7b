//! Labeling generators and planted trial streams.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::ConfigError;
use crate::graph::{FeatureMatrix, Graph, Labeling};
use crate::rng::rng_from_seed;

/// A sequence of `(vertex, label)` trials together with the labeling in force
/// during each segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub trials: Vec<(usize, i8)>,
    pub labelings: Vec<Labeling>,
    /// First trial (0-based) of each segment; starts with 0.
    pub starts: Vec<usize>,
}

impl Stream {
    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    /// Index of the segment that trial `t` belongs to.
    pub fn segment_of(&self, t: usize) -> usize {
        self.starts.partition_point(|&s| s <= t) - 1
    }

    /// Number of trials in each segment.
    pub fn segment_lengths(&self) -> Vec<usize> {
        let mut ends: Vec<usize> = self.starts[1..].to_vec();
        ends.push(self.trials.len());
        self.starts.iter().zip(ends).map(|(s, e)| e - s).collect()
    }
}

/// For each segment, a uniformly random half of the class ids is mapped to
/// `+1` and the rest to `-1`.
pub fn gen_class_split_labelings(x: &FeatureMatrix, segments: usize, seed: u64) -> Result<Vec<Labeling>, ConfigError> {
    let classes = x.classes().ok_or_else(|| ConfigError::Invalid {
        key: "labeling".into(),
        message: "class-split needs class ids in the feature file".into(),
    })?;
    let ids: Vec<u32> = classes.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if !ids.len().is_multiple_of(2) {
        return Err(ConfigError::Invalid { key: "labeling".into(), message: format!("class-split needs an even number of classes, found {}", ids.len()) });
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(segments);
    for _ in 0..segments {
        let mut shuffled = ids.clone();
        shuffled.shuffle(&mut rng);
        let positive: BTreeSet<u32> = shuffled[..ids.len() / 2].iter().copied().collect();
        let labels = classes.iter().map(|c| if positive.contains(c) { 1 } else { -1 }).collect();
        out.push(Labeling::new(labels).expect("labels are ±1"));
    }
    Ok(out)
}

/// Graph Voronoi labelings: each segment picks `centers` distinct random
/// vertices with random labels and every vertex takes the label of its
/// nearest centre in hop distance (ties go to the centre listed first).
pub fn gen_voronoi_labelings(graph: &Graph, centers: usize, segments: usize, seed: u64) -> Vec<Labeling> {
    let n = graph.n();
    let centers = centers.min(n);
    let mut rng = rng_from_seed(seed);
    let mut vertices: Vec<usize> = (0..n).collect();
    (0..segments)
        .map(|_| {
            let (chosen, _) = vertices.partial_shuffle(&mut rng, centers);
            let mut label = vec![0i8; n];
            let mut queue = VecDeque::new();
            for &c in chosen.iter() {
                label[c] = if rng.random_bool(0.5) { 1 } else { -1 };
                queue.push_back(c);
            }
            while let Some(v) = queue.pop_front() {
                for &w in graph.neighbors(v) {
                    if label[w] == 0 {
                        label[w] = label[v];
                        queue.push_back(w);
                    }
                }
            }
            Labeling::new(label).expect("connected graph reaches every vertex")
        })
        .collect()
}

/// Uniform i.i.d. vertex queries over `trials` trials; segment `k` covers
/// trials `k * period .. (k + 1) * period` and takes its labels from
/// `labelings[k]`.
pub fn gen_planted_stream(n: usize, labelings: &[Labeling], trials: usize, period: usize, seed: u64) -> Stream {
    assert!(period >= 1 && !labelings.is_empty(), "need a positive period and at least one labeling");
    assert!(trials.div_ceil(period) <= labelings.len(), "schedule needs more labelings than supplied");
    let mut rng = rng_from_seed(seed);
    let segments = trials.div_ceil(period);
    let trials = (0..trials)
        .map(|t| {
            let v = rng.random_range(0..n);
            (v, labelings[t / period][v])
        })
        .collect();
    Stream { trials, labelings: labelings[..segments].to_vec(), starts: (0..segments).map(|k| k * period).collect() }
}

/// Unweighted majority vote over an odd number of `±1` predictions.
pub fn majority_vote(predictions: &[i8]) -> Result<i8, ConfigError> {
    if predictions.len().is_multiple_of(2) {
        return Err(ConfigError::Invalid { key: "ensemble".into(), message: format!("majority vote needs an odd count, got {}", predictions.len()) });
    }
    let sum: i32 = predictions.iter().map(|&p| p as i32).sum();
    Ok(if sum > 0 { 1 } else { -1 })
}
