//! Running a configured experiment: graph construction, labeling schedule,
//! per-member spines and tunings, parallel member execution and majority
//! aggregation.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::index::sample;
use rayon::prelude::*;

use super::config::{Algorithm, ConfigError, ExperimentConfig, GraphSource, GraphSpec, LabelingSpec, ScsAlpha, Tuning};
use super::stream::{gen_class_split_labelings, gen_planted_stream, gen_voronoi_labelings, majority_vote, Stream};
use crate::bases::{Basis, BasisKind};
use crate::bounds::{bound_majority, experiment_theta, scs_alpha_experiment, SegmentStats};
use crate::graph::{knn_union_mst_graph, FeatureMatrix, Graph};
use crate::predictor::{OnSpine, OnlinePredictor};
use crate::qbayes::{QBayes, QBayesParams};
use crate::rng::{derive_seed, derive_seed_path, rng_from_seed};
use crate::scs::{AlphaMode, ScsEngine};
use crate::sgp::{sgp_gamma_oracle, sgp_kernel, Sgp};
use crate::spine::Spine;
use crate::{Error, Result};

/// Sub-stream tags under the master seed.
const TAG_SUBSAMPLE: u64 = 1;
const TAG_LABELINGS: u64 = 2;
const TAG_STREAM: u64 = 3;
const TAG_MEMBER: u64 = 4;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SWITCHGRAPH_THREADS";

/// Seed of ensemble member `member` of `algorithm` under `master`.
pub fn member_seed(master: u64, algorithm: Algorithm, member: usize) -> u64 {
    derive_seed_path(master, &[TAG_MEMBER, algorithm.tag(), member as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberReport {
    pub seed: u64,
    pub mistakes: u64,
    /// Mean spine cut of the segment labelings (0 for SGP).
    pub mean_spine_cut: f64,
    /// Parameters the member ran with, as `name=value` pairs.
    pub params: Vec<(&'static str, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmReport {
    pub algorithm: Algorithm,
    pub members: Vec<MemberReport>,
    /// Ensemble cumulative mistakes after each trial.
    pub cumulative: Vec<u64>,
    /// Summed member time per trial in microseconds (zeros without timing).
    pub usec: Vec<u64>,
}

impl AlgorithmReport {
    pub fn final_mistakes(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn member_mistakes(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.mistakes).collect()
    }

    pub fn majority_bound(&self) -> f64 {
        bound_majority(&self.member_mistakes())
    }

    pub fn majority_bound_holds(&self) -> bool {
        self.final_mistakes() as f64 <= self.majority_bound()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub vertices: usize,
    pub edges: usize,
    pub mean_graph_cut: f64,
    pub stream: Stream,
    pub algorithms: Vec<AlgorithmReport>,
}

fn grid(r: usize, c: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let v = i * c + j;
            if j + 1 < c {
                edges.push((v, v + 1));
            }
            if i + 1 < r {
                edges.push((v, v + c));
            }
        }
    }
    Graph::new(r * c, edges).expect("grid graph is valid")
}

fn load_features(config: &ExperimentConfig) -> Result<Option<FeatureMatrix>> {
    let Some(path) = &config.features else {
        return Ok(None);
    };
    let x = FeatureMatrix::from_csv_file(path, config.class_column)?;
    let Some(m) = config.vertices else {
        return Ok(Some(x));
    };
    if m > x.len() {
        return Err(ConfigError::Invalid { key: "vertices".into(), message: format!("{m} requested but the feature file has {} rows", x.len()) }.into());
    }
    let mut rng = rng_from_seed(derive_seed(config.seed, TAG_SUBSAMPLE));
    let mut rows = sample(&mut rng, x.len(), m).into_vec();
    rows.sort_unstable();
    Ok(Some(x.select(&rows)?))
}

fn build_graph(config: &ExperimentConfig, features: Option<&FeatureMatrix>) -> Result<Graph> {
    let graph = match &config.graph {
        GraphSource::File(p) => Graph::from_file(p)?,
        GraphSource::Generated(GraphSpec::Path(n)) => Graph::path(*n),
        GraphSource::Generated(GraphSpec::Cycle(n)) => Graph::cycle(*n),
        GraphSource::Generated(GraphSpec::Grid(r, c)) => grid(*r, *c),
        GraphSource::Features => knn_union_mst_graph(features.expect("features are loaded for a kNN graph"), config.k)?,
    };
    if let Some(x) = features {
        if x.len() != graph.n() {
            return Err(ConfigError::Invalid { key: "features".into(), message: format!("{} rows for a graph with {} vertices", x.len(), graph.n()) }.into());
        }
    }
    Ok(graph)
}

/// Number of worker threads requested through [`THREADS_ENV`], if any.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(ConfigError::Invalid { key: THREADS_ENV.into(), message: format!("`{v}` is not a positive integer") }.into()),
        },
        Err(_) => Ok(None),
    }
}

struct MemberRun {
    report: MemberReport,
    predictions: Vec<i8>,
    usec: Vec<u64>,
}

fn drive(predictor: &mut dyn OnlinePredictor, stream: &Stream, timing: bool) -> Result<(Vec<i8>, Vec<u64>)> {
    let mut predictions = Vec::with_capacity(stream.len());
    let mut usec = vec![0u64; if timing { stream.len() } else { 0 }];
    for (t, &(v, y)) in stream.trials.iter().enumerate() {
        let started = timing.then(Instant::now);
        let (p, _) = predictor.step(v, y)?;
        if let Some(s) = started {
            usec[t] = s.elapsed().as_micros() as u64;
        }
        predictions.push(p);
    }
    Ok((predictions, usec))
}

struct Shared<'a> {
    config: &'a ExperimentConfig,
    graph: &'a Graph,
    stream: &'a Stream,
    mean_graph_cut: f64,
    kernel: Option<&'a nalgebra::DMatrix<f64>>,
}

fn run_member(shared: &Shared<'_>, algorithm: Algorithm, member: usize) -> Result<MemberRun> {
    let config = shared.config;
    let stream = shared.stream;
    let n = shared.graph.n();
    let seed = member_seed(config.seed, algorithm, member);
    let mut params = Vec::new();
    let mut mean_spine_cut = 0.0;
    let mut predictor: Box<dyn OnlinePredictor> = if algorithm.uses_spine() {
        let (_, spine) = Spine::sample(shared.graph, seed)?;
        let cuts = stream.labelings.iter().map(|u| spine.spine_cut(u)).collect::<std::result::Result<Vec<_>, _>>()?;
        let stats = SegmentStats::new(n, stream.len(), stream.starts.clone(), cuts).map_err(|m| ConfigError::Invalid { key: "switch_period".into(), message: m })?;
        mean_spine_cut = stats.mean_cut();
        match algorithm {
            Algorithm::ScsF | Algorithm::ScsB => {
                let kind = if algorithm == Algorithm::ScsF { BasisKind::Full } else { BasisKind::BinaryTree };
                let mode = match config.scs_alpha {
                    ScsAlpha::Oracle => AlphaMode::Fixed(scs_alpha_experiment(&stats)),
                    ScsAlpha::TimeVarying => AlphaMode::TimeVarying,
                    ScsAlpha::Fixed(a) => AlphaMode::Fixed(a),
                };
                if let AlphaMode::Fixed(a) = mode {
                    params.push(("alpha", a));
                }
                Box::new(OnSpine::new(spine, ScsEngine::new(Basis::new(kind, n)?, mode)?))
            }
            Algorithm::QBayes => {
                let segments = stream.starts.len();
                let alpha = match config.qbayes_alpha {
                    Tuning::Oracle if stream.len() > 1 => (segments - 1) as f64 / (stream.len() - 1) as f64,
                    Tuning::Oracle => 0.0,
                    Tuning::Fixed(a) => a,
                };
                let theta = match config.qbayes_theta {
                    Tuning::Oracle => experiment_theta(shared.mean_graph_cut, shared.graph.edge_count()),
                    Tuning::Fixed(t) => t,
                };
                params.push(("alpha", alpha));
                params.push(("theta", theta));
                Box::new(OnSpine::new(spine, QBayes::new(n, QBayesParams::new(theta, alpha)?)?))
            }
            Algorithm::Sgp => unreachable!(),
        }
    } else {
        let kernel = shared.kernel.expect("kernel is built when SGP runs");
        let gamma = match config.sgp_gamma {
            Tuning::Oracle => sgp_gamma_oracle(&stream.labelings, kernel)?,
            Tuning::Fixed(g) => g,
        };
        params.push(("gamma", gamma));
        Box::new(Sgp::new(kernel.clone(), gamma)?)
    };
    let (predictions, usec) = drive(predictor.as_mut(), stream, config.timing)?;
    Ok(MemberRun { report: MemberReport { seed, mistakes: predictor.mistakes(), mean_spine_cut, params }, predictions, usec })
}

/// Ensemble size actually used for `algorithm`: SGP is deterministic given
/// the graph, so it always runs a single member.
pub fn members_for(config: &ExperimentConfig, algorithm: Algorithm) -> usize {
    if algorithm.uses_spine() {
        config.ensemble
    } else {
        1
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let features = load_features(config)?;
    let graph = build_graph(config, features.as_ref())?;
    let segments = config.segments();
    let labelings = match config.labeling {
        LabelingSpec::ClassSplit => {
            let x = features.as_ref().ok_or(ConfigError::Invalid { key: "labeling".into(), message: "class-split needs features".into() })?;
            gen_class_split_labelings(x, segments, derive_seed(config.seed, TAG_LABELINGS))?
        }
        LabelingSpec::Voronoi { centers } => gen_voronoi_labelings(&graph, centers, segments, derive_seed(config.seed, TAG_LABELINGS)),
    };
    let stream = gen_planted_stream(graph.n(), &labelings, config.trials, config.switch_period, derive_seed(config.seed, TAG_STREAM));
    let graph_cuts: Vec<usize> = labelings.iter().map(|u| graph.cut_size(u)).collect::<std::result::Result<_, _>>()?;
    let mean_graph_cut = graph_cuts.iter().sum::<usize>() as f64 / graph_cuts.len() as f64;
    let kernel = if config.algorithms.contains(&Algorithm::Sgp) { Some(sgp_kernel(&graph)?) } else { None };

    let tasks: Vec<(Algorithm, usize)> = config.algorithms.iter().flat_map(|&a| (0..members_for(config, a)).map(move |m| (a, m))).collect();
    let shared = Shared { config, graph: &graph, stream: &stream, mean_graph_cut, kernel: kernel.as_ref() };
    let run_all = || -> Vec<Result<MemberRun>> { tasks.par_iter().map(|&(a, m)| run_member(&shared, a, m)).collect() };
    let runs = match thread_cap()? {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| ConfigError::Invalid { key: THREADS_ENV.into(), message: e.to_string() })?.install(run_all),
        None => run_all(),
    };

    let mut runs = runs.into_iter();
    let mut algorithms = Vec::new();
    for &algorithm in &config.algorithms {
        let mut members = Vec::new();
        for member in 0..members_for(config, algorithm) {
            let run = runs.next().expect("one run per task").map_err(|e| {
                log::error!("{algorithm} member {member} failed: {e}");
                e
            })?;
            members.push(run);
        }
        let mut cumulative = Vec::with_capacity(stream.len());
        let mut usec = vec![0u64; stream.len()];
        let mut mistakes = 0u64;
        let mut votes = vec![0i8; members.len()];
        for (t, &(_, y)) in stream.trials.iter().enumerate() {
            for (slot, m) in votes.iter_mut().zip(&members) {
                *slot = m.predictions[t];
                if config.timing {
                    usec[t] += m.usec[t];
                }
            }
            if majority_vote(&votes)? != y {
                mistakes += 1;
            }
            cumulative.push(mistakes);
        }
        let report = AlgorithmReport { algorithm, members: members.into_iter().map(|m| m.report).collect(), cumulative, usec };
        if !report.majority_bound_holds() {
            log::error!("{algorithm}: ensemble made {} mistakes, above the majority bound {}", report.final_mistakes(), report.majority_bound());
        }
        algorithms.push(report);
    }
    Ok(ExperimentResult { config: config.clone(), vertices: graph.n(), edges: graph.edge_count(), mean_graph_cut, stream, algorithms })
}

impl ExperimentResult {
    pub fn report(&self, algorithm: Algorithm) -> Option<&AlgorithmReport> {
        self.algorithms.iter().find(|r| r.algorithm == algorithm)
    }

    /// One row per trial: `trial`, cumulative ensemble mistakes per
    /// algorithm, then per-trial microseconds per algorithm.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::io("writing results", e.into());
        let mut header = vec!["trial".to_string()];
        header.extend(self.algorithms.iter().map(|r| r.algorithm.name().to_string()));
        header.extend(self.algorithms.iter().map(|r| format!("{}_usec", r.algorithm.name())));
        w.write_record(&header).map_err(io)?;
        for t in 0..self.stream.len() {
            let mut row = vec![(t + 1).to_string()];
            row.extend(self.algorithms.iter().map(|r| r.cumulative[t].to_string()));
            row.extend(self.algorithms.iter().map(|r| r.usec[t].to_string()));
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::io("writing results", e))?;
        Ok(())
    }

    pub fn meta_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "switchgraph {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "\n[config]");
        s.push_str(&self.config.to_text());
        let _ = writeln!(s, "\n[data]");
        let _ = writeln!(s, "vertices = {}", self.vertices);
        let _ = writeln!(s, "edges = {}", self.edges);
        let _ = writeln!(s, "segments = {}", self.stream.starts.len());
        let _ = writeln!(s, "mean_graph_cut = {}", self.mean_graph_cut);
        let _ = writeln!(
            s,
            "seed_rule = splitmix64 chain over tags: subsample {TAG_SUBSAMPLE}, labelings {TAG_LABELINGS}, stream {TAG_STREAM}, member ({TAG_MEMBER}, algorithm index, member index)"
        );
        for r in &self.algorithms {
            let _ = writeln!(s, "\n[{}]", r.algorithm);
            let _ = writeln!(s, "ensemble_mistakes = {}", r.final_mistakes());
            let _ = writeln!(s, "majority_bound = {}", r.majority_bound());
            let _ = writeln!(s, "majority_bound_holds = {}", r.majority_bound_holds());
            for (i, m) in r.members.iter().enumerate() {
                let params: Vec<String> = m.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "member {i}: seed={} mistakes={} mean_spine_cut={} {}", m.seed, m.mistakes, m.mean_spine_cut, params.join(" "));
            }
        }
        s
    }

    /// Writes `results.csv` and `meta.txt` into `dir`, creating it if needed.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        let csv_path = dir.join("results.csv");
        let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(format!("creating {}", csv_path.display()), e))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let meta_path = dir.join("meta.txt");
        std::fs::write(&meta_path, self.meta_text()).map_err(|e| Error::io(format!("writing {}", meta_path.display()), e))?;
        Ok(())
    }

    /// Final mistakes per algorithm as an aligned text table.
    pub fn summary_table(&self) -> String {
        let mut s = format!("{:<8} {:>7} {:>10} {:>12} {:>14}\n", "algo", "members", "mistakes", "member_mean", "majority_bound");
        for r in &self.algorithms {
            let mean = r.member_mistakes().iter().sum::<u64>() as f64 / r.members.len() as f64;
            let _ = writeln!(s, "{:<8} {:>7} {:>10} {:>12.1} {:>14.1}", r.algorithm.name(), r.members.len(), r.final_mistakes(), mean, r.majority_bound());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(extra: &str) -> ExperimentConfig {
        ExperimentConfig::parse(&format!("graph = grid:6x6\ntrials = 200\nswitch_period = 50\nseed = 5\n{extra}")).unwrap()
    }

    #[test]
    fn single_member_ensemble_matches_member() {
        let r = run_experiment(&toy("ensemble = 1\n")).unwrap();
        for a in &r.algorithms {
            assert_eq!(a.members.len(), 1);
            assert_eq!(a.final_mistakes(), a.members[0].mistakes);
            assert!(a.cumulative.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let c = toy("ensemble = 3\n");
        let mut a = Vec::new();
        let mut b = Vec::new();
        run_experiment(&c).unwrap().write_csv(&mut a).unwrap();
        run_experiment(&c).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(String::from_utf8(a).unwrap().lines().count(), 201);
    }

    #[test]
    fn ensemble_respects_majority_bound() {
        let r = run_experiment(&toy("ensemble = 5\n")).unwrap();
        assert!(r.algorithms.iter().all(|a| a.majority_bound_holds()));
        assert_eq!(r.report(Algorithm::Sgp).unwrap().members.len(), 1);
        assert_eq!(r.report(Algorithm::ScsB).unwrap().members.len(), 5);
    }
}
