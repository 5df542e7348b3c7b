//! Experiment orchestration: configuration, switching label streams,
//! ensembles of independently sampled spines and result files.

mod config;
mod experiment;
mod stream;

pub use config::{Algorithm, ConfigError, ExperimentConfig, GraphSource, GraphSpec, LabelingSpec, ScsAlpha, Tuning};
pub use experiment::{member_seed, members_for, run_experiment, thread_cap, AlgorithmReport, ExperimentResult, MemberReport, THREADS_ENV};
pub use stream::{gen_class_split_labelings, gen_planted_stream, gen_voronoi_labelings, majority_vote, Stream};
