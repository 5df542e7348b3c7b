//! Online prediction of a switching labeling of a graph.
//!
//! The crate implements three mistake-bounded online learners for the
//! problem where nature repeatedly queries a vertex, the learner predicts its
//! ±1 label, and the underlying labeling occasionally changes:
//!
//! * [`scs`]: switching cluster specialists over interval bases of a spine,
//!   with a delayed fixed-share update ([`bases::BasisKind::BinaryTree`]
//!   gives `O(log n)` work per trial).
//! * [`qbayes`]: a conservative quasi-Bayes predictor under a switch-reset
//!   Ising-chain prior, evaluated by dynamic programming.
//! * [`sgp`]: a projected kernel perceptron with a Laplacian kernel, used as
//!   a baseline.
//!
//! The spine-based learners operate on a line graph obtained by sampling a
//! uniform spanning tree ([`spine::sample_ust`]) and linearising it with a
//! depth-first traversal ([`spine::linearize`]).
//!
//! [`bounds`] evaluates the closed-form mistake bounds, [`oracle`] holds
//! brute-force reference computations and [`verify`] packages the checks
//! that tie them together. [`harness`] runs full experiments.

pub mod bases;
pub mod bench;
pub mod bounds;
pub mod error;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod predictor;
pub mod qbayes;
pub mod rng;
pub mod scs;
pub mod sgp;
pub mod spine;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{FeatureMatrix, Graph, Labeling};
pub use predictor::{OnSpine, OnlinePredictor};
pub use spine::{SpanningTree, Spine};
