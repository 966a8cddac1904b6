//! Quantifies the privacy disclosure of similarity-rank information in
//! biometric identification.
//!
//! Given per-speaker feature observations and a similarity measure, the
//! library ranks the true identity among all database templates, accumulates
//! those ranks into a histogram, models the rank distribution with a
//! beta-binomial law fitted under several loss functions, and reports
//! disclosure statistics in bits: mean, maximum, and deviation of per-rank
//! disclosure, identification rate, and rank spread. A seeded synthetic
//! generator and fold/length-scan experiment drivers make the whole pipeline
//! reproducible at desk scale.

pub mod betabinom;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod metrics;
pub mod optim;
pub mod rank;
pub mod similarity;
pub mod special;
pub mod synth;

pub use betabinom::{BetaBinomialModel, ModelDocument};
pub use error::{Error, Result};
pub use experiments::{ExperimentPlan, LengthScanCell, LengthScanResult};
pub use fit::{FitOptions, FitResult, LossKind, LossSpec};
pub use metrics::{DisclosureReport, ScoreSet};
pub use rank::{EmpiricalDistribution, RankHistogram};
pub use similarity::{FeatureKind, FeatureObservation, ObservationSet, SimilarityMeasure};
pub use synth::SynthConfig;
