//! Link prediction from heuristics and refinement colors.

mod auc;
mod benchmark;
mod features;
mod heuristics;
mod scorer;

pub use auc::auc;
pub use benchmark::{benchmark, BenchmarkConfig, BenchmarkReport};
pub use features::{featurize, featurize_all, FeatureConfig, FeatureVector};
pub use heuristics::{heuristic_cn, heuristic_pa, heuristic_ra};
pub use scorer::{train_scorer, LinearScorer, TrainConfig};
