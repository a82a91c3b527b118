use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde_json::{json, Value};

use crate::error::Result;
use crate::graph::{Graph, Pair};
use crate::linkpred::auc::auc;
use crate::linkpred::features::{featurize_all, FeatureConfig};
use crate::linkpred::scorer::{train_scorer, TrainConfig};
use crate::split::{sample_non_edges, split_links};
use crate::wl::TestKind;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub kind: TestKind,
    pub split_seed: u64,
    pub test_frac: f64,
    pub val_frac: f64,
    pub features: FeatureConfig,
    pub train: TrainConfig,
}

impl BenchmarkConfig {
    pub fn new(kind: TestKind, split_seed: u64) -> Self {
        BenchmarkConfig {
            kind,
            split_seed,
            test_frac: 0.10,
            val_frac: 0.05,
            features: FeatureConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub dataset: String,
    pub kind: TestKind,
    pub split_seed: u64,
    pub val_auc: f64,
    pub test_auc: f64,
    pub featurize_seconds: f64,
    pub n: usize,
    pub m: usize,
    /// Nodes left without edges in the training graph.
    pub isolated_nodes: usize,
    pub train_pairs: usize,
}

impl BenchmarkReport {
    /// Timing is wall-clock and omitted (null) unless asked for, so that
    /// repeated runs serialize identically.
    pub fn to_json(&self, timing: bool) -> Value {
        json!({
            "dataset": self.dataset,
            "kind": self.kind,
            "split_seed": self.split_seed,
            "val_auc": self.val_auc,
            "test_auc": self.test_auc,
            "featurize_seconds": if timing { json!(self.featurize_seconds) } else { Value::Null },
            "n": self.n,
            "m": self.m,
            "isolated_nodes": self.isolated_nodes,
            "train_pairs": self.train_pairs,
        })
    }
}

fn labeled(pos: &[Pair], neg: &[Pair]) -> (Vec<Pair>, Vec<bool>) {
    let pairs = pos.iter().chain(neg).copied().collect();
    let labels = pos.iter().map(|_| true).chain(neg.iter().map(|_| false)).collect();
    (pairs, labels)
}

/// Splits `g`, trains a scorer on features of the training graph (train
/// edges, each hidden while featurized, against as many sampled
/// non-edges) and reports validation and test AUC.
pub fn benchmark(dataset: &str, g: &Graph, config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    let split = split_links(g, config.test_frac, config.val_frac, config.split_seed)?;
    let train = &split.train_graph;
    let exclude: FxHashSet<Pair> = [&split.val_pos, &split.val_neg, &split.test_pos, &split.test_neg]
        .into_iter()
        .flatten()
        .copied()
        .collect();
    // Independent of the split's own stream.
    let mut rng = ChaCha8Rng::seed_from_u64(config.split_seed ^ 0x0072_6169_6e6e_6567);
    let train_pos = train.edges().to_vec();
    let train_neg = sample_non_edges(train, train_pos.len(), &exclude, &mut rng);
    let (train_pairs, train_labels) = labeled(&train_pos, &train_neg);
    let (val_pairs, val_labels) = labeled(&split.val_pos, &split.val_neg);
    let (test_pairs, test_labels) = labeled(&split.test_pos, &split.test_neg);

    let fc = &config.features;
    let start = Instant::now();
    let vectors = |pairs: &[Pair]| -> Result<Vec<Vec<f64>>> {
        Ok(featurize_all(config.kind, train, pairs, fc)?
            .iter()
            .map(|f| f.to_vec(fc.heuristics))
            .collect())
    };
    let x_train = vectors(&train_pairs)?;
    let x_val = vectors(&val_pairs)?;
    let x_test = vectors(&test_pairs)?;
    let featurize_seconds = start.elapsed().as_secs_f64();

    let scorer = train_scorer(&x_train, &train_labels, config.train)?;
    let val_auc = auc(&scorer.score_all(&x_val)?, &val_labels)?;
    let test_auc = auc(&scorer.score_all(&x_test)?, &test_labels)?;
    Ok(BenchmarkReport {
        dataset: dataset.to_string(),
        kind: config.kind,
        split_seed: config.split_seed,
        val_auc,
        test_auc,
        featurize_seconds,
        n: g.n(),
        m: g.edge_count(),
        isolated_nodes: train.isolated_count(),
        train_pairs: train_pairs.len(),
    })
}
