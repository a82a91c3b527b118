//! Train/validation/test splits of a graph's edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};

#[derive(Clone, Debug, PartialEq)]
pub struct LinkSplit {
    pub seed: u64,
    /// The input graph minus every validation and test positive.
    pub train_graph: Graph,
    pub val_pos: Vec<Pair>,
    pub val_neg: Vec<Pair>,
    pub test_pos: Vec<Pair>,
    pub test_neg: Vec<Pair>,
}

#[derive(Serialize)]
struct SplitJson<'a> {
    seed: u64,
    train_edges: &'a [Pair],
    val_pos: &'a [Pair],
    val_neg: &'a [Pair],
    test_pos: &'a [Pair],
    test_neg: &'a [Pair],
}

impl LinkSplit {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SplitJson {
            seed: self.seed,
            train_edges: self.train_graph.edges(),
            val_pos: &self.val_pos,
            val_neg: &self.val_neg,
            test_pos: &self.test_pos,
            test_neg: &self.test_neg,
        })
        .expect("plain data serializes")
    }
}

fn count(frac: f64, m: usize) -> usize {
    // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
    (frac * m as f64 + 1e-9).floor() as usize
}

/// Splits edges into train/validation/test positives and samples as many
/// negatives (non-edges of `g`, no self-pairs) for validation and test.
pub fn split_links(g: &Graph, test_frac: f64, val_frac: f64, seed: u64) -> Result<LinkSplit> {
    let ok = |f: f64| f.is_finite() && (0.0..1.0).contains(&f);
    if !ok(test_frac) || !ok(val_frac) || test_frac + val_frac >= 1.0 {
        return Err(Error::BadFractions { test: test_frac, val: val_frac });
    }
    let m = g.edge_count();
    let (n_test, n_val) = (count(test_frac, m), count(val_frac, m));
    if n_test == 0 || n_val == 0 {
        return Err(Error::GraphTooSmall { edges: m, test: n_test, val: n_val });
    }
    let needed = n_test + n_val;
    let available = g.non_edge_count();
    if available < needed {
        return Err(Error::NotEnoughNonEdges { needed, available });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = g.edges().to_vec();
    edges.shuffle(&mut rng);
    let test_pos = edges[..n_test].to_vec();
    let val_pos = edges[n_test..needed].to_vec();
    let mut train = edges[needed..].to_vec();
    train.sort_unstable();
    let train_graph = Graph::from_edges(g.n(), train)?.with_labels(g.labels().to_vec())?;

    let negatives = sample_non_edges(g, needed, &FxHashSet::default(), &mut rng);
    let (test_neg, val_neg) = negatives.split_at(n_test);
    Ok(LinkSplit {
        seed,
        train_graph,
        val_pos,
        val_neg: val_neg.to_vec(),
        test_pos,
        test_neg: test_neg.to_vec(),
    })
}

/// Draws `count` distinct unordered non-edges `(u, v)`, `u < v`, avoiding
/// `exclude`. Rejection sampling for up to `50 · count` attempts, then
/// falls back to enumerating what is left. Returns fewer than `count` only
/// if the graph runs out of candidates.
pub(crate) fn sample_non_edges<R: Rng>(
    g: &Graph,
    count: usize,
    exclude: &FxHashSet<Pair>,
    rng: &mut R,
) -> Vec<Pair> {
    let n = g.n() as u32;
    let mut chosen: Vec<Pair> = Vec::with_capacity(count);
    if n < 2 {
        return chosen;
    }
    let mut taken: FxHashSet<Pair> = FxHashSet::default();
    let usable = |e: Pair, taken: &FxHashSet<Pair>| {
        !g.has_edge(e.0, e.1) && !exclude.contains(&e) && !taken.contains(&e)
    };
    let mut attempts = 0;
    while chosen.len() < count && attempts < 50 * count {
        attempts += 1;
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if usable(e, &taken) {
            taken.insert(e);
            chosen.push(e);
        }
    }
    if chosen.len() < count {
        let mut rest: Vec<Pair> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&e| usable(e, &taken))
            .collect();
        rest.shuffle(rng);
        rest.truncate(count - chosen.len());
        chosen.extend(rest);
    }
    chosen
}
