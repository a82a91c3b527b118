//! Agreement between unrolled trees and refinement colors.

use serde::Serialize;
use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::harness::corpus::{Corpus, Instance, NamedGraph};
use crate::harness::power::{run_kind, PowerOptions};
use crate::oracle::{tree_equal, unroll, TreeKind, UnrollTree};
use crate::wl::{Masking, TestKind};

/// The test whose round-`k` colors a depth-`k` tree should mirror.
pub fn tree_test(tree: TreeKind) -> TestKind {
    match tree {
        TreeKind::Node => TestKind::WL1,
        TreeKind::Local => TestKind::WL2_Local,
        TreeKind::Plain => TestKind::WL2,
        TreeKind::Folklore => TestKind::FWL2,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeCheck {
    pub tree: TreeKind,
    pub kind: TestKind,
    pub depth: usize,
    pub tree_classes: usize,
    pub color_classes: usize,
    /// Instance pairs on which tree equality and color equality differ.
    pub disagreements: u64,
    /// Equal hashes whose trees turned out structurally different.
    pub hash_collisions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeReport {
    pub instances: usize,
    pub checks: Vec<TreeCheck>,
}

impl TreeReport {
    pub fn disagreements(&self) -> u64 {
        self.checks.iter().map(|c| c.disagreements).sum()
    }
}

fn same_pairs<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> u64 {
    let mut counts: FxHashMap<K, u64> = FxHashMap::default();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    counts.values().map(|&s| s * (s - 1) / 2).sum()
}

/// Compares, for every instance with at most `max_n` nodes and every depth
/// up to `max_depth`, tree equality of the four tree kinds with color
/// equality of the matching test at that round. Targets are masked on both
/// sides: the tree root carries no edge indicator.
pub fn tree_correspondence(corpus: &Corpus, max_n: usize, max_depth: usize) -> Result<TreeReport> {
    let mut masked = Corpus::empty(format!("{} (n<={max_n}, masked)", corpus.spec));
    for inst in &corpus.instances {
        let g = corpus.graph_of(inst);
        if g.n() > max_n {
            continue;
        }
        let (p, q) = inst.target;
        masked.graphs.push(NamedGraph {
            name: corpus.graphs[inst.graph].name.clone(),
            graph: g.without_edge(p, q),
        });
        masked.instances.push(Instance { graph: masked.graphs.len() - 1, target: inst.target });
    }
    let mut report = TreeReport { instances: masked.instances.len(), checks: Vec::new() };
    if masked.instances.is_empty() {
        return Ok(report);
    }
    let opts = PowerOptions {
        max_iters: Some(max_depth),
        masking: Masking::Unmasked,
        oracle_max_n: None,
        parallel: false,
    };
    for tree in [TreeKind::Node, TreeKind::Local, TreeKind::Plain, TreeKind::Folklore] {
        let kind = tree_test(tree);
        let outcome = run_kind(kind, &masked, &opts)?;
        for depth in 0..=max_depth {
            let colors: Vec<[u32; 2]> = outcome
                .at_round(depth)
                .iter()
                .map(|&[a, b]| if kind.is_node_kind() { [a, b] } else { [a, a] })
                .collect();
            // Representatives per hash, each hash split into exact classes.
            let mut reps: FxHashMap<u64, Vec<(UnrollTree, u32)>> = FxHashMap::default();
            let mut classes = Vec::with_capacity(masked.instances.len());
            let mut next = 0u32;
            let mut hash_collisions = 0;
            for inst in &masked.instances {
                let t = unroll(tree, masked.graph_of(inst), inst.target, depth)?;
                let bucket = reps.entry(t.canonical_hash()).or_default();
                let mut class = None;
                for (r, id) in bucket.iter() {
                    if tree_equal(r, &t)? {
                        class = Some(*id);
                        break;
                    }
                }
                let id = match class {
                    Some(id) => id,
                    None => {
                        if !bucket.is_empty() {
                            hash_collisions += 1;
                        }
                        next += 1;
                        bucket.push((t, next - 1));
                        next - 1
                    }
                };
                classes.push(id);
            }
            let same_tree = same_pairs(classes.iter());
            let same_color = same_pairs(colors.iter());
            let same_both = same_pairs(classes.iter().zip(&colors));
            report.checks.push(TreeCheck {
                tree,
                kind,
                depth,
                tree_classes: next as usize,
                color_classes: same_class_count(&colors),
                disagreements: same_tree + same_color - 2 * same_both,
                hash_collisions,
            });
        }
    }
    Ok(report)
}

fn same_class_count(colors: &[[u32; 2]]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}
