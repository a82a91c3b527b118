use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};
use crate::linkpred::heuristics::{heuristic_cn, heuristic_pa, heuristic_ra};
use crate::wl::{check_dense_gate, edge_edge_entries, ColorMap, Interner, Masking, Member, Session, TestKind, DEFAULT_DENSE_GATE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FeatureConfig {
    /// Histogram buckets.
    pub width: usize,
    /// Refinement rounds before the histogram is read.
    pub max_iters: usize,
    /// Include cn/pa/ra in the vector handed to the scorer.
    pub heuristics: bool,
    /// Dense kinds are refused above this many `n²` pairs.
    pub dense_gate: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { width: 8, max_iters: 2, heuristics: false, dense_gate: DEFAULT_DENSE_GATE }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureVector {
    pub cn: f64,
    pub pa: f64,
    pub ra: f64,
    /// Common neighbors as read off the first folklore round; 0 for other
    /// kinds.
    pub signature_cn: f64,
    pub histogram: Vec<f64>,
}

impl FeatureVector {
    pub fn to_vec(&self, heuristics: bool) -> Vec<f64> {
        let mut v = Vec::with_capacity(4 + self.histogram.len());
        if heuristics {
            v.extend([self.cn, self.pa, self.ra]);
        }
        v.push(self.signature_cn);
        v.extend(&self.histogram);
        v
    }
}

/// Ranks colors by class size (largest first), ties broken by structural
/// fingerprint, so ranks do not depend on interning order.
fn canonical_ranks(colors: &ColorMap, interner: &Interner) -> FxHashMap<u32, usize> {
    let mut sizes: FxHashMap<u32, usize> = FxHashMap::default();
    for (_, c) in colors.units() {
        *sizes.entry(c).or_default() += 1;
    }
    let mut order: Vec<(u32, usize)> = sizes.into_iter().collect();
    order.sort_by_key(|&(c, size)| (std::cmp::Reverse(size), interner.fingerprint(c), c));
    order.into_iter().enumerate().map(|(rank, (c, _))| (c, rank)).collect()
}

/// Colors of the units around the target: nodes adjacent to `p` or `q`
/// for 1-WL, pairs `(p,x)`, `(x,p)`, `(q,y)`, `(y,q)` over neighbors
/// otherwise.
fn local_colors(g: &Graph, colors: &ColorMap, (p, q): Pair) -> Vec<u32> {
    let mut out = Vec::new();
    for end in [p, q] {
        for &x in g.neighbors(end) {
            if colors.kind().is_node_kind() {
                out.extend(colors.node_color(x));
            } else {
                out.extend(colors.pair_color(end, x));
                out.extend(colors.pair_color(x, end));
            }
        }
    }
    out
}

/// Features of `target` in `g_train`. The target's edge, if present, is
/// hidden from every component.
pub fn featurize(kind: TestKind, g_train: &Graph, target: Pair, config: &FeatureConfig) -> Result<FeatureVector> {
    if config.width == 0 {
        return Err(Error::ZeroWidth);
    }
    check_dense_gate(kind, g_train.n(), config.dense_gate)?;
    let (p, q) = target;
    g_train.check_pair(target)?;
    if p == q {
        return Err(Error::SelfPair(p));
    }
    let mut interner = Interner::new();
    let member = Member::for_target(kind, g_train, Some(target), Masking::Masked, &mut interner)?;
    let mut session = Session::new(interner, vec![member]);
    let mut signature_cn = 0;
    session.run(config.max_iters.max(1), |s| {
        if s.round() == 1 && kind.is_folklore() {
            let color = s.members[0].colors.pair_color(p, q).expect("target is tracked");
            signature_cn = edge_edge_entries(&s.interner, color);
        }
        s.round() < config.max_iters
    });
    let colors = &session.members[0].colors;
    let g = session.members[0].graph();
    let ranks = canonical_ranks(colors, &session.interner);
    let mut histogram = vec![0.0; config.width];
    for c in local_colors(g, colors, target) {
        histogram[ranks[&c] % config.width] += 1.0;
    }
    Ok(FeatureVector {
        cn: heuristic_cn(g, p, q)? as f64,
        pa: heuristic_pa(g, p, q)? as f64,
        ra: heuristic_ra(g, p, q)?,
        signature_cn: signature_cn as f64,
        histogram,
    })
}

/// [`featurize`] over many targets in parallel; output order follows
/// `targets`.
pub fn featurize_all(kind: TestKind, g_train: &Graph, targets: &[Pair], config: &FeatureConfig) -> Result<Vec<FeatureVector>> {
    targets.par_iter().map(|&t| featurize(kind, g_train, t, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::wl::cn_from_fwl2_signature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(width: usize) -> FeatureConfig {
        FeatureConfig { width, ..Default::default() }
    }

    #[test]
    fn folklore_local_reads_common_neighbors() {
        let g = generate::complete(3);
        let f = featurize(TestKind::FWL2_Local, &g, (0, 1), &cfg(4)).unwrap();
        assert_eq!(f.signature_cn, 1.0);
        assert_eq!(f.cn, 1.0);
        assert_eq!((f.pa, f.ra), (1.0, 0.5));
        assert_eq!(f.to_vec(true).len(), 3 + 1 + 4);
        assert_eq!(f.to_vec(false).len(), 1 + 4);
    }

    #[test]
    fn signature_matches_dense_readout() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = generate::erdos_renyi(12, 0.4, &mut rng);
        for p in 0..12 {
            for q in 0..12 {
                if p == q {
                    continue;
                }
                let expected = cn_from_fwl2_signature(&g, (p, q)).unwrap() as f64;
                for kind in [TestKind::FWL2, TestKind::FWL2_Local] {
                    let f = featurize(kind, &g, (p, q), &cfg(3)).unwrap();
                    assert_eq!(f.signature_cn, expected, "{kind} ({p},{q})");
                    assert_eq!(f.cn, expected);
                }
                let f = featurize(TestKind::WL2_Local, &g, (p, q), &cfg(3)).unwrap();
                assert_eq!(f.signature_cn, 0.0);
            }
        }
    }

    #[test]
    fn vertex_transitive_cycle_uses_one_bucket() {
        let g = generate::cycle(6);
        let f = featurize(TestKind::WL1, &g, (0, 3), &cfg(5)).unwrap();
        assert_eq!(f.histogram.iter().filter(|&&x| x > 0.0).count(), 1);
        assert_eq!(f.histogram.iter().sum::<f64>(), 4.0);
    }

    #[test]
    fn automorphic_targets_match() {
        let g = generate::cycle(8);
        for kind in TestKind::ALL {
            let a = featurize(kind, &g, (0, 2), &cfg(6)).unwrap();
            let b = featurize(kind, &g, (3, 5), &cfg(6)).unwrap();
            let c = featurize(kind, &g, (7, 5), &cfg(6)).unwrap();
            assert_eq!(a, b, "{kind}");
            assert_eq!(a, c, "{kind}");
        }
    }

    #[test]
    fn target_edge_is_invisible() {
        let g = generate::cycle(7);
        for kind in TestKind::ALL {
            let with = featurize(kind, &g, (0, 1), &cfg(4)).unwrap();
            let without = featurize(kind, &g.without_edge(0, 1), (0, 1), &cfg(4)).unwrap();
            assert_eq!(with, without, "{kind}");
        }
    }

    #[test]
    fn errors() {
        let g = generate::cycle(5);
        assert!(matches!(featurize(TestKind::WL1, &g, (0, 2), &cfg(0)), Err(Error::ZeroWidth)));
        assert!(matches!(featurize(TestKind::WL1, &g, (2, 2), &cfg(2)), Err(Error::SelfPair(2))));
        let big = generate::cycle(300);
        assert!(matches!(
            featurize(TestKind::FWL2, &big, (0, 2), &cfg(2)),
            Err(Error::DenseGate { n: 300, .. })
        ));
        assert!(featurize(TestKind::FWL2_Local, &big, (0, 2), &cfg(2)).is_ok());
    }

    #[test]
    fn parallel_order_is_stable() {
        let g = generate::cycle(9);
        let targets = [(0, 1), (0, 4), (2, 3)];
        let all = featurize_all(TestKind::WL2_Local, &g, &targets, &cfg(4)).unwrap();
        for (t, f) in targets.iter().zip(&all) {
            assert_eq!(f, &featurize(TestKind::WL2_Local, &g, *t, &cfg(4)).unwrap());
        }
    }
}
