use std::sync::Arc;

use rustc_hash::FxHashSet;

use crate::graph::Pair;
use crate::wl::{Masking, TestKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Store {
    /// `colors[v]`.
    Nodes(Vec<u32>),
    /// `colors[p * n + q]`, diagonal included.
    Dense(Vec<u32>),
    /// Sorted tracked pairs with parallel colors.
    Pairs { pairs: Arc<Vec<Pair>>, colors: Vec<u32> },
}

/// One addressable unit of a color map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    Node(u32),
    Pair(u32, u32),
    /// A target pair refined as a center only; never a neighbor of anything.
    Probe(u32, u32),
}

/// Colors of every unit of one graph after some round of a session.
#[derive(Clone, Debug)]
pub struct ColorMap {
    pub(crate) kind: TestKind,
    pub(crate) session: u64,
    pub(crate) round: usize,
    pub(crate) target: Option<Pair>,
    pub(crate) masking: Masking,
    pub(crate) n: usize,
    pub(crate) store: Store,
    /// Sorted by pair.
    pub(crate) probes: Vec<(Pair, u32)>,
}

impl ColorMap {
    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn session(&self) -> u64 {
        self.session
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn target(&self) -> Option<Pair> {
        self.target
    }

    pub fn masking(&self) -> Masking {
        self.masking
    }

    /// The pair whose edge is hidden, if any.
    pub fn mask(&self) -> Option<Pair> {
        match self.masking {
            Masking::Masked => self.target,
            Masking::Unmasked => None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn node_color(&self, v: u32) -> Option<u32> {
        match &self.store {
            Store::Nodes(c) => c.get(v as usize).copied(),
            _ => None,
        }
    }

    /// Color of an ordered pair; `None` for node kinds and untracked pairs.
    pub fn pair_color(&self, p: u32, q: u32) -> Option<u32> {
        if let Ok(i) = self.probes.binary_search_by_key(&(p, q), |&(pair, _)| pair) {
            return Some(self.probes[i].1);
        }
        match &self.store {
            Store::Nodes(_) => None,
            Store::Dense(c) => {
                let n = self.n;
                ((p as usize) < n && (q as usize) < n).then(|| c[p as usize * n + q as usize])
            }
            Store::Pairs { pairs, colors } => pairs.binary_search(&(p, q)).ok().map(|i| colors[i]),
        }
    }

    /// Ordered colors of a target: `(c(p), c(q))` for node kinds,
    /// `(c(p,q), c(q,p))` for pair kinds.
    pub fn target_colors(&self, (p, q): Pair) -> Option<[u32; 2]> {
        if self.kind.is_node_kind() {
            Some([self.node_color(p)?, self.node_color(q)?])
        } else {
            Some([self.pair_color(p, q)?, self.pair_color(q, p)?])
        }
    }

    /// Undirected link color: the multiset of both orientations.
    pub fn link_color(&self, e: Pair) -> Option<[u32; 2]> {
        let [a, b] = self.target_colors(e)?;
        Some([a.min(b), a.max(b)])
    }

    pub fn unit_count(&self) -> usize {
        self.color_slice().len() + self.probes.len()
    }

    fn color_slice(&self) -> &[u32] {
        match &self.store {
            Store::Nodes(c) | Store::Dense(c) => c,
            Store::Pairs { colors, .. } => colors,
        }
    }

    /// Number of distinct colors among this map's units.
    pub fn class_count(&self) -> usize {
        let mut seen = FxHashSet::default();
        seen.extend(self.color_slice().iter().copied());
        seen.extend(self.probes.iter().map(|&(_, c)| c));
        seen.len()
    }

    /// All units with their colors, in canonical order (tracked units
    /// sorted, then probes).
    pub fn units(&self) -> Vec<(Unit, u32)> {
        let mut out = Vec::with_capacity(self.unit_count());
        match &self.store {
            Store::Nodes(c) => out.extend(c.iter().enumerate().map(|(v, &c)| (Unit::Node(v as u32), c))),
            Store::Dense(c) => {
                let n = self.n;
                out.extend(
                    c.iter()
                        .enumerate()
                        .map(|(i, &c)| (Unit::Pair((i / n) as u32, (i % n) as u32), c)),
                );
            }
            Store::Pairs { pairs, colors } => {
                out.extend(pairs.iter().zip(colors).map(|(&(p, q), &c)| (Unit::Pair(p, q), c)))
            }
        }
        out.extend(self.probes.iter().map(|&((p, q), c)| (Unit::Probe(p, q), c)));
        out
    }
}
