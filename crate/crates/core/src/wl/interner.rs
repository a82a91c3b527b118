//! Per-round hash-consing of refinement signatures.
//!
//! Every round of a session gets a fresh table, so color ids are dense
//! `0..k` per round and shared by all graphs refined in lockstep. Multisets
//! are interned separately and referenced by id, which keeps signatures
//! small and `Copy`. Each color also carries a structural fingerprint that
//! is comparable across sessions (used only for canonical ordering, never
//! for equality).

use std::sync::atomic::{AtomicU64, Ordering};

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

/// Color of a referenced pair that is not tracked (local folklore test).
pub const ABSENT: u32 = u32::MAX;

const ABSENT_FP: u64 = 0x5bd1_e995_0f1e_2d3c;

static NEXT_SESSION: AtomicU64 = AtomicU64::new(1);

/// Initial pair color: labels, edge indicator, equality flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairInit {
    pub left: u32,
    pub right: u32,
    pub edge: bool,
    pub diagonal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prev {
    Color(u32),
    /// The unit was not tracked last round; its initial tuple stands in.
    Fresh(PairInit),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    Label(u32),
    Pair(PairInit),
    Node { prev: u32, neighbors: u32 },
    Plain { prev: u32, first: u32, second: u32 },
    Folklore { prev: Prev, entries: u32 },
}

/// Packs a folklore entry `(c(u,q), c(p,u))`.
pub fn pack(a: u32, b: u32) -> u64 {
    (u64::from(a) << 32) | u64::from(b)
}

pub fn unpack(x: u64) -> (u32, u32) {
    ((x >> 32) as u32, x as u32)
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h.rotate_left(23) ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fold(tag: u64, items: impl IntoIterator<Item = u64>) -> u64 {
    items.into_iter().fold(tag, mix)
}

fn init_fp(p: &PairInit) -> u64 {
    fold(
        2,
        [
            u64::from(p.left),
            u64::from(p.right),
            u64::from(p.edge),
            u64::from(p.diagonal),
        ],
    )
}

#[derive(Clone, Debug, Default)]
struct Round {
    sigs: IndexSet<Signature, FxBuildHasher>,
    fps: Vec<u64>,
    sets: IndexSet<Box<[u32]>, FxBuildHasher>,
    set_fps: Vec<u64>,
    pair_sets: IndexSet<Box<[u64]>, FxBuildHasher>,
    pair_set_fps: Vec<u64>,
}

/// Injective signature table for one refinement session.
#[derive(Clone, Debug)]
pub struct Interner {
    session: u64,
    round: usize,
    cur: Round,
    prev: Round,
    scratch: Vec<u64>,
}

impl Default for Interner {
    fn default() -> Self {
        Self::new()
    }
}

impl Interner {
    pub fn new() -> Self {
        Interner {
            session: NEXT_SESSION.fetch_add(1, Ordering::Relaxed),
            round: 0,
            cur: Round::default(),
            prev: Round::default(),
            scratch: Vec::new(),
        }
    }

    pub fn session(&self) -> u64 {
        self.session
    }

    /// The round whose colors are currently being assigned.
    pub fn round(&self) -> usize {
        self.round
    }

    /// Distinct colors issued in the current round across all graphs.
    pub fn class_count(&self) -> usize {
        self.cur.sigs.len()
    }

    pub(crate) fn advance(&mut self) {
        self.prev = std::mem::take(&mut self.cur);
        self.round += 1;
    }

    pub fn signature(&self, color: u32) -> Option<&Signature> {
        self.cur.sigs.get_index(color as usize)
    }

    pub fn previous_signature(&self, color: u32) -> Option<&Signature> {
        self.prev.sigs.get_index(color as usize)
    }

    pub fn pair_set(&self, id: u32) -> &[u64] {
        &self.cur.pair_sets[id as usize]
    }

    pub fn set(&self, id: u32) -> &[u32] {
        &self.cur.sets[id as usize]
    }

    /// Structural fingerprint of a current-round color.
    pub fn fingerprint(&self, color: u32) -> u64 {
        self.cur.fps[color as usize]
    }

    fn prev_fp(&self, color: u32) -> u64 {
        if color == ABSENT {
            ABSENT_FP
        } else {
            self.prev.fps[color as usize]
        }
    }

    pub(crate) fn intern(&mut self, sig: Signature) -> u32 {
        if let Some(i) = self.cur.sigs.get_index_of(&sig) {
            return i as u32;
        }
        let fp = match sig {
            Signature::Label(l) => mix(1, u64::from(l)),
            Signature::Pair(p) => init_fp(&p),
            Signature::Node { prev, neighbors } => {
                fold(3, [self.prev_fp(prev), self.cur.set_fps[neighbors as usize]])
            }
            Signature::Plain { prev, first, second } => fold(
                4,
                [
                    self.prev_fp(prev),
                    self.cur.set_fps[first as usize],
                    self.cur.set_fps[second as usize],
                ],
            ),
            Signature::Folklore { prev, entries } => {
                let head = match prev {
                    Prev::Color(c) => self.prev_fp(c),
                    Prev::Fresh(p) => mix(7, init_fp(&p)),
                };
                fold(5, [head, self.cur.pair_set_fps[entries as usize]])
            }
        };
        let (i, _) = self.cur.sigs.insert_full(sig);
        self.cur.fps.push(fp);
        i as u32
    }

    /// Interns the multiset held in `items` (sorted in place).
    pub(crate) fn intern_set(&mut self, items: &mut [u32]) -> u32 {
        items.sort_unstable();
        if let Some(i) = self.cur.sets.get_index_of(&*items) {
            return i as u32;
        }
        let mut fps = std::mem::take(&mut self.scratch);
        fps.clear();
        fps.extend(items.iter().map(|&c| self.prev_fp(c)));
        fps.sort_unstable();
        let fp = fold(6, fps.iter().copied());
        self.scratch = fps;
        let (i, _) = self.cur.sets.insert_full(items.into());
        self.cur.set_fps.push(fp);
        i as u32
    }

    /// Interns the multiset of packed folklore entries (sorted in place).
    pub(crate) fn intern_pair_set(&mut self, items: &mut [u64]) -> u32 {
        items.sort_unstable();
        if let Some(i) = self.cur.pair_sets.get_index_of(&*items) {
            return i as u32;
        }
        let mut fps = std::mem::take(&mut self.scratch);
        fps.clear();
        fps.extend(items.iter().map(|&x| {
            let (a, b) = unpack(x);
            mix(self.prev_fp(a), self.prev_fp(b))
        }));
        fps.sort_unstable();
        let fp = fold(8, fps.iter().copied());
        self.scratch = fps;
        let (i, _) = self.cur.pair_sets.insert_full(items.into());
        self.cur.pair_set_fps.push(fp);
        i as u32
    }
}
