//! Search over 4×4 number squares for links that the folklore test cannot
//! separate but 0/1 labeling can.

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};
use crate::harness::corpus::{Corpus, NamedGraph};
use crate::harness::power::{run_kind, PowerOptions};
use crate::wl::{indistinguishable, Masking, TestKind};

/// A 4×4 square, row-major, entries in `0..4`, each used four times.
pub type Square = [u8; 16];

/// Which squares to examine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SquarePool {
    /// Every split of the 16 cells into four groups of four (numbers up to
    /// relabeling, which does not change the graph).
    Partitions,
    /// Latin squares: every number once per row and column.
    Latin,
    Explicit(Vec<Square>),
}

impl SquarePool {
    /// `partitions`, `latin`, or `explicit:S;S;...` with each `S` sixteen
    /// digits from 1 to 4.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::CorpusSpec(spec.to_string());
        match spec.trim() {
            "partitions" => Ok(SquarePool::Partitions),
            "latin" => Ok(SquarePool::Latin),
            s => {
                let body = s.strip_prefix("explicit:").ok_or_else(bad)?;
                let mut squares = Vec::new();
                for part in body.split(';').filter(|p| !p.trim().is_empty()) {
                    let digits: Vec<u8> = part
                        .trim()
                        .bytes()
                        .map(|b| match b {
                            b'1'..=b'4' => Ok(b - b'1'),
                            _ => Err(bad()),
                        })
                        .collect::<Result<_>>()?;
                    let sq: Square = digits.try_into().map_err(|_| bad())?;
                    if (0..4).any(|d| sq.iter().filter(|&&x| x == d).count() != 4) {
                        return Err(bad());
                    }
                    squares.push(sq);
                }
                Ok(SquarePool::Explicit(squares))
            }
        }
    }

    fn for_each(&self, mut f: impl FnMut(&Square)) {
        match self {
            SquarePool::Explicit(list) => list.iter().for_each(f),
            SquarePool::Latin => {
                let mut sq = [0u8; 16];
                latin(&mut sq, 0, &mut f);
            }
            SquarePool::Partitions => {
                let mut sq = [0u8; 16];
                partitions(&mut sq, 0, [0; 4], 0, &mut f);
            }
        }
    }
}

fn latin(sq: &mut Square, cell: usize, f: &mut impl FnMut(&Square)) {
    if cell == 16 {
        f(sq);
        return;
    }
    let (r, c) = (cell / 4, cell % 4);
    for d in 0..4u8 {
        let clash = (0..c).any(|j| sq[r * 4 + j] == d) || (0..r).any(|i| sq[i * 4 + c] == d);
        if !clash {
            sq[cell] = d;
            latin(sq, cell + 1, f);
        }
    }
}

/// Canonical numbering: a new group always takes the smallest unused
/// number, so each split is produced once.
fn partitions(sq: &mut Square, cell: usize, sizes: [u8; 4], used: u8, f: &mut impl FnMut(&Square)) {
    if cell == 16 {
        f(sq);
        return;
    }
    for d in 0..=used.min(3) {
        if sizes[d as usize] == 4 {
            continue;
        }
        sq[cell] = d;
        let mut s = sizes;
        s[d as usize] += 1;
        partitions(sq, cell + 1, s, used.max(d + 1), f);
    }
}

/// Adjacency rows: same row, same column, or same number.
fn adjacency(sq: &Square) -> [u16; 16] {
    let mut adj = [0u16; 16];
    for u in 0..16 {
        for v in 0..16 {
            if u != v && (u / 4 == v / 4 || u % 4 == v % 4 || sq[u] == sq[v]) {
                adj[u] |= 1 << v;
            }
        }
    }
    adj
}

/// Every pair of distinct nodes, adjacent or not, has exactly two common
/// neighbors.
pub fn two_common_neighbors(adj: &[u16; 16]) -> bool {
    (0..16).all(|u| ((u + 1)..16).all(|v| (adj[u] & adj[v]).count_ones() == 2))
}

pub fn square_graph(sq: &Square) -> Graph {
    let adj = adjacency(sq);
    let edges = (0..16u32).flat_map(|u| {
        let row = adj[u as usize];
        ((u + 1)..16).filter(move |&v| row & (1 << v) != 0).map(move |v| (u, v))
    });
    Graph::from_edges(16, edges).expect("square graphs are simple")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagicWitness {
    pub square_a: Square,
    pub link_a: Pair,
    pub square_b: Square,
    pub link_b: Pair,
    /// Round at which 0/1 labeling separates the links.
    pub label01_round: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagicSearch {
    pub examined: usize,
    /// Squares whose graph has the two-common-neighbors property.
    pub regular: usize,
    pub distinct_graphs: usize,
    pub witness: Option<MagicWitness>,
}

impl MagicSearch {
    pub fn graphs(&self) -> Option<(Graph, Graph)> {
        self.witness
            .as_ref()
            .map(|w| (square_graph(&w.square_a), square_graph(&w.square_b)))
    }
}

/// Examines every square of the pool, keeps the regular ones, and looks for
/// two links (targets masked) with equal folklore colors but different 0/1
/// labeled colors. The first such pair is re-checked directly.
pub fn magic_square_search(pool: &SquarePool) -> Result<MagicSearch> {
    let mut examined = 0;
    let mut regular = 0;
    let mut seen: FxHashSet<[u16; 16]> = FxHashSet::default();
    let mut squares: Vec<Square> = Vec::new();
    pool.for_each(|sq| {
        examined += 1;
        let adj = adjacency(sq);
        if two_common_neighbors(&adj) {
            regular += 1;
            if seen.insert(adj) {
                squares.push(*sq);
            }
        }
    });
    let mut search = MagicSearch { examined, regular, distinct_graphs: squares.len(), witness: None };
    if squares.is_empty() {
        return Ok(search);
    }
    let mut corpus = Corpus::empty("squares");
    for (i, sq) in squares.iter().enumerate() {
        corpus.graphs.push(NamedGraph { name: format!("square{i}"), graph: square_graph(sq) });
        for p in 0..16u32 {
            for q in (p + 1)..16 {
                corpus.add_instance(i, (p, q))?;
            }
        }
    }
    let opts = PowerOptions {
        max_iters: None,
        masking: Masking::Masked,
        oracle_max_n: None,
        parallel: false,
    };
    let folklore = run_kind(TestKind::FWL2, &corpus, &opts)?;
    let labeled = run_kind(TestKind::WL1_Label01, &corpus, &opts)?;
    let mut first = rustc_hash::FxHashMap::default();
    for j in 0..corpus.instances.len() {
        let i = *first.entry(folklore.classes[j]).or_insert(j);
        if labeled.classes[i] == labeled.classes[j] {
            continue;
        }
        let (a, b) = (corpus.instances[i], corpus.instances[j]);
        let (ga, gb) = (corpus.graph_of(&a), corpus.graph_of(&b));
        let fw = indistinguishable(TestKind::FWL2, a.target, ga, b.target, gb, None)?;
        let lab = indistinguishable(TestKind::WL1_Label01, a.target, ga, b.target, gb, None)?;
        if let (None, Some(round)) = (fw.distinguished_at, lab.distinguished_at) {
            search.witness = Some(MagicWitness {
                square_a: squares[a.graph],
                link_a: a.target,
                square_b: squares[b.graph],
                link_b: b.target,
                label01_round: round,
            });
            break;
        }
    }
    Ok(search)
}
