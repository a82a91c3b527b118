//! One refinement round for each test kind.

use std::borrow::Cow;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};
use crate::wl::color::{ColorMap, Store};
use crate::wl::interner::{pack, Interner, PairInit, Prev, Signature, ABSENT};
use crate::wl::{Masking, TestKind};

static REFINEMENT_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of refinement-monotonicity checks performed so far in this
/// process. Checks only run with debug assertions enabled.
pub fn refinement_checks() -> u64 {
    REFINEMENT_CHECKS.load(Ordering::Relaxed)
}

/// The graph a kind actually refines: target edge removed when masked,
/// target nodes marked for the 0/1 labeling test.
pub(crate) fn prepared_graph<'g>(
    kind: TestKind,
    g: &'g Graph,
    target: Option<Pair>,
    masking: Masking,
) -> Result<Cow<'g, Graph>> {
    if let Some(t) = target {
        g.check_pair(t)?;
    }
    let mut h = match (target, masking) {
        (Some((p, q)), Masking::Masked) if g.has_edge(p, q) => Cow::Owned(g.without_edge(p, q)),
        _ => Cow::Borrowed(g),
    };
    if kind == TestKind::WL1_Label01 {
        let t = target.ok_or(Error::MissingTarget { kind })?;
        h = Cow::Owned(h.label01(t)?);
    }
    Ok(h)
}

/// Probe pairs for a set of targets: both orientations, sorted, only for
/// local kinds (global kinds already hold every pair).
pub(crate) fn probe_pairs(kind: TestKind, targets: &[Pair]) -> Vec<Pair> {
    if !kind.is_local() {
        return Vec::new();
    }
    let mut probes: Vec<Pair> = targets.iter().flat_map(|&(p, q)| [(p, q), (q, p)]).collect();
    probes.sort_unstable();
    probes.dedup();
    probes
}

fn init_of(g: &Graph, a: u32, b: u32) -> PairInit {
    PairInit {
        left: g.label(a),
        right: g.label(b),
        edge: g.has_edge(a, b),
        diagonal: a == b,
    }
}

fn directed_edges(g: &Graph) -> Vec<Pair> {
    (0..g.n() as u32)
        .flat_map(|a| g.neighbors(a).iter().map(move |&b| (a, b)))
        .collect()
}

/// Adjacency-derived lookup tables, fixed for a graph.
#[derive(Clone, Debug, Default)]
pub(crate) struct Aux {
    /// CSR offsets of directed edges.
    offsets: Vec<u32>,
    /// For directed edge `i = (a, b)`, the index of `(b, a)`.
    rev: Vec<u32>,
}

impl Aux {
    pub(crate) fn new(kind: TestKind, g: &Graph) -> Self {
        if kind != TestKind::WL2_Local {
            return Aux::default();
        }
        let mut offsets = Vec::with_capacity(g.n() + 1);
        offsets.push(0u32);
        for v in 0..g.n() as u32 {
            offsets.push(offsets[v as usize] + g.degree(v) as u32);
        }
        let mut rev = Vec::with_capacity(2 * g.edge_count());
        for a in 0..g.n() as u32 {
            for &b in g.neighbors(a) {
                let k = g.neighbors(b).binary_search(&a).expect("symmetric adjacency");
                rev.push(offsets[b as usize] + k as u32);
            }
        }
        Aux { offsets, rev }
    }
}

/// Round-0 colors.
pub(crate) fn init(
    kind: TestKind,
    g: &Graph,
    target: Option<Pair>,
    masking: Masking,
    probes: &[Pair],
    interner: &mut Interner,
) -> ColorMap {
    debug_assert_eq!(interner.round(), 0);
    let n = g.n();
    let store = if kind.is_node_kind() {
        Store::Nodes((0..n as u32).map(|v| interner.intern(Signature::Label(g.label(v)))).collect())
    } else if kind.is_dense() {
        let mut c = Vec::with_capacity(n * n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                c.push(interner.intern(Signature::Pair(init_of(g, a, b))));
            }
        }
        Store::Dense(c)
    } else {
        let pairs = directed_edges(g);
        let colors = pairs
            .iter()
            .map(|&(a, b)| interner.intern(Signature::Pair(init_of(g, a, b))))
            .collect();
        Store::Pairs { pairs: Arc::new(pairs), colors }
    };
    let probes = probes
        .iter()
        .map(|&(a, b)| ((a, b), interner.intern(Signature::Pair(init_of(g, a, b)))))
        .collect();
    ColorMap {
        kind,
        session: interner.session(),
        round: 0,
        target,
        masking,
        n,
        store,
        probes,
    }
}

/// Computes the next round's colors. The interner must already be on
/// round `prev.round + 1`.
pub(crate) fn step(g: &Graph, aux: &Aux, prev: &ColorMap, interner: &mut Interner) -> ColorMap {
    debug_assert_eq!(interner.round(), prev.round + 1);
    let kind = prev.kind;
    let (store, probes) = match (&prev.store, kind) {
        (Store::Nodes(c), _) => (Store::Nodes(step_wl1(g, c, interner)), Vec::new()),
        (Store::Dense(c), TestKind::WL2) => (Store::Dense(step_wl2(g.n(), c, interner)), Vec::new()),
        (Store::Dense(c), _) => (Store::Dense(step_fwl2(g.n(), c, interner)), Vec::new()),
        (Store::Pairs { pairs, colors }, TestKind::WL2_Local) => {
            step_wl2_local(g, aux, pairs, colors, &prev.probes, interner)
        }
        (Store::Pairs { pairs, colors }, _) => step_fwl2_local(g, pairs, colors, &prev.probes, interner),
    };
    let next = ColorMap {
        store,
        probes,
        round: prev.round + 1,
        ..prev.clone_meta()
    };
    if cfg!(debug_assertions) {
        assert_refines(prev, &next);
    }
    next
}

impl ColorMap {
    fn clone_meta(&self) -> ColorMap {
        ColorMap {
            kind: self.kind,
            session: self.session,
            round: self.round,
            target: self.target,
            masking: self.masking,
            n: self.n,
            store: Store::Nodes(Vec::new()),
            probes: Vec::new(),
        }
    }
}

fn step_wl1(g: &Graph, c: &[u32], interner: &mut Interner) -> Vec<u32> {
    let mut buf = Vec::new();
    (0..g.n() as u32)
        .map(|v| {
            buf.clear();
            buf.extend(g.neighbors(v).iter().map(|&u| c[u as usize]));
            let neighbors = interner.intern_set(&mut buf);
            interner.intern(Signature::Node { prev: c[v as usize], neighbors })
        })
        .collect()
}

fn step_wl2(n: usize, c: &[u32], interner: &mut Interner) -> Vec<u32> {
    let mut buf = Vec::with_capacity(n);
    let cols: Vec<u32> = (0..n)
        .map(|q| {
            buf.clear();
            buf.extend((0..n).map(|u| c[u * n + q]));
            interner.intern_set(&mut buf)
        })
        .collect();
    let rows: Vec<u32> = (0..n)
        .map(|p| {
            buf.clear();
            buf.extend_from_slice(&c[p * n..(p + 1) * n]);
            interner.intern_set(&mut buf)
        })
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            out.push(interner.intern(Signature::Plain {
                prev: c[p * n + q],
                first: cols[q],
                second: rows[p],
            }));
        }
    }
    out
}

fn step_fwl2(n: usize, c: &[u32], interner: &mut Interner) -> Vec<u32> {
    let mut buf = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            buf.clear();
            buf.extend((0..n).map(|u| pack(c[u * n + q], c[p * n + u])));
            let entries = interner.intern_pair_set(&mut buf);
            out.push(interner.intern(Signature::Folklore {
                prev: Prev::Color(c[p * n + q]),
                entries,
            }));
        }
    }
    out
}

fn step_wl2_local(
    g: &Graph,
    aux: &Aux,
    pairs: &Arc<Vec<Pair>>,
    c: &[u32],
    probes: &[(Pair, u32)],
    interner: &mut Interner,
) -> (Store, Vec<(Pair, u32)>) {
    let n = g.n();
    let mut buf = Vec::new();
    let mut incoming = Vec::with_capacity(n);
    let mut outgoing = Vec::with_capacity(n);
    for v in 0..n {
        let range = aux.offsets[v] as usize..aux.offsets[v + 1] as usize;
        buf.clear();
        buf.extend(range.clone().map(|i| c[aux.rev[i] as usize]));
        incoming.push(interner.intern_set(&mut buf));
        buf.clear();
        buf.extend_from_slice(&c[range]);
        outgoing.push(interner.intern_set(&mut buf));
    }
    let sig = |prev: u32, (r, s): Pair| Signature::Plain {
        prev,
        first: incoming[s as usize],
        second: outgoing[r as usize],
    };
    let colors = pairs
        .iter()
        .zip(c)
        .map(|(&e, &prev)| interner.intern(sig(prev, e)))
        .collect();
    let probes = probes
        .iter()
        .map(|&(e, prev)| (e, interner.intern(sig(prev, e))))
        .collect();
    (Store::Pairs { pairs: Arc::clone(pairs), colors }, probes)
}

/// `N(a) ∪ N(b)` as a sorted merge.
fn union_neighbors(g: &Graph, a: u32, b: u32, out: &mut Vec<u32>) {
    out.clear();
    let (x, y) = (g.neighbors(a), g.neighbors(b));
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let next = match (x.get(i), y.get(j)) {
            (Some(&u), Some(&v)) if u == v => {
                i += 1;
                j += 1;
                u
            }
            (Some(&u), Some(&v)) if u < v => {
                i += 1;
                u
            }
            (Some(&u), None) => {
                i += 1;
                u
            }
            (_, Some(&v)) => {
                j += 1;
                v
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
}

/// Sparse folklore refinement. A pair is tracked from round 0 if it is an
/// edge; an untracked pair `(a, b)` becomes tracked once some
/// `u ∈ N(a) ∪ N(b)` has both `(a, u)` and `(u, b)` tracked. Entries range
/// over `N(a) ∪ N(b)`, with untracked references reading as [`ABSENT`].
fn step_fwl2_local(
    g: &Graph,
    pairs: &Arc<Vec<Pair>>,
    c: &[u32],
    probes: &[(Pair, u32)],
    interner: &mut Interner,
) -> (Store, Vec<(Pair, u32)>) {
    let index: FxHashMap<Pair, u32> = pairs.iter().zip(c).map(|(&e, &col)| (e, col)).collect();
    let color = |a: u32, b: u32| index.get(&(a, b)).copied().unwrap_or(ABSENT);
    let mut around = Vec::new();
    let mut buf = Vec::new();
    let mut entries_of = |interner: &mut Interner, a: u32, b: u32| {
        union_neighbors(g, a, b, &mut around);
        buf.clear();
        buf.extend(around.iter().map(|&u| pack(color(u, b), color(a, u))));
        interner.intern_pair_set(&mut buf)
    };

    let old: Vec<u32> = pairs
        .iter()
        .zip(c)
        .map(|(&(a, b), &prev)| {
            let entries = entries_of(interner, a, b);
            interner.intern(Signature::Folklore { prev: Prev::Color(prev), entries })
        })
        .collect();

    let mut fresh: FxHashSet<Pair> = FxHashSet::default();
    for &(x, y) in pairs.iter() {
        // (x, y) as the second leg (u, b): a ∈ N(u) with (a, u) tracked.
        for &a in g.neighbors(x) {
            if a != y && index.contains_key(&(a, x)) && !index.contains_key(&(a, y)) {
                fresh.insert((a, y));
            }
        }
        // (x, y) as the first leg (a, u): b ∈ N(u) with (u, b) tracked.
        for &b in g.neighbors(y) {
            if b != x && index.contains_key(&(y, b)) && !index.contains_key(&(x, b)) {
                fresh.insert((x, b));
            }
        }
    }
    let mut fresh: Vec<Pair> = fresh.into_iter().collect();
    fresh.sort_unstable();
    let fresh_colors: Vec<u32> = fresh
        .iter()
        .map(|&(a, b)| {
            let entries = entries_of(interner, a, b);
            let prev = Prev::Fresh(init_of(g, a, b));
            interner.intern(Signature::Folklore { prev, entries })
        })
        .collect();

    let probes = probes
        .iter()
        .map(|&((a, b), prev)| {
            let entries = entries_of(interner, a, b);
            ((a, b), interner.intern(Signature::Folklore { prev: Prev::Color(prev), entries }))
        })
        .collect();

    let store = if fresh.is_empty() {
        Store::Pairs { pairs: Arc::clone(pairs), colors: old }
    } else {
        let mut merged = Vec::with_capacity(pairs.len() + fresh.len());
        let mut colors = Vec::with_capacity(pairs.len() + fresh.len());
        let (mut i, mut j) = (0, 0);
        while i < pairs.len() || j < fresh.len() {
            if j == fresh.len() || (i < pairs.len() && pairs[i] < fresh[j]) {
                merged.push(pairs[i]);
                colors.push(old[i]);
                i += 1;
            } else {
                merged.push(fresh[j]);
                colors.push(fresh_colors[j]);
                j += 1;
            }
        }
        Store::Pairs { pairs: Arc::new(merged), colors }
    };
    (store, probes)
}

/// Panics unless every class of `next` lies inside a class of `prev`
/// (restricted to units present in both rounds).
fn assert_refines(prev: &ColorMap, next: &ColorMap) {
    let mut parent: FxHashMap<u32, u32> = FxHashMap::default();
    let mut check = |new: u32, old: u32| {
        let seen = *parent.entry(new).or_insert(old);
        assert_eq!(
            seen, old,
            "refinement merged classes: color {new} at round {} covers old colors {seen} and {old}",
            next.round
        );
    };
    match (&prev.store, &next.store) {
        (Store::Nodes(a), Store::Nodes(b)) | (Store::Dense(a), Store::Dense(b)) => {
            assert_eq!(a.len(), b.len());
            a.iter().zip(b).for_each(|(&o, &n)| check(n, o));
        }
        (Store::Pairs { pairs: pa, colors: ca }, Store::Pairs { pairs: pb, colors: cb }) => {
            assert!(pb.len() >= pa.len(), "tracked set shrank");
            let mut j = 0;
            for (i, e) in pa.iter().enumerate() {
                while pb[j] != *e {
                    j += 1;
                }
                check(cb[j], ca[i]);
            }
        }
        _ => panic!("store layout changed between rounds"),
    }
    assert_eq!(prev.probes.len(), next.probes.len());
    for (&(e, o), &(f, n)) in prev.probes.iter().zip(&next.probes) {
        assert_eq!(e, f);
        check(n, o);
    }
    REFINEMENT_CHECKS.fetch_add(1, Ordering::Relaxed);
}
