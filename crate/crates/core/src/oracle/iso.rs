//! Exhaustive link isomorphism for small graphs.

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};
use crate::wl::Masking;

pub const DEFAULT_ORACLE_BOUND: usize = 9;

fn masked(g: &Graph, (p, q): Pair, masking: Masking) -> Graph {
    match masking {
        Masking::Masked => g.without_edge(p, q),
        Masking::Unmasked => g.clone(),
    }
}

/// Is there a label- and edge-preserving bijection mapping `p1 → p2` and
/// `q1 → q2`? With [`Masking::Masked`] the target edges are removed from
/// both graphs first.
pub fn link_isomorphic(g1: &Graph, e1: Pair, g2: &Graph, e2: Pair, masking: Masking) -> Result<bool> {
    link_isomorphic_bounded(g1, e1, g2, e2, masking, DEFAULT_ORACLE_BOUND)
}

pub fn link_isomorphic_bounded(
    g1: &Graph,
    e1: Pair,
    g2: &Graph,
    e2: Pair,
    masking: Masking,
    bound: usize,
) -> Result<bool> {
    g1.check_pair(e1)?;
    g2.check_pair(e2)?;
    for n in [g1.n(), g2.n()] {
        if n > bound {
            return Err(Error::OracleBound { n, bound });
        }
    }
    let (a, b) = (masked(g1, e1, masking), masked(g2, e2, masking));
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let profile = |g: &Graph, v: u32| (g.label(v), g.degree(v));
    let mut pa: Vec<_> = (0..a.n() as u32).map(|v| profile(&a, v)).collect();
    let mut pb: Vec<_> = (0..b.n() as u32).map(|v| profile(&b, v)).collect();
    pa.sort_unstable();
    pb.sort_unstable();
    if pa != pb {
        return Ok(false);
    }
    let n = a.n();
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    let fixed = [(e1.0, e2.0), (e1.1, e2.1)];
    for &(x, y) in &fixed {
        if profile(&a, x) != profile(&b, y) {
            return Ok(false);
        }
        map[x as usize] = y;
        used[y as usize] = true;
    }
    if a.has_edge(e1.0, e1.1) != b.has_edge(e2.0, e2.1) {
        return Ok(false);
    }
    let order: Vec<u32> = (0..n as u32).filter(|&v| v != e1.0 && v != e1.1).collect();
    Ok(extend(&a, &b, &order, 0, &mut map, &mut used))
}

fn extend(a: &Graph, b: &Graph, order: &[u32], k: usize, map: &mut [u32], used: &mut [bool]) -> bool {
    let Some(&x) = order.get(k) else {
        return true;
    };
    for y in 0..b.n() as u32 {
        if used[y as usize] || a.label(x) != b.label(y) || a.degree(x) != b.degree(y) {
            continue;
        }
        let consistent = (0..a.n() as u32).all(|z| {
            let my = map[z as usize];
            my == u32::MAX || a.has_edge(x, z) == b.has_edge(y, my)
        });
        if !consistent {
            continue;
        }
        map[x as usize] = y;
        used[y as usize] = true;
        if extend(a, b, order, k + 1, map, used) {
            return true;
        }
        map[x as usize] = u32::MAX;
        used[y as usize] = false;
    }
    false
}

/// Canonical form of a link: the lexicographically smallest
/// `(labels, adjacency bits)` over all relabelings sending `p → 0`,
/// `q → 1`. Equal codes ⇔ link isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    labels: Vec<u32>,
    adjacency: u64,
}

/// Largest `n` whose upper adjacency triangle fits in 64 bits.
const CODE_BOUND: usize = 11;

pub fn canonical_code(g: &Graph, e: Pair, masking: Masking) -> Result<CanonicalCode> {
    g.check_pair(e)?;
    if g.n() > CODE_BOUND {
        return Err(Error::OracleBound { n: g.n(), bound: CODE_BOUND });
    }
    let h = masked(g, e, masking);
    let n = h.n();
    let mut rest: Vec<u32> = (0..n as u32).filter(|&v| v != e.0 && v != e.1).collect();
    let mut order = vec![e.0, e.1];
    order.extend(&rest);
    let mut best: Option<CanonicalCode> = None;
    permute_tail(&mut rest, 0, &mut |tail| {
        order.truncate(2);
        order.extend_from_slice(tail);
        let labels: Vec<u32> = order.iter().map(|&v| h.label(v)).collect();
        if let Some(b) = &best {
            if labels > b.labels {
                return;
            }
        }
        let mut adjacency = 0u64;
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if h.has_edge(order[i], order[j]) {
                    adjacency |= 1 << bit;
                }
                bit += 1;
            }
        }
        let code = CanonicalCode { labels, adjacency };
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    });
    Ok(best.expect("at least one ordering"))
}

fn permute_tail(v: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_tail(v, k + 1, f);
        v.swap(k, i);
    }
}
