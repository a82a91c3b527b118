use crate::error::{Error, Result};
use crate::graph::Graph;

fn distinct(p: u32, q: u32) -> Result<()> {
    if p == q {
        return Err(Error::SelfPair(p));
    }
    Ok(())
}

fn common(g: &Graph, p: u32, q: u32) -> impl Iterator<Item = u32> + '_ {
    // Both lists are sorted.
    let (a, b) = (g.neighbors(p), g.neighbors(q));
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    return Some(a[i - 1]);
                }
            }
        }
        None
    })
}

/// `|N(p) ∩ N(q)|`. The caller removes the pair's own edge first.
pub fn heuristic_cn(g: &Graph, p: u32, q: u32) -> Result<usize> {
    g.check_pair((p, q))?;
    distinct(p, q)?;
    Ok(common(g, p, q).count())
}

/// `deg(p) · deg(q)`.
pub fn heuristic_pa(g: &Graph, p: u32, q: u32) -> Result<usize> {
    g.check_pair((p, q))?;
    distinct(p, q)?;
    Ok(g.degree(p) * g.degree(q))
}

/// `Σ 1/deg(u)` over common neighbors `u`.
pub fn heuristic_ra(g: &Graph, p: u32, q: u32) -> Result<f64> {
    g.check_pair((p, q))?;
    distinct(p, q)?;
    Ok(common(g, p, q).map(|u| 1.0 / g.degree(u) as f64).sum())
}
