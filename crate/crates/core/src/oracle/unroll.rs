//! Unrolling trees of a target pair.
//!
//! * `Local` (local 2-WL): root `(p,q)`; node `(r,s)` has branches
//!   `{(r,i) : {r,i} ∈ E}` and `{(j,s) : {j,s} ∈ E}`, labels `(l(r), l(s))`.
//! * `Node` (1-WL): root `(p,q)` with branches `N(p)` and `N(q)`; node `k`
//!   has children `N(k)` and label `l(k)`.
//! * `Plain` (2-WL): as `Local` but over all `i, j ∈ [n]`, labels
//!   `(l(r), l(s), [rs ∈ E], [r = s])`.
//! * `Folklore` (2-FWL): root `(p,q)` with children `((p,i),(i,q))` for all
//!   `i`; node `((a,r),(r,b))` is labeled
//!   `(l(a), l(r), l(b), [ar ∈ E], [rb ∈ E], [a = r], [r = b])` and has
//!   branches `{((a,t),(t,r))}` and `{((r,s),(s,b))}`.
//!
//! The root is labeled `(l(p), l(q))` in every kind. Trees are built on the
//! graph as given; callers wanting prediction semantics pass the graph with
//! the target edge removed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreeKind {
    Local,
    Node,
    Plain,
    Folklore,
}

/// Trees beyond this many nodes are refused.
const NODE_BUDGET: usize = 4_000_000;

#[derive(Clone, Debug)]
struct TreeNode {
    label: Vec<u32>,
    /// Child indices per branch, sorted by hash.
    branches: Vec<Vec<u32>>,
    hash: u64,
}

#[derive(Clone, Debug)]
pub struct UnrollTree {
    kind: TreeKind,
    depth: usize,
    nodes: Vec<TreeNode>,
}

impl UnrollTree {
    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Bottom-up hash; children are combined in sorted order per branch.
    pub fn canonical_hash(&self) -> u64 {
        self.root().hash
    }

    fn root(&self) -> &TreeNode {
        self.nodes.last().expect("trees are never empty")
    }

    /// Root label followed by `(branch, child labels sorted)` for each
    /// branch; handy for inspecting shallow trees.
    pub fn root_summary(&self) -> (Vec<u32>, Vec<Vec<Vec<u32>>>) {
        let root = self.root();
        let branches = root
            .branches
            .iter()
            .map(|b| {
                let mut labels: Vec<Vec<u32>> = b.iter().map(|&c| self.nodes[c as usize].label.clone()).collect();
                labels.sort();
                labels
            })
            .collect();
        (root.label.clone(), branches)
    }
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h.rotate_left(29) ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Builder<'a> {
    g: &'a Graph,
    nodes: Vec<TreeNode>,
}

impl Builder<'_> {
    fn push(&mut self, label: Vec<u32>, mut branches: Vec<Vec<u32>>) -> Result<u32> {
        if self.nodes.len() >= NODE_BUDGET {
            return Err(Error::UnrollTooLarge { n: self.g.n(), depth: usize::MAX });
        }
        let mut h = label.iter().fold(0x51_7cc1_b727_220a, |h, &x| mix(h, u64::from(x)));
        for (tag, b) in branches.iter_mut().enumerate() {
            b.sort_by_key(|&c| self.nodes[c as usize].hash);
            h = mix(h, 0xb0 + tag as u64);
            h = mix(h, b.len() as u64);
            for &c in b.iter() {
                h = mix(h, self.nodes[c as usize].hash);
            }
        }
        self.nodes.push(TreeNode { label, branches, hash: h });
        Ok(self.nodes.len() as u32 - 1)
    }

    fn ind(&self, a: u32, b: u32) -> u32 {
        u32::from(self.g.has_edge(a, b))
    }

    fn local(&mut self, r: u32, s: u32, d: usize) -> Result<u32> {
        let label = vec![self.g.label(r), self.g.label(s)];
        let mut branches = vec![Vec::new(), Vec::new()];
        if d > 0 {
            for &i in self.g.neighbors(r) {
                let c = self.local(r, i, d - 1)?;
                branches[0].push(c);
            }
            for &j in self.g.neighbors(s) {
                let c = self.local(j, s, d - 1)?;
                branches[1].push(c);
            }
        }
        self.push(label, branches)
    }

    fn node(&mut self, k: u32, d: usize) -> Result<u32> {
        let mut children = Vec::new();
        if d > 0 {
            for &l in self.g.neighbors(k) {
                children.push(self.node(l, d - 1)?);
            }
        }
        self.push(vec![self.g.label(k)], vec![children])
    }

    fn plain(&mut self, r: u32, s: u32, d: usize, root: bool) -> Result<u32> {
        let label = if root {
            vec![self.g.label(r), self.g.label(s)]
        } else {
            vec![self.g.label(r), self.g.label(s), self.ind(r, s), u32::from(r == s)]
        };
        let mut branches = vec![Vec::new(), Vec::new()];
        if d > 0 {
            for i in 0..self.g.n() as u32 {
                let c = self.plain(r, i, d - 1, false)?;
                branches[0].push(c);
            }
            for j in 0..self.g.n() as u32 {
                let c = self.plain(j, s, d - 1, false)?;
                branches[1].push(c);
            }
        }
        self.push(label, branches)
    }

    /// Node `((a,r),(r,b))` with `d` levels below it.
    fn folklore(&mut self, a: u32, r: u32, b: u32, d: usize) -> Result<u32> {
        let g = self.g;
        let label = vec![
            g.label(a),
            g.label(r),
            g.label(b),
            self.ind(a, r),
            self.ind(r, b),
            u32::from(a == r),
            u32::from(r == b),
        ];
        let mut branches = vec![Vec::new(), Vec::new()];
        if d > 0 {
            for t in 0..g.n() as u32 {
                let c = self.folklore(a, t, r, d - 1)?;
                branches[0].push(c);
            }
            for s in 0..g.n() as u32 {
                let c = self.folklore(r, s, b, d - 1)?;
                branches[1].push(c);
            }
        }
        self.push(label, branches)
    }
}

/// Builds the depth-`depth` tree of `kind` for target `e` in `g`.
pub fn unroll(kind: TreeKind, g: &Graph, e: Pair, depth: usize) -> Result<UnrollTree> {
    g.check_node(e.0)?;
    g.check_node(e.1)?;
    if matches!(kind, TreeKind::Plain | TreeKind::Folklore) && g.n() > 8 && depth > 4 {
        return Err(Error::UnrollTooLarge { n: g.n(), depth });
    }
    let (p, q) = e;
    let mut b = Builder { g, nodes: Vec::new() };
    let result = match kind {
        TreeKind::Local => b.local(p, q, depth),
        TreeKind::Plain => b.plain(p, q, depth, true),
        TreeKind::Node => {
            let mut branches = vec![Vec::new(), Vec::new()];
            if depth > 0 {
                for &i in g.neighbors(p) {
                    let c = b.node(i, depth - 1)?;
                    branches[0].push(c);
                }
                for &j in g.neighbors(q) {
                    let c = b.node(j, depth - 1)?;
                    branches[1].push(c);
                }
            }
            b.push(vec![g.label(p), g.label(q)], branches)
        }
        TreeKind::Folklore => {
            let mut children = Vec::new();
            if depth > 0 {
                for i in 0..g.n() as u32 {
                    children.push(b.folklore(p, i, q, depth - 1)?);
                }
            }
            b.push(vec![g.label(p), g.label(q)], vec![children])
        }
    };
    match result {
        Ok(_) => Ok(UnrollTree { kind, depth, nodes: b.nodes }),
        Err(Error::UnrollTooLarge { n, .. }) => Err(Error::UnrollTooLarge { n, depth }),
        Err(e) => Err(e),
    }
}

/// Branch- and label-preserving equivalence of two trees of the same kind
/// and depth. Hashes decide quickly; equal hashes are confirmed by an exact
/// structural comparison.
pub fn tree_equal(t1: &UnrollTree, t2: &UnrollTree) -> Result<bool> {
    if t1.kind != t2.kind || t1.depth != t2.depth {
        return Err(Error::TreeMismatch(format!(
            "{:?} depth {} vs {:?} depth {}",
            t1.kind, t1.depth, t2.kind, t2.depth
        )));
    }
    if t1.canonical_hash() != t2.canonical_hash() {
        return Ok(false);
    }
    Ok(exact(t1, t1.nodes.len() as u32 - 1, t2, t2.nodes.len() as u32 - 1))
}

fn exact(t1: &UnrollTree, a: u32, t2: &UnrollTree, b: u32) -> bool {
    let (x, y) = (&t1.nodes[a as usize], &t2.nodes[b as usize]);
    if x.hash != y.hash || x.label != y.label || x.branches.len() != y.branches.len() {
        return false;
    }
    x.branches.iter().zip(&y.branches).all(|(bx, by)| {
        if bx.len() != by.len() {
            return false;
        }
        // Both sides are sorted by hash: walk equal-hash runs and match
        // greedily, which is exact because equality is an equivalence.
        let hash = |t: &UnrollTree, c: u32| t.nodes[c as usize].hash;
        let mut i = 0;
        while i < bx.len() {
            let h = hash(t1, bx[i]);
            if hash(t2, by[i]) != h {
                return false;
            }
            let end = (i..bx.len()).find(|&k| hash(t1, bx[k]) != h).unwrap_or(bx.len());
            if end < by.len() && hash(t2, by[end]) == h {
                return false;
            }
            let mut used = vec![false; end - i];
            for &cx in &bx[i..end] {
                let hit = (i..end).find(|&k| !used[k - i] && exact(t1, cx, t2, by[k]));
                match hit {
                    Some(k) => used[k - i] = true,
                    None => return false,
                }
            }
            i = end;
        }
        true
    })
}

impl PartialEq for UnrollTree {
    fn eq(&self, other: &Self) -> bool {
        tree_equal(self, other).unwrap_or(false)
    }
}
