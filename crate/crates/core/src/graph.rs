//! Simple undirected labeled graphs.
//!
//! Nodes are `0..n`, edges are stored once as `(u, v)` with `u < v`, and
//! every node has a sorted neighbor list. Labels are dense integers; graphs
//! read without a label file get label 0 everywhere.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Ordered node pair `(p, q)`.
pub type Pair = (u32, u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    labels: Vec<u32>,
    adj: Vec<Vec<u32>>,
    edges: Vec<Pair>,
}

impl Graph {
    /// Graph with `n` isolated nodes, all labeled 0.
    pub fn empty(n: usize) -> Self {
        Graph {
            labels: vec![0; n],
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an edge iterator. Duplicate edges (in either
    /// orientation) collapse; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Pair>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfPair(u));
            }
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::NodeOutOfRange { node: w, n });
                }
            }
            list.push((u.min(v), u.max(v)));
        }
        Ok(Self::from_canonical(vec![0; n], list))
    }

    fn from_canonical(labels: Vec<u32>, mut edges: Vec<Pair>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); labels.len()];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { labels, adj, edges }
    }

    /// Replaces the node labels; `labels.len()` must equal `n`.
    pub fn with_labels(mut self, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Parse {
                line: labels.len().min(self.n()) + 1,
                reason: format!("{} labels for {} nodes", labels.len(), self.n()),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[Pair] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// One past the largest label in use (0 for the empty graph).
    pub fn label_alphabet(&self) -> u32 {
        self.labels.iter().max().map_or(0, |&l| l + 1)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn is_isolated(&self, v: u32) -> bool {
        self.adj[v as usize].is_empty()
    }

    pub fn isolated_count(&self) -> usize {
        self.adj.iter().filter(|a| a.is_empty()).count()
    }

    /// Number of unordered non-adjacent node pairs.
    pub fn non_edge_count(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1) / 2 - self.edges.len()
    }

    /// Validates a target pair: both ids in range and distinct.
    pub fn check_pair(&self, (p, q): Pair) -> Result<()> {
        self.check_node(p)?;
        self.check_node(q)?;
        if p == q {
            return Err(Error::SelfPair(p));
        }
        Ok(())
    }

    pub fn check_node(&self, v: u32) -> Result<()> {
        if v as usize >= self.n() {
            return Err(Error::NodeOutOfRange { node: v, n: self.n() });
        }
        Ok(())
    }

    /// Copy of the graph with the edge `{p, q}` removed (no-op if absent).
    pub fn without_edge(&self, p: u32, q: u32) -> Graph {
        if !self.has_edge(p, q) {
            return self.clone();
        }
        let key = (p.min(q), p.max(q));
        let mut g = self.clone();
        g.edges.retain(|&e| e != key);
        g.adj[p as usize].retain(|&w| w != q);
        g.adj[q as usize].retain(|&w| w != p);
        g
    }

    /// Copy of the graph with the edge `{p, q}` added.
    pub fn with_edge(&self, p: u32, q: u32) -> Result<Graph> {
        self.check_pair((p, q))?;
        let mut edges = self.edges.clone();
        edges.push((p.min(q), p.max(q)));
        Ok(Self::from_canonical(self.labels.clone(), edges))
    }

    /// Relabels nodes by `pi`: node `u` becomes `pi[u]`, keeping its label.
    pub fn permute(&self, pi: &[u32]) -> Result<Graph> {
        let n = self.n();
        if pi.len() != n {
            return Err(Error::NotAPermutation(n));
        }
        let mut seen = vec![false; n];
        for &x in pi {
            if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::NotAPermutation(n));
            }
        }
        let mut labels = vec![0; n];
        for (u, &x) in pi.iter().enumerate() {
            labels[x as usize] = self.labels[u];
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (pi[u as usize], pi[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        Ok(Self::from_canonical(labels, edges))
    }

    /// `self ⊔ other`; nodes of `other` are shifted by the returned offset.
    pub fn disjoint_union(&self, other: &Graph) -> (Graph, u32) {
        let offset = self.n() as u32;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
        (Self::from_canonical(labels, edges), offset)
    }

    /// 0/1 labeling trick: the new label of `v` is `2 * l(v) + [v ∈ {p, q}]`,
    /// an injective encoding of `(original label, is_target)`.
    pub fn label01(&self, target: Pair) -> Result<Graph> {
        self.check_pair(target)?;
        let mut g = self.clone();
        for (v, l) in g.labels.iter_mut().enumerate() {
            let marked = v as u32 == target.0 || v as u32 == target.1;
            *l = 2 * *l + u32::from(marked);
        }
        Ok(g)
    }

    /// Serializes to the edge-list text format (one `u v` per line, after
    /// a `# nodes N` header that keeps trailing isolated nodes).
    pub fn to_edgelist(&self) -> String {
        let mut out = format!("# nodes {}\n", self.n());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Serializes labels, one per line.
    pub fn labels_text(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

/// Parses the edge-list text format.
///
/// Each non-blank line that does not start with `#` must hold exactly two
/// whitespace-separated 0-based node ids. Without `labels`, `n` is one past
/// the largest id seen; with `labels`, `n = labels.len()` and every id must
/// fit. A `# nodes N` comment raises `n` to at least `N`.
pub fn load_edgelist(text: &str, labels: Option<&[u32]>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    let mut declared = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if let Some(rest) = body.strip_prefix('#') {
            if let Some(count) = rest.trim().strip_prefix("nodes ") {
                declared = count.trim().parse().map_err(|_| Error::Parse {
                    line,
                    reason: format!("bad node count {:?}", count.trim()),
                })?;
            }
            continue;
        }
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let mut next_id = || -> Result<u32> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line,
                reason: "expected two node ids".into(),
            })?;
            tok.parse::<u32>().map_err(|_| Error::Parse {
                line,
                reason: format!("bad node id {tok:?}"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line,
                reason: "trailing tokens after edge".into(),
            });
        }
        if u == v {
            return Err(Error::SelfLoop { line });
        }
        if let Some(labels) = labels {
            for w in [u, v] {
                if w as usize >= labels.len() {
                    return Err(Error::Parse {
                        line,
                        reason: format!("node {w} has no label ({} labels given)", labels.len()),
                    });
                }
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let n = match labels {
        Some(l) => l.len(),
        None => max_id.map_or(0, |m| m as usize + 1).max(declared),
    };
    let g = Graph::from_edges(n, edges)?;
    match labels {
        Some(l) => g.with_labels(l.to_vec()),
        None => Ok(g),
    }
}

/// Parses a label file: one non-negative integer per line, line `i` is the
/// label of node `i`. Blank and `#` lines are skipped.
pub fn parse_labels(text: &str) -> Result<Vec<u32>> {
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let l = body.parse::<u32>().map_err(|_| Error::Parse {
            line: idx + 1,
            reason: format!("bad label {body:?}"),
        })?;
        labels.push(l);
    }
    Ok(labels)
}

/// Parses `"p,q"` into an ordered pair.
pub fn parse_pair(text: &str) -> Result<Pair> {
    let bad = || Error::Parse {
        line: 1,
        reason: format!("expected \"p,q\", got {text:?}"),
    };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let p = a.trim().parse().map_err(|_| bad())?;
    let q = b.trim().parse().map_err(|_| bad())?;
    Ok((p, q))
}
