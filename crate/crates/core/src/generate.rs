//! Deterministic graph generators.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn build(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator edges are valid")
}

pub fn cycle(n: usize) -> Graph {
    let n32 = n as u32;
    build(n, (0..n32).map(|i| (i, (i + 1) % n32)).filter(|(a, b)| a != b))
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n as u32).map(|i| (i - 1, i)))
}

pub fn complete(n: usize) -> Graph {
    let n = n as u32;
    build(n as usize, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
}

/// `K_{1,leaves}` with center 0.
pub fn star(leaves: usize) -> Graph {
    build(leaves + 1, (1..=leaves as u32).map(|v| (0, v)))
}

/// `G(n, p)`: every pair independently with probability `p`.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    build(n, edges)
}

/// Watts–Strogatz: ring lattice where each node links to its `k/2`
/// nearest neighbors on each side, then each lattice edge `(i, i+j)` is
/// rewired to `(i, w)` with probability `beta` (uniform `w`, no self-loops
/// or duplicates).
pub fn watts_strogatz<R: Rng>(n: usize, k: usize, beta: f64, rng: &mut R) -> Graph {
    let half = (k / 2).min(n.saturating_sub(1) / 2);
    let mut adj: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); n];
    let n32 = n as u32;
    for i in 0..n32 {
        for j in 1..=half as u32 {
            let t = (i + j) % n32;
            adj[i as usize].insert(t);
            adj[t as usize].insert(i);
        }
    }
    for j in 1..=half as u32 {
        for i in 0..n32 {
            let t = (i + j) % n32;
            if !rng.random_bool(beta) || adj[i as usize].len() >= n - 1 {
                continue;
            }
            if !adj[i as usize].contains(&t) {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n32);
                if w != i && !adj[i as usize].contains(&w) {
                    break w;
                }
            };
            adj[i as usize].remove(&t);
            adj[t as usize].remove(&i);
            adj[i as usize].insert(w);
            adj[w as usize].insert(i);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(a, s)| s.iter().filter(move |&&b| b > a as u32).map(move |&b| (a as u32, b)));
    build(n, edges)
}

/// A named generator with parameters, e.g. `ring:n=200,k=4,beta=0.1`.
///
/// | family  | parameters            |
/// |---------|-----------------------|
/// | `ring`  | `n`, `k`, `beta`      |
/// | `er`    | `n`, `p`              |
/// | `cycle` | `n`                   |
/// | `path`  | `n`                   |
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Ring { n: usize, k: usize, beta: f64 },
    ErdosRenyi { n: usize, p: f64 },
    Cycle { n: usize },
    Path { n: usize },
}

impl GeneratorSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::CorpusSpec(text.to_string());
        let (family, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            params.insert(k.trim(), v.trim());
        }
        let int = |key: &str| -> Result<usize> {
            params.get(key).ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        let prob = |key: &str| -> Result<f64> {
            let x: f64 = params.get(key).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                Err(bad())
            }
        };
        let (spec, keys): (Self, &[&str]) = match family.trim() {
            "ring" => (
                GeneratorSpec::Ring { n: int("n")?, k: int("k")?, beta: prob("beta")? },
                &["n", "k", "beta"],
            ),
            "er" => (GeneratorSpec::ErdosRenyi { n: int("n")?, p: prob("p")? }, &["n", "p"]),
            "cycle" => (GeneratorSpec::Cycle { n: int("n")? }, &["n"]),
            "path" => (GeneratorSpec::Path { n: int("n")? }, &["n"]),
            _ => return Err(bad()),
        };
        if params.keys().any(|k| !keys.contains(k)) {
            return Err(bad());
        }
        Ok(spec)
    }

    pub fn generate(&self, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            GeneratorSpec::Ring { n, k, beta } => watts_strogatz(n, k, beta, &mut rng),
            GeneratorSpec::ErdosRenyi { n, p } => erdos_renyi(n, p, &mut rng),
            GeneratorSpec::Cycle { n } => cycle(n),
            GeneratorSpec::Path { n } => path(n),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Ring { n, k, beta } => write!(f, "ring:n={n},k={k},beta={beta}"),
            GeneratorSpec::ErdosRenyi { n, p } => write!(f, "er:n={n},p={p}"),
            GeneratorSpec::Cycle { n } => write!(f, "cycle:n={n}"),
            GeneratorSpec::Path { n } => write!(f, "path:n={n}"),
        }
    }
}
