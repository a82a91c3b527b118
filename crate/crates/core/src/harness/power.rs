//! Pairwise distinguishability of corpus instances under each test.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Pair;
use crate::harness::corpus::Corpus;
use crate::oracle::canonical_code;
use crate::wl::{prepared_graph, Interner, Masking, Member, Session, TestKind};

#[derive(Clone, Debug)]
pub struct PowerOptions {
    /// Round cap for the corpus-wide sessions (default: per-kind cap of
    /// the largest graph).
    pub max_iters: Option<usize>,
    pub masking: Masking,
    /// Run the isomorphism cross-check on graphs with at most this many
    /// nodes.
    pub oracle_max_n: Option<usize>,
    pub parallel: bool,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            max_iters: None,
            masking: Masking::Masked,
            oracle_max_n: Some(7),
            parallel: true,
        }
    }
}

/// Per-round target colors of every instance under one test.
#[derive(Clone, Debug)]
pub struct KindOutcome {
    pub kind: TestKind,
    /// `rounds[t][i]`: ordered target colors of instance `i` at round `t`
    /// (`(c(p), c(q))` or `(c(p,q), c(q,p))`).
    pub rounds: Vec<Vec<[u32; 2]>>,
    pub stable_at: Option<usize>,
    /// Dense class of each instance's final undirected link color.
    pub classes: Vec<u32>,
}

fn undirected([a, b]: [u32; 2]) -> [u32; 2] {
    [a.min(b), a.max(b)]
}

impl KindOutcome {
    /// Final undirected color equality.
    pub fn distinguishes(&self, a: usize, b: usize) -> bool {
        self.classes[a] != self.classes[b]
    }

    /// First round at which the two links' colors differ.
    pub fn first_difference(&self, a: usize, b: usize) -> Option<usize> {
        self.rounds
            .iter()
            .position(|r| undirected(r[a]) != undirected(r[b]))
    }

    /// Ordered target colors at round `t` (the last round if the session
    /// stabilized earlier, which has the same partition).
    pub fn at_round(&self, t: usize) -> &[[u32; 2]] {
        &self.rounds[t.min(self.rounds.len() - 1)]
    }
}

fn dense_classes<K: std::hash::Hash + Eq + Copy>(keys: impl Iterator<Item = K>) -> Vec<u32> {
    let mut ids: FxHashMap<K, u32> = FxHashMap::default();
    keys.map(|k| {
        let next = ids.len() as u32;
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

/// Refines every instance of the corpus under `kind` in one lockstep
/// session. Instances sharing a graph and a hidden edge share a member;
/// local kinds track their targets as probes.
pub fn run_kind(kind: TestKind, corpus: &Corpus, opts: &PowerOptions) -> Result<KindOutcome> {
    if corpus.instances.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut interner = Interner::new();
    let mut members: Vec<Member> = Vec::new();
    // (member, target) per instance.
    let mut slot: Vec<usize> = Vec::with_capacity(corpus.instances.len());
    if kind == TestKind::WL1_Label01 {
        for inst in &corpus.instances {
            let g = prepared_graph(kind, corpus.graph_of(inst), Some(inst.target), opts.masking)?;
            members.push(Member::new(kind, g, None, opts.masking, &[], &mut interner));
            slot.push(members.len() - 1);
        }
    } else {
        let mut groups: BTreeMap<(usize, Option<Pair>), Vec<usize>> = BTreeMap::new();
        for (i, inst) in corpus.instances.iter().enumerate() {
            let g = corpus.graph_of(inst);
            g.check_pair(inst.target)?;
            let (p, q) = inst.target;
            let hidden = (opts.masking == Masking::Masked && g.has_edge(p, q)).then(|| (p.min(q), p.max(q)));
            groups.entry((inst.graph, hidden)).or_default().push(i);
        }
        slot = vec![0; corpus.instances.len()];
        for ((gi, hidden), list) in groups {
            let g = &corpus.graphs[gi].graph;
            let graph = match hidden {
                Some((p, q)) => Cow::Owned(g.without_edge(p, q)),
                None => Cow::Borrowed(g),
            };
            let targets: Vec<Pair> = list.iter().map(|&i| corpus.instances[i].target).collect();
            members.push(Member::new(kind, graph, None, opts.masking, &targets, &mut interner));
            for i in list {
                slot[i] = members.len() - 1;
            }
        }
    }
    let cap = opts.max_iters.unwrap_or_else(|| {
        let n = corpus.graphs.iter().map(|g| g.graph.n()).max().unwrap_or(0);
        kind.default_cap(n)
    });
    let mut session = Session::new(interner, members);
    let mut rounds = Vec::new();
    session.run(cap, |s| {
        let row = corpus
            .instances
            .iter()
            .zip(&slot)
            .map(|(inst, &m)| {
                s.members[m]
                    .colors
                    .target_colors(inst.target)
                    .expect("targets are tracked")
            })
            .collect();
        rounds.push(row);
        true
    });
    let last: &Vec<[u32; 2]> = rounds.last().expect("round 0 is always recorded");
    let classes = dense_classes(last.iter().map(|&c| undirected(c)));
    Ok(KindOutcome { kind, stable_at: session.stable_at, rounds, classes })
}

/// Count of `A ⇒ B` failures: pairs `A` separates but `B` does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Implication {
    pub holds: bool,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// `"A<B"` when `A ⇒ B` holds on the corpus (a strictness witness),
    /// `"A-B"` otherwise.
    pub relation: String,
    pub distinguished_by: TestKind,
    pub not_by: TestKind,
    pub instance_a: usize,
    pub instance_b: usize,
    pub iteration: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleSoundness {
    /// Instance pairs the exhaustive oracle found link isomorphic.
    pub checked: u64,
    /// (pair, test) combinations where a test separated such a pair.
    pub violations: u64,
    pub instances: usize,
}

#[derive(Clone, Debug)]
pub struct PowerReport {
    pub corpus: Corpus,
    pub kinds: Vec<TestKind>,
    pub outcomes: Vec<KindOutcome>,
    pub implications: BTreeMap<(TestKind, TestKind), Implication>,
    pub witnesses: Vec<Witness>,
    pub oracle_soundness: Option<OracleSoundness>,
}

fn pairs(s: u64) -> u64 {
    s * s.saturating_sub(1) / 2
}

fn same_class_pairs<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> u64 {
    let mut counts: FxHashMap<K, u64> = FxHashMap::default();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    counts.values().map(|&s| pairs(s)).sum()
}

/// First pair (in instance order) in the same `a` class but different `b`
/// classes.
fn find_witness(a: &[u32], b: &[u32]) -> Option<(usize, usize)> {
    let mut first: FxHashMap<u32, usize> = FxHashMap::default();
    for j in 0..a.len() {
        match first.get(&a[j]) {
            Some(&i) if b[i] != b[j] => return Some((i, j)),
            Some(_) => {}
            None => {
                first.insert(a[j], j);
            }
        }
    }
    None
}

/// Runs every kind over the corpus and tabulates implications between
/// them, strictness witnesses and (optionally) oracle soundness.
pub fn power_check(corpus: &Corpus, kinds: &[TestKind], opts: &PowerOptions) -> Result<PowerReport> {
    if corpus.instances.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let outcomes: Vec<KindOutcome> = if opts.parallel {
        kinds.par_iter().map(|&k| run_kind(k, corpus, opts)).collect::<Result<_>>()?
    } else {
        kinds.iter().map(|&k| run_kind(k, corpus, opts)).collect::<Result<_>>()?
    };

    let mut implications = BTreeMap::new();
    let mut witnesses = Vec::new();
    for a in &outcomes {
        for b in &outcomes {
            if a.kind == b.kind {
                continue;
            }
            let same_b = same_class_pairs(b.classes.iter());
            let same_ab = same_class_pairs(a.classes.iter().zip(&b.classes));
            let violations = same_b - same_ab;
            implications.insert((a.kind, b.kind), Implication { holds: violations == 0, violations });
        }
    }
    for a in &outcomes {
        for b in &outcomes {
            if a.kind == b.kind {
                continue;
            }
            // b separates something a does not.
            if let Some((i, j)) = find_witness(&a.classes, &b.classes) {
                let strict = implications[&(a.kind, b.kind)].holds;
                witnesses.push(Witness {
                    relation: format!("{}{}{}", a.kind, if strict { "<" } else { "-" }, b.kind),
                    distinguished_by: b.kind,
                    not_by: a.kind,
                    instance_a: i,
                    instance_b: j,
                    iteration: b.first_difference(i, j).expect("final colors differ"),
                });
            }
        }
    }

    let oracle_soundness = match opts.oracle_max_n {
        Some(max_n) => Some(oracle_soundness(corpus, &outcomes, max_n, opts.masking)?),
        None => None,
    };
    Ok(PowerReport {
        corpus: corpus.clone(),
        kinds,
        outcomes,
        implications,
        witnesses,
        oracle_soundness,
    })
}

fn oracle_soundness(corpus: &Corpus, outcomes: &[KindOutcome], max_n: usize, masking: Masking) -> Result<OracleSoundness> {
    let mut groups: FxHashMap<_, Vec<usize>> = FxHashMap::default();
    let mut instances = 0;
    for (i, inst) in corpus.instances.iter().enumerate() {
        let g = corpus.graph_of(inst);
        if g.n() > max_n {
            continue;
        }
        instances += 1;
        groups.entry(canonical_code(g, inst.target, masking)?).or_default().push(i);
    }
    let mut report = OracleSoundness { instances, ..Default::default() };
    for members in groups.values() {
        report.checked += pairs(members.len() as u64);
        for o in outcomes {
            report.violations +=
                pairs(members.len() as u64) - same_class_pairs(members.iter().map(|&i| o.classes[i]));
        }
    }
    Ok(report)
}

/// Expected relation between two tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Same power: implications both ways.
    Equal,
    /// First strictly weaker than second.
    Weaker,
    /// Neither implies the other.
    Incomparable,
}

/// The pattern of relative power the tests are expected to show.
pub fn expected_relations() -> Vec<(TestKind, TestKind, Relation)> {
    use Relation::*;
    use TestKind::*;
    vec![
        (WL1, WL2_Local, Equal),
        (WL1, WL2, Weaker),
        (WL1, FWL2_Local, Weaker),
        (WL1, FWL2, Weaker),
        (WL2_Local, WL2, Weaker),
        (WL2_Local, FWL2_Local, Weaker),
        (WL2_Local, FWL2, Weaker),
        (WL2, FWL2, Weaker),
        (FWL2_Local, FWL2, Weaker),
        (WL2, FWL2_Local, Incomparable),
    ]
}

impl PowerReport {
    pub fn outcome(&self, kind: TestKind) -> Option<&KindOutcome> {
        self.outcomes.iter().find(|o| o.kind == kind)
    }

    pub fn implication(&self, a: TestKind, b: TestKind) -> Option<Implication> {
        self.implications.get(&(a, b)).copied()
    }

    pub fn witness(&self, not_by: TestKind, distinguished_by: TestKind) -> Option<&Witness> {
        self.witnesses
            .iter()
            .find(|w| w.not_by == not_by && w.distinguished_by == distinguished_by)
    }

    /// Number of unordered instance pairs compared per test.
    pub fn comparisons(&self) -> u64 {
        pairs(self.corpus.instances.len() as u64)
    }

    /// Checks one expected relation; `Err` carries a readable reason.
    pub fn check_relation(&self, a: TestKind, b: TestKind, rel: Relation) -> std::result::Result<(), String> {
        let (ab, ba) = match (self.implication(a, b), self.implication(b, a)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(format!("{a}/{b} not both in the report")),
        };
        let ok = match rel {
            Relation::Equal => ab.holds && ba.holds,
            Relation::Weaker => ab.holds && !ba.holds && self.witness(a, b).is_some(),
            Relation::Incomparable => !ab.holds && !ba.holds,
        };
        if ok {
            Ok(())
        } else {
            Err(format!(
                "{a} vs {b} expected {rel:?}: {a}->{b} violations {}, {b}->{a} violations {}",
                ab.violations, ba.violations
            ))
        }
    }

    pub fn to_json(&self) -> Value {
        let implications: serde_json::Map<String, Value> = self
            .implications
            .iter()
            .map(|((a, b), imp)| (format!("{a}->{b}"), json!(imp)))
            .collect();
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|w| {
                json!({
                    "relation": w.relation,
                    "distinguished_by": w.distinguished_by,
                    "not_by": w.not_by,
                    "instance_a": self.corpus.describe(w.instance_a),
                    "instance_b": self.corpus.describe(w.instance_b),
                    "iteration": w.iteration,
                })
            })
            .collect();
        let distinguished: serde_json::Map<String, Value> = self
            .outcomes
            .iter()
            .map(|o| {
                let same = same_class_pairs(o.classes.iter());
                (o.kind.to_string(), json!(self.comparisons() - same))
            })
            .collect();
        json!({
            "corpus": self.corpus.spec,
            "coverage": {
                "graphs": self.corpus.graphs.len(),
                "instances": self.corpus.instances.len(),
                "comparisons": self.comparisons(),
            },
            "distinguished_pairs": distinguished,
            "implications": implications,
            "witnesses": witnesses,
            "oracle_soundness": self.oracle_soundness,
        })
    }
}
