use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generate;
use crate::graph::{Graph, Pair};
use crate::harness::magic::MagicSearch;
use crate::wl::TestKind;

/// A target link in one of the corpus graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Instance {
    pub graph: usize,
    pub target: Pair,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedGraph {
    pub name: String,
    pub graph: Graph,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub spec: String,
    pub graphs: Vec<NamedGraph>,
    pub instances: Vec<Instance>,
}

/// Parameters of the random part of a corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomCorpus {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub probs: Vec<f64>,
    pub seed: u64,
}

impl Default for RandomCorpus {
    fn default() -> Self {
        RandomCorpus {
            count: 200,
            n_min: 4,
            n_max: 12,
            probs: vec![0.2, 0.35, 0.5],
            seed: 20_240_601,
        }
    }
}

impl Corpus {
    pub fn empty(spec: impl Into<String>) -> Self {
        Corpus { spec: spec.into(), ..Default::default() }
    }

    /// Adds a graph (deduplicated by structure) and returns its index.
    pub fn add_graph(&mut self, name: &str, graph: Graph) -> usize {
        if let Some(i) = self.graphs.iter().position(|ng| ng.graph == graph) {
            return i;
        }
        self.graphs.push(NamedGraph { name: name.to_string(), graph });
        self.graphs.len() - 1
    }

    pub fn add_instance(&mut self, graph: usize, target: Pair) -> Result<()> {
        self.graphs[graph].graph.check_pair(target)?;
        let inst = Instance { graph, target };
        if !self.instances.contains(&inst) {
            self.instances.push(inst);
        }
        Ok(())
    }

    /// Adds `graph` with every ordered non-diagonal pair as a target.
    pub fn add_all_pairs(&mut self, name: &str, graph: Graph) -> usize {
        let n = graph.n() as u32;
        let gi = self.add_graph(name, graph);
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    self.add_instance(gi, (p, q)).expect("pairs in range");
                }
            }
        }
        gi
    }

    /// The fixture graphs with all their pairs; fixture targets come first.
    pub fn fixtures() -> Self {
        let mut c = Corpus::empty("fixtures");
        let fixtures = builtin_fixtures();
        for f in &fixtures {
            let a = c.add_graph(&f.graph_a_name, f.graph_a.clone());
            let b = c.add_graph(&f.graph_b_name, f.graph_b.clone());
            c.add_instance(a, f.link_a).expect("fixture pairs are valid");
            c.add_instance(b, f.link_b).expect("fixture pairs are valid");
        }
        let graphs: Vec<NamedGraph> = c.graphs.clone();
        for ng in graphs {
            c.add_all_pairs(&ng.name, ng.graph);
        }
        c
    }

    pub fn random(params: &RandomCorpus) -> Self {
        let mut c = Corpus::empty(format!(
            "er:count={},nmin={},nmax={},seed={}",
            params.count, params.n_min, params.n_max, params.seed
        ));
        c.extend_random(params);
        c
    }

    fn extend_random(&mut self, params: &RandomCorpus) {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        for i in 0..params.count {
            let n = rng.random_range(params.n_min..=params.n_max);
            let p = params.probs[rng.random_range(0..params.probs.len())];
            let g = generate::erdos_renyi(n, p, &mut rng);
            let n32 = n as u32;
            // Not deduplicated: repeated random graphs are legitimate samples.
            self.graphs.push(NamedGraph { name: format!("er{i}"), graph: g });
            let gi = self.graphs.len() - 1;
            for a in 0..n32 {
                for b in 0..n32 {
                    if a != b {
                        self.instances.push(Instance { graph: gi, target: (a, b) });
                    }
                }
            }
        }
    }

    /// Fixtures followed by the default 200-graph random corpus.
    pub fn default_full() -> Self {
        let mut c = Corpus::fixtures();
        c.extend_random(&RandomCorpus::default());
        c.spec = "fixtures+er".into();
        c
    }

    /// Parses `PART(+PART)*` where a part is `fixtures`, `default`, or
    /// `er[:count=..,nmin=..,nmax=..,seed=..]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::CorpusSpec(spec.to_string());
        let mut c = Corpus::empty(spec);
        for part in spec.split('+').map(str::trim) {
            let (name, args) = part.split_once(':').unwrap_or((part, ""));
            match name {
                "fixtures" | "default" => {
                    let f = Corpus::fixtures();
                    for inst in &f.instances {
                        let ng = &f.graphs[inst.graph];
                        let gi = c.add_graph(&ng.name, ng.graph.clone());
                        c.add_instance(gi, inst.target)?;
                    }
                    if name == "default" {
                        c.extend_random(&RandomCorpus::default());
                    }
                }
                "er" => {
                    let mut params = RandomCorpus::default();
                    for kv in args.split(',').filter(|s| !s.is_empty()) {
                        let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                        let num = || v.trim().parse::<u64>().map_err(|_| bad());
                        match k.trim() {
                            "count" => params.count = num()? as usize,
                            "nmin" => params.n_min = num()? as usize,
                            "nmax" => params.n_max = num()? as usize,
                            "seed" => params.seed = num()?,
                            _ => return Err(bad()),
                        }
                    }
                    if params.n_min < 2 || params.n_min > params.n_max || params.n_max > 64 {
                        return Err(bad());
                    }
                    c.extend_random(&params);
                }
                _ => return Err(bad()),
            }
        }
        if c.instances.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(c)
    }

    pub fn graph_of(&self, inst: &Instance) -> &Graph {
        &self.graphs[inst.graph].graph
    }

    pub fn describe(&self, i: usize) -> Value {
        let inst = &self.instances[i];
        json!({
            "graph": self.graphs[inst.graph].name,
            "target": [inst.target.0, inst.target.1],
        })
    }
}

/// Expected outcome of a fixture under one test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Distinguished,
    Indistinguishable,
}

/// A pair of links with the verdict each test should reach on them.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub about: &'static str,
    pub graph_a_name: String,
    pub graph_a: Graph,
    pub link_a: Pair,
    pub graph_b_name: String,
    pub graph_b: Graph,
    pub link_b: Pair,
    pub expected: Vec<(TestKind, Expected)>,
    /// Round at which a test is expected to separate the links, when known.
    pub expected_round: Vec<(TestKind, usize)>,
}

pub fn builtin_fixtures() -> Vec<Fixture> {
    use Expected::{Distinguished as D, Indistinguishable as I};
    use TestKind::*;
    let c6 = generate::cycle(6);
    let c3 = generate::cycle(3);
    let (two_c3, _) = c3.disjoint_union(&c3);
    let k2 = generate::complete(2);
    let (two_k2, _) = k2.disjoint_union(&k2);
    let verdicts = |v: [Expected; 6]| -> Vec<(TestKind, Expected)> { TestKind::ALL.into_iter().zip(v).collect() };
    // Order of verdicts: WL1, WL1_Label01, WL2, FWL2, WL2_Local, FWL2_Local.
    vec![
        Fixture {
            name: "F1",
            about: "symmetric endpoints at distance 2 and 3 in one cycle",
            graph_a_name: "C6".into(),
            graph_a: c6.clone(),
            link_a: (0, 2),
            graph_b_name: "C6".into(),
            graph_b: c6.clone(),
            link_b: (0, 3),
            expected: verdicts([I, D, I, D, I, D]),
            expected_round: vec![(FWL2_Local, 1)],
        },
        Fixture {
            name: "F3",
            about: "an isolated link versus the same link next to a second copy",
            graph_a_name: "K2".into(),
            graph_a: k2,
            link_a: (0, 1),
            graph_b_name: "K2+K2".into(),
            graph_b: two_k2,
            link_b: (0, 1),
            expected: verdicts([I, I, D, D, I, I]),
            expected_round: vec![(WL2, 1), (FWL2, 1)],
        },
        Fixture {
            name: "F4a",
            about: "distance-2 pair of a hexagon versus a pair across two triangles",
            graph_a_name: "C6".into(),
            graph_a: c6.clone(),
            link_a: (0, 2),
            graph_b_name: "C3+C3".into(),
            graph_b: two_c3.clone(),
            link_b: (0, 3),
            expected: verdicts([I, D, I, D, I, D]),
            expected_round: vec![(FWL2_Local, 1)],
        },
        Fixture {
            name: "F4b",
            about: "antipodal pair of a hexagon versus a pair across two triangles",
            graph_a_name: "C6".into(),
            graph_a: c6,
            link_a: (0, 3),
            graph_b_name: "C3+C3".into(),
            graph_b: two_c3,
            link_b: (0, 3),
            expected: verdicts([I, I, I, D, I, D]),
            expected_round: vec![],
        },
    ]
}

impl Fixture {
    /// File name used for a fixture graph in written fixture sets.
    pub fn graph_file(name: &str) -> String {
        format!("{name}.edges")
    }

    pub fn expected_for(&self, kind: TestKind) -> Option<Expected> {
        self.expected.iter().find(|(k, _)| *k == kind).map(|&(_, e)| e)
    }

    pub fn to_json(&self) -> Value {
        let expected: serde_json::Map<String, Value> =
            self.expected.iter().map(|(k, e)| (k.to_string(), json!(e))).collect();
        let rounds: serde_json::Map<String, Value> =
            self.expected_round.iter().map(|(k, r)| (k.to_string(), json!(r))).collect();
        json!({
            "name": self.name,
            "about": self.about,
            "graph_a": Fixture::graph_file(&self.graph_a_name),
            "link_a": [self.link_a.0, self.link_a.1],
            "graph_b": Fixture::graph_file(&self.graph_b_name),
            "link_b": [self.link_b.0, self.link_b.1],
            "expected": expected,
            "expected_round": rounds,
        })
    }
}

/// Manifest of a written fixture set. The square search result is
/// recorded as found or `no_witness`, never invented.
pub fn fixture_manifest(fixtures: &[Fixture], magic: &MagicSearch) -> Value {
    let square = match &magic.witness {
        Some(w) => json!({
            "name": "F5",
            "status": "found",
            "graph_a": Fixture::graph_file("F5a"),
            "link_a": [w.link_a.0, w.link_a.1],
            "graph_b": Fixture::graph_file("F5b"),
            "link_b": [w.link_b.0, w.link_b.1],
            "expected": {"FWL2": Expected::Indistinguishable, "WL1_Label01": Expected::Distinguished},
            "examined": magic.examined,
            "regular": magic.regular,
            "distinct_graphs": magic.distinct_graphs,
        }),
        None => json!({
            "name": "F5",
            "status": "no_witness",
            "examined": magic.examined,
            "regular": magic.regular,
            "distinct_graphs": magic.distinct_graphs,
        }),
    };
    json!({
        "fixtures": fixtures.iter().map(Fixture::to_json).collect::<Vec<_>>(),
        "magic_square": square,
    })
}
