use std::borrow::Cow;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, Pair};
use crate::wl::color::{ColorMap, Unit};
use crate::wl::engine::{self, prepared_graph, probe_pairs, Aux};
use crate::wl::interner::{unpack, Interner, Signature, ABSENT};
use crate::wl::{Masking, TestKind};

/// One graph taking part in a lockstep session.
#[derive(Clone, Debug)]
pub(crate) struct Member<'g> {
    graph: Cow<'g, Graph>,
    aux: Aux,
    pub(crate) colors: ColorMap,
}

impl<'g> Member<'g> {
    /// `graph` is refined as given; `targets` become probes for local kinds.
    pub(crate) fn new(
        kind: TestKind,
        graph: Cow<'g, Graph>,
        target: Option<Pair>,
        masking: Masking,
        targets: &[Pair],
        interner: &mut Interner,
    ) -> Self {
        let probes = probe_pairs(kind, targets);
        let colors = engine::init(kind, &graph, target, masking, &probes, interner);
        let aux = Aux::new(kind, &graph);
        Member { graph, aux, colors }
    }

    /// Member for a single target under the given masking.
    pub(crate) fn for_target(
        kind: TestKind,
        g: &'g Graph,
        target: Option<Pair>,
        masking: Masking,
        interner: &mut Interner,
    ) -> Result<Self> {
        let graph = prepared_graph(kind, g, target, masking)?;
        let targets: Vec<Pair> = target.into_iter().collect();
        Ok(Self::new(kind, graph, target, masking, &targets, interner))
    }

    pub(crate) fn graph(&self) -> &Graph {
        &self.graph
    }
}

/// Several graphs refined round by round against one interner, so their
/// color ids are directly comparable.
#[derive(Clone, Debug)]
pub(crate) struct Session<'g> {
    pub(crate) interner: Interner,
    pub(crate) members: Vec<Member<'g>>,
    last_classes: usize,
    last_units: usize,
    pub(crate) stable_at: Option<usize>,
}

impl<'g> Session<'g> {
    pub(crate) fn new(interner: Interner, members: Vec<Member<'g>>) -> Self {
        let last_units = members.iter().map(|m| m.colors.unit_count()).sum();
        Session {
            last_classes: interner.class_count(),
            interner,
            members,
            last_units,
            stable_at: None,
        }
    }

    pub(crate) fn round(&self) -> usize {
        self.interner.round()
    }

    /// Runs one round for every member; returns true once the joint
    /// partition stopped changing.
    pub(crate) fn step(&mut self) -> bool {
        self.interner.advance();
        for m in &mut self.members {
            m.colors = engine::step(&m.graph, &m.aux, &m.colors, &mut self.interner);
        }
        let classes = self.interner.class_count();
        let units: usize = self.members.iter().map(|m| m.colors.unit_count()).sum();
        let stable = classes == self.last_classes && units == self.last_units;
        if stable && self.stable_at.is_none() {
            let round = self.round();
            assert!(
                round <= units + 1,
                "stabilized at round {round} with only {units} units"
            );
            self.stable_at = Some(round);
        }
        self.last_classes = classes;
        self.last_units = units;
        stable
    }

    /// Steps until stable or `max_iters` rounds have run, calling `visit`
    /// after initialization and after every round.
    pub(crate) fn run(&mut self, max_iters: usize, mut visit: impl FnMut(&Self) -> bool) {
        if !visit(self) {
            return;
        }
        while self.round() < max_iters {
            let stable = self.step();
            if !visit(self) || stable {
                return;
            }
        }
    }
}

/// Fresh round-0 colors of `g` for `kind`, interned into `interner`.
///
/// With a mask, the pair's edge is removed and its indicator is 0; local
/// pair kinds additionally track both orientations of the pair.
pub fn init_colors(
    kind: TestKind,
    g: &Graph,
    mask: Option<Pair>,
    interner: &mut Interner,
) -> Result<ColorMap> {
    init_colors_with(kind, g, mask, Masking::Masked, interner)
}

/// Like [`init_colors`] with an explicit masking mode for the target.
pub fn init_colors_with(
    kind: TestKind,
    g: &Graph,
    target: Option<Pair>,
    masking: Masking,
    interner: &mut Interner,
) -> Result<ColorMap> {
    if interner.round() != 0 {
        return Err(Error::StaleRound { colors: 0, interner: interner.round() });
    }
    Ok(Member::for_target(kind, g, target, masking, interner)?.colors)
}

/// Advances `colors` by one round. Several graphs may share `interner`:
/// the first call for a round opens it and later calls join it.
pub fn refine_step(
    kind: TestKind,
    g: &Graph,
    colors: &ColorMap,
    interner: &mut Interner,
) -> Result<ColorMap> {
    if colors.session() != interner.session() {
        return Err(Error::SessionMismatch { expected: interner.session(), found: colors.session() });
    }
    if colors.kind() != kind {
        return Err(Error::KindMismatch { expected: kind, found: colors.kind() });
    }
    if colors.node_count() != g.n() {
        return Err(Error::NodeOutOfRange { node: colors.node_count() as u32, n: g.n() });
    }
    if colors.round() == interner.round() {
        interner.advance();
    } else if colors.round() + 1 != interner.round() {
        return Err(Error::StaleRound { colors: colors.round(), interner: interner.round() });
    }
    let graph = prepared_graph(kind, g, colors.target(), colors.masking())?;
    let aux = Aux::new(kind, &graph);
    Ok(engine::step(&graph, &aux, colors, interner))
}

/// Full refinement history of one graph.
#[derive(Clone, Debug)]
pub struct RefinementResult {
    pub kind: TestKind,
    pub target: Option<Pair>,
    pub masking: Masking,
    /// First round whose partition equals the previous round's; `None` if
    /// the iteration cap was hit first.
    pub stable_at: Option<usize>,
    pub history: Vec<ColorMap>,
    pub interner: Interner,
}

impl RefinementResult {
    pub fn last(&self) -> &ColorMap {
        self.history.last().expect("history starts with round 0")
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.history.iter().map(ColorMap::class_count).collect()
    }

    /// Size of the target's final color class: units sharing the color of
    /// node `p` (node kinds) or of the pair `(p, q)` (pair kinds).
    pub fn target_class_size(&self) -> Option<usize> {
        let last = self.last();
        let c = last.target_colors(self.target?)?[0];
        Some(last.units().iter().filter(|&&(_, col)| col == c).count())
    }

    pub fn to_json(&self) -> Value {
        let mut colors = serde_json::Map::new();
        let mut target_colors = serde_json::Map::new();
        for cm in &self.history {
            let rows: Vec<Value> = cm
                .units()
                .into_iter()
                .filter_map(|(u, c)| match u {
                    Unit::Node(v) => Some(json!([v, c])),
                    Unit::Pair(p, q) => Some(json!([p, q, c])),
                    Unit::Probe(..) => None,
                })
                .collect();
            colors.insert(cm.round().to_string(), Value::Array(rows));
            if let Some(t) = self.target {
                target_colors.insert(cm.round().to_string(), json!(cm.target_colors(t)));
            }
        }
        json!({
            "test": self.kind,
            "stable_at": self.stable_at,
            "mask": match self.masking {
                Masking::Masked => self.target.map(|(p, q)| json!([p, q])),
                Masking::Unmasked => None,
            },
            "target": self.target.map(|(p, q)| json!([p, q])),
            "class_counts": self.class_counts(),
            "colors": colors,
            "target_colors": target_colors,
        })
    }
}

/// Refines until the partition is stable or `max_iters` rounds have run
/// (default: the kind's cap for `g`).
pub fn refine_to_stable(
    kind: TestKind,
    g: &Graph,
    mask: Option<Pair>,
    max_iters: Option<usize>,
) -> Result<RefinementResult> {
    refine_with(kind, g, mask, Masking::Masked, max_iters)
}

pub fn refine_with(
    kind: TestKind,
    g: &Graph,
    target: Option<Pair>,
    masking: Masking,
    max_iters: Option<usize>,
) -> Result<RefinementResult> {
    let mut interner = Interner::new();
    let member = Member::for_target(kind, g, target, masking, &mut interner)?;
    let mut session = Session::new(interner, vec![member]);
    let mut history = Vec::new();
    session.run(max_iters.unwrap_or_else(|| kind.default_cap(g.n())), |s| {
        history.push(s.members[0].colors.clone());
        true
    });
    Ok(RefinementResult {
        kind,
        target,
        masking,
        stable_at: session.stable_at,
        history,
        interner: session.interner,
    })
}

/// Outcome of comparing two links.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    /// First round at which the link colors differ.
    pub distinguished_at: Option<usize>,
    /// Round at which the joint refinement stabilized, if it got there.
    pub stable_at: Option<usize>,
}

/// Refines `(e1, g1)` and `(e2, g2)` in lockstep with one interner and
/// reports when their undirected link colors first differ. Both targets
/// are masked.
pub fn indistinguishable(
    kind: TestKind,
    e1: Pair,
    g1: &Graph,
    e2: Pair,
    g2: &Graph,
    max_iters: Option<usize>,
) -> Result<Verdict> {
    indistinguishable_with(kind, e1, g1, e2, g2, Masking::Masked, max_iters)
}

pub fn indistinguishable_with(
    kind: TestKind,
    e1: Pair,
    g1: &Graph,
    e2: Pair,
    g2: &Graph,
    masking: Masking,
    max_iters: Option<usize>,
) -> Result<Verdict> {
    let mut interner = Interner::new();
    let a = Member::for_target(kind, g1, Some(e1), masking, &mut interner)?;
    let b = Member::for_target(kind, g2, Some(e2), masking, &mut interner)?;
    let cap = max_iters.unwrap_or_else(|| kind.default_cap(g1.n().max(g2.n())));
    let mut session = Session::new(interner, vec![a, b]);
    let mut distinguished_at = None;
    session.run(cap, |s| {
        let ca = s.members[0].colors.link_color(e1);
        let cb = s.members[1].colors.link_color(e2);
        if ca != cb {
            distinguished_at = Some(s.round());
            return false;
        }
        true
    });
    Ok(Verdict { distinguished_at, stable_at: session.stable_at })
}

/// Number of `u` whose round-1 folklore entry for the target reads
/// (edge, edge), recovered from the interned signature.
pub(crate) fn edge_edge_entries(interner: &Interner, color: u32) -> usize {
    let Some(Signature::Folklore { entries, .. }) = interner.signature(color) else {
        return 0;
    };
    let is_edge = |c: u32| {
        c != ABSENT
            && matches!(interner.previous_signature(c), Some(Signature::Pair(init)) if init.edge)
    };
    interner
        .pair_set(*entries)
        .iter()
        .filter(|&&x| {
            let (a, b) = unpack(x);
            is_edge(a) && is_edge(b)
        })
        .count()
}

/// Common neighbors of the target, read off one masked 2-FWL round.
pub fn cn_from_fwl2_signature(g: &Graph, target: Pair) -> Result<usize> {
    let mut interner = Interner::new();
    let member = Member::for_target(TestKind::FWL2, g, Some(target), Masking::Masked, &mut interner)?;
    let mut session = Session::new(interner, vec![member]);
    session.step();
    let color = session.members[0]
        .colors
        .pair_color(target.0, target.1)
        .expect("dense state holds every pair");
    Ok(edge_edge_entries(&session.interner, color))
}
