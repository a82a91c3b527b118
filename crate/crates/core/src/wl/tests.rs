use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::generate;
use crate::graph::{Graph, Pair};

fn k2_pair() -> (Graph, Graph) {
    let k2 = generate::complete(2);
    let (two, _) = k2.disjoint_union(&k2);
    (k2, two)
}

fn two_triangles() -> Graph {
    let c3 = generate::cycle(3);
    c3.disjoint_union(&c3).0
}

#[test]
fn wl1_triangle_one_color() {
    let mut it = Interner::new();
    let c = init_colors(TestKind::WL1, &generate::cycle(3), None, &mut it).unwrap();
    assert_eq!(c.class_count(), 1);
}

#[test]
fn wl2_masked_k2() {
    let mut it = Interner::new();
    let c = init_colors(TestKind::WL2, &generate::complete(2), Some((0, 1)), &mut it).unwrap();
    let [d0, d1] = [c.pair_color(0, 0).unwrap(), c.pair_color(1, 1).unwrap()];
    let [a, b] = c.target_colors((0, 1)).unwrap();
    assert_eq!((d0, a), (d1, b));
    assert_ne!(d0, a);
    let Some(Signature::Pair(init)) = it.signature(a) else { panic!() };
    assert!(!init.edge && !init.diagonal);
}

#[test]
fn fwl2_path_three_classes() {
    let mut it = Interner::new();
    let c = init_colors(TestKind::FWL2, &generate::path(3), None, &mut it).unwrap();
    assert_eq!(c.class_count(), 3);
    let edge = c.pair_color(0, 1).unwrap();
    for (p, q) in [(1, 0), (1, 2), (2, 1)] {
        assert_eq!(c.pair_color(p, q), Some(edge));
    }
    assert_eq!(c.pair_color(0, 2), c.pair_color(2, 0));
    assert_ne!(c.pair_color(0, 2), Some(edge));
    assert_ne!(c.pair_color(0, 0), Some(edge));
    assert_ne!(c.pair_color(0, 0), c.pair_color(0, 2));
}

#[test]
fn wl1_path_degree_split() {
    let g = generate::path(3);
    let mut it = Interner::new();
    let c0 = init_colors(TestKind::WL1, &g, None, &mut it).unwrap();
    let c1 = refine_step(TestKind::WL1, &g, &c0, &mut it).unwrap();
    assert_eq!(c1.node_color(0), c1.node_color(2));
    assert_ne!(c1.node_color(0), c1.node_color(1));
}

#[test]
fn fwl2_triangle_sees_common_neighbor() {
    let g = generate::cycle(3);
    let mut it = Interner::new();
    let c0 = init_colors(TestKind::FWL2, &g, Some((0, 1)), &mut it).unwrap();
    let c1 = refine_step(TestKind::FWL2, &g, &c0, &mut it).unwrap();
    let color = c1.pair_color(0, 1).unwrap();
    assert_eq!(edge_edge_entries(&it, color), 1);
    let Some(Signature::Folklore { entries, .. }) = it.signature(color) else { panic!() };
    assert_eq!(it.pair_set(*entries).len(), 3);
}

#[test]
fn wl2_shared_interner_sees_size() {
    let (k2, two) = k2_pair();
    let mut it = Interner::new();
    let a0 = init_colors(TestKind::WL2, &k2, Some((0, 1)), &mut it).unwrap();
    let b0 = init_colors(TestKind::WL2, &two, Some((0, 1)), &mut it).unwrap();
    assert_eq!(a0.pair_color(0, 1), b0.pair_color(0, 1));
    let a1 = refine_step(TestKind::WL2, &k2, &a0, &mut it).unwrap();
    let b1 = refine_step(TestKind::WL2, &two, &b0, &mut it).unwrap();
    assert_ne!(a1.pair_color(0, 1), b1.pair_color(0, 1));
    let Some(Signature::Plain { first, .. }) = it.signature(a1.pair_color(0, 1).unwrap()) else {
        panic!()
    };
    assert_eq!(it.set(*first).len(), 2);
    // Once round 2 is open, round-0 colors can no longer join.
    refine_step(TestKind::WL2, &k2, &a1, &mut it).unwrap();
    assert!(matches!(
        refine_step(TestKind::WL2, &k2, &a0, &mut it),
        Err(Error::StaleRound { .. })
    ));
}

#[test]
fn refine_step_rejects_foreign_maps() {
    let g = generate::cycle(4);
    let mut a = Interner::new();
    let mut b = Interner::new();
    let c = init_colors(TestKind::WL1, &g, None, &mut a).unwrap();
    assert!(matches!(refine_step(TestKind::WL1, &g, &c, &mut b), Err(Error::SessionMismatch { .. })));
    assert!(matches!(refine_step(TestKind::WL2, &g, &c, &mut a), Err(Error::KindMismatch { .. })));
    assert!(matches!(init_colors(TestKind::WL2, &g, Some((0, 9)), &mut b), Err(Error::NodeOutOfRange { .. })));
    assert!(matches!(
        init_colors(TestKind::WL1_Label01, &g, None, &mut b),
        Err(Error::MissingTarget { .. })
    ));
}

#[test]
fn wl1_cycle_stable_at_one() {
    let r = refine_to_stable(TestKind::WL1, &generate::cycle(6), None, None).unwrap();
    assert_eq!(r.stable_at, Some(1));
    assert_eq!(r.last().class_count(), 1);
    assert_eq!(r.class_counts(), vec![1, 1]);
}

/// Orbits of the automorphism group, by brute force over all permutations.
fn orbits(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut orbit: Vec<usize> = (0..n).collect();
    let mut perm: Vec<u32> = (0..n as u32).collect();
    permutations(&mut perm, 0, &mut |pi| {
        if g.permute(pi).unwrap() == *g {
            for v in 0..n {
                let (a, b) = (orbit[v], orbit[pi[v] as usize]);
                let m = a.min(b);
                for o in orbit.iter_mut() {
                    if *o == a || *o == b {
                        *o = m;
                    }
                }
            }
        }
    });
    orbit
}

fn permutations(p: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn same_partition(a: &[u32], b: &[usize]) -> bool {
    let mut ab = HashMap::new();
    let mut ba = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

#[test]
fn wl1_path_four_matches_orbits() {
    let g = generate::path(4);
    let r = refine_to_stable(TestKind::WL1, &g, None, None).unwrap();
    let colors: Vec<u32> = (0..4).map(|v| r.last().node_color(v).unwrap()).collect();
    let orbit = orbits(&g);
    assert_eq!(orbit, vec![0, 1, 1, 0]);
    assert!(same_partition(&colors, &orbit));
    assert_eq!(r.stable_at, Some(2));
}

#[test]
fn fwl2_local_cycle_separates_distances() {
    let c6 = generate::cycle(6);
    let v = indistinguishable(TestKind::FWL2_Local, (0, 1), &c6, (0, 3), &c6, None).unwrap();
    assert!(v.distinguished_at.is_some());
    let r = refine_to_stable(TestKind::FWL2_Local, &c6, Some((0, 1)), None).unwrap();
    assert!(r.stable_at.is_some());
}

#[test]
fn identity_never_distinguished() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = generate::erdos_renyi(8, 0.4, &mut rng);
    for kind in TestKind::ALL {
        for e in [(0, 1), (2, 5), (7, 3)] {
            let v = indistinguishable(kind, e, &g, e, &g, None).unwrap();
            assert_eq!(v.distinguished_at, None, "{kind} {e:?}");
            assert!(v.stable_at.is_some());
        }
    }
}

#[test]
fn size_fixture_wl1_vs_wl2() {
    let (k2, two) = k2_pair();
    let wl1 = indistinguishable(TestKind::WL1, (0, 1), &k2, (0, 1), &two, None).unwrap();
    let wl2 = indistinguishable(TestKind::WL2, (0, 1), &k2, (0, 1), &two, None).unwrap();
    assert_eq!(wl1.distinguished_at, None);
    assert_eq!(wl2.distinguished_at, Some(1));
}

#[test]
fn folklore_fixture_on_cycles() {
    let c6 = generate::cycle(6);
    let tt = two_triangles();
    let check = |kind, a: Pair, b: Pair| indistinguishable(kind, a, &c6, b, &tt, None).unwrap().distinguished_at;
    assert_eq!(check(TestKind::WL2, (0, 2), (0, 3)), None);
    assert_eq!(check(TestKind::FWL2_Local, (0, 2), (0, 3)), Some(1));
    assert!(check(TestKind::WL1_Label01, (0, 2), (0, 3)).is_some());
    assert_eq!(check(TestKind::WL1_Label01, (0, 3), (0, 3)), None);
    assert!(check(TestKind::FWL2, (0, 3), (0, 3)).is_some());
    assert!(check(TestKind::FWL2_Local, (0, 3), (0, 3)).is_some());
}

#[test]
fn cn_examples() {
    assert_eq!(cn_from_fwl2_signature(&generate::cycle(3), (0, 1)).unwrap(), 1);
    assert_eq!(cn_from_fwl2_signature(&generate::cycle(6), (0, 1)).unwrap(), 0);
    assert_eq!(cn_from_fwl2_signature(&generate::cycle(3), (1, 1)), Err(Error::SelfPair(1)));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = generate::erdos_renyi(10, 0.4, &mut rng);
    for p in 0..10 {
        for q in 0..10 {
            if p != q {
                let direct = g.neighbors(p).iter().filter(|u| g.neighbors(q).contains(u)).count();
                assert_eq!(cn_from_fwl2_signature(&g, (p, q)).unwrap(), direct);
            }
        }
    }
}

#[test]
fn json_shape() {
    let r = refine_to_stable(TestKind::WL2_Local, &generate::path(3), Some((0, 1)), None).unwrap();
    let v = r.to_json();
    assert_eq!(v["test"], "WL2_Local");
    assert_eq!(v["mask"], serde_json::json!([0, 1]));
    assert_eq!(v["colors"]["0"].as_array().unwrap().len(), 2);
    assert_eq!(v["target_colors"]["0"].as_array().unwrap().len(), 2);
    assert_eq!(r.to_json(), refine_to_stable(TestKind::WL2_Local, &generate::path(3), Some((0, 1)), None).unwrap().to_json());
}

#[test]
fn dense_gate() {
    assert!(check_dense_gate(TestKind::FWL2, 200, DEFAULT_DENSE_GATE).is_ok());
    assert!(matches!(check_dense_gate(TestKind::FWL2, 201, DEFAULT_DENSE_GATE), Err(Error::DenseGate { .. })));
    assert!(check_dense_gate(TestKind::FWL2_Local, 100_000, DEFAULT_DENSE_GATE).is_ok());
}

// Reference refinement: signatures as plain vectors, canonicalized
// through a BTreeMap per round. Returns class ids per round for the
// target orientations `(p,q), (q,p)` and every unit the engine holds.

type Key = (u32, u32);

fn relabel(sigs: &BTreeMap<Key, Vec<i64>>) -> BTreeMap<Key, usize> {
    let mut ids: BTreeMap<&Vec<i64>, usize> = BTreeMap::new();
    for s in sigs.values() {
        let k = ids.len();
        ids.entry(s).or_insert(k);
    }
    sigs.iter().map(|(k, s)| (*k, ids[s])).collect()
}

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v
}

/// Naive refinement of `g` (already masked) for `rounds` rounds. Keys are
/// `(v, v)` for nodes, pairs for pair kinds; probe units use key
/// `(p + BIG, q)`.
fn naive(kind: TestKind, g: &Graph, target: Pair, rounds: usize) -> Vec<BTreeMap<Key, usize>> {
    const BIG: u32 = 1 << 20;
    let n = g.n() as u32;
    let init = |a: u32, b: u32| vec![g.label(a) as i64, g.label(b) as i64, g.has_edge(a, b) as i64, (a == b) as i64];
    let mut cur: BTreeMap<Key, Vec<i64>> = BTreeMap::new();
    let probes = [(target.0, target.1), (target.1, target.0)];
    match kind {
        TestKind::WL1 | TestKind::WL1_Label01 => {
            for v in 0..n {
                cur.insert((v, v), vec![g.label(v) as i64]);
            }
        }
        TestKind::WL2 | TestKind::FWL2 => {
            for a in 0..n {
                for b in 0..n {
                    cur.insert((a, b), init(a, b));
                }
            }
        }
        _ => {
            for &(a, b) in g.edges() {
                cur.insert((a, b), init(a, b));
                cur.insert((b, a), init(b, a));
            }
            for (a, b) in probes {
                cur.insert((a + BIG, b), init(a, b));
            }
        }
    }
    let mut out = vec![relabel(&cur)];
    for _ in 0..rounds {
        let c = out.last().unwrap().clone();
        let col = |a: u32, b: u32| c.get(&(a, b)).map_or(-1, |&x| x as i64);
        let mut next: BTreeMap<Key, Vec<i64>> = BTreeMap::new();
        match kind {
            TestKind::WL1 | TestKind::WL1_Label01 => {
                for v in 0..n {
                    let mut s = vec![col(v, v)];
                    s.extend(sorted(g.neighbors(v).iter().map(|&u| col(u, u)).collect()));
                    next.insert((v, v), s);
                }
            }
            TestKind::WL2 => {
                for a in 0..n {
                    for b in 0..n {
                        let mut s = vec![col(a, b), -2];
                        s.extend(sorted((0..n).map(|u| col(u, b)).collect()));
                        s.push(-3);
                        s.extend(sorted((0..n).map(|v| col(a, v)).collect()));
                        next.insert((a, b), s);
                    }
                }
            }
            TestKind::FWL2 => {
                for a in 0..n {
                    for b in 0..n {
                        let mut s = vec![col(a, b)];
                        s.extend(sorted((0..n).map(|u| col(u, b) * 1_000_000 + col(a, u)).collect()));
                        next.insert((a, b), s);
                    }
                }
            }
            TestKind::WL2_Local => {
                for &(x, b) in c.keys() {
                    let a = if x >= BIG { x - BIG } else { x };
                    let mut s = vec![col(x, b), -2];
                    s.extend(sorted(g.neighbors(b).iter().map(|&u| col(u, b)).collect()));
                    s.push(-3);
                    s.extend(sorted(g.neighbors(a).iter().map(|&v| col(a, v)).collect()));
                    next.insert((x, b), s);
                }
            }
            TestKind::FWL2_Local => {
                let tracked = |a: u32, b: u32| c.contains_key(&(a, b));
                let mut units: Vec<Key> = c.keys().copied().collect();
                for a in 0..n {
                    for b in 0..n {
                        if a != b && !tracked(a, b) {
                            let hit = (0..n).any(|u| {
                                (g.has_edge(a, u) || g.has_edge(u, b)) && tracked(a, u) && tracked(u, b)
                            });
                            if hit {
                                units.push((a, b));
                            }
                        }
                    }
                }
                for (x, b) in units {
                    let a = if x >= BIG { x - BIG } else { x };
                    let mut s = if c.contains_key(&(x, b)) { vec![0, col(x, b)] } else { let mut v = vec![1]; v.extend(init(a, b)); v };
                    s.push(-2);
                    let around = (0..n).filter(|&u| g.has_edge(a, u) || g.has_edge(u, b));
                    s.extend(sorted(around.map(|u| col(u, b) * 1_000_000 + col(a, u)).collect()));
                    next.insert((x, b), s);
                }
            }
        }
        out.push(relabel(&next));
    }
    out
}

fn engine_units(c: &ColorMap) -> BTreeMap<Key, u32> {
    const BIG: u32 = 1 << 20;
    c.units()
        .into_iter()
        .map(|(u, col)| match u {
            Unit::Node(v) => ((v, v), col),
            Unit::Pair(p, q) => ((p, q), col),
            Unit::Probe(p, q) => ((p + BIG, q), col),
        })
        .collect()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3usize..=max_n).prop_flat_map(|n| {
        let pairs = proptest::collection::vec((0..n as u32, 0..n as u32), 0..2 * n);
        let labels = proptest::collection::vec(0u32..2, n);
        (Just(n), pairs, labels).prop_map(|(n, pairs, labels)| {
            let edges = pairs.into_iter().filter(|(u, v)| u != v);
            Graph::from_edges(n, edges).unwrap().with_labels(labels).unwrap()
        })
    })
}

fn arb_instance(max_n: usize) -> impl Strategy<Value = (Graph, Pair, Vec<u32>)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.n() as u32;
        let pi: Vec<u32> = (0..n).collect();
        (Just(g), (0..n, 1..n), Just(pi).prop_shuffle())
            .prop_map(move |(g, (p, d), pi)| (g, (p, (p + d) % n), pi))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engine_matches_reference((g, target, _) in arb_instance(7)) {
        for kind in TestKind::ALL {
            let r = refine_with(kind, &g, Some(target), Masking::Masked, Some(6)).unwrap();
            let h = prepared_graph(kind, &g, Some(target), Masking::Masked).unwrap();
            let reference = naive(kind, &h, target, r.history.len() - 1);
            for (cm, refp) in r.history.iter().zip(&reference) {
                let units = engine_units(cm);
                prop_assert_eq!(units.keys().collect::<Vec<_>>(), refp.keys().collect::<Vec<_>>(), "{} round {}", kind, cm.round());
                let a: Vec<u32> = units.values().copied().collect();
                let b: Vec<usize> = refp.values().copied().collect();
                prop_assert!(same_partition(&a, &b), "{} round {}", kind, cm.round());
            }
        }
    }

    #[test]
    fn permutation_equivariance((g, (p, q), pi) in arb_instance(8)) {
        let h = g.permute(&pi).unwrap();
        let image = (pi[p as usize], pi[q as usize]);
        for kind in TestKind::ALL {
            let v = indistinguishable(kind, (p, q), &g, image, &h, None).unwrap();
            prop_assert_eq!(v.distinguished_at, None, "{}", kind);
        }
    }

    #[test]
    fn reversed_target_same_link((g, (p, q), _) in arb_instance(8)) {
        for kind in TestKind::ALL {
            let v = indistinguishable(kind, (p, q), &g, (q, p), &g, None).unwrap();
            prop_assert_eq!(v.distinguished_at, None, "{}", kind);
        }
    }

    #[test]
    fn masking_hides_the_target_edge((g, (p, q), _) in arb_instance(8)) {
        let with = g.with_edge(p, q).unwrap();
        let without = g.without_edge(p, q);
        for kind in TestKind::ALL {
            let a = refine_to_stable(kind, &with, Some((p, q)), None).unwrap();
            let b = refine_to_stable(kind, &without, Some((p, q)), None).unwrap();
            prop_assert_eq!(a.stable_at, b.stable_at);
            let ta: Vec<_> = a.history.iter().map(|c| c.target_colors((p, q))).collect();
            let tb: Vec<_> = b.history.iter().map(|c| c.target_colors((p, q))).collect();
            prop_assert_eq!(ta, tb, "{}", kind);
            prop_assert_eq!(a.class_counts(), b.class_counts());
        }
    }

    #[test]
    fn monotone_and_bounded((g, target, _) in arb_instance(9)) {
        for kind in TestKind::ALL {
            let r = refine_to_stable(kind, &g, Some(target), None).unwrap();
            let stable = r.stable_at.expect("default cap suffices");
            prop_assert!(stable <= r.last().unit_count() + 1);
            let counts = r.class_counts();
            prop_assert!(counts.windows(2).all(|w| w[0] <= w[1] || kind == TestKind::FWL2_Local));
        }
    }
}
