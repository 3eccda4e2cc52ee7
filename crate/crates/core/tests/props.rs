use std::ops::ControlFlow;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use proptest::prelude::*;

use fracplane::discharge::{simple_discharge, Discharge, DischargeContext};
use fracplane::exactnum::{dist2, orient, rotate, segments_cross, Orientation, Point, QuadExt, RotationSpec};
use fracplane::fraclp::{fractional_chromatic, weight_lp_bound, OrbitPartition, Strategy as LpStrategy};
use fracplane::indsets::{sample_maximal_core_set, sample_rng, BitGraph, CoreSets};
use fracplane::lattice::{lp, Iso, LatticePoint};
use fracplane::par::Exec;
use fracplane::tiling::verify_tilings;
use fracplane::udgraph::{build_spindled, Role, SpindleMode, UDGraph};

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<u64>)> {
    (1usize..=22).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = pairs.len();
        (
            Just(n),
            proptest::sample::subsequence(pairs, 0..=m),
            proptest::collection::vec(0u64..20, n),
        )
    })
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

/// Heaviest independent set by plain include/exclude recursion.
fn brute_mwis(adj: &[u32], w: &[u64], v: usize, taken: u32) -> u64 {
    if v == adj.len() {
        return 0;
    }
    let skip = brute_mwis(adj, w, v + 1, taken);
    if adj[v] & taken == 0 {
        skip.max(w[v] + brute_mwis(adj, w, v + 1, taken | 1 << v))
    } else {
        skip
    }
}

fn independent(adj: &[u32], s: u32) -> bool {
    (0..adj.len()).all(|v| s >> v & 1 == 0 || adj[v] & s == 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mwis_matches_brute_force((n, edges, w) in graph()) {
        let bg = BitGraph::from_edges(n, &edges);
        let adj = adjacency(n, &edges);
        let brute = brute_mwis(&adj, &w, 0, 0);
        let (set, best) = bg.max_weight_is_int(&w);
        prop_assert_eq!(best, brute);
        let mask = set.iter().fold(0u32, |m, &v| m | 1 << v);
        prop_assert!(independent(&adj, mask));
        prop_assert_eq!(set.iter().map(|&v| w[v]).sum::<u64>(), best);
    }

    #[test]
    fn mis_enumeration_matches_brute_force((n, edges, _w) in graph().prop_filter("small", |g| g.0 <= 16)) {
        let bg = BitGraph::from_edges(n, &edges);
        let adj = adjacency(n, &edges);
        let maximal = |s: u32| independent(&adj, s) && (0..n).all(|v| s >> v & 1 == 1 || adj[v] & s != 0);
        let mut brute: Vec<u32> = (0u32..1 << n).filter(|&s| maximal(s)).collect();
        let mut got = Vec::new();
        bg.for_each_mis(|r| {
            got.push(r.iter().fold(0u32, |m, &v| m | 1 << v));
            ControlFlow::Continue(())
        });
        brute.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, brute);
    }
}

fn quad() -> impl Strategy<Value = QuadExt> {
    (proptest::array::uniform4(-30i64..=30), 1i64..=12).prop_map(|(p, d)| QuadExt::from_parts(p, d))
}

fn point() -> impl Strategy<Value = Point> {
    (quad(), quad()).prop_map(|(x, y)| Point::new(x, y))
}

fn lattice_point() -> impl Strategy<Value = LatticePoint> {
    (-6i64..=6, -6i64..=6).prop_map(|(a, b)| lp(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(a in quad(), b in quad(), c in quad()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &QuadExt::one(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), QuadExt::one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn sign_agrees_with_floats(a in quad(), b in quad()) {
        let s = a.sign();
        prop_assert_eq!((-&a).sign(), -s);
        prop_assert!((&a * &a).sign() >= 0);
        let f = a.to_f64();
        if f.abs() > 1e-6 {
            prop_assert_eq!(s, if f > 0.0 { 1 } else { -1 });
        }
        prop_assert_eq!(a.cmp(&b), (&a - &b).sign().cmp(&0));
    }

    #[test]
    fn spindle_rotation_is_an_isometry(p in point(), q in point(), c in point(), ccw in any::<bool>()) {
        let o = if ccw { Orientation::Counterclockwise } else { Orientation::Clockwise };
        let spec = RotationSpec::new(c.clone(), o);
        let (rp, rq) = (rotate(&p, &spec), rotate(&q, &spec));
        prop_assert_eq!(dist2(&rp, &rq), dist2(&p, &q));
        prop_assert_eq!(dist2(&rp, &c), dist2(&p, &c));
        let back = RotationSpec::new(c, o.flip());
        prop_assert_eq!(rotate(&rp, &back), p);
    }

    #[test]
    fn crossing_is_symmetric(a in lattice_point(), b in lattice_point(), c in lattice_point(), d in lattice_point()) {
        prop_assume!(a != b && c != d);
        let [a, b, c, d] = [a, b, c, d].map(|p| p.to_point());
        let x = segments_cross((&a, &b), (&c, &d));
        prop_assert_eq!(x.clone(), segments_cross((&c, &d), (&a, &b)));
        prop_assert_eq!(x.clone(), segments_cross((&b, &a), (&d, &c)));
        if let Ok(true) = x {
            prop_assert!(orient(&a, &b, &c) * orient(&a, &b, &d) < 0);
        }
    }

    #[test]
    fn lattice_isometries(p in lattice_point(), q in lattice_point()) {
        for iso in Iso::all() {
            prop_assert_eq!((iso.apply(p) - iso.apply(q)).norm2(), (p - q).norm2());
        }
        let mut r = p;
        for _ in 0..6 {
            r = r.rot60();
        }
        prop_assert_eq!(r, p);
        prop_assert_eq!((p.rot60() - q.rot60()).norm2(), (p - q).norm2());
    }
}

fn lattice_graph() -> impl Strategy<Value = UDGraph> {
    proptest::sample::subsequence(fracplane::lattice::disk(2), 1..=9)
        .prop_map(|pts| UDGraph::from_points(pts.into_iter().map(|p| p.to_point()).collect(), Role::Core))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The covering optimum equals the packing optimum, and the returned weights and cover are
    /// feasible on every independent set and vertex.
    #[test]
    fn lp_duality_on_lattice_subgraphs(g in lattice_graph()) {
        let n = g.n();
        let chi = fractional_chromatic(&g, None).unwrap();
        let lp = weight_lp_bound(&g, &OrbitPartition::trivial(n), LpStrategy::CuttingPlane).unwrap();
        prop_assert_eq!(&chi.value, &lp.bound);
        prop_assert!(chi.value >= BigRational::one());
        prop_assert!(chi.value <= BigRational::from_integer(BigInt::from(n)));
        let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0, |m, &u| m | 1 << u)).collect();
        for s in (0u32..1 << n).filter(|&s| independent(&adj, s)) {
            let w = (0..n).filter(|&v| s >> v & 1 == 1).fold(BigRational::zero(), |a, v| a + &lp.weights[v]);
            prop_assert!(w <= BigRational::one());
        }
        let total = lp.weights.iter().fold(BigRational::zero(), |a, w| a + w);
        prop_assert_eq!(total, lp.bound);
        for v in 0..n {
            let c = chi.cover.iter().filter(|c| c.set.contains(&v)).fold(BigRational::zero(), |a, c| a + &c.weight);
            prop_assert!(c >= BigRational::one());
        }
    }
}

fn ctx6() -> &'static DischargeContext {
    static CTX: OnceLock<DischargeContext> = OnceLock::new();
    CTX.get_or_init(|| DischargeContext::new(6))
}

fn g4() -> &'static UDGraph {
    static G: OnceLock<UDGraph> = OnceLock::new();
    G.get_or_init(|| build_spindled(4, SpindleMode::ThreeDirections))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every phase conserves charge and no claim fails, whichever spindle vertices join I.
    #[test]
    fn discharge_conserves_and_holds(seed in any::<u64>(), greedy in any::<bool>()) {
        let ctx = ctx6();
        let set = sample_maximal_core_set(&ctx.graph, seed, 0);
        let in_i = if greedy { ctx.extend_spindles(&set, &mut sample_rng(seed, 1)) } else { ctx.core_only(&set) };
        let run = Discharge::run(ctx, in_i).unwrap();
        prop_assert!(run.events.is_empty(), "{:?}", run.events);
        prop_assert_eq!(run.ledger.total(), run.stats.weight);
        prop_assert!(run.ledger.spindle.iter().all(|&c| c <= Ratio::zero()));
    }

    #[test]
    fn simple_discharge_holds(seed in any::<u64>()) {
        let g = g4();
        let set = sample_maximal_core_set(g, seed, 0);
        let mut in_i = vec![false; g.n()];
        let mut blocked = vec![false; g.n()];
        for v in set.into_iter().chain(g.core_count()..g.n()) {
            if !blocked[v] {
                in_i[v] = true;
                blocked[v] = true;
                g.neighbors(v).iter().for_each(|&u| blocked[u] = true);
            }
        }
        let out = simple_discharge(g, &in_i);
        prop_assert!(out.violations.is_empty(), "{:?}", out.violations);
    }

    #[test]
    fn tilings_hold(seed in any::<u64>(), d in 3u32..=7) {
        let r = verify_tilings(d, CoreSets::Sampled { samples: 4, seed }, Exec::Sequential);
        prop_assert!(r.passed(), "{:?}", r.failure_examples);
    }
}
