use std::collections::BTreeSet;

use proptest::prelude::*;

use densest::exact::{densest_exact, ExactOptions};
use densest::flow::{build_goldberg_network, max_flow_push_relabel};
use densest::graph::{Density, Graph, VertexId};
use densest::hybrid::{expand, run_hybrid, HybridOptions};
use densest::instances::{
    brute_force_densest, gen_random, gen_worstcase, worstcase_ratio, WeightSpec,
};
use densest::io::{read_edge_list, write_edge_list, LoadOptions};
use densest::lp::{emit_charikar_lp, LpModel};
use densest::peel::{peel, peel_unweighted};

/// Small simple graph, optionally with integer weights in 1..=5.
fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<bool>()).prop_flat_map(|(n, weighted)| {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        let k = pairs.len();
        (
            proptest::collection::vec(any::<bool>(), k),
            proptest::collection::vec(1u32..=5, k),
        )
            .prop_map(move |(keep, w)| {
                let edges: Vec<(u32, u32, f64)> = pairs
                    .iter()
                    .zip(keep.iter().zip(&w))
                    .filter(|(_, (k, _))| **k)
                    .map(|(&(u, v), (_, &w))| (u, v, w as f64))
                    .collect();
                if weighted {
                    Graph::from_weighted_edges(n, &edges).unwrap()
                } else {
                    let e: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
                    Graph::from_edges(n, &e).unwrap()
                }
            })
    })
}

fn degree_multiset(g: &Graph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.n() as VertexId).map(|v| g.degree(v)).collect();
    d.sort_unstable();
    d
}

fn edge_set(g: &Graph, map: impl Fn(VertexId) -> VertexId) -> BTreeSet<(u32, u32, u64)> {
    g.edges()
        .map(|(u, v, w)| {
            let (a, b) = (map(u), map(v));
            (a.min(b), a.max(b), w.to_bits())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn edge_list_round_trip(g in small_graph(14)) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let opts = LoadOptions { weighted: g.is_weighted(), ..Default::default() };
        let back = read_edge_list(buf.as_slice(), opts).unwrap().graph;
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.m(), g.m());
        prop_assert_eq!(degree_multiset(&back), degree_multiset(&g));
        prop_assert!((back.total_weight() - g.total_weight()).abs() <= 1e-12);
    }

    #[test]
    fn adjacency_is_symmetric(g in small_graph(14)) {
        prop_assert!(g.validate().is_ok());
        for u in 0..g.n() as VertexId {
            for (v, w) in g.incident(u) {
                let back: Vec<f64> = g.incident(v).filter(|&(x, _)| x == u).map(|(_, w)| w).collect();
                prop_assert_eq!(back, vec![w]);
            }
        }
    }

    #[test]
    fn set_density_matches_induced(g in small_graph(14), picks in proptest::collection::vec(any::<bool>(), 14)) {
        let members: Vec<VertexId> = (0..g.n() as VertexId).filter(|&v| picks[v as usize]).collect();
        prop_assume!(!members.is_empty());
        let direct = g.set_density(&members).unwrap();
        let induced = g.induced_subgraph(&members).unwrap().graph.density().unwrap();
        prop_assert_eq!(direct, induced);
        prop_assert!((direct.value() - induced.value()).abs() == 0.0);
    }

    #[test]
    fn ratio_order_is_cross_multiplication(a in 0u64..1_000_000, b in 1u64..1_000_000, c in 0u64..1_000_000, d in 1u64..1_000_000) {
        let lhs = Density::ratio(a, b);
        let rhs = Density::ratio(c, d);
        let expected = (a as u128 * d as u128).cmp(&(c as u128 * b as u128));
        prop_assert_eq!(lhs.partial_cmp(&rhs), Some(expected));
    }

    #[test]
    fn peel_bookkeeping_and_moves(g in small_graph(14)) {
        prop_assume!(!g.is_weighted());
        let r = peel_unweighted(&g).unwrap();
        prop_assert!(r.moves <= (g.n() + g.m()) as u64);
        prop_assert_eq!(r.order.len(), g.n());
        let mut seen = r.order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..g.n() as VertexId).collect::<Vec<_>>());
        // every suffix from scratch; the first maximal one is the answer
        let mut best: Option<(Density, usize)> = None;
        for start in 0..g.n() {
            let d = g.set_density(&r.order[start..]).unwrap();
            if best.is_none_or(|(b, _)| d > b) {
                best = Some((d, start));
            }
        }
        let (bd, mut bstart) = best.unwrap();
        if g.m() == 0 {
            // nothing to peel towards; a single vertex is reported
            bstart = g.n() - 1;
        }
        prop_assert_eq!(r.best_set.density, bd);
        prop_assert_eq!(r.best_suffix_start, bstart);
        let mut suffix = r.order[bstart..].to_vec();
        suffix.sort_unstable();
        prop_assert_eq!(&r.best_set.members, &suffix);
    }

    #[test]
    fn peel_is_deterministic(g in small_graph(14)) {
        let a = peel(&g).unwrap();
        let b = peel(&g).unwrap();
        prop_assert_eq!(a.order, b.order);
        prop_assert_eq!(a.best_set.members, b.best_set.members);
    }

    #[test]
    fn exact_matches_oracle_and_brackets_greedy(g in small_graph(12)) {
        let oracle = brute_force_densest(&g).unwrap();
        let exact = densest_exact(&g, &ExactOptions::default()).unwrap();
        prop_assert_eq!(exact.best_set.density, oracle.density);
        prop_assert_eq!(g.set_density(&exact.best_set.members).unwrap(), exact.best_set.density);
        let greedy = peel(&g).unwrap().best_set.density.value();
        let fstar = exact.best_set.density.value();
        prop_assert!(greedy <= fstar + 1e-12);
        prop_assert!(fstar <= 2.0 * greedy + 1e-12);
    }

    #[test]
    fn cut_certificate_is_monotone(g in small_graph(10), steps in proptest::collection::vec(0u32..40, 1..6)) {
        let mut guesses: Vec<f64> = steps.iter().map(|&s| s as f64 / 8.0).collect();
        guesses.sort_by(f64::total_cmp);
        let mut emptied = false;
        for &guess in &guesses {
            let mut net = build_goldberg_network(&g, guess).unwrap();
            let cut = max_flow_push_relabel(&mut net);
            if cut.source_side.is_empty() {
                emptied = true;
            } else {
                prop_assert!(!emptied, "nonempty side at {} after an empty one", guess);
                prop_assert!(g.set_density(&cut.source_side).unwrap().value() > guess);
            }
        }
    }

    #[test]
    fn adding_edges_never_lowers_the_optimum(g in small_graph(10), pick in any::<prop::sample::Index>()) {
        let n = g.n() as u32;
        let missing: Vec<(u32, u32)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        prop_assume!(!missing.is_empty());
        let (u, v) = missing[pick.index(missing.len())];
        let mut edges: Vec<(u32, u32, f64)> = g.edges().collect();
        edges.push((u, v, 1.0));
        let bigger = if g.is_weighted() {
            Graph::from_weighted_edges(g.n(), &edges).unwrap()
        } else {
            let e: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
            Graph::from_edges(g.n(), &e).unwrap()
        };
        let before = densest_exact(&g, &ExactOptions::default()).unwrap().best_set.density;
        let after = densest_exact(&bigger, &ExactOptions::default()).unwrap().best_set.density;
        prop_assert!(after >= before);
    }

    #[test]
    fn hybrid_sits_between_greedy_and_optimum(g in small_graph(12), skip in prop_oneof![Just(0.85), Just(1.0)]) {
        let opts = HybridOptions { skip_ratio: skip, ..Default::default() };
        let h = run_hybrid(&g, &opts).unwrap();
        let oracle = brute_force_densest(&g).unwrap();
        prop_assert!(h.greedy_set.density <= h.best_set.density);
        prop_assert!(h.best_set.density <= oracle.density);
        if h.skipped {
            prop_assert_eq!(&h.best_set.members, &h.greedy_set.members);
            prop_assert_eq!(h.best_set.density, h.greedy_set.density);
        } else {
            let core = expand(&g, &h.greedy_set.members).unwrap();
            if oracle.members.iter().all(|v| core.core_members.binary_search(v).is_ok()) {
                prop_assert_eq!(h.best_set.density, oracle.density);
            }
        }
    }

    #[test]
    fn expand_agrees_with_induced_subgraph(g in small_graph(14), picks in proptest::collection::vec(any::<bool>(), 14)) {
        let seed: Vec<VertexId> = (0..g.n() as VertexId).filter(|&v| picks[v as usize]).collect();
        prop_assume!(!seed.is_empty());
        let e = expand(&g, &seed).unwrap();
        let induced = g.induced_subgraph(&e.core_members).unwrap();
        prop_assert_eq!(&induced.original, &e.core_members);
        let from_expand = edge_set(e.core_graph(), |v| e.core.to_parent(v));
        let from_induced = edge_set(&induced.graph, |v| induced.to_parent(v));
        prop_assert_eq!(from_expand, from_induced);
        for &s in &seed {
            for &v in g.neighbors(s) {
                prop_assert!(e.core_members.binary_search(&v).is_ok());
            }
        }
    }

    #[test]
    fn lp_counts(n in 1usize..40, density in 0.0f64..1.0, seed in any::<u64>()) {
        let m = ((n * (n - 1) / 2) as f64 * density) as usize;
        let g = gen_random(n, m, seed, WeightSpec::None).unwrap();
        let mut sink = std::io::sink();
        let s = emit_charikar_lp(&g, &mut sink).unwrap();
        prop_assert_eq!(s.variables, n + m);
        prop_assert_eq!(s.constraints, 2 * m + 1);
    }

    #[test]
    fn random_generation_is_reproducible(n in 2usize..30, seed in any::<u64>()) {
        let m = n * (n - 1) / 4;
        let a = gen_random(n, m, seed, WeightSpec::Integer { lo: 1, hi: 9 }).unwrap();
        let b = gen_random(n, m, seed, WeightSpec::Integer { lo: 1, hi: 9 }).unwrap();
        prop_assert_eq!(edge_set(&a, |v| v), edge_set(&b, |v| v));
        prop_assert_eq!(a.m(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn worstcase_ratio_links_both_solvers(t in 1usize..25, p in 1usize..60) {
        let g = gen_worstcase(t, p).unwrap();
        prop_assert!(g.validate().is_ok());
        let greedy = peel_unweighted(&g).unwrap().best_set.density;
        let exact = densest_exact(&g, &ExactOptions::default()).unwrap().best_set.density;
        let (Density::Ratio { weight: a, vertices: b }, Density::Ratio { weight: c, vertices: d }) = (greedy, exact) else {
            panic!("unweighted densities are exact");
        };
        // (a/b) * t(1+t+2p) / ((t+p)(t+1)) == c/d
        let (t, p) = (t as u128, p as u128);
        prop_assert_eq!(a as u128 * t * (1 + t + 2 * p) * d as u128, c as u128 * b as u128 * (t + p) * (t + 1));
        let r = worstcase_ratio(t as usize, p as usize);
        prop_assert!((greedy.value() * r - exact.value()).abs() < 1e-12);
    }
}

/// Evaluates every row of the emitted LP at the point that spreads weight
/// `1/|S|` over an optimal set `S`; the point must be feasible with
/// objective `f*`, so the LP optimum is at least the densest density.
#[test]
fn lp_admits_the_optimal_set() {
    for seed in 0..30 {
        let g = gen_random(9, 14, seed, WeightSpec::Integer { lo: 1, hi: 4 }).unwrap();
        let best = brute_force_densest(&g).unwrap();
        let model = LpModel::new(&g).unwrap();
        let k = best.len() as f64;
        let inside = |v: VertexId| best.members.binary_search(&v).is_ok();
        let mut value = std::collections::HashMap::new();
        for v in 0..g.n() as VertexId {
            value.insert(model.vertex_var(v), if inside(v) { 1.0 / k } else { 0.0 });
        }
        for (u, v, _) in g.edges() {
            value.insert(
                model.edge_var(u, v),
                if inside(u) && inside(v) { 1.0 / k } else { 0.0 },
            );
        }
        for row in model.rows() {
            let lhs: f64 = row.terms.iter().map(|(c, name)| c * value[name]).sum();
            assert!(lhs <= row.rhs + 1e-12, "row {} violated", row.name);
        }
        let objective: f64 = model.objective().map(|(w, name)| w * value[&name]).sum();
        assert!((objective - best.density.value()).abs() < 1e-9);
    }
}
