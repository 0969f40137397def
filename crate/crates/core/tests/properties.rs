use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

use rainbow_lab::avoid_k4::avoid_k4;
use rainbow_lab::avoid_k6::avoid_k6;
use rainbow_lab::colouring::{
    compatible_set, interest_set, is_proper, rainbow_cliques, rainbow_copies, random_proper_colouring,
};
use rainbow_lab::decide::{decide_arrows, Outcome};
use rainbow_lab::emergence::{
    density_condition, sample_gnp, sample_perturbed, trial_rng, wilson_interval, Margin, SampleMode, SeedSpec,
};
use rainbow_lab::graph::{complete, enumerate_copies, norm, Edge, Graph, NamedGraph, Rational, Vertex};
use rainbow_lab::tiled::corpus::{random_tiled, CorpusConfig};
use rainbow_lab::tiled::stretch::first_one_edge_step;
use rainbow_lab::tiled::{colour_tiled, find_stretched_sequence, partial_colouring, phi, Strategy as TiledStrategy};
use rainbow_lab::LabError;

fn ng(s: &str) -> Graph {
    s.parse::<NamedGraph>().unwrap().build().unwrap()
}

fn arb_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut es = Vec::new();
            let mut k = 0;
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if bits[k] {
                        es.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, es).unwrap()
        })
    })
}

/// Copies of `h` in `g` as (vertex set, edge set) pairs, from every
/// injective map.
fn naive_copies(g: &Graph, h: &Graph) -> HashSet<(Vec<Vertex>, Vec<Edge>)> {
    fn go(g: &Graph, h: &Graph, map: &mut Vec<Vertex>, out: &mut HashSet<(Vec<Vertex>, Vec<Edge>)>) {
        if map.len() == h.n() {
            if h.edges().iter().all(|&(a, b)| g.has_edge(map[a as usize], map[b as usize])) {
                let mut vs = map.clone();
                vs.sort_unstable();
                let mut es: Vec<Edge> =
                    h.edges().iter().map(|&(a, b)| norm(map[a as usize], map[b as usize])).collect();
                es.sort_unstable();
                out.insert((vs, es));
            }
            return;
        }
        for v in 0..g.n() as Vertex {
            if !map.contains(&v) {
                map.push(v);
                go(g, h, map, out);
                map.pop();
            }
        }
    }
    let mut out = HashSet::new();
    go(g, h, &mut Vec::new(), &mut out);
    out
}

/// Minimum of `v − x·e` over vertex subsets spanning an edge.
fn density_oracle(h: &Graph, x: Rational) -> Rational {
    (1u32..1 << h.n())
        .filter_map(|mask| {
            let e = h.edges().iter().filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1).count() as i64;
            (e > 0).then(|| Rational::from_integer(mask.count_ones() as i64) - x * Rational::from_integer(e))
        })
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn common_neighbourhood_is_inside_every_neighbourhood(g in arb_graph(1, 12), picks in proptest::collection::vec(any::<u8>(), 1..4)) {
        let xs: Vec<Vertex> = picks.iter().map(|&p| p as Vertex % g.n() as Vertex).collect();
        for w in g.common_neighbourhood(&xs) {
            prop_assert!(xs.iter().all(|&x| g.has_edge(x, w)));
        }
    }

    #[test]
    fn copies_match_injection_oracle(g in arb_graph(3, 7), which in 0usize..5) {
        let h = ng(["path(3)", "star(3)", "K3", "path(4)", "kbip(2,2)"][which]);
        let fast = enumerate_copies(&g, &h);
        let want = naive_copies(&g, &h);
        prop_assert_eq!(fast.len(), want.len());
        for emb in fast {
            prop_assert!(h.edges().iter().all(|&(a, b)| g.has_edge(emb[a as usize], emb[b as usize])));
        }
    }

    #[test]
    fn decide_witnesses_are_proper_and_rainbow_free(g in arb_graph(3, 6), which in 0usize..3) {
        prop_assume!(g.m() >= 1 && g.m() <= 9);
        let h = ng(["K3", "path(3)", "path(4)"][which]);
        let v = decide_arrows(&g, &h, 1 << 30).unwrap();
        prop_assert!(v.outcome != Outcome::Unknown);
        if let Some(w) = v.witness {
            prop_assert!(is_proper(&g, &w).unwrap() && w.is_total_on(&g));
            prop_assert!(rainbow_copies(&g, &w, &h).is_empty());
        }
    }

    #[test]
    fn interest_and_compatible_sets(k in 2usize..5, pool in 1usize..12, seed in any::<u64>()) {
        let g = ng(&format!("hatk({k},{pool})"));
        let psi = random_proper_colouring(&g, &mut ChaCha8Rng::seed_from_u64(seed), 0.3);
        let kv: Vec<Vertex> = (0..k as Vertex).collect();
        let interest = interest_set(&g, &psi, &kv);
        let ek = k * (k - 1) / 2;
        prop_assert!(interest.len() + ek * (k - 2) >= pool);
        let compat = compatible_set(&psi, &kv, &interest);
        prop_assert!(compat.iter().all(|x| interest.contains(x)));
        let mut seen = HashSet::new();
        for &x in &compat {
            for &y in &kv {
                prop_assert!(seen.insert(psi.get(x, y).unwrap()));
            }
        }
    }

    #[test]
    fn density_condition_matches_oracle(g in arb_graph(2, 10), xi in 0usize..6) {
        prop_assume!(g.m() >= 1);
        let x = [(2, 5), (7, 15), (1, 2), (2, 3), (1, 1), (3, 2)].map(|(a, b)| Rational::new(a, b))[xi];
        let rep = density_condition(&g, x, Margin::Constant).unwrap();
        prop_assert_eq!(rep.min_value, Some(density_oracle(&g, x)));
    }

    #[test]
    fn wilson_interval_brackets_the_rate(trials in 1usize..500, frac in 0.0f64..=1.0) {
        let s = (frac * trials as f64).round() as usize;
        let (lo, hi) = wilson_interval(s, trials);
        let rate = s as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= rate + 1e-12 && rate <= hi + 1e-12 && hi <= 1.0);
    }
}

#[test]
fn named_graphs_have_their_triangles() {
    for k in 1..8 {
        assert_eq!(ng(&format!("t({k})")).triangles().len(), k);
    }
    for (s, t) in [(1, 1), (2, 3), (5, 5), (4, 7)] {
        let g = ng(&format!("kdelta({s},{t})"));
        let tris = g.triangles();
        assert_eq!(tris.len(), s * t);
        for tri in tris {
            let skeleton = (1..=s as Vertex).filter(|&i| tri.contains(&0) && tri.contains(&i)).count();
            assert_eq!(skeleton, 1, "{tri:?}");
        }
    }
}

#[test]
fn k4_avoider_over_many_instances() {
    let mut classified = 0;
    for t in 0..1000u64 {
        let mut rng = trial_rng(11, t);
        let n = 20 + (t as usize * 7919) % 381;
        let c = 0.1 + 0.9 * (t % 10) as f64 / 9.0;
        let p = c * (n as f64).powf(-1.25);
        let inst = sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut rng).unwrap();
        let av = match avoid_k4(&inst) {
            Ok(av) => av,
            Err(LabError::StructureUnsupported(_)) => continue,
            Err(e) => panic!("trial {t}: {e}"),
        };
        classified += 1;
        let g = inst.union();
        assert!(is_proper(&g, &av.colouring).unwrap() && av.colouring.is_total_on(&g));
        assert!(rainbow_cliques(&g, &av.colouring, 4).is_empty(), "trial {t}");
        for k in g.cliques(4) {
            let second = k.iter().filter(|&&v| inst.side[v as usize]).count();
            assert_eq!(second, 2, "trial {t}: K4 {k:?} is not a C4 plus one edge per side");
        }
    }
    assert!(classified >= 950, "{classified}");
}

#[test]
fn k6_red_edges_form_a_matching() {
    for t in 0..200u64 {
        let n = 50 + (t as usize * 37) % 251;
        let p = (n as f64).powf(-0.7);
        let inst =
            sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut trial_rng(12, t)).unwrap();
        let Ok(av) = avoid_k6(&inst) else { continue };
        let mut seen = HashSet::new();
        for ((u, v), c) in av.colouring.iter() {
            if c == av.red {
                assert!(seen.insert(u) && seen.insert(v), "trial {t}: red edges meet at ({u},{v})");
            }
        }
    }
}

#[test]
fn tiled_corpus_invariants() {
    let cfg = CorpusConfig { max_vertices: 10, ..CorpusConfig::default() };
    for t in 0..5000u64 {
        let (h, seq) = random_tiled(&mut trial_rng(13, t), &cfg);
        let k5 = seq.base.len() == 5;
        let (v0, e0) = if k5 { (5, 10) } else { (4, 6) };
        let (a, b, c) = (seq.alpha(), seq.beta(), seq.gamma());
        assert_eq!(h.n(), v0 + 2 * a + b, "graph {t}");
        assert_eq!(h.m(), e0 + 5 * a + 3 * b + c, "graph {t}");
        let ph = phi(&h);
        assert!(ph >= 0, "graph {t}: phi {ph}");

        let stretched = find_stretched_sequence(&h).unwrap();
        assert_eq!(ph, stretched.phi_from_counts(), "graph {t}");
        let stretched_k5 = stretched.base.len() == 5;
        if let Some(step) = first_one_edge_step(&stretched, h.n()).unwrap() {
            assert!(step.holds(stretched_k5), "graph {t}: {step:?}");
        }
        if !stretched_k5 {
            let st = partial_colouring(&stretched, h.n(), &TiledStrategy::default(), 0).unwrap();
            assert!(st.peak_saturation_excess <= 0, "graph {t}: {stretched:?}");
        }

        let tc = colour_tiled(&h).unwrap();
        let rb = rainbow_cliques(&h, &tc.colouring, 4);
        assert!(tc.certificate.fits_class(ph) && tc.certificate.covers(&rb), "graph {t}");
    }
}

#[test]
fn gnp_edge_count_is_binomial() {
    let (n, p, samples) = (20usize, 0.3, 1000);
    let pairs = (n * (n - 1) / 2) as u64;
    let law = Binomial::new(p, pairs).unwrap();
    let counts: Vec<u64> = (0..samples).map(|t| sample_gnp(n, p, &mut trial_rng(14, t)).unwrap().m() as u64).collect();
    // Bins of consecutive values, merged until each expects at least 5.
    let mut bins: Vec<(u64, u64, f64)> = Vec::new();
    let (mut lo, mut mass) = (0u64, 0.0);
    for k in 0..=pairs {
        mass += law.pmf(k);
        if mass * samples as f64 >= 5.0 {
            bins.push((lo, k, mass));
            lo = k + 1;
            mass = 0.0;
        }
    }
    if let Some(last) = bins.last_mut() {
        last.1 = pairs;
        last.2 += mass;
    }
    let stat: f64 = bins
        .iter()
        .map(|&(a, b, m)| {
            let observed = counts.iter().filter(|&&c| a <= c && c <= b).count() as f64;
            let expected = m * samples as f64;
            (observed - expected).powi(2) / expected
        })
        .sum();
    let critical = ChiSquared::new((bins.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(stat < critical, "chi-square {stat} vs {critical} with {} bins", bins.len());
}

#[test]
fn k2_janson_and_clique_two_density() {
    for r in 3..=12 {
        assert_eq!(rainbow_lab::graph::max_two_density(&complete(r)).unwrap(), Rational::new(r as i64 + 1, 2));
    }
}
