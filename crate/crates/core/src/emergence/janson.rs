//! Expected copy counts and Janson's lower-tail bound for copies of a fixed
//! graph in `G(n, p)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::{automorphism_count, Graph};

/// Largest pattern accepted by [`janson_bound`].
pub const JANSON_MAX_VERTICES: usize = 12;
/// Largest pattern whose overlap sum is enumerated exactly.
pub const EXACT_DELTA_MAX_VERTICES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JansonEstimate {
    /// Expected number of copies.
    pub lambda: f64,
    /// Sum of `E[Z_A Z_B]` over ordered pairs of distinct copies sharing an
    /// edge. This is twice the quantity in the usual statement, so using it
    /// in the bound is conservative.
    pub delta_upper: f64,
    /// Whether `delta_upper` is the exact ordered-pair sum.
    pub delta_exact: bool,
    /// `exp(−λ² / (λ + 2Δ))`, an upper bound on the probability of no copy.
    pub nonexistence_bound: f64,
}

/// `n (n−1) ⋯ (n−k+1)` as a float.
pub fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| (n - i) as f64).product()
}

/// Overlap profile of a pattern: for each ordered way a second labelled copy
/// can meet a fixed first copy, the number of shared vertices and edges.
/// Pairs sharing no edge and the identical copy are left out. Values count
/// labelled maps, so each second copy appears `|Aut(H)|` times.
pub fn overlap_profile(h: &Graph) -> BTreeMap<(usize, usize), u64> {
    let v = h.n();
    let mut out = BTreeMap::new();
    let mut image: Vec<Option<u32>> = vec![None; v];
    let mut used = vec![false; v];
    fn go(
        h: &Graph,
        i: usize,
        image: &mut Vec<Option<u32>>,
        used: &mut Vec<bool>,
        k: usize,
        shared: usize,
        out: &mut BTreeMap<(usize, usize), u64>,
    ) {
        let v = h.n();
        if i == v {
            if shared >= 1 && !(k == v && shared == h.m()) {
                *out.entry((k, shared)).or_default() += 1;
            }
            return;
        }
        image[i] = None;
        go(h, i + 1, image, used, k, shared, out);
        for t in 0..v {
            if used[t] {
                continue;
            }
            let gained = (0..i)
                .filter(|&j| h.has_edge(i as u32, j as u32))
                .filter(|&j| image[j].is_some_and(|s| h.has_edge(t as u32, s)))
                .count();
            used[t] = true;
            image[i] = Some(t as u32);
            go(h, i + 1, image, used, k + 1, shared + gained, out);
            image[i] = None;
            used[t] = false;
        }
    }
    go(h, 0, &mut image, &mut used, 0, 0, &mut out);
    out
}

/// Largest number of edges spanned by `k` vertices of `h`, for each `k`.
pub fn max_edges_by_order(h: &Graph) -> Vec<usize> {
    let v = h.n();
    let mut best = vec![0usize; v + 1];
    for mask in 0u32..(1u32 << v) {
        let k = mask.count_ones() as usize;
        let e = h.edges().iter().filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1).count();
        best[k] = best[k].max(e);
    }
    best
}

/// λ, an overlap-sum upper bound Δ and the resulting nonexistence bound for
/// copies of `h` in `G(n, p)`.
pub fn janson_bound(h: &Graph, n: usize, p: f64) -> Result<JansonEstimate> {
    let v = h.n();
    if v > JANSON_MAX_VERTICES {
        return domain(format!("pattern has {v} vertices, at most {JANSON_MAX_VERTICES} supported"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p = {p} is not a probability"));
    }
    let e = h.m() as i32;
    let aut = automorphism_count(h) as f64;
    let copies = falling(n, v) / aut;
    let lambda = copies * p.powi(e);
    if lambda == 0.0 {
        return Ok(JansonEstimate { lambda, delta_upper: 0.0, delta_exact: true, nonexistence_bound: 1.0 });
    }
    let (delta_upper, delta_exact) = if v <= EXACT_DELTA_MAX_VERTICES {
        let sum: f64 = overlap_profile(h)
            .iter()
            .map(|(&(k, s), &cnt)| cnt as f64 * falling(n - v.min(n), v - k) * p.powi(2 * e - s as i32))
            .sum();
        (copies * sum / aut, true)
    } else {
        let smax = max_edges_by_order(h);
        let mut sum = 0.0;
        for k in 2..=v {
            // A full-overlap map sharing every edge is an automorphism.
            let s = if k == v { smax[k].saturating_sub(1) } else { smax[k] };
            if s == 0 {
                continue;
            }
            let maps = binom(v, k) * falling(v, k);
            sum += maps * falling(n - v.min(n), v - k) * p.powi(2 * e - s as i32);
        }
        (copies * sum / aut, false)
    };
    let nonexistence_bound = (-lambda * lambda / (lambda + 2.0 * delta_upper)).exp();
    Ok(JansonEstimate { lambda, delta_upper, delta_exact, nonexistence_bound })
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, NamedGraph};

    fn ng(s: &str) -> Graph {
        s.parse::<NamedGraph>().unwrap().build().unwrap()
    }

    /// Ordered-pair overlap sum over all copies of `h` in `K_n`, by listing
    /// the copies as edge sets.
    fn brute_delta(h: &Graph, n: usize, p: f64) -> f64 {
        let copies: Vec<Vec<(u32, u32)>> = {
            let mut out = Vec::new();
            crate::graph::for_each_embedding(&complete(n), h, |m| {
                let mut es: Vec<(u32, u32)> =
                    h.edges().iter().map(|&(a, b)| crate::graph::norm(m[a as usize], m[b as usize])).collect();
                es.sort_unstable();
                out.push(es);
                true
            });
            out.sort();
            out.dedup();
            out
        };
        let e = h.m() as i32;
        let mut total = 0.0;
        for (i, a) in copies.iter().enumerate() {
            for (j, b) in copies.iter().enumerate() {
                let s = a.iter().filter(|x| b.contains(x)).count() as i32;
                if i != j && s > 0 {
                    total += p.powi(2 * e - s);
                }
            }
        }
        total
    }

    #[test]
    fn triangle_lambda() {
        let est = janson_bound(&complete(3), 100, 0.1).unwrap();
        assert!((est.lambda - 161.7).abs() < 1e-9);
    }

    #[test]
    fn exact_delta_matches_pair_listing() {
        for (h, n) in [(complete(3), 6), (ng("path(3)"), 6), (ng("star(3)"), 6), (complete(4), 6)] {
            let est = janson_bound(&h, n, 0.3).unwrap();
            let want = brute_delta(&h, n, 0.3);
            assert!((est.delta_upper - want).abs() <= 1e-9 * want.max(1.0), "{} vs {want}", est.delta_upper);
        }
    }

    #[test]
    fn bound_dominates_exact_sum() {
        let h = ng("r7");
        let exact = janson_bound(&h, 40, 0.2).unwrap();
        let smax = max_edges_by_order(&h);
        assert_eq!(smax[7], 10);
        assert!(exact.delta_exact);
        // Force the bounding branch on the same pattern.
        let mut sum = 0.0;
        let (v, e) = (7, 10);
        for k in 2..=v {
            let s = if k == v { smax[k] - 1 } else { smax[k] };
            if s > 0 {
                sum += binom(v, k) * falling(v, k) * falling(33, v - k) * 0.2f64.powi(2 * e - s as i32);
            }
        }
        let bound = falling(40, 7) / 8.0 * sum / 8.0;
        assert!(bound >= exact.delta_upper);
    }
}
