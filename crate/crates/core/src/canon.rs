//! Canonical labelling of small graphs by colour refinement and exhaustive
//! individualisation.

use std::collections::BTreeMap;

use crate::graph::{Graph, Vertex};

/// Isomorphism-invariant key: the upper-triangle adjacency bits of the
/// canonically relabelled graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub n: usize,
    pub bits: Vec<u64>,
}

/// Refines the ordered colouring `col` until equitable. Colours are ranks of
/// label-independent signatures, so the result commutes with relabelling.
fn refine(g: &Graph, col: &mut [usize]) {
    let n = g.n();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbours(v as Vertex).map(|w| col[w as usize]).collect();
                nb.sort_unstable();
                (col[v], nb)
            })
            .collect();
        let mut ranks: BTreeMap<&(usize, Vec<usize>), usize> = BTreeMap::new();
        for s in &sigs {
            ranks.insert(s, 0);
        }
        for (i, r) in ranks.values_mut().enumerate() {
            *r = i;
        }
        let before = col.iter().collect::<std::collections::HashSet<_>>().len();
        let next: Vec<usize> = sigs.iter().map(|s| ranks[s]).collect();
        let after = ranks.len();
        col.copy_from_slice(&next);
        if after == before {
            return;
        }
    }
}

fn key_for(g: &Graph, order: &[usize]) -> Vec<u64> {
    // order[v] = canonical position of v.
    let n = g.n();
    let mut pos_to_v = vec![0usize; n];
    for (v, &p) in order.iter().enumerate() {
        pos_to_v[p] = v;
    }
    let mut bits = vec![0u64; (n * n.saturating_sub(1) / 2).div_ceil(64).max(1)];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(pos_to_v[i] as Vertex, pos_to_v[j] as Vertex) {
                bits[k >> 6] |= 1 << (k & 63);
            }
            k += 1;
        }
    }
    bits
}

/// Returns the canonical key and a permutation `perm` with `perm[v]` the
/// canonical label of `v`.
pub fn canonical_form(g: &Graph) -> (CanonicalKey, Vec<Vertex>) {
    let n = g.n();
    let mut col: Vec<usize> = (0..n).map(|v| g.degree(v as Vertex)).collect();
    // Normalise degree values to ranks before refining.
    let mut ds: Vec<usize> = col.clone();
    ds.sort_unstable();
    ds.dedup();
    for c in col.iter_mut() {
        *c = ds.binary_search(c).unwrap();
    }
    refine(g, &mut col);
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    search(g, col, &mut best);
    let (bits, order) = best.unwrap_or((vec![0], vec![]));
    (CanonicalKey { n, bits }, order.into_iter().map(|p| p as Vertex).collect())
}

fn search(g: &Graph, col: Vec<usize>, best: &mut Option<(Vec<u64>, Vec<usize>)>) {
    let n = g.n();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &col {
        *counts.entry(c).or_default() += 1;
    }
    if counts.len() == n {
        let bits = key_for(g, &col);
        if best.as_ref().is_none_or(|(b, _)| bits < *b) {
            *best = Some((bits, col));
        }
        return;
    }
    // First smallest non-singleton cell.
    let target = counts.iter().filter(|(_, &k)| k > 1).min_by_key(|(&c, &k)| (k, c)).map(|(&c, _)| c).unwrap();
    let mut tried: Vec<usize> = Vec::new();
    for v in 0..n {
        if col[v] != target {
            continue;
        }
        // Twins give isomorphic subtrees; one representative is enough.
        if tried.iter().any(|&w| twins(g, v, w)) {
            continue;
        }
        tried.push(v);
        // Individualise v: it stays in `target`, the rest of the cell moves up.
        let mut next: Vec<usize> = col.iter().map(|&c| if c > target { c + 1 } else { c }).collect();
        for (w, c) in next.iter_mut().enumerate() {
            if col[w] == target && w != v {
                *c = target + 1;
            }
        }
        refine(g, &mut next);
        search(g, next, best);
    }
}

/// Whether swapping `v` and `w` is an automorphism.
fn twins(g: &Graph, v: usize, w: usize) -> bool {
    let (v, w) = (v as Vertex, w as Vertex);
    (0..g.n() as Vertex).filter(|&x| x != v && x != w).all(|x| g.has_edge(v, x) == g.has_edge(w, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NamedGraph;
    use proptest::prelude::*;

    fn ng(s: &str) -> Graph {
        s.parse::<NamedGraph>().unwrap().build().unwrap()
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        let a = canonical_form(&ng("path(4)")).0;
        let b = canonical_form(&ng("star(3)")).0;
        assert_ne!(a, b);
        assert_ne!(canonical_form(&ng("r7")).0, canonical_form(&ng("hatk(3,4)")).0);
    }

    #[test]
    fn relabelled_key_matches() {
        let g = ng("r7");
        let (k, perm) = canonical_form(&g);
        let c = g.relabel(&perm);
        assert_eq!(canonical_form(&c).0, k);
    }

    proptest! {
        #[test]
        fn invariant_under_permutation(
            edges in proptest::collection::vec((0u32..9, 0u32..9), 0..20),
            perm in Just((0u32..9).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let g = Graph::from_edges(9, edges.into_iter().filter(|(a, b)| a != b)).unwrap();
            let h = g.relabel(&perm);
            prop_assert_eq!(canonical_form(&g).0, canonical_form(&h).0);
        }
    }
}
