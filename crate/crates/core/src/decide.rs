//! Exact decision of `G →rbw H`: does every proper edge-colouring of `G`
//! contain a rainbow copy of `H`?
//!
//! Backtracking over edges with colour-symmetry breaking (an edge may only
//! open the colour one past the largest used so far). Edges lying in many
//! copies of `H` are coloured first. A copy with every edge but one coloured
//! distinctly forces the last edge to repeat one of those colours.

use serde::Serialize;

use crate::bits;
use crate::colouring::EdgeColouring;
use crate::error::{domain, Result};
use crate::graph::{enumerate_copies, Graph};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Every proper colouring has a rainbow copy.
    Arrows,
    /// A proper colouring without rainbow copies exists; see `witness`.
    Witness,
    /// The node budget ran out first.
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowsVerdict {
    pub outcome: Outcome,
    pub witness: Option<EdgeColouring>,
    pub nodes: u64,
}

pub fn decide_arrows(g: &Graph, h: &Graph, budget: u64) -> Result<ArrowsVerdict> {
    if h.m() == 0 {
        return domain("target graph must have at least one edge");
    }
    let m = g.m();
    let copies: Vec<Vec<usize>> = enumerate_copies(g, h)
        .into_iter()
        .map(|emb| h.edges().iter().map(|&(a, b)| g.edge_index(emb[a as usize], emb[b as usize]).unwrap()).collect())
        .collect();
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (qi, q) in copies.iter().enumerate() {
        for &e in q {
            through[e].push(qi);
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(through[e].len()), e));

    let mut s = Search {
        g,
        copies: &copies,
        through: &through,
        order: &order,
        col: vec![NONE; m],
        used: vec![vec![0u64; bits::words_for(m + 1)]; g.n()],
        nodes: 0,
        budget,
    };
    let found = s.dfs(0, -1);
    let nodes = s.nodes;
    Ok(match found {
        Some(true) => {
            let mut psi = EdgeColouring::new();
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                psi.set(u, v, s.col[i]);
            }
            ArrowsVerdict { outcome: Outcome::Witness, witness: Some(psi), nodes }
        }
        Some(false) => ArrowsVerdict { outcome: Outcome::Arrows, witness: None, nodes },
        None => ArrowsVerdict { outcome: Outcome::Unknown, witness: None, nodes },
    })
}

struct Search<'a> {
    g: &'a Graph,
    copies: &'a [Vec<usize>],
    through: &'a [Vec<usize>],
    order: &'a [usize],
    col: Vec<u32>,
    used: Vec<Vec<u64>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// `Some(true)`: witness completed. `Some(false)`: subtree refuted.
    /// `None`: budget exhausted.
    fn dfs(&mut self, pos: usize, max_col: i64) -> Option<bool> {
        if pos == self.order.len() {
            return Some(true);
        }
        let e = self.order[pos];
        let (u, v) = self.g.edges()[e];
        let mut cands: Vec<u32> = (0..=(max_col + 1) as u32)
            .filter(|&c| {
                !bits::test(&self.used[u as usize], c as usize) && !bits::test(&self.used[v as usize], c as usize)
            })
            .collect();
        for &qi in &self.through[e] {
            if let Some(cs) = self.distinct_colours_except(qi, e) {
                cands.retain(|c| cs.contains(c));
            }
        }
        for c in cands {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            self.assign(e, c);
            if self.consistent_after(e) {
                match self.dfs(pos + 1, max_col.max(c as i64)) {
                    Some(false) => {}
                    other => {
                        if other.is_none() {
                            self.unassign(e, c);
                        }
                        return other;
                    }
                }
            }
            self.unassign(e, c);
        }
        Some(false)
    }

    fn assign(&mut self, e: usize, c: u32) {
        let (u, v) = self.g.edges()[e];
        self.col[e] = c;
        bits::set(&mut self.used[u as usize], c as usize);
        bits::set(&mut self.used[v as usize], c as usize);
    }

    fn unassign(&mut self, e: usize, c: u32) {
        let (u, v) = self.g.edges()[e];
        self.col[e] = NONE;
        bits::clear(&mut self.used[u as usize], c as usize);
        bits::clear(&mut self.used[v as usize], c as usize);
    }

    /// Colours of copy `qi` other than `skip`, if all are present and distinct.
    fn distinct_colours_except(&self, qi: usize, skip: usize) -> Option<Vec<u32>> {
        let mut cs = Vec::with_capacity(self.copies[qi].len());
        for &f in &self.copies[qi] {
            if f == skip {
                continue;
            }
            let c = self.col[f];
            if c == NONE || cs.contains(&c) {
                return None;
            }
            cs.push(c);
        }
        Some(cs)
    }

    fn consistent_after(&self, e: usize) -> bool {
        for &qi in &self.through[e] {
            let q = &self.copies[qi];
            let open: Vec<usize> = q.iter().copied().filter(|&f| self.col[f] == NONE).collect();
            match open.len() {
                0 => {
                    let mut cs: Vec<u32> = q.iter().map(|&f| self.col[f]).collect();
                    cs.sort_unstable();
                    if cs.windows(2).all(|w| w[0] != w[1]) {
                        return false;
                    }
                }
                1 => {
                    let f = open[0];
                    if let Some(cs) = self.distinct_colours_except(qi, f) {
                        let (a, b) = self.g.edges()[f];
                        let ok = cs.iter().any(|&c| {
                            !bits::test(&self.used[a as usize], c as usize)
                                && !bits::test(&self.used[b as usize], c as usize)
                        });
                        if !ok {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{is_proper, rainbow_copies};
    use crate::graph::{complete, NamedGraph};

    fn ng(s: &str) -> Graph {
        s.parse::<NamedGraph>().unwrap().build().unwrap()
    }

    /// Tries every partition of the edge set into matchings.
    fn brute_force_arrows(g: &Graph, h: &Graph) -> bool {
        let m = g.m();
        let mut col = vec![0u32; m];
        fn rec(i: usize, k: u32, g: &Graph, h: &Graph, col: &mut Vec<u32>) -> bool {
            if i == g.m() {
                let mut psi = EdgeColouring::new();
                for (j, &(u, v)) in g.edges().iter().enumerate() {
                    psi.set(u, v, col[j]);
                }
                if !is_proper(g, &psi).unwrap() {
                    return true;
                }
                return !rainbow_copies(g, &psi, h).is_empty();
            }
            for c in 0..=k {
                col[i] = c;
                if !rec(i + 1, k.max(c + 1), g, h, col) {
                    return false;
                }
            }
            true
        }
        rec(0, 0, g, h, &mut col)
    }

    #[test]
    fn agrees_with_partition_oracle() {
        let cases = [
            ("K3", "K3"),
            ("K4", "K3"),
            ("K4", "path(3)"),
            ("star(3)", "path(3)"),
            ("kbip(2,3)", "path(4)"),
            ("hatk(2,3)", "K3"),
            ("path(5)", "path(3)"),
            ("union(K3,K3)", "K3"),
        ];
        for (gs, hs) in cases {
            let (g, h) = (ng(gs), ng(hs));
            assert!(g.m() <= 9);
            let v = decide_arrows(&g, &h, 1_000_000).unwrap();
            let expect = brute_force_arrows(&g, &h);
            assert_eq!(v.outcome == Outcome::Arrows, expect, "{gs} -> {hs}");
            if let Some(w) = v.witness {
                assert!(is_proper(&g, &w).unwrap());
                assert!(rainbow_copies(&g, &w, &h).is_empty());
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let v = decide_arrows(&complete(6), &complete(4), 3).unwrap();
        assert_eq!(v.outcome, Outcome::Unknown);
    }
}
