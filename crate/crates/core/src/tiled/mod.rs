//! `K4`-tiled graphs: decomposition into `K4`-components, the excess
//! `φ(H) = 8 − 5v(H) + 2e(H)`, generating sequences, the partial colouring
//! procedure, cover certificates and the `K8` avoider built from them.
//!
//! A graph is `K4`-tiled when every edge lies in a `K4` and the `K4` copies
//! are connected under sharing an edge. Starting from a `K4` it can be grown
//! by three kinds of step, each completing one new `K4`:
//!
//! * standard: two new vertices joined to an existing edge (2 vertices,
//!   5 edges);
//! * vertex: one new vertex joined to three existing vertices, adding any of
//!   the three edges among them that are missing;
//! * edge: one to five new edges among four existing vertices.
//!
//! With `α, β` standard and vertex steps and `γ` missing edges added,
//! `φ = β + 2γ` from a `K4` base and `φ = 3 + β + 2γ` from a `K5` base.

pub mod assemble;
pub mod certify;
pub mod corpus;
pub mod procedure;
pub mod stretch;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::{norm, Edge, Graph, Vertex};

pub use assemble::{avoid_k8, avoid_k8_perturbed, colour_component_tree, within_parts, K8Avoidance, K8Colouring};
pub use certify::{colour_tiled, CoverCertificate, TiledColouring};
pub use procedure::{partial_colouring, PartialColouringState, Strategy};
pub use stretch::{find_stretched_sequence, StretchCache};

pub fn phi(h: &Graph) -> i64 {
    8 - 5 * h.n() as i64 + 2 * h.m() as i64
}

/// A `K4`-component: its original vertex labels and the union of its `K4`
/// copies relabelled onto `0..vertices.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K4Component {
    pub vertices: Vec<Vertex>,
    pub graph: Graph,
}

impl K4Component {
    pub fn global_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.graph.edges().iter().map(|&(a, b)| norm(self.vertices[a as usize], self.vertices[b as usize]))
    }
}

/// Splits the `K4` copies of `g` into edge-connected classes. Also returns the
/// edges lying in no `K4`.
pub fn k4_components(g: &Graph) -> (Vec<K4Component>, Vec<Edge>) {
    let k4s = g.cliques(4);
    let mut parent: Vec<usize> = (0..k4s.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    let mut owner: HashMap<Edge, usize> = HashMap::new();
    for (i, q) in k4s.iter().enumerate() {
        for a in 0..4 {
            for b in a + 1..4 {
                let e = (q[a], q[b]);
                match owner.get(&e) {
                    Some(&j) => {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri] = rj;
                    }
                    None => {
                        owner.insert(e, i);
                    }
                }
            }
        }
    }
    let mut groups: Vec<(usize, BTreeSet<Edge>)> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, q) in k4s.iter().enumerate() {
        let r = find(&mut parent, i);
        let s = *slot.entry(r).or_insert_with(|| {
            groups.push((r, BTreeSet::new()));
            groups.len() - 1
        });
        for a in 0..4 {
            for b in a + 1..4 {
                groups[s].1.insert((q[a], q[b]));
            }
        }
    }
    let comps = groups
        .into_iter()
        .map(|(_, es)| {
            let vertices: Vec<Vertex> =
                es.iter().flat_map(|&(u, v)| [u, v]).collect::<BTreeSet<_>>().into_iter().collect();
            let pos = |v: Vertex| vertices.binary_search(&v).unwrap() as Vertex;
            let graph = Graph::from_edges(vertices.len(), es.iter().map(|&(u, v)| (pos(u), pos(v))))
                .expect("component edges are valid");
            K4Component { vertices, graph }
        })
        .collect();
    let rest = g.edges().iter().copied().filter(|e| !owner.contains_key(e)).collect();
    (comps, rest)
}

/// Whether `h` is `K4`-tiled (and has at least one `K4`).
pub fn is_k4_tiled(h: &Graph) -> bool {
    let (comps, rest) = k4_components(h);
    rest.is_empty() && comps.len() == 1 && comps[0].vertices.len() == h.n()
}

/// One step of a generating sequence, in the labels of the final graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GenStep {
    /// New vertices `x, y` joined to each other and to the edge `zw`.
    Standard { z: Vertex, w: Vertex, x: Vertex, y: Vertex },
    /// New vertex `x` joined to `y, z, w`; `missing` lists edges among
    /// `y, z, w` added by this step.
    Vertex { y: Vertex, z: Vertex, w: Vertex, x: Vertex, missing: Vec<Edge> },
    /// Completes `quad` by adding `added`.
    Edge { quad: [Vertex; 4], added: Vec<Edge> },
}

impl GenStep {
    pub fn quad(&self) -> [Vertex; 4] {
        let mut q = match self {
            GenStep::Standard { z, w, x, y } => [*z, *w, *x, *y],
            GenStep::Vertex { y, z, w, x, .. } => [*y, *z, *w, *x],
            GenStep::Edge { quad, .. } => *quad,
        };
        q.sort_unstable();
        q
    }

    /// Edges this step adds.
    pub fn new_edges(&self) -> Vec<Edge> {
        match self {
            GenStep::Standard { z, w, x, y } => {
                vec![norm(*x, *y), norm(*x, *z), norm(*x, *w), norm(*y, *z), norm(*y, *w)]
            }
            GenStep::Vertex { y, z, w, x, missing } => {
                let mut v = vec![norm(*x, *y), norm(*x, *z), norm(*x, *w)];
                v.extend(missing.iter().copied());
                v
            }
            GenStep::Edge { added, .. } => added.clone(),
        }
    }

    pub fn gamma(&self) -> usize {
        match self {
            GenStep::Standard { .. } => 0,
            GenStep::Vertex { missing, .. } => missing.len(),
            GenStep::Edge { added, .. } => added.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratingSequence {
    /// Four or five vertices spanning a clique.
    pub base: Vec<Vertex>,
    pub steps: Vec<GenStep>,
}

impl GeneratingSequence {
    pub fn alpha(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, GenStep::Standard { .. })).count()
    }

    pub fn beta(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, GenStep::Vertex { .. })).count()
    }

    pub fn gamma(&self) -> usize {
        self.steps.iter().map(|s| s.gamma()).sum()
    }

    pub fn edge_steps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, GenStep::Edge { .. })).count()
    }

    /// `φ` predicted by the step counters.
    pub fn phi_from_counts(&self) -> i64 {
        let base = if self.base.len() == 5 { 3 } else { 0 };
        base + self.beta() as i64 + 2 * self.gamma() as i64
    }

    /// Replays the sequence on `n` vertices, checking every step, and returns
    /// the graph after each prefix (index 0 is the base clique).
    pub fn replay(&self, n: usize) -> Result<Vec<Graph>> {
        if !(4..=5).contains(&self.base.len()) {
            return domain("base must have four or five vertices");
        }
        let mut present: BTreeSet<Vertex> = self.base.iter().copied().collect();
        let mut edges: BTreeSet<Edge> = BTreeSet::new();
        for (i, &a) in self.base.iter().enumerate() {
            for &b in &self.base[i + 1..] {
                edges.insert(norm(a, b));
            }
        }
        let mut out = vec![Graph::from_edges(n, edges.iter().copied())?];
        for (i, step) in self.steps.iter().enumerate() {
            let bad = |what: &str| domain(format!("step {i}: {what}"));
            let q = step.quad();
            let old: Vec<Vertex> = q.iter().copied().filter(|v| present.contains(v)).collect();
            let quad_edges: Vec<Edge> =
                (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).map(|(a, b)| norm(q[a], q[b])).collect();
            let have = quad_edges.iter().filter(|e| edges.contains(e)).count();
            match step {
                GenStep::Standard { z, w, .. } => {
                    if old.len() != 2 || !edges.contains(&norm(*z, *w)) {
                        return bad("standard step must attach to an existing edge");
                    }
                }
                GenStep::Vertex { x, missing, .. } => {
                    if old.len() != 3 || present.contains(x) || have == 0 {
                        return bad("vertex step must attach to three vertices spanning an edge");
                    }
                    if missing.len() != 3 - have {
                        return bad("vertex step lists the wrong missing edges");
                    }
                }
                GenStep::Edge { added, .. } => {
                    if old.len() != 4 || have == 0 || have == 6 || added.len() != 6 - have {
                        return bad("edge step must add one to five edges among four vertices");
                    }
                }
            }
            for e in step.new_edges() {
                if !edges.insert(e) {
                    return bad("step re-adds an existing edge");
                }
            }
            present.extend(q);
            out.push(Graph::from_edges(n, edges.iter().copied())?);
        }
        Ok(out)
    }

    /// Checks that the sequence generates exactly `h`.
    pub fn generates(&self, h: &Graph) -> Result<bool> {
        let graphs = self.replay(h.n())?;
        let last = graphs.last().unwrap();
        Ok(last.edges() == h.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete;

    #[test]
    fn book_is_one_component() {
        // Two K4s sharing the edge 01.
        let g = Graph::from_edges(
            6,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (0, 5), (1, 4), (1, 5), (4, 5)],
        )
        .unwrap();
        let (comps, rest) = k4_components(&g);
        assert_eq!(comps.len(), 1);
        assert!(rest.is_empty());
        assert_eq!((comps[0].graph.n(), comps[0].graph.m()), (6, 11));
        assert_eq!(phi(&g), 0);
    }

    #[test]
    fn vertex_sharing_k4s_are_separate() {
        let mut e: Vec<Edge> = complete(4).edges().to_vec();
        e.extend([(3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6), (0, 7)]);
        let g = Graph::from_edges(8, e).unwrap();
        let (comps, rest) = k4_components(&g);
        assert_eq!(comps.len(), 2);
        assert_eq!(rest, vec![(0, 7)]);
    }

    #[test]
    fn phi_of_small_cliques() {
        assert_eq!(phi(&complete(4)), 0);
        assert_eq!(phi(&complete(5)), 3);
    }

    #[test]
    fn replay_rejects_bad_steps() {
        let seq =
            GeneratingSequence { base: vec![0, 1, 2, 3], steps: vec![GenStep::Standard { z: 0, w: 4, x: 5, y: 6 }] };
        assert!(seq.replay(7).is_err());
    }
}
