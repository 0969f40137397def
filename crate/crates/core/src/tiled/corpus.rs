//! Random `K4`-tiled graphs grown by random steps.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};

use crate::graph::{norm, Edge, Graph, Vertex};

use super::{GenStep, GeneratingSequence};

#[derive(Clone, Copy, Debug)]
pub struct CorpusConfig {
    pub max_vertices: usize,
    pub max_phi: i64,
    /// Chance of starting from `K5` instead of `K4`.
    pub k5_base: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { max_vertices: 12, max_phi: 7, k5_base: 0.15 }
    }
}

struct Grower {
    n: usize,
    edges: BTreeSet<Edge>,
    phi: i64,
}

impl Grower {
    fn has(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.contains(&norm(a, b))
    }

    fn missing(&self, vs: &[Vertex]) -> Vec<Edge> {
        let mut out = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !self.has(vs[i], vs[j]) {
                    out.push(norm(vs[i], vs[j]));
                }
            }
        }
        out
    }

    fn random_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> Edge {
        *self.edges.iter().nth(rng.random_range(0..self.edges.len())).unwrap()
    }

    /// Three vertices spanning an edge, usually a triangle.
    fn random_triple<R: Rng + ?Sized>(&self, rng: &mut R) -> [Vertex; 3] {
        let (a, b) = self.random_edge(rng);
        let common: Vec<Vertex> =
            (0..self.n as Vertex).filter(|&c| c != a && c != b && self.has(a, c) && self.has(b, c)).collect();
        let c = if !common.is_empty() && rng.random_bool(0.8) {
            common[rng.random_range(0..common.len())]
        } else {
            loop {
                let c = rng.random_range(0..self.n as Vertex);
                if c != a && c != b {
                    break c;
                }
            }
        };
        let mut t = [a, b, c];
        t.sort_unstable();
        t
    }

    fn try_step<R: Rng + ?Sized>(&mut self, rng: &mut R, cfg: &CorpusConfig) -> Option<GenStep> {
        let roll: f64 = rng.random();
        let step = if roll < 0.3 {
            if self.n + 2 > cfg.max_vertices {
                return None;
            }
            let (z, w) = self.random_edge(rng);
            let (x, y) = (self.n as Vertex, self.n as Vertex + 1);
            GenStep::Standard { z, w, x, y }
        } else if roll < 0.8 {
            if self.n + 1 > cfg.max_vertices {
                return None;
            }
            let [y, z, w] = self.random_triple(rng);
            let missing = self.missing(&[y, z, w]);
            if self.phi + 1 + 2 * missing.len() as i64 > cfg.max_phi {
                return None;
            }
            GenStep::Vertex { y, z, w, x: self.n as Vertex, missing }
        } else {
            let [a, b, c] = self.random_triple(rng);
            let d = rng.random_range(0..self.n as Vertex);
            if [a, b, c].contains(&d) {
                return None;
            }
            let mut quad = [a, b, c, d];
            quad.sort_unstable();
            let added = self.missing(&quad);
            if added.is_empty() || added.len() > 5 || self.phi + 2 * added.len() as i64 > cfg.max_phi {
                return None;
            }
            GenStep::Edge { quad, added }
        };
        self.n = self.n.max(step.quad().iter().map(|&v| v as usize + 1).max().unwrap());
        self.phi += match &step {
            GenStep::Standard { .. } => 0,
            GenStep::Vertex { missing, .. } => 1 + 2 * missing.len() as i64,
            GenStep::Edge { added, .. } => 2 * added.len() as i64,
        };
        self.edges.extend(step.new_edges());
        Some(step)
    }
}

/// One random `K4`-tiled graph with its generating sequence, vertices
/// shuffled.
pub fn random_tiled<R: Rng + ?Sized>(rng: &mut R, cfg: &CorpusConfig) -> (Graph, GeneratingSequence) {
    let base_n = if rng.random_bool(cfg.k5_base) { 5 } else { 4 };
    let mut g = Grower { n: base_n, edges: BTreeSet::new(), phi: if base_n == 5 { 3 } else { 0 } };
    for a in 0..base_n as Vertex {
        for b in a + 1..base_n as Vertex {
            g.edges.insert((a, b));
        }
    }
    let target = rng.random_range(base_n..=cfg.max_vertices);
    let mut steps = Vec::new();
    let mut attempts = 0;
    while g.n < target && attempts < 200 {
        attempts += 1;
        if let Some(s) = g.try_step(rng, cfg) {
            steps.push(s);
        }
    }
    // A few edge or vertex steps at full size.
    for _ in 0..rng.random_range(0..4) {
        if let Some(s) = g.try_step(rng, cfg) {
            steps.push(s);
        }
    }
    let mut perm: Vec<Vertex> = (0..g.n as Vertex).collect();
    perm.shuffle(rng);
    let seq = GeneratingSequence { base: (0..base_n as Vertex).collect(), steps };
    let seq = super::stretch::relabel_sequence(&seq, |v| perm[v as usize]);
    let graph = Graph::from_edges(g.n, g.edges.iter().map(|&(a, b)| (perm[a as usize], perm[b as usize])))
        .expect("grown edges are valid");
    (graph, seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiled::{is_k4_tiled, phi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grown_graphs_are_tiled_and_counted() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = CorpusConfig::default();
        for _ in 0..300 {
            let (h, seq) = random_tiled(&mut rng, &cfg);
            assert!(is_k4_tiled(&h));
            assert!(seq.generates(&h).unwrap());
            assert_eq!(seq.phi_from_counts(), phi(&h));
            assert!(phi(&h) <= cfg.max_phi && h.n() <= cfg.max_vertices);
        }
    }
}
