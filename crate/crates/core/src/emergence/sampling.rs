//! Random graphs, perturbed instances and reproducible per-trial streams.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{Edge, Graph, Vertex};

/// RNG for trial `trial` of a run with master seed `master`. Streams are
/// independent of thread scheduling.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

/// `G(n, p)` by geometric skipping over the pairs `(w, v)`, `w < v`.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return domain(format!("edge probability {p} outside [0, 1]"));
    }
    let mut edges: Vec<Edge> = Vec::new();
    if p == 0.0 || n < 2 {
        return Graph::from_edges(n, edges);
    }
    if p == 1.0 {
        return Ok(crate::graph::complete(n));
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w): (i64, i64) = (1, -1);
    let n = n as i64;
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            edges.push((w as Vertex, v as Vertex));
        }
    }
    Graph::from_edges(n as usize, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSpec {
    /// Complete bipartite graph between `0..n/2` and `n/2..n`.
    BalancedBipartite,
    Empty,
    Custom(Graph),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Every pair is sampled; random edges may coincide with seed edges.
    AllPairs,
    /// Only pairs outside the seed are sampled.
    NonSeedPairs,
}

/// A deterministic seed graph together with independent random edges.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbedInstance {
    pub n: usize,
    pub p: f64,
    pub seed: Graph,
    /// `side[v]` is true for vertices of the second part of a bipartite seed.
    pub side: Vec<bool>,
    pub random: Graph,
}

impl PerturbedInstance {
    pub fn union(&self) -> Graph {
        self.seed.union(&self.random).expect("same vertex count")
    }

    /// Vertices of the first and second part.
    pub fn parts(&self) -> (Vec<Vertex>, Vec<Vertex>) {
        let a = (0..self.n as Vertex).filter(|&v| !self.side[v as usize]).collect();
        let b = (0..self.n as Vertex).filter(|&v| self.side[v as usize]).collect();
        (a, b)
    }
}

pub fn sample_perturbed<R: Rng + ?Sized>(
    seed: &SeedSpec,
    n: usize,
    p: f64,
    mode: SampleMode,
    rng: &mut R,
) -> Result<PerturbedInstance> {
    let half = n / 2;
    let (seed_graph, side) = match seed {
        SeedSpec::BalancedBipartite => {
            let g = Graph::join(&Graph::empty(half), &Graph::empty(n - half));
            (g, (0..n).map(|v| v >= half).collect())
        }
        SeedSpec::Empty => (Graph::empty(n), vec![false; n]),
        SeedSpec::Custom(g) => {
            if g.n() != n {
                return domain(format!("seed has {} vertices, expected {n}", g.n()));
            }
            (g.clone(), vec![false; n])
        }
    };
    let mut random = sample_gnp(n, p, rng)?;
    if mode == SampleMode::NonSeedPairs {
        random = random.filter_edges(|(u, v)| !seed_graph.has_edge(u, v));
    }
    Ok(PerturbedInstance { n, p, seed: seed_graph, side, random })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_edge_count_is_plausible() {
        let mut rng = trial_rng(7, 0);
        let g = sample_gnp(400, 0.05, &mut rng).unwrap();
        let mean = 0.05 * (400.0 * 399.0 / 2.0);
        let sd = (mean * 0.95f64).sqrt();
        assert!((g.m() as f64 - mean).abs() < 5.0 * sd, "{}", g.m());
    }

    #[test]
    fn streams_are_reproducible() {
        let a = sample_gnp(60, 0.2, &mut trial_rng(1, 5)).unwrap();
        let b = sample_gnp(60, 0.2, &mut trial_rng(1, 5)).unwrap();
        let c = sample_gnp(60, 0.2, &mut trial_rng(1, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn edge_probabilities_validated() {
        assert!(sample_gnp(5, 1.5, &mut trial_rng(0, 0)).is_err());
        assert_eq!(sample_gnp(5, 1.0, &mut trial_rng(0, 0)).unwrap().m(), 10);
    }
}
