//! Edge colourings, properness, rainbow detection and the interest and
//! compatibility sets used by the clique-extension arguments.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};
use crate::graph::{enumerate_copies, norm, Edge, Graph, Vertex};

pub type Colour = u32;

/// A partial map from vertex pairs to colours. Colours carry no order
/// semantics; only equality matters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColouringRepr", into = "ColouringRepr")]
pub struct EdgeColouring {
    map: BTreeMap<Edge, Colour>,
}

#[derive(Serialize, Deserialize)]
struct ColouringRepr {
    edges: Vec<[u32; 3]>,
}

impl TryFrom<ColouringRepr> for EdgeColouring {
    type Error = LabError;
    fn try_from(r: ColouringRepr) -> Result<Self> {
        let mut psi = EdgeColouring::new();
        for [u, v, c] in r.edges {
            if u == v {
                return domain(format!("loop ({u},{v}) in colouring"));
            }
            if psi.set(u, v, c).is_some() {
                return domain(format!("pair ({u},{v}) coloured twice"));
            }
        }
        Ok(psi)
    }
}

impl From<EdgeColouring> for ColouringRepr {
    fn from(psi: EdgeColouring) -> Self {
        ColouringRepr { edges: psi.map.iter().map(|(&(u, v), &c)| [u, v, c]).collect() }
    }
}

impl EdgeColouring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.map.get(&norm(u, v)).copied()
    }

    /// Sets the colour of `uv`, returning the previous one.
    pub fn set(&mut self, u: Vertex, v: Vertex, c: Colour) -> Option<Colour> {
        self.map.insert(norm(u, v), c)
    }

    pub fn remove(&mut self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.map.remove(&norm(u, v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, Colour)> + '_ {
        self.map.iter().map(|(&e, &c)| (e, c))
    }

    pub fn colours(&self) -> HashSet<Colour> {
        self.map.values().copied().collect()
    }

    /// Copies every entry of `other` into `self`, failing on a pair coloured
    /// by both.
    pub fn absorb(&mut self, other: &EdgeColouring) -> Result<()> {
        for (e, c) in other.iter() {
            if self.map.insert(e, c).is_some() {
                return domain(format!("pair {e:?} coloured twice while merging"));
            }
        }
        Ok(())
    }

    /// Colours along `edges`, skipping uncoloured ones.
    pub fn colours_on(&self, edges: impl IntoIterator<Item = Edge>) -> Vec<Colour> {
        edges.into_iter().filter_map(|(u, v)| self.get(u, v)).collect()
    }

    /// True when every edge of `g` is coloured.
    pub fn is_total_on(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(u, v)| self.get(u, v).is_some())
    }
}

/// Hands out fresh colours.
#[derive(Clone, Debug, Default)]
pub struct Palette {
    next: Colour,
}

impl Palette {
    pub fn starting_at(next: Colour) -> Self {
        Palette { next }
    }

    pub fn fresh(&mut self) -> Colour {
        let c = self.next;
        self.next += 1;
        c
    }

    /// `k` consecutive fresh colours, as the first one.
    pub fn block(&mut self, k: usize) -> Colour {
        let c = self.next;
        self.next += k as Colour;
        c
    }

    pub fn peek(&self) -> Colour {
        self.next
    }
}

/// Whether no two edges of `g` sharing a vertex have the same colour.
/// Uncoloured edges are ignored; colouring a non-edge is an error.
pub fn is_proper(g: &Graph, psi: &EdgeColouring) -> Result<bool> {
    let mut at: Vec<Vec<Colour>> = vec![Vec::new(); g.n()];
    for ((u, v), c) in psi.iter() {
        if !g.has_edge(u, v) {
            return domain(format!("colouring assigns a colour to non-edge ({u},{v})"));
        }
        at[u as usize].push(c);
        at[v as usize].push(c);
    }
    Ok(at.iter_mut().all(|cs| {
        cs.sort_unstable();
        cs.windows(2).all(|w| w[0] != w[1])
    }))
}

/// True when the coloured edges among `edges` carry pairwise distinct colours.
pub fn is_rainbow(psi: &EdgeColouring, edges: impl IntoIterator<Item = Edge>) -> bool {
    let mut cs = psi.colours_on(edges);
    cs.sort_unstable();
    cs.windows(2).all(|w| w[0] != w[1])
}

pub fn clique_edges(vs: &[Vertex]) -> impl Iterator<Item = Edge> + '_ {
    (0..vs.len()).flat_map(move |i| (i + 1..vs.len()).map(move |j| norm(vs[i], vs[j])))
}

/// Copies of `h` in `g` whose edges carry distinct colours. Uncoloured edges
/// never cause a clash.
pub fn rainbow_copies(g: &Graph, psi: &EdgeColouring, h: &Graph) -> Vec<Vec<Vertex>> {
    enumerate_copies(g, h)
        .into_iter()
        .filter(|emb| is_rainbow(psi, h.edges().iter().map(|&(a, b)| (emb[a as usize], emb[b as usize]))))
        .collect()
}

/// Rainbow `r`-cliques of `g`, as ascending vertex lists.
pub fn rainbow_cliques(g: &Graph, psi: &EdgeColouring, r: usize) -> Vec<Vec<Vertex>> {
    g.cliques(r).into_iter().filter(|c| is_rainbow(psi, clique_edges(c))).collect()
}

/// Vertices `x` adjacent to all of `k` whose edges into `k` avoid every
/// colour used inside `k`.
pub fn interest_set(g: &Graph, psi: &EdgeColouring, k: &[Vertex]) -> Vec<Vertex> {
    let inside: HashSet<Colour> =
        psi.colours_on(clique_edges(k).filter(|&(u, v)| g.has_edge(u, v))).into_iter().collect();
    g.common_neighbourhood(k)
        .into_iter()
        .filter(|&x| k.iter().filter_map(|&y| psi.get(x, y)).all(|c| !inside.contains(&c)))
        .collect()
}

/// Greedy compatible subset of `interest`, scanned in ascending vertex order:
/// `x` is kept when the colours on its edges into `k` are disjoint from those
/// of every vertex kept so far.
pub fn compatible_set(psi: &EdgeColouring, k: &[Vertex], interest: &[Vertex]) -> Vec<Vertex> {
    let mut sorted = interest.to_vec();
    sorted.sort_unstable();
    let mut taken: HashSet<Colour> = HashSet::new();
    let mut out = Vec::new();
    for x in sorted {
        let cs: Vec<Colour> = k.iter().filter_map(|&y| psi.get(x, y)).collect();
        if cs.iter().all(|c| !taken.contains(c)) {
            taken.extend(cs);
            out.push(x);
        }
    }
    out
}

/// A random proper colouring. Edges are visited in random order; each takes a
/// fresh colour with probability `fresh_bias`, otherwise a random existing
/// colour that keeps the colouring proper (falling back to a fresh one).
pub fn random_proper_colouring<R: Rng + ?Sized>(g: &Graph, rng: &mut R, fresh_bias: f64) -> EdgeColouring {
    let mut order: Vec<Edge> = g.edges().to_vec();
    order.shuffle(rng);
    let mut at: Vec<HashSet<Colour>> = vec![HashSet::new(); g.n()];
    let mut psi = EdgeColouring::new();
    let mut palette = Palette::default();
    for (u, v) in order {
        let mut chosen = None;
        if palette.peek() > 0 && !rng.random_bool(fresh_bias.clamp(0.0, 1.0)) {
            for _ in 0..12 {
                let c = rng.random_range(0..palette.peek());
                if !at[u as usize].contains(&c) && !at[v as usize].contains(&c) {
                    chosen = Some(c);
                    break;
                }
            }
        }
        let c = chosen.unwrap_or_else(|| palette.fresh());
        at[u as usize].insert(c);
        at[v as usize].insert(c);
        psi.set(u, v, c);
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn properness_and_rainbow() {
        let k3 = complete(3);
        let mut psi = EdgeColouring::new();
        psi.set(0, 1, 0);
        psi.set(1, 2, 1);
        psi.set(0, 2, 2);
        assert!(is_proper(&k3, &psi).unwrap());
        assert_eq!(rainbow_cliques(&k3, &psi, 3).len(), 1);
        psi.set(0, 2, 1);
        assert!(!is_proper(&k3, &psi).unwrap());
        psi.set(5, 6, 0);
        assert!(is_proper(&k3, &psi).is_err());
    }

    #[test]
    fn random_colourings_are_proper() {
        let g = complete(9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for bias in [0.0, 0.3, 1.0] {
            let psi = random_proper_colouring(&g, &mut rng, bias);
            assert!(psi.is_total_on(&g));
            assert!(is_proper(&g, &psi).unwrap());
        }
    }

    #[test]
    fn json_shape() {
        let mut psi = EdgeColouring::new();
        psi.set(1, 0, 7);
        assert_eq!(serde_json::to_string(&psi).unwrap(), r#"{"edges":[[0,1,7]]}"#);
    }
}
