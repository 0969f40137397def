//! Total colourings of a single `K4`-tiled graph with a certificate covering
//! every rainbow `K4`.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use crate::colouring::{clique_edges, is_proper, rainbow_cliques, EdgeColouring, Palette};
use crate::error::{domain, LabError, Result};
use crate::graph::{Edge, Graph, Vertex};

use super::procedure::{partial_colouring, tri, PartialColouringState, Strategy, Triangle};
use super::stretch::{StretchCache, STRETCH_MAX_VERTICES};
use super::{is_k4_tiled, phi, GenStep, GeneratingSequence};

/// Largest excess handled by [`colour_tiled`].
pub const PHI_MAX: i64 = 7;

/// What every rainbow `K4` of a colouring is known to contain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverCertificate {
    NoRainbow,
    Triangle { vertices: Triangle },
    Matching { edges: Vec<Edge> },
}

impl CoverCertificate {
    /// Strength order: `NoRainbow < Triangle < Matching` by size.
    pub fn rank(&self) -> usize {
        match self {
            CoverCertificate::NoRainbow => 0,
            CoverCertificate::Triangle { .. } => 1,
            CoverCertificate::Matching { edges } => 1 + edges.len(),
        }
    }

    /// Whether every clique in `k4s` contains the certificate's triangle or an
    /// edge of its matching.
    pub fn covers(&self, k4s: &[Vec<Vertex>]) -> bool {
        match self {
            CoverCertificate::NoRainbow => k4s.is_empty(),
            CoverCertificate::Triangle { vertices } => k4s.iter().all(|q| vertices.iter().all(|v| q.contains(v))),
            CoverCertificate::Matching { edges } => {
                k4s.iter().all(|q| edges.iter().any(|(a, b)| q.contains(a) && q.contains(b)))
            }
        }
    }

    /// Whether this certificate is at least as strong as excess `phi` demands.
    pub fn fits_class(&self, phi: i64) -> bool {
        match phi {
            0..=2 => matches!(self, CoverCertificate::NoRainbow),
            3..=5 => self.rank() <= 1,
            6..=7 => match self {
                CoverCertificate::Matching { edges } => edges.len() <= 3,
                _ => true,
            },
            _ => false,
        }
    }

    /// Whether the triangle or matching lives in `g`.
    pub fn exists_in(&self, g: &Graph) -> bool {
        match self {
            CoverCertificate::NoRainbow => true,
            CoverCertificate::Triangle { vertices: t } => {
                g.has_edge(t[0], t[1]) && g.has_edge(t[0], t[2]) && g.has_edge(t[1], t[2])
            }
            CoverCertificate::Matching { edges } => {
                let ends: BTreeSet<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
                ends.len() == 2 * edges.len() && edges.iter().all(|&(a, b)| g.has_edge(a, b))
            }
        }
    }
}

/// The strongest certificate for the listed rainbow cliques, or `None` when no
/// matching of at most three edges meets them all.
pub fn minimal_certificate(k4s: &[Vec<Vertex>]) -> Option<CoverCertificate> {
    if k4s.is_empty() {
        return Some(CoverCertificate::NoRainbow);
    }
    let common: Vec<Vertex> = k4s[0].iter().copied().filter(|v| k4s.iter().all(|q| q.contains(v))).collect();
    if common.len() >= 3 {
        return Some(CoverCertificate::Triangle { vertices: [common[0], common[1], common[2]] });
    }
    let pool: Vec<Edge> =
        k4s.iter().flat_map(|q| clique_edges(q).collect::<Vec<_>>()).collect::<BTreeSet<_>>().into_iter().collect();
    for size in 1..=3 {
        let mut pick = Vec::with_capacity(size);
        if let Some(m) = matching_search(&pool, k4s, size, 0, &mut pick) {
            return Some(CoverCertificate::Matching { edges: m });
        }
    }
    None
}

fn matching_search(
    pool: &[Edge],
    k4s: &[Vec<Vertex>],
    size: usize,
    from: usize,
    pick: &mut Vec<Edge>,
) -> Option<Vec<Edge>> {
    if pick.len() == size {
        let cert = CoverCertificate::Matching { edges: pick.clone() };
        return cert.covers(k4s).then(|| pick.clone());
    }
    for i in from..pool.len() {
        let (a, b) = pool[i];
        if pick.iter().any(|&(c, d)| a == c || a == d || b == c || b == d) {
            continue;
        }
        pick.push(pool[i]);
        if let Some(m) = matching_search(pool, k4s, size, i + 1, pick) {
            return Some(m);
        }
        pick.pop();
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct TiledColouring {
    pub phi: i64,
    pub sequence: GeneratingSequence,
    pub strategy: Strategy,
    pub partial: PartialColouringState,
    /// Total proper colouring of the input graph.
    pub colouring: EdgeColouring,
    pub rainbow_k4s: Vec<Vec<Vertex>>,
    pub certificate: CoverCertificate,
}

/// The strategies tried by [`colour_tiled`], simplest first.
pub fn strategies(seq: &GeneratingSequence) -> Vec<Strategy> {
    let reserve: BTreeSet<Edge> = seq
        .steps
        .iter()
        .filter_map(|s| match s {
            GenStep::Edge { quad, added } if added.len() == 1 => {
                let (a, b) = added[0];
                let rest: Vec<Vertex> = quad.iter().copied().filter(|&v| v != a && v != b).collect();
                Some((rest[0], rest[1]))
            }
            _ => None,
        })
        .collect();
    let mut visits: std::collections::BTreeMap<Triangle, usize> = Default::default();
    for s in &seq.steps {
        if let GenStep::Vertex { y, z, w, .. } = s {
            *visits.entry(tri(*y, *z, *w)).or_default() += 1;
        }
    }
    let skip: BTreeSet<Triangle> = visits
        .iter()
        .filter(|(t, &k)| k >= 2 && reserve.iter().any(|(a, b)| t.contains(a) && t.contains(b)))
        .map(|(t, _)| *t)
        .collect();
    let mut reserves = vec![(BTreeSet::new(), BTreeSet::new())];
    if !reserve.is_empty() {
        reserves.push((reserve.clone(), BTreeSet::new()));
        if !skip.is_empty() {
            reserves.push((reserve, skip));
        }
    }
    let bases = if seq.base.len() == 5 { 1 } else { 3 };
    let mut out = Vec::new();
    for (reserve, skip) in &reserves {
        for colour_edge_steps in [true, false] {
            for alt_standard in [false, true] {
                for base_matching in 0..bases {
                    out.push(Strategy {
                        base_matching,
                        alt_standard,
                        colour_edge_steps,
                        reserve: reserve.clone(),
                        skip: skip.clone(),
                    });
                }
            }
        }
    }
    out
}

/// Completes a partial colouring of `h` with fresh colours.
fn complete_fresh(h: &Graph, st: &PartialColouringState) -> EdgeColouring {
    let mut psi = st.colouring.clone();
    let mut palette = Palette::starting_at(st.next_colour);
    for &(u, v) in h.edges() {
        if psi.get(u, v).is_none() {
            psi.set(u, v, palette.fresh());
        }
    }
    psi
}

/// Colours a `K4`-tiled graph with `φ ≤ 7` so that its rainbow `K4`s are
/// covered as the excess class allows.
pub fn colour_tiled(h: &Graph) -> Result<TiledColouring> {
    colour_tiled_with(h, &mut StretchCache::new())
}

pub fn colour_tiled_with(h: &Graph, cache: &mut StretchCache) -> Result<TiledColouring> {
    if h.n() > STRETCH_MAX_VERTICES {
        return domain(format!("tiled colouring needs at most {STRETCH_MAX_VERTICES} vertices"));
    }
    if !is_k4_tiled(h) {
        return domain("graph is not K4-tiled");
    }
    let p = phi(h);
    if p > PHI_MAX {
        return Err(LabError::OutOfRegime(format!("phi = {p} exceeds {PHI_MAX}")));
    }
    let seq = cache.get(h)?;
    let mut best: Option<TiledColouring> = None;
    for strategy in strategies(&seq) {
        let partial = partial_colouring(&seq, h.n(), &strategy, 0)?;
        let colouring = complete_fresh(h, &partial);
        let rainbow_k4s = rainbow_cliques(h, &colouring, 4);
        let Some(certificate) = minimal_certificate(&rainbow_k4s) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| certificate.rank() < b.certificate.rank()) {
            let done = certificate == CoverCertificate::NoRainbow;
            best = Some(TiledColouring {
                phi: p,
                sequence: seq.clone(),
                strategy,
                partial,
                colouring,
                rainbow_k4s,
                certificate,
            });
            if done {
                break;
            }
        }
    }
    match best {
        Some(b) if b.certificate.fits_class(p) && is_proper(h, &b.colouring)? => Ok(b),
        Some(b) => Err(LabError::Counterexample(
            json!({ "phi": p, "certificate": b.certificate, "edges": h.edges() }).to_string(),
        )),
        None => Err(LabError::Counterexample(
            json!({ "phi": p, "reason": "no matching of at most 3 edges covers the rainbow K4s", "edges": h.edges() })
                .to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete;

    #[test]
    fn k4_and_k5() {
        let t = colour_tiled(&complete(4)).unwrap();
        assert_eq!(t.certificate, CoverCertificate::NoRainbow);
        let t = colour_tiled(&complete(5)).unwrap();
        assert_eq!(t.phi, 3);
        assert!(t.certificate.fits_class(3));
        assert!(is_proper(&complete(5), &t.colouring).unwrap());
    }

    #[test]
    fn minimal_certificate_shapes() {
        assert_eq!(
            minimal_certificate(&[vec![0, 1, 2, 3], vec![0, 1, 2, 4]]),
            Some(CoverCertificate::Triangle { vertices: [0, 1, 2] })
        );
        let m = minimal_certificate(&[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        assert_eq!(m.rank(), 3);
        assert!(m.covers(&[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]));
    }

    #[test]
    fn out_of_regime() {
        // K6 has phi = 8 - 30 + 30 = 8.
        assert!(matches!(colour_tiled(&complete(6)), Err(LabError::OutOfRegime(_))));
    }
}
