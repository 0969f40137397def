//! Gluing per-component colourings into a colouring of a sparse graph in
//! which every rainbow `K4` uses the single colour [`RED`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::json;

use crate::colouring::{is_proper, rainbow_cliques, Colour, EdgeColouring, Palette};
use crate::emergence::sampling::PerturbedInstance;
use crate::error::{LabError, Result};
use crate::graph::{norm, Edge, Graph, Vertex};

use super::certify::{colour_tiled_with, CoverCertificate, PHI_MAX};
use super::stretch::{StretchCache, STRETCH_MAX_VERTICES};
use super::{k4_components, phi, K4Component};

pub const RED: Colour = 0;

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub vertices: Vec<Vertex>,
    pub phi: i64,
    pub certificate: CoverCertificate,
    /// Index into [`K8Avoidance::assemblies`] for components with `φ ≥ 3`.
    pub assembly: Option<usize>,
}

/// Colouring of a group of vertex-sharing components, in global labels.
#[derive(Clone, Debug, Serialize)]
pub struct TreeColouring {
    pub colouring: EdgeColouring,
    pub red: Vec<Edge>,
    pub root: usize,
    pub reports: Vec<ComponentReport>,
}

fn unsupported(what: &str, parts: &[K4Component]) -> LabError {
    let edges: Vec<Vec<Edge>> = parts.iter().map(|p| p.global_edges().collect()).collect();
    LabError::StructureUnsupported(json!({ "reason": what, "parts": edges }).to_string())
}

fn shared(a: &K4Component, b: &K4Component) -> Vec<Vertex> {
    a.vertices.iter().copied().filter(|v| b.vertices.binary_search(v).is_ok()).collect()
}

/// Colours parts whose vertex-sharing graph is a tree, drawing colours from
/// `palette` and marking certificate edges [`RED`].
pub fn colour_component_tree(
    parts: &[K4Component],
    palette: &mut Palette,
    cache: &mut StretchCache,
) -> Result<TreeColouring> {
    let k = parts.len();
    let mut meet: Vec<Vec<(usize, Vertex)>> = vec![Vec::new(); k];
    let mut meet_edges = 0;
    for i in 0..k {
        for j in i + 1..k {
            let s = shared(&parts[i], &parts[j]);
            if s.len() > 1 {
                return Err(unsupported("two parts share more than one vertex", parts));
            }
            if let Some(&v) = s.first() {
                meet[i].push((j, v));
                meet[j].push((i, v));
                meet_edges += 1;
            }
        }
    }
    let phis: Vec<i64> = parts.iter().map(|p| phi(&p.graph)).collect();
    let root = (0..k).max_by_key(|&i| (phis[i], std::cmp::Reverse(i))).unwrap_or(0);
    // Breadth-first from the root; each part remembers the vertex it shares
    // with its parent.
    let mut via: Vec<Option<Option<Vertex>>> = vec![None; k];
    via[root] = Some(None);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        for &(j, v) in &meet[i] {
            if via[j].is_none() {
                via[j] = Some(Some(v));
                queue.push_back(j);
            }
        }
    }
    if meet_edges + 1 != k || via.iter().any(|v| v.is_none()) {
        return Err(unsupported("parts do not meet in a tree", parts));
    }
    if (0..k).any(|i| i != root && phis[i] > 5) {
        return Err(unsupported("a non-root part has excess above 5", parts));
    }
    let mut psi = EdgeColouring::new();
    let mut red = Vec::new();
    let mut reports = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let t = colour_tiled_with(&part.graph, cache)?;
        let width = t.colouring.iter().map(|(_, c)| c + 1).max().unwrap_or(0);
        let offset = palette.block(width as usize);
        let g = |v: Vertex| part.vertices[v as usize];
        let mut local_red: Vec<Edge> = match (&t.certificate, via[i].unwrap()) {
            (CoverCertificate::NoRainbow, _) => vec![],
            (CoverCertificate::Triangle { vertices: tr }, parent) => {
                let e = [(tr[0], tr[1]), (tr[0], tr[2]), (tr[1], tr[2])]
                    .into_iter()
                    .find(|&(a, b)| parent.is_none_or(|u| g(a) != u && g(b) != u))
                    .expect("a triangle has an edge avoiding any one vertex");
                vec![e]
            }
            (CoverCertificate::Matching { edges }, None) => edges.clone(),
            (CoverCertificate::Matching { .. }, Some(_)) => {
                return Err(unsupported("a non-root part needs a matching certificate", parts));
            }
        };
        local_red.sort_unstable();
        for ((a, b), c) in t.colouring.iter() {
            let c = if local_red.contains(&(a, b)) { RED } else { offset + c };
            psi.set(g(a), g(b), c);
        }
        red.extend(local_red.iter().map(|&(a, b)| norm(g(a), g(b))));
        reports.push(ComponentReport {
            vertices: part.vertices.clone(),
            phi: phis[i],
            certificate: t.certificate,
            assembly: None,
        });
    }
    red.sort_unstable();
    Ok(TreeColouring { colouring: psi, red, root, reports })
}

#[derive(Clone, Debug, Serialize)]
pub struct K8Avoidance {
    /// Proper colouring of the sparse graph.
    pub colouring: EdgeColouring,
    pub red: Vec<Edge>,
    pub components: Vec<ComponentReport>,
    /// Component indices of each vertex-sharing group with `φ ≥ 3`.
    pub assemblies: Vec<Vec<usize>>,
    pub rainbow_k4s: Vec<Vec<Vertex>>,
}

impl K8Avoidance {
    /// Whether every rainbow `K4` has a red edge.
    pub fn red_covers(&self) -> bool {
        self.rainbow_k4s.iter().all(|q| {
            q.iter().enumerate().any(|(i, &a)| q[i + 1..].iter().any(|&b| self.colouring.get(a, b) == Some(RED)))
        })
    }
}

/// Colours `r` properly so that every rainbow `K4` contains a [`RED`] edge.
pub fn avoid_k8(r: &Graph) -> Result<K8Avoidance> {
    avoid_k8_with(r, &mut StretchCache::new())
}

pub fn avoid_k8_with(r: &Graph, cache: &mut StretchCache) -> Result<K8Avoidance> {
    let (comps, rest) = k4_components(r);
    for c in &comps {
        let p = phi(&c.graph);
        if p > PHI_MAX || c.vertices.len() > STRETCH_MAX_VERTICES {
            let edges: Vec<Edge> = c.global_edges().collect();
            return Err(LabError::OutOfRegime(
                json!({ "phi": p, "vertices": c.vertices.len(), "edges": edges }).to_string(),
            ));
        }
    }
    let mut palette = Palette::starting_at(RED + 1);
    let mut psi = EdgeColouring::new();
    let mut red = Vec::new();
    let mut reports: Vec<Option<ComponentReport>> = vec![None; comps.len()];
    let high: Vec<usize> = (0..comps.len()).filter(|&i| phi(&comps[i].graph) >= 3).collect();
    // Group high components by shared vertices.
    let mut group_of: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut groups: Vec<BTreeSet<usize>> = Vec::new();
    for &i in &high {
        let hits: BTreeSet<usize> = comps[i].vertices.iter().filter_map(|v| group_of.get(v).copied()).collect();
        let target = match hits.iter().next() {
            Some(&g) => g,
            None => {
                groups.push(BTreeSet::new());
                groups.len() - 1
            }
        };
        for &h in hits.iter().skip(1) {
            let moved = std::mem::take(&mut groups[h]);
            for &j in &moved {
                for &v in &comps[j].vertices {
                    group_of.insert(v, target);
                }
            }
            groups[target].extend(moved);
        }
        groups[target].insert(i);
        for &v in &comps[i].vertices {
            group_of.insert(v, target);
        }
    }
    let assemblies: Vec<Vec<usize>> =
        groups.into_iter().filter(|g| !g.is_empty()).map(|g| g.into_iter().collect()).collect();
    for (a, members) in assemblies.iter().enumerate() {
        let parts: Vec<K4Component> = members.iter().map(|&i| comps[i].clone()).collect();
        let tc = colour_component_tree(&parts, &mut palette, cache)?;
        psi.absorb(&tc.colouring)?;
        red.extend(tc.red);
        for (k, mut rep) in tc.reports.into_iter().enumerate() {
            rep.assembly = Some(a);
            reports[members[k]] = Some(rep);
        }
    }
    for (i, c) in comps.iter().enumerate() {
        if reports[i].is_some() {
            continue;
        }
        let t = colour_tiled_with(&c.graph, cache)?;
        let width = t.colouring.iter().map(|(_, c)| c + 1).max().unwrap_or(0);
        let offset = palette.block(width as usize);
        for ((a, b), col) in t.colouring.iter() {
            psi.set(c.vertices[a as usize], c.vertices[b as usize], offset + col);
        }
        reports[i] = Some(ComponentReport {
            vertices: c.vertices.clone(),
            phi: t.phi,
            certificate: t.certificate,
            assembly: None,
        });
    }
    for (u, v) in rest {
        psi.set(u, v, palette.fresh());
    }
    red.sort_unstable();
    let rainbow_k4s = rainbow_cliques(r, &psi, 4);
    let out = K8Avoidance {
        colouring: psi,
        red,
        components: reports.into_iter().map(|r| r.unwrap()).collect(),
        assemblies,
        rainbow_k4s,
    };
    if !is_proper(r, &out.colouring)? || !out.red_covers() {
        return Err(LabError::Counterexample(
            json!({ "reason": "assembled colouring is improper or a rainbow K4 misses red", "edges": r.edges() })
                .to_string(),
        ));
    }
    Ok(out)
}

/// A colouring of a perturbed instance with the rainbow `K8` scan result.
#[derive(Clone, Debug, Serialize)]
pub struct K8Colouring {
    pub colouring: EdgeColouring,
    pub sparse: K8Avoidance,
    pub rainbow_k8: usize,
}

/// Random edges inside the two seed parts; random edges across them are
/// already seed edges.
pub fn within_parts(inst: &PerturbedInstance) -> Graph {
    inst.random.filter_edges(|(u, v)| inst.side[u as usize] == inst.side[v as usize])
}

/// Colours the random edges inside the seed parts by [`avoid_k8`] and every
/// other edge with a fresh colour, then scans the union for rainbow `K8`s.
pub fn avoid_k8_perturbed(inst: &PerturbedInstance) -> Result<K8Colouring> {
    let sparse = avoid_k8(&within_parts(inst))?;
    let union = inst.union();
    let mut psi = sparse.colouring.clone();
    let mut palette = Palette::starting_at(psi.iter().map(|(_, c)| c + 1).max().unwrap_or(RED + 1));
    for &(u, v) in union.edges() {
        if psi.get(u, v).is_none() {
            psi.set(u, v, palette.fresh());
        }
    }
    let rainbow_k8 = rainbow_cliques(&union, &psi, 8).len();
    Ok(K8Colouring { colouring: psi, sparse, rainbow_k8 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete;

    fn k5_at(vs: [Vertex; 5]) -> Vec<Edge> {
        complete(5).edges().iter().map(|&(a, b)| norm(vs[a as usize], vs[b as usize])).collect()
    }

    #[test]
    fn single_k5() {
        let out = avoid_k8(&complete(5)).unwrap();
        assert!(out.red_covers());
        assert!(rainbow_cliques(&complete(5), &out.colouring, 5).is_empty());
    }

    #[test]
    fn path_of_three_k5s() {
        let mut e = k5_at([0, 1, 2, 3, 4]);
        e.extend(k5_at([4, 5, 6, 7, 8]));
        e.extend(k5_at([8, 9, 10, 11, 12]));
        let g = Graph::from_edges(13, e).unwrap();
        let out = avoid_k8(&g).unwrap();
        assert_eq!(out.assemblies, vec![vec![0, 1, 2]]);
        assert!(out.red_covers());
        assert!(is_proper(&g, &out.colouring).unwrap());
    }

    fn triangle_certified_part() -> Graph {
        use crate::tiled::certify::colour_tiled;
        use crate::tiled::corpus::{random_tiled, CorpusConfig};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cfg = CorpusConfig { max_vertices: 9, max_phi: 5, k5_base: 0.0 };
        loop {
            let (h, _) = random_tiled(&mut rng, &cfg);
            if let Ok(t) = colour_tiled(&h) {
                if matches!(t.certificate, CoverCertificate::Triangle { .. }) {
                    return h;
                }
            }
        }
    }

    #[test]
    fn two_triangle_parts_get_a_red_matching() {
        let h = triangle_certified_part();
        let k = h.n() as Vertex;
        let mut e: Vec<Edge> = h.edges().to_vec();
        // Second copy shifted so that its vertex 0 is the first copy's vertex 0.
        let shift = |v: Vertex| if v == 0 { 0 } else { v + k - 1 };
        e.extend(h.edges().iter().map(|&(a, b)| norm(shift(a), shift(b))));
        let g = Graph::from_edges(2 * h.n() - 1, e).unwrap();
        let out = avoid_k8(&g).unwrap();
        assert_eq!(out.red.len(), 2);
        let ends: BTreeSet<Vertex> = out.red.iter().flat_map(|&(a, b)| [a, b]).collect();
        assert_eq!(ends.len(), 4);
        assert!(out.red_covers());
        assert!(is_proper(&g, &out.colouring).unwrap());
    }

    #[test]
    fn cycle_of_parts_is_rejected() {
        let mut e = k5_at([0, 1, 2, 3, 4]);
        e.extend(k5_at([4, 5, 6, 7, 8]));
        e.extend(k5_at([8, 9, 10, 11, 0]));
        let g = Graph::from_edges(12, e).unwrap();
        assert!(matches!(avoid_k8(&g), Err(LabError::StructureUnsupported(_))));
    }
}
