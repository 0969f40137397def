//! Empirical checks of the structure of `K4`-components in sparse random
//! graphs: bounded excess, single shared vertices and tree-like gluing.

use serde::Serialize;

use crate::graph::{Graph, Vertex};
use crate::tiled::{k4_components, phi};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureViolation {
    /// A component with `φ > 7`.
    ExcessAboveSeven { component: usize, phi: i64 },
    /// Two parts with `φ ≥ 3` sharing two or more vertices. Parts are whole
    /// components, or two `K5`s inside one component.
    SharedVertices { parts: [Vec<Vertex>; 2], shared: Vec<Vertex> },
    /// Components with `φ ≥ 3` whose vertex-sharing graph has a cycle.
    Cycle { components: Vec<usize> },
    /// Two components with `φ ≥ 6` joined through components with `φ ≥ 3`.
    HeavyPath { components: Vec<usize> },
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSummary {
    pub vertices: Vec<Vertex>,
    pub edges: usize,
    pub phi: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub components: Vec<ComponentSummary>,
    pub leftover_edges: usize,
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Decomposes `g` into `K4`-components and lists every structural violation.
pub fn verify_structure(g: &Graph) -> StructureReport {
    let (comps, rest) = k4_components(g);
    let phis: Vec<i64> = comps.iter().map(|c| phi(&c.graph)).collect();
    let mut violations = Vec::new();
    for (i, &p) in phis.iter().enumerate() {
        if p > 7 {
            violations.push(StructureViolation::ExcessAboveSeven { component: i, phi: p });
        }
    }
    for c in &comps {
        let k5s: Vec<Vec<Vertex>> =
            c.graph.cliques(5).into_iter().map(|k| k.iter().map(|&i| c.vertices[i as usize]).collect()).collect();
        for (x, a) in k5s.iter().enumerate() {
            for b in &k5s[x + 1..] {
                let shared: Vec<Vertex> = a.iter().copied().filter(|v| b.contains(v)).collect();
                if shared.len() >= 2 {
                    violations.push(StructureViolation::SharedVertices { parts: [a.clone(), b.clone()], shared });
                }
            }
        }
    }
    let heavy: Vec<usize> = (0..comps.len()).filter(|&i| phis[i] >= 3).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for (x, &i) in heavy.iter().enumerate() {
        for &j in &heavy[x + 1..] {
            let shared: Vec<Vertex> =
                comps[i].vertices.iter().copied().filter(|v| comps[j].vertices.binary_search(v).is_ok()).collect();
            if shared.len() >= 2 {
                violations.push(StructureViolation::SharedVertices {
                    parts: [comps[i].vertices.clone(), comps[j].vertices.clone()],
                    shared,
                });
            } else if shared.len() == 1 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    // Connected groups of heavy components in the sharing graph.
    let mut seen = vec![false; comps.len()];
    for &s in &heavy {
        if seen[s] {
            continue;
        }
        let mut group = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < group.len() {
            for &j in &adj[group[k]] {
                if !seen[j] {
                    seen[j] = true;
                    group.push(j);
                }
            }
            k += 1;
        }
        group.sort_unstable();
        let links: usize = group.iter().map(|&i| adj[i].len()).sum::<usize>() / 2;
        if links >= group.len() {
            violations.push(StructureViolation::Cycle { components: group.clone() });
        }
        let ends: Vec<usize> = group.iter().copied().filter(|&i| phis[i] >= 6).collect();
        if ends.len() >= 2 {
            violations.push(StructureViolation::HeavyPath { components: ends });
        }
    }
    StructureReport {
        components: comps
            .iter()
            .zip(&phis)
            .map(|(c, &p)| ComponentSummary { vertices: c.vertices.clone(), edges: c.graph.m(), phi: p })
            .collect(),
        leftover_edges: rest.len(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, norm, Edge, NamedGraph};

    fn k5_at(vs: [Vertex; 5]) -> Vec<Edge> {
        complete(5).edges().iter().map(|&(a, b)| norm(vs[a as usize], vs[b as usize])).collect()
    }

    #[test]
    fn bipartite_is_vacuous() {
        let g = "kbip(4,5)".parse::<NamedGraph>().unwrap().build().unwrap();
        let r = verify_structure(&g);
        assert!(r.ok() && r.components.is_empty());
    }

    #[test]
    fn two_k5s_sharing_two_vertices() {
        let mut e = k5_at([0, 1, 2, 3, 4]);
        e.extend(k5_at([3, 4, 5, 6, 7]).into_iter().filter(|&x| x != (3, 4)));
        let g = Graph::from_edges(8, e).unwrap();
        let r = verify_structure(&g);
        assert!(r.violations.iter().any(|v| matches!(v, StructureViolation::SharedVertices { .. })));
    }

    #[test]
    fn triangle_of_k5s_is_a_cycle() {
        let mut e = k5_at([0, 1, 2, 3, 4]);
        e.extend(k5_at([4, 5, 6, 7, 8]));
        e.extend(k5_at([8, 9, 10, 11, 0]));
        let r = verify_structure(&Graph::from_edges(12, e).unwrap());
        assert_eq!(r.violations, vec![StructureViolation::Cycle { components: vec![0, 1, 2] }]);
    }

    #[test]
    fn sampled_part_graphs_in_regime() {
        use crate::emergence::{sample_perturbed, trial_rng, SampleMode, SeedSpec};
        use crate::tiled::within_parts;
        let n = 150;
        let p = (n as f64).powf(-0.45);
        for t in 0..1000 {
            let inst = sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut trial_rng(3, t))
                .unwrap();
            let r = verify_structure(&within_parts(&inst));
            assert!(r.ok(), "trial {t}: {:?}", r.violations);
        }
    }
}
