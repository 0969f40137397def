//! Proper colourings of `K_{A,B} ∪ R` without rainbow `K6`, for random `R`
//! with no `K4` inside either part.
//!
//! Each component of the triangle union of `R` receives matchings
//! `M0..M3` such that `M0` avoids the vertices of `M1 ∪ M2 ∪ M3` and every
//! triangle holds an `M0` edge or edges from two of `M1, M2, M3`. Then
//! `M0 ∪ M1` is red, `M2` blue, `M3` green; for `xy ∈ M0` and `zw ∈ M2` on
//! opposite sides the 4-cycle between them gets two private colours; every
//! other edge is coloured uniquely.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::colouring::{Colour, EdgeColouring, Palette};
use crate::emergence::sampling::PerturbedInstance;
use crate::error::{domain, LabError, Result};
use crate::graph::{norm, Edge, Graph, Vertex};

/// Default node budget for the matching search.
pub const MATCHING_BUDGET: u64 = 10_000_000;

/// Components above this size skip the growth-sequence construction.
pub const CONSTRUCTIVE_MAX_VERTICES: usize = 30;

/// Spanning subgraph of the edges lying in at least one triangle.
pub fn triangle_union(g: &Graph) -> Graph {
    let mut keep: HashSet<Edge> = HashSet::new();
    for [a, b, c] in g.triangles() {
        keep.extend([norm(a, b), norm(a, c), norm(b, c)]);
    }
    g.filter_edges(|e| keep.contains(&e))
}

/// Shapes of a growth step adding triangle `xyz` through a new edge `xy`
/// with `x` already present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepType {
    /// `y` and `z` are new.
    A,
    /// Only `y` is new and `xz` is present.
    B,
    /// Only `y` is new and `xz` is missing.
    C,
    /// All vertices present, only `xy` missing.
    D,
    /// All vertices present, two edges missing.
    E,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthStep {
    pub kind: StepType,
    /// `[x, y, z]`. For type A, `y` and `z` are the new vertices.
    pub triangle: [Vertex; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSequence {
    pub start: [Vertex; 3],
    pub steps: Vec<GrowthStep>,
}

impl GrowthSequence {
    pub fn count(&self, kind: StepType) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }
}

/// Replays the component from `start` by repeatedly adding the least missing
/// edge at a present vertex, completed to a triangle by its least apex.
pub fn growth_sequence(f: &Graph, start: [Vertex; 3]) -> Result<GrowthSequence> {
    let mut in_v: BTreeSet<Vertex> = start.iter().copied().collect();
    let mut in_e: HashSet<Edge> =
        [norm(start[0], start[1]), norm(start[0], start[2]), norm(start[1], start[2])].into_iter().collect();
    let mut steps = Vec::new();
    loop {
        let next = f
            .edges()
            .iter()
            .copied()
            .find(|&(u, v)| !in_e.contains(&(u, v)) && (in_v.contains(&u) || in_v.contains(&v)));
        let Some((u, v)) = next else { break };
        let (x, y) = if in_v.contains(&u) { (u, v) } else { (v, u) };
        let z = f
            .common_neighbourhood(&[x, y])
            .into_iter()
            .next()
            .ok_or_else(|| LabError::Domain(format!("edge ({u},{v}) lies in no triangle")))?;
        let tri = [x, y, z];
        let new: Vec<Vertex> = tri.iter().copied().filter(|w| !in_v.contains(w)).collect();
        let present = |a: Vertex, b: Vertex| in_e.contains(&norm(a, b));
        let step = match new.len() {
            2 => GrowthStep { kind: StepType::A, triangle: [x, new[0], new[1]] },
            1 => {
                let ny = new[0];
                let old: Vec<Vertex> = tri.iter().copied().filter(|&w| w != ny).collect();
                let kind = if present(old[0], old[1]) { StepType::B } else { StepType::C };
                GrowthStep { kind, triangle: [old[0], ny, old[1]] }
            }
            _ => {
                let missing = [norm(x, y), norm(x, z), norm(y, z)].iter().filter(|e| !in_e.contains(e)).count();
                GrowthStep { kind: if missing == 1 { StepType::D } else { StepType::E }, triangle: tri }
            }
        };
        in_v.extend(tri);
        in_e.extend([norm(x, y), norm(x, z), norm(y, z)]);
        steps.push(step);
    }
    Ok(GrowthSequence { start, steps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingMethod {
    /// Every step adds two new vertices.
    PendantTree,
    /// One pair of triangles shares an edge; everything else is pendant.
    SingleDiamond,
    Search,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MatchingFamily {
    pub m0: Vec<Edge>,
    pub m1: Vec<Edge>,
    pub m2: Vec<Edge>,
    pub m3: Vec<Edge>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingCertificate {
    pub vertices: Vec<Vertex>,
    pub family: MatchingFamily,
    pub method: MatchingMethod,
    pub sequence: Option<GrowthSequence>,
}

fn is_matching(es: &[Edge]) -> bool {
    let mut seen = HashSet::new();
    es.iter().all(|&(u, v)| seen.insert(u) && seen.insert(v))
}

/// Checks both matching conditions for the triangles of `f` inside `vertices`.
pub fn check_family(f: &Graph, vertices: &[Vertex], fam: &MatchingFamily) -> bool {
    let all = [&fam.m0, &fam.m1, &fam.m2, &fam.m3];
    if !all.iter().all(|m| is_matching(m) && m.iter().all(|&(u, v)| f.has_edge(u, v))) {
        return false;
    }
    let mut edges = HashSet::new();
    if !all.iter().flat_map(|m| m.iter()).all(|e| edges.insert(*e)) {
        return false;
    }
    let m0_vertices: HashSet<Vertex> = fam.m0.iter().flat_map(|&(u, v)| [u, v]).collect();
    if fam.m1.iter().chain(&fam.m2).chain(&fam.m3).any(|&(u, v)| m0_vertices.contains(&u) || m0_vertices.contains(&v)) {
        return false;
    }
    let class_of = |e: Edge| -> Option<usize> { all.iter().position(|m| m.contains(&e)) };
    let local = f.induced(vertices);
    local.triangles().into_iter().all(|[a, b, c]| {
        let tri = [
            norm(vertices[a as usize], vertices[b as usize]),
            norm(vertices[a as usize], vertices[c as usize]),
            norm(vertices[b as usize], vertices[c as usize]),
        ];
        let classes: HashSet<usize> = tri.iter().filter_map(|&e| class_of(e)).collect();
        classes.contains(&0) || classes.len() >= 2
    })
}

/// Matchings for one component (`vertices`) of a triangle union `f`.
pub fn find_matchings(f: &Graph, vertices: &[Vertex], budget: u64) -> Result<MatchingCertificate> {
    let mut vs = vertices.to_vec();
    vs.sort_unstable();
    let local = f.induced(&vs);
    if !local.is_connected() || local.m() == 0 {
        return domain("component must be connected with at least one edge");
    }
    let tris = local.triangles();
    let mut covered = HashSet::new();
    for &[a, b, c] in &tris {
        covered.extend([norm(a, b), norm(a, c), norm(b, c)]);
    }
    if covered.len() != local.m() {
        return domain("component has an edge in no triangle");
    }
    let lift = |es: &[Edge]| -> Vec<Edge> {
        let mut out: Vec<Edge> = es.iter().map(|&(u, v)| norm(vs[u as usize], vs[v as usize])).collect();
        out.sort_unstable();
        out
    };
    let lift_family = |fam: &MatchingFamily| MatchingFamily {
        m0: lift(&fam.m0),
        m1: lift(&fam.m1),
        m2: lift(&fam.m2),
        m3: lift(&fam.m3),
    };
    let lift_seq = |s: GrowthSequence| GrowthSequence {
        start: s.start.map(|v| vs[v as usize]),
        steps: s
            .steps
            .into_iter()
            .map(|st| GrowthStep { kind: st.kind, triangle: st.triangle.map(|v| vs[v as usize]) })
            .collect(),
    };
    let all_local: Vec<Vertex> = (0..vs.len() as Vertex).collect();

    if vs.len() <= CONSTRUCTIVE_MAX_VERTICES {
        let seq = growth_sequence(&local, tris[0])?;
        if let Some((fam, method)) = constructive(&local, &tris, &seq)? {
            if check_family(&local, &all_local, &fam) {
                return Ok(MatchingCertificate {
                    vertices: vs.clone(),
                    family: lift_family(&fam),
                    method,
                    sequence: Some(lift_seq(seq)),
                });
            }
        }
        let fam = search(&local, &tris, budget)?;
        return Ok(MatchingCertificate {
            vertices: vs.clone(),
            family: lift_family(&fam),
            method: MatchingMethod::Search,
            sequence: Some(lift_seq(seq)),
        });
    }
    let fam = search(&local, &tris, budget)?;
    Ok(MatchingCertificate {
        vertices: vs.clone(),
        family: lift_family(&fam),
        method: MatchingMethod::Search,
        sequence: None,
    })
}

fn constructive(
    f: &Graph,
    tris: &[[Vertex; 3]],
    seq: &GrowthSequence,
) -> Result<Option<(MatchingFamily, MatchingMethod)>> {
    let others = seq.count(StepType::C) + seq.count(StepType::D) + seq.count(StepType::E);
    if others > 0 {
        return Ok(None);
    }
    let pendant_edges = |s: &GrowthSequence| -> Vec<Edge> {
        s.steps.iter().filter(|st| st.kind == StepType::A).map(|st| norm(st.triangle[1], st.triangle[2])).collect()
    };
    match seq.count(StepType::B) {
        0 => {
            let mut m0 = vec![norm(seq.start[0], seq.start[1])];
            m0.extend(pendant_edges(seq));
            Ok(Some((MatchingFamily { m0, ..Default::default() }, MatchingMethod::PendantTree)))
        }
        1 => {
            // Restart at a triangle on the shared edge so the diamond comes first.
            let shared = f
                .edges()
                .iter()
                .copied()
                .find(|&(u, v)| tris.iter().filter(|t| t.contains(&u) && t.contains(&v)).count() >= 2);
            let Some(shared) = shared else { return Ok(None) };
            let start = *tris.iter().find(|t| t.contains(&shared.0) && t.contains(&shared.1)).unwrap();
            let reseq = growth_sequence(f, start)?;
            let mut m0 = vec![shared];
            m0.extend(pendant_edges(&reseq));
            Ok(Some((MatchingFamily { m0, ..Default::default() }, MatchingMethod::SingleDiamond)))
        }
        _ => Ok(None),
    }
}

/// Bounded exhaustive search: a matching hitting every triangle if one
/// exists, otherwise a full family. Pendant triangles are peeled first.
fn search(f: &Graph, tris: &[[Vertex; 3]], budget: u64) -> Result<MatchingFamily> {
    let n = f.n();
    let mut alive = vec![true; n];
    let mut peeled: Vec<Edge> = Vec::new();
    let mut live_tris: Vec<[Vertex; 3]> = tris.to_vec();
    loop {
        let deg = |v: Vertex, alive: &[bool]| f.neighbours(v).filter(|&w| alive[w as usize]).count();
        let pendant = live_tris.iter().copied().find_map(|t| {
            for i in 0..3 {
                let (y, z) = (t[(i + 1) % 3], t[(i + 2) % 3]);
                if deg(y, &alive) == 2 && deg(z, &alive) == 2 {
                    return Some((y, z));
                }
            }
            None
        });
        let Some((y, z)) = pendant else { break };
        peeled.push(norm(y, z));
        alive[y as usize] = false;
        alive[z as usize] = false;
        live_tris.retain(|t| !t.contains(&y) && !t.contains(&z));
    }
    let core_edges: Vec<Edge> =
        f.edges().iter().copied().filter(|&(u, v)| alive[u as usize] && alive[v as usize]).collect();
    let mut solver = FamilySolver::new(n, &core_edges, &live_tris, budget);
    let labels = if let Some(l) = solver.solve(1)? {
        l
    } else if let Some(l) = solver.solve(4)? {
        l
    } else {
        return Err(LabError::StructureUnsupported("no matching family exists for this triangle component".into()));
    };
    let mut fam = MatchingFamily { m0: peeled, ..Default::default() };
    for (i, &e) in core_edges.iter().enumerate() {
        match labels[i] {
            1 => fam.m0.push(e),
            2 => fam.m1.push(e),
            3 => fam.m2.push(e),
            4 => fam.m3.push(e),
            _ => {}
        }
    }
    for m in [&mut fam.m0, &mut fam.m1, &mut fam.m2, &mut fam.m3] {
        m.sort_unstable();
    }
    Ok(fam)
}

/// Labels: 0 unused, 1 = M0, 2..=4 = M1..M3.
struct FamilySolver {
    edges: Vec<Edge>,
    tris: Vec<[usize; 3]>,
    label: Vec<u8>,
    /// Per vertex: label of the incident edge in each class, as a bitmask.
    at: Vec<u8>,
    nodes: u64,
    budget: u64,
}

impl FamilySolver {
    fn new(n: usize, edges: &[Edge], tris: &[[Vertex; 3]], budget: u64) -> Self {
        let idx = |a: Vertex, b: Vertex| edges.binary_search(&norm(a, b)).unwrap();
        let tris = tris.iter().map(|&[a, b, c]| [idx(a, b), idx(a, c), idx(b, c)]).collect();
        FamilySolver { edges: edges.to_vec(), tris, label: vec![0; edges.len()], at: vec![0; n], nodes: 0, budget }
    }

    fn solve(&mut self, max_label: u8) -> Result<Option<Vec<u8>>> {
        self.label.iter_mut().for_each(|l| *l = 0);
        self.at.iter_mut().for_each(|a| *a = 0);
        match self.rec(max_label, 1) {
            Some(true) => Ok(Some(self.label.clone())),
            Some(false) => Ok(None),
            None => Err(LabError::SearchExhausted { budget: self.budget }),
        }
    }

    fn satisfied(&self, t: &[usize; 3]) -> bool {
        let mut seen = 0u8;
        for &e in t {
            let l = self.label[e];
            if l == 1 {
                return true;
            }
            if l > 1 {
                seen |= 1 << l;
            }
        }
        seen.count_ones() >= 2
    }

    fn can_place(&self, e: usize, l: u8) -> bool {
        let (u, v) = self.edges[e];
        let (au, av) = (self.at[u as usize], self.at[v as usize]);
        if au & (1 << l) != 0 || av & (1 << l) != 0 {
            return false;
        }
        // M0 shares no vertex with the other classes.
        if l == 1 {
            au == 0 && av == 0
        } else {
            au & 0b10 == 0 && av & 0b10 == 0
        }
    }

    /// `fresh` is the least unused label among M1..M3 (symmetry breaking).
    fn rec(&mut self, max_label: u8, fresh: u8) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let top = max_label.min(fresh.max(2));
        // Most constrained unsatisfied triangle; a triangle with no option
        // left is a dead end.
        let mut pick: Option<([usize; 3], usize)> = None;
        for t in &self.tris {
            if self.satisfied(t) {
                continue;
            }
            let options = t
                .iter()
                .filter(|&&e| self.label[e] == 0)
                .map(|&e| (1..=top).filter(|&l| self.can_place(e, l)).count())
                .sum::<usize>();
            if options == 0 {
                return Some(false);
            }
            if pick.is_none_or(|(_, o)| options < o) {
                pick = Some((*t, options));
            }
        }
        let Some((t, _)) = pick else {
            return Some(true);
        };
        for &e in &t {
            if self.label[e] != 0 {
                continue;
            }
            for l in 1..=top {
                if !self.can_place(e, l) {
                    continue;
                }
                let (u, v) = self.edges[e];
                self.label[e] = l;
                self.at[u as usize] |= 1 << l;
                self.at[v as usize] |= 1 << l;
                let next_fresh = if l >= fresh.max(2) { l + 1 } else { fresh.max(2) };
                let r = self.rec(max_label, next_fresh);
                self.label[e] = 0;
                self.at[u as usize] &= !(1 << l);
                self.at[v as usize] &= !(1 << l);
                match r {
                    Some(false) => {}
                    Some(true) => {
                        // Re-apply to keep the solution.
                        self.label[e] = l;
                        self.at[u as usize] |= 1 << l;
                        self.at[v as usize] |= 1 << l;
                        return Some(true);
                    }
                    None => return None,
                }
            }
        }
        Some(false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct K6Avoidance {
    pub colouring: EdgeColouring,
    pub red: Colour,
    pub blue: Colour,
    pub green: Colour,
    pub certificates: Vec<MatchingCertificate>,
}

/// Colours `seed ∪ random` for an instance with a complete bipartite seed.
pub fn avoid_k6(inst: &PerturbedInstance) -> Result<K6Avoidance> {
    let (a, b) = inst.parts();
    let r = &inst.random;
    for part in [&a, &b] {
        if let Some(k) = r.induced(part).cliques(4).first() {
            let k: Vec<Vertex> = k.iter().map(|&i| part[i as usize]).collect();
            return Err(LabError::StructureUnsupported(format!("random graph has a K4 inside one part: {k:?}")));
        }
    }
    let tu = triangle_union(r);
    let mut certs = Vec::new();
    for comp in tu.component_vertex_sets() {
        if comp.len() < 3 {
            continue;
        }
        certs.push(find_matchings(&tu, &comp, MATCHING_BUDGET)?);
    }
    let mut palette = Palette::default();
    let (red, blue, green) = (palette.fresh(), palette.fresh(), palette.fresh());
    let mut psi = EdgeColouring::new();
    let mut m0_all = Vec::new();
    let mut m2_all = Vec::new();
    for c in &certs {
        let fam = &c.family;
        for &(u, v) in fam.m0.iter().chain(&fam.m1) {
            psi.set(u, v, red);
        }
        for &(u, v) in &fam.m2 {
            psi.set(u, v, blue);
        }
        for &(u, v) in &fam.m3 {
            psi.set(u, v, green);
        }
        m0_all.extend(fam.m0.iter().copied());
        m2_all.extend(fam.m2.iter().copied());
    }
    let side = |e: Edge| -> Option<bool> {
        let (s, t) = (inst.side[e.0 as usize], inst.side[e.1 as usize]);
        (s == t).then_some(s)
    };
    let seed_union = inst.union();
    for &(x, y) in &m0_all {
        let Some(sx) = side((x, y)) else { continue };
        for &(z, w) in &m2_all {
            if side((z, w)) != Some(!sx) {
                continue;
            }
            let (c1, c2) = (palette.fresh(), palette.fresh());
            for (p, q, c) in [(x, z, c1), (y, w, c1), (x, w, c2), (y, z, c2)] {
                debug_assert!(seed_union.has_edge(p, q));
                if psi.set(p, q, c).is_some() {
                    return domain(format!("edge ({p},{q}) coloured twice"));
                }
            }
        }
    }
    for &(u, v) in seed_union.edges() {
        if psi.get(u, v).is_none() {
            psi.set(u, v, palette.fresh());
        }
    }
    Ok(K6Avoidance { colouring: psi, red, blue, green, certificates: certs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{is_proper, rainbow_cliques};
    use crate::emergence::sampling::{sample_perturbed, trial_rng, SampleMode, SeedSpec};

    fn g(n: usize, e: &[(Vertex, Vertex)]) -> Graph {
        Graph::from_edges(n, e.iter().copied()).unwrap()
    }

    fn all(n: usize) -> Vec<Vertex> {
        (0..n as Vertex).collect()
    }

    #[test]
    fn single_triangle_uses_one_edge() {
        let t = g(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = find_matchings(&t, &all(3), 1000).unwrap();
        assert_eq!(c.family.m0.len(), 1);
        assert!(c.family.m1.is_empty() && c.family.m2.is_empty() && c.family.m3.is_empty());
    }

    #[test]
    fn diamond_uses_shared_edge() {
        let d = g(4, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]);
        let c = find_matchings(&d, &all(4), 1000).unwrap();
        assert_eq!(c.family.m0, vec![(0, 1)]);
        assert_eq!(c.method, MatchingMethod::SingleDiamond);
    }

    #[test]
    fn two_diamonds_at_a_vertex_need_three_matchings() {
        // Triangles 123, 126, 145, 147 (shifted to 0-based), plus a pendant
        // triangle on 7.
        let e =
            [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (0, 5), (1, 5), (0, 6), (3, 6), (6, 7), (6, 8), (7, 8)];
        let f = g(9, &e);
        let c = find_matchings(&f, &all(9), MATCHING_BUDGET).unwrap();
        assert_eq!(c.method, MatchingMethod::Search);
        let fam = &c.family;
        assert!(!fam.m1.is_empty() && !fam.m2.is_empty());
        assert!(fam.m0.contains(&(7, 8)));
        assert!(check_family(&f, &all(9), fam));
        let seq = c.sequence.unwrap();
        assert_eq!(seq.count(StepType::B), 2);
    }

    #[test]
    fn growth_counts_match_sizes() {
        let e = [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (3, 4), (0, 5), (2, 5)];
        let f = g(6, &e);
        let s = growth_sequence(&f, [0, 1, 2]).unwrap();
        let (a, b) = (s.count(StepType::A), s.count(StepType::B));
        assert_eq!(3 + 2 * a + b, 6);
        assert_eq!(3 + 3 * a + 2 * b, 8);
    }

    #[test]
    fn random_instances_avoid_rainbow_k6() {
        let mut done = 0;
        let p = 100f64.powf(-0.7);
        for t in 0..30 {
            let mut rng = trial_rng(11, t);
            let inst = sample_perturbed(&SeedSpec::BalancedBipartite, 100, p, SampleMode::AllPairs, &mut rng).unwrap();
            let Ok(out) = avoid_k6(&inst) else { continue };
            let gg = inst.union();
            assert!(out.colouring.is_total_on(&gg));
            assert!(is_proper(&gg, &out.colouring).unwrap());
            assert!(rainbow_cliques(&gg, &out.colouring, 6).is_empty());
            let tu = triangle_union(&inst.random);
            for c in &out.certificates {
                assert!(check_family(&tu, &c.vertices, &c.family));
            }
            done += 1;
        }
        assert!(done >= 24, "{done}");
    }
}
