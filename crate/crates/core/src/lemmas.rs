//! Extractors for the rainbow-clique lemmas behind the 1-statements, with
//! adversarial samplers and a falsification harness.
//!
//! Each extractor takes a proper colouring of a fixed host graph, follows the
//! argument step by step and returns the promised structure after checking
//! it. A failed step is reported as [`LabError::Counterexample`]; a colouring
//! that breaks the precondition is a [`LabError::Domain`] error.
//!
//! Host labellings:
//!
//! * `rainbow-k4`: `join(star(3), star(4))`, left centre `0`, right centre `4`.
//! * `rainbow-k5`: `join(K3, star(4))`, triangle `0,1,2`, centre `3`, leaves `4..8`.
//! * `disjoint-triangles`: `union(r7, t(10))`, `T10` centre `7`.
//! * `rainbow-k6`: `join(union(31 × r7), t(10))`, `T10` centre `217`.
//! * `surviving-triangle`: `kdelta(25, 49)`.
//! * `rainbow-k7`: `join(union(4 × hatk(3,4)), kdelta(25, 49))`, `F` centre `28`.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colouring::{Colour, EdgeColouring};
use crate::emergence::trial_rng;
use crate::error::{domain, LabError, Result};
use crate::graph::{norm, Edge, Graph, NamedGraph, Vertex};

pub type Triangle = [Vertex; 3];

const R7_COPIES: usize = 31;
const HATK_COPIES: usize = 4;
const SKELETON: Vertex = 25;
const APEXES: Vertex = 49;
const MAX_MATCHINGS: usize = 24;
/// Largest colour for which duplicate checks use a dense table.
const STAMP_LIMIT: Colour = 1 << 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    RainbowK4,
    RainbowK5,
    DisjointTriangles,
    RainbowK6,
    SurvivingTriangle,
    RainbowK7,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::RainbowK4,
        Lemma::RainbowK5,
        Lemma::DisjointTriangles,
        Lemma::RainbowK6,
        Lemma::SurvivingTriangle,
        Lemma::RainbowK7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::RainbowK4 => "rainbow-k4",
            Lemma::RainbowK5 => "rainbow-k5",
            Lemma::DisjointTriangles => "disjoint-triangles",
            Lemma::RainbowK6 => "rainbow-k6",
            Lemma::SurvivingTriangle => "surviving-triangle",
            Lemma::RainbowK7 => "rainbow-k7",
        }
    }

    /// The graph whose colourings the extractor consumes.
    pub fn host(self) -> &'static Graph {
        match self {
            Lemma::RainbowK4 => k4_host(),
            Lemma::RainbowK5 => k5_host(),
            Lemma::DisjointTriangles => triangles_host(),
            Lemma::RainbowK6 => k6_host(),
            Lemma::SurvivingTriangle => f_host(),
            Lemma::RainbowK7 => k7_host(),
        }
    }
}

impl std::fmt::Display for Lemma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rainbow-k4" | "k4" => Lemma::RainbowK4,
            "rainbow-k5" | "k5" => Lemma::RainbowK5,
            "disjoint-triangles" | "triangles" => Lemma::DisjointTriangles,
            "rainbow-k6" | "k6" => Lemma::RainbowK6,
            "surviving-triangle" | "matchings" => Lemma::SurvivingTriangle,
            "rainbow-k7" | "k7" => Lemma::RainbowK7,
            _ => {
                let names: Vec<&str> = Lemma::ALL.iter().map(|l| l.name()).collect();
                return Err(LabError::Parse(format!("unknown lemma {s:?}, expected one of {}", names.join(", "))));
            }
        })
    }
}

struct Host {
    graph: Graph,
    /// Edge indices at each vertex.
    incidence: Vec<Vec<u32>>,
}

fn build(cell: &'static OnceLock<Host>, name: impl FnOnce() -> String) -> &'static Graph {
    &cell
        .get_or_init(|| {
            let graph = name().parse::<NamedGraph>().and_then(|g| g.build()).expect("host name is valid");
            let mut incidence = vec![Vec::new(); graph.n()];
            for (i, &(u, v)) in graph.edges().iter().enumerate() {
                incidence[u as usize].push(i as u32);
                incidence[v as usize].push(i as u32);
            }
            Host { graph, incidence }
        })
        .graph
}

fn incidence(g: &Graph) -> Option<&'static [Vec<u32>]> {
    HOSTS.iter().find_map(|cell| cell.get().filter(|h| std::ptr::eq(&h.graph, g)).map(|h| &h.incidence[..]))
}

static HOSTS: [OnceLock<Host>; 6] = [const { OnceLock::new() }; 6];

pub fn k4_host() -> &'static Graph {
    build(&HOSTS[0], || "join(star(3),star(4))".into())
}

pub fn k5_host() -> &'static Graph {
    build(&HOSTS[1], || "join(K3,star(4))".into())
}

pub fn triangles_host() -> &'static Graph {
    build(&HOSTS[2], || "union(r7,t(10))".into())
}

pub fn k6_host() -> &'static Graph {
    build(&HOSTS[3], || format!("join(union({}),t(10))", vec!["r7"; R7_COPIES].join(",")))
}

pub fn f_host() -> &'static Graph {
    build(&HOSTS[4], || format!("kdelta({SKELETON},{APEXES})"))
}

pub fn k7_host() -> &'static Graph {
    build(&HOSTS[5], || {
        format!("join(union({}),kdelta({SKELETON},{APEXES}))", vec!["hatk(3,4)"; HATK_COPIES].join(","))
    })
}

/// Read access to edge colours.
pub trait ColourLookup {
    fn colour(&self, u: Vertex, v: Vertex) -> Option<Colour>;

    /// All colours of `g` by edge index, when stored that way.
    fn by_edge_index(&self, _g: &Graph) -> Option<&[Colour]> {
        None
    }
}

impl ColourLookup for EdgeColouring {
    fn colour(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.get(u, v)
    }
}

/// A colouring of every edge of a host, stored by edge index.
#[derive(Clone, Debug)]
pub struct DenseColouring {
    host: &'static Graph,
    colours: Vec<Colour>,
}

impl DenseColouring {
    pub fn host(&self) -> &'static Graph {
        self.host
    }

    pub fn to_edge_colouring(&self) -> EdgeColouring {
        let mut psi = EdgeColouring::new();
        for (&(u, v), &c) in self.host.edges().iter().zip(&self.colours) {
            psi.set(u, v, c);
        }
        psi
    }
}

impl ColourLookup for DenseColouring {
    fn colour(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.host.edge_index(u, v).map(|i| self.colours[i])
    }

    fn by_edge_index(&self, g: &Graph) -> Option<&[Colour]> {
        std::ptr::eq(self.host, g).then_some(&self.colours[..])
    }
}

/// A colouring that has passed the properness check, indexed like the host.
struct Checked<'g> {
    g: &'g Graph,
    cols: Vec<Colour>,
    lemma: Lemma,
}

impl<'g> Checked<'g> {
    fn new<C: ColourLookup>(lemma: Lemma, g: &'g Graph, psi: &C) -> Result<Self> {
        let cols: Vec<Colour> = match psi.by_edge_index(g) {
            Some(cs) => cs.to_vec(),
            None => g
                .edges()
                .iter()
                .map(|&(u, v)| {
                    psi.colour(u, v).ok_or_else(|| LabError::Domain(format!("edge ({u},{v}) is uncoloured")))
                })
                .collect::<Result<_>>()?,
        };
        let improper = |v: usize, c: Colour| domain(format!("colouring is not proper: colour {c} twice at vertex {v}"));
        let max = cols.iter().copied().max().unwrap_or(0);
        match (incidence(g), max < STAMP_LIMIT) {
            (Some(inc), true) => {
                let mut mark = vec![u32::MAX; max as usize + 1];
                for (v, es) in inc.iter().enumerate() {
                    for &e in es {
                        let c = cols[e as usize];
                        if mark[c as usize] == v as u32 {
                            return improper(v, c);
                        }
                        mark[c as usize] = v as u32;
                    }
                }
            }
            _ => {
                let mut at: Vec<Vec<Colour>> = vec![Vec::new(); g.n()];
                for (&(u, v), &c) in g.edges().iter().zip(&cols) {
                    at[u as usize].push(c);
                    at[v as usize].push(c);
                }
                for (v, cs) in at.iter_mut().enumerate() {
                    cs.sort_unstable();
                    if let Some(w) = cs.windows(2).find(|w| w[0] == w[1]) {
                        return improper(v, w[0]);
                    }
                }
            }
        }
        Ok(Checked { g, cols, lemma })
    }

    fn c(&self, u: Vertex, v: Vertex) -> Colour {
        self.cols[self.g.edge_index(u, v).expect("host edge")]
    }

    fn is_rainbow_clique(&self, vs: &[Vertex]) -> bool {
        let mut cs = Vec::with_capacity(vs.len() * vs.len() / 2);
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                match self.g.edge_index(a, b) {
                    Some(e) => cs.push(self.cols[e]),
                    None => return false,
                }
            }
        }
        cs.sort_unstable();
        cs.windows(2).all(|w| w[0] != w[1])
    }

    fn fail(&self, msg: impl Into<String>) -> LabError {
        LabError::Counterexample(serde_json::json!({ "lemma": self.lemma.name(), "message": msg.into() }).to_string())
    }

    /// Accepts `vs` as the result only when it is a rainbow clique of order `r`.
    fn certify(&self, mut vs: Vec<Vertex>, r: usize) -> Result<Vec<Vertex>> {
        vs.sort_unstable();
        vs.dedup();
        if vs.len() == r && self.is_rainbow_clique(&vs) {
            Ok(vs)
        } else {
            Err(self.fail(format!("extracted {vs:?} is not a rainbow K{r}")))
        }
    }

    /// Edges between `0..split` and `split..` carry distinct colours, none of
    /// them used inside `0..split`.
    fn cross_contract(&self, split: Vertex) -> Result<()> {
        const LEFT: u8 = 1;
        const CROSS: u8 = 2;
        let max = self.cols.iter().copied().max().unwrap_or(0);
        let mut seen: std::collections::HashMap<Colour, u8> = std::collections::HashMap::new();
        let mut dense = (max < STAMP_LIMIT).then(|| vec![0u8; max as usize + 1]);
        let mut mark = |c: Colour, side: u8| -> u8 {
            match dense.as_mut() {
                Some(d) => {
                    let old = d[c as usize];
                    d[c as usize] = old.max(side);
                    old
                }
                None => {
                    let slot = seen.entry(c).or_insert(0);
                    std::mem::replace(slot, (*slot).max(side))
                }
            }
        };
        for (&(_, v), &c) in self.g.edges().iter().zip(&self.cols) {
            if v < split {
                mark(c, LEFT);
            }
        }
        for (&(u, v), &c) in self.g.edges().iter().zip(&self.cols) {
            if u < split && v >= split {
                match mark(c, CROSS) {
                    LEFT => return domain(format!("cross colour {c} is also used on the left side")),
                    CROSS => return domain(format!("cross edges are not rainbow: colour {c} repeats")),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

fn tri(a: Vertex, b: Vertex, c: Vertex) -> Triangle {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

// ---------------------------------------------------------------------------
// Extractors
// ---------------------------------------------------------------------------

/// A rainbow `K4` in `K_{K_{1,3}, K_{1,4}}`: a right edge whose colour is
/// absent on the left, joined to a left edge.
pub fn extract_rainbow_k4<C: ColourLookup>(psi: &C) -> Result<Vec<Vertex>> {
    let ck = Checked::new(Lemma::RainbowK4, k4_host(), psi)?;
    let left: Vec<Colour> = (1..4).map(|l| ck.c(0, l)).collect();
    let (a, b) = (5..9)
        .map(|z| (4, z))
        .find(|&(a, b)| !left.contains(&ck.c(a, b)))
        .ok_or_else(|| ck.fail("every right edge repeats a left colour"))?;
    for leaf in 1..4 {
        if ck.is_rainbow_clique(&[0, leaf, a, b]) {
            return ck.certify(vec![0, leaf, a, b], 4);
        }
    }
    Err(ck.fail(format!("no left edge completes a rainbow K4 with ({a},{b})")))
}

/// A rainbow `K5` in `K3 + K_{1,4}` whose `K̂_{3,5}` part is rainbow.
pub fn extract_rainbow_k5<C: ColourLookup>(psi: &C) -> Result<Vec<Vertex>> {
    let ck = Checked::new(Lemma::RainbowK5, k5_host(), psi)?;
    let mut seen: BTreeMap<Colour, Edge> = BTreeMap::new();
    for (&(u, v), &c) in ck.g.edges().iter().zip(&ck.cols) {
        if u == 3 && v >= 4 {
            continue;
        }
        if let Some(e) = seen.insert(c, (u, v)) {
            return domain(format!("hat subgraph is not rainbow: colour {c} on {e:?} and ({u},{v})"));
        }
    }
    let triangle = [ck.c(0, 1), ck.c(0, 2), ck.c(1, 2)];
    let z = (4..8)
        .find(|&z| !triangle.contains(&ck.c(3, z)))
        .ok_or_else(|| ck.fail("all four star edges repeat triangle colours"))?;
    ck.certify(vec![0, 1, 2, 3, z], 5)
}

/// Colour-disjoint triangles, the first in a `T10` and the second in an `R7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrianglePair {
    pub q1: Triangle,
    pub q2: Triangle,
}

/// A candidate triangle of `R7` through `u2`: its vertices, the two colours
/// at `u2` and the colour of the opposite edge.
type R7Triangle = (Triangle, [Colour; 2], Colour);
/// A triangle of `T10`: its vertices, the two colours at the centre and the
/// colour of the opposite edge.
type T10Triangle = (Triangle, [Colour; 2], Colour);

fn triangle_pair(ck: &Checked, r7: &[Vertex], t10: &[Vertex]) -> Result<TrianglePair> {
    let &[u1, u2, u3, w1, w2, w3, w4] = r7 else { unreachable!("R7 has seven vertices") };
    let s = [ck.c(u1, u2), ck.c(u2, w1), ck.c(u2, w2), ck.c(u2, w3), ck.c(u2, w4), ck.c(u2, u3)];
    let cands: [R7Triangle; 4] = [
        (tri(u1, u2, w1), [s[0], s[1]], ck.c(u1, w1)),
        (tri(u1, u2, w2), [s[0], s[2]], ck.c(u1, w2)),
        (tri(u2, u3, w3), [s[5], s[3]], ck.c(u3, w3)),
        (tri(u2, u3, w4), [s[5], s[4]], ck.c(u3, w4)),
    ];
    let x = t10[0];
    // Triangles of T10 whose edges at the centre avoid every colour at u2.
    let clean: Vec<T10Triangle> = (0..10)
        .map(|i| (t10[2 * i + 1], t10[2 * i + 2]))
        .map(|(a, b)| (tri(x, a, b), [ck.c(x, a), ck.c(x, b)], ck.c(a, b)))
        .filter(|(_, xe, _)| !s.contains(&xe[0]) && !s.contains(&xe[1]))
        .take(4)
        .collect();
    if clean.len() < 4 {
        return Err(ck.fail("fewer than four T10 triangles avoid the colours at u2"));
    }
    let disjoint = |q1: &T10Triangle, q2: &R7Triangle| {
        let a = [q1.1[0], q1.1[1], q1.2];
        let b = [q2.1[0], q2.1[1], q2.2];
        a.iter().all(|c| !b.contains(c))
    };
    let done = |q1: &T10Triangle, q2: &R7Triangle| -> Result<TrianglePair> {
        if disjoint(q1, q2) {
            Ok(TrianglePair { q1: q1.0, q2: q2.0 })
        } else {
            Err(ck.fail(format!("chosen triangles {:?} and {:?} share a colour", q1.0, q2.0)))
        }
    };
    let collision = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).find(|&(i, j)| clean[i].2 == clean[j].2);
    if let Some((i, j)) = collision {
        let gamma = clean[i].2;
        // γ avoids either the colours of u1u2, u2w1, u2w2 or those of
        // u2w3, u2w4, u2u3; use the triangles through that side.
        let side = if s[..3].contains(&gamma) { &cands[2..] } else { &cands[..2] };
        let q2 =
            side.iter().find(|q| q.2 != gamma).ok_or_else(|| ck.fail("both opposite colours on one side equal γ"))?;
        let q1 = [i, j]
            .into_iter()
            .map(|k| &clean[k])
            .find(|q| !q.1.contains(&q2.2))
            .ok_or_else(|| ck.fail("both colliding triangles use the opposite colour"))?;
        return done(q1, q2);
    }
    let gammas: Vec<Colour> = clean.iter().map(|q| q.2).collect();
    for q2 in &cands {
        if q2.1.iter().all(|c| gammas.contains(c)) {
            continue;
        }
        return match clean.iter().find(|q1| disjoint(q1, q2)) {
            Some(q1) => done(q1, q2),
            None => Err(ck.fail(format!("no T10 triangle is colour-disjoint from {:?}", q2.0))),
        };
    }
    Err(ck.fail("the opposite colours cover a colour pair of every R7 triangle"))
}

/// Colour-disjoint triangles `Q1 ⊆ T10` and `Q2 ⊆ R7` in `R7 ⊎ T10`.
pub fn disjoint_colour_triangles<C: ColourLookup>(psi: &C) -> Result<TrianglePair> {
    let ck = Checked::new(Lemma::DisjointTriangles, triangles_host(), psi)?;
    let r7: Vec<Vertex> = (0..7).collect();
    let t10: Vec<Vertex> = (7..28).collect();
    triangle_pair(&ck, &r7, &t10)
}

/// A rainbow `K6` in `K_{R, T10}` with `R` made of 31 copies of `R7`, under
/// a colouring whose cross edges are rainbow and avoid the colours of `R`.
pub fn extract_rainbow_k6<C: ColourLookup>(psi: &C) -> Result<Vec<Vertex>> {
    let ck = Checked::new(Lemma::RainbowK6, k6_host(), psi)?;
    let split = (7 * R7_COPIES) as Vertex;
    ck.cross_contract(split)?;
    let t10: Vec<Vertex> = (split..split + 21).collect();
    let mut groups: Vec<(Triangle, Vec<Triangle>)> = Vec::new();
    let mut chosen = None;
    for k in 0..R7_COPIES as Vertex {
        let r7: Vec<Vertex> = (7 * k..7 * k + 7).collect();
        let pair = triangle_pair(&ck, &r7, &t10)?;
        let at = match groups.iter().position(|g| g.0 == pair.q1) {
            Some(i) => i,
            None => {
                groups.push((pair.q1, Vec::new()));
                groups.len() - 1
            }
        };
        groups[at].1.push(pair.q2);
        if groups[at].1.len() == 4 {
            chosen = Some(at);
            break;
        }
    }
    let (q, qs) = &groups[chosen.ok_or_else(|| ck.fail("no T10 triangle pairs with four R7 copies"))?];
    let qcols = [ck.c(q[0], q[1]), ck.c(q[0], q[2]), ck.c(q[1], q[2])];
    for qi in qs {
        let clash = qi.iter().any(|&a| q.iter().any(|&b| qcols.contains(&ck.c(a, b))));
        if !clash {
            return ck.certify(qi.iter().chain(q).copied().collect(), 6);
        }
    }
    Err(ck.fail("all four cross blocks clash with the T10 triangle"))
}

fn surviving_in(
    ck_fail: &dyn Fn(String) -> LabError,
    g: &Graph,
    off: Vertex,
    matchings: &[Vec<Edge>],
) -> Result<Triangle> {
    if matchings.len() > MAX_MATCHINGS {
        return domain(format!("{} matchings given, at most {MAX_MATCHINGS} allowed", matchings.len()));
    }
    let mut removed = HashSet::new();
    for (i, m) in matchings.iter().enumerate() {
        let mut touched = HashSet::new();
        for &(u, v) in m {
            if u < off || v < off || !g.has_edge(u, v) {
                return domain(format!("matching {i} contains ({u},{v}), which is not an edge of F"));
            }
            if !touched.insert(u) || !touched.insert(v) {
                return domain(format!("set {i} is not a matching"));
            }
            removed.insert(norm(u, v));
        }
    }
    let apex = |leaf: Vertex, j: Vertex| off + 1 + SKELETON + (leaf - 1) * APEXES + j;
    let leaf = (1..=SKELETON)
        .find(|&l| !removed.contains(&(off, off + l)))
        .ok_or_else(|| ck_fail("every skeleton edge was removed".into()))?;
    let l = off + leaf;
    (0..APEXES)
        .map(|j| apex(leaf, j))
        .find(|&a| !removed.contains(&(off, a)) && !removed.contains(&(l, a)))
        .map(|a| tri(off, l, a))
        .ok_or_else(|| ck_fail(format!("all {APEXES} triangles on skeleton edge ({off},{l}) were hit")))
}

/// A triangle of `KDelta(25, 49)` avoiding at most 24 matchings.
pub fn surviving_triangle(matchings: &[Vec<Edge>]) -> Result<Triangle> {
    let fail = |msg: String| {
        LabError::Counterexample(
            serde_json::json!({ "lemma": Lemma::SurvivingTriangle.name(), "message": msg }).to_string(),
        )
    };
    surviving_in(&fail, f_host(), 0, matchings)
}

/// A rainbow `K7` in `K_{H, F}` with `H` four copies of `K̂_{3,4}` and `F`
/// the triangle-decorated star, under a colouring whose cross edges are
/// rainbow and avoid the colours of `H`.
pub fn extract_rainbow_k7<C: ColourLookup>(psi: &C) -> Result<Vec<Vertex>> {
    let ck = Checked::new(Lemma::RainbowK7, k7_host(), psi)?;
    let split = (7 * HATK_COPIES) as Vertex;
    ck.cross_contract(split)?;
    let mut blocks: Vec<[Vertex; 4]> = Vec::new();
    for k in 0..HATK_COPIES as Vertex {
        let b = 7 * k;
        let s = (b + 3..b + 7)
            .find(|&s| ck.is_rainbow_clique(&[b, b + 1, b + 2, s]))
            .ok_or_else(|| ck.fail(format!("copy {k} of the hat graph has no rainbow K4")))?;
        blocks.push([b, b + 1, b + 2, s]);
    }
    let hcols: HashSet<Colour> = blocks
        .iter()
        .flat_map(|x| crate::colouring::clique_edges(x).map(|(a, b)| ck.c(a, b)).collect::<Vec<_>>())
        .collect();
    let mut by_colour: BTreeMap<Colour, Vec<Edge>> = BTreeMap::new();
    for (&(u, v), &c) in ck.g.edges().iter().zip(&ck.cols) {
        if u >= split && hcols.contains(&c) {
            by_colour.entry(c).or_default().push((u, v));
        }
    }
    let matchings: Vec<Vec<Edge>> = by_colour.into_values().collect();
    let t = surviving_in(&|m| ck.fail(m), ck.g, split, &matchings)?;
    let tcols = [ck.c(t[0], t[1]), ck.c(t[0], t[2]), ck.c(t[1], t[2])];
    for x in &blocks {
        let clash = x.iter().any(|&a| t.iter().any(|&b| tcols.contains(&ck.c(a, b))));
        if !clash {
            return ck.certify(x.iter().chain(&t).copied().collect(), 7);
        }
    }
    Err(ck.fail("every rainbow K4 clashes with the surviving triangle"))
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

struct Builder {
    g: &'static Graph,
    cols: Vec<Option<Colour>>,
    at: Vec<HashSet<Colour>>,
    used: Vec<Colour>,
    next: Colour,
}

impl Builder {
    fn new(g: &'static Graph, first_fresh: Colour) -> Self {
        Builder { g, cols: vec![None; g.m()], at: vec![HashSet::new(); g.n()], used: Vec::new(), next: first_fresh }
    }

    fn try_set(&mut self, u: Vertex, v: Vertex, c: Colour) -> bool {
        if self.at[u as usize].contains(&c) || self.at[v as usize].contains(&c) {
            return false;
        }
        self.at[u as usize].insert(c);
        self.at[v as usize].insert(c);
        self.cols[self.g.edge_index(u, v).expect("host edge")] = Some(c);
        self.used.push(c);
        true
    }

    fn fresh(&mut self, u: Vertex, v: Vertex) {
        let c = self.next;
        self.next += 1;
        assert!(self.try_set(u, v, c), "fresh colours never clash");
    }

    /// Tries a few random members of `pool`, falling back to a fresh colour.
    fn pick<R: Rng + ?Sized>(&mut self, rng: &mut R, u: Vertex, v: Vertex, pool: &[Colour]) {
        if !pool.is_empty() {
            for _ in 0..6 {
                if self.try_set(u, v, pool[rng.random_range(0..pool.len())]) {
                    return;
                }
            }
        }
        self.fresh(u, v);
    }

    fn finish(self) -> DenseColouring {
        DenseColouring {
            host: self.g,
            colours: self.cols.into_iter().map(|c| c.expect("every edge coloured")).collect(),
        }
    }
}

/// Colours `edges` in random order, reusing earlier colours with
/// probability `reuse`.
fn colour_reusing<R: Rng + ?Sized>(b: &mut Builder, rng: &mut R, edges: &mut [Edge], reuse: f64) {
    edges.shuffle(rng);
    for &(u, v) in edges.iter() {
        if rng.random_bool(reuse) {
            let pool = b.used.clone();
            b.pick(rng, u, v, &pool);
        } else {
            b.fresh(u, v);
        }
    }
}

fn sample_k4<R: Rng + ?Sized>(rng: &mut R) -> DenseColouring {
    let mut b = Builder::new(k4_host(), 0);
    for l in 1..4 {
        b.fresh(0, l);
    }
    let left: Vec<Colour> = b.used.clone();
    let mut right: Vec<Vertex> = (5..9).collect();
    right.shuffle(rng);
    for z in right {
        if rng.random_bool(0.75) {
            b.pick(rng, 4, z, &left);
        } else {
            b.fresh(4, z);
        }
    }
    let mut cross: Vec<Edge> = (0..4).flat_map(|a| (4..9).map(move |z| (a, z))).collect();
    colour_reusing(&mut b, rng, &mut cross, 0.85);
    b.finish()
}

fn sample_k5<R: Rng + ?Sized>(rng: &mut R) -> DenseColouring {
    let mut b = Builder::new(k5_host(), 0);
    let mut hat: Vec<Edge> = k5_host().edges().iter().copied().filter(|&(u, v)| !(u == 3 && v >= 4)).collect();
    hat.shuffle(rng);
    for (u, v) in hat {
        b.fresh(u, v);
    }
    let triangle = vec![b.cols[0].unwrap(), b.cols[1].unwrap(), b.cols[k5_host().edge_index(1, 2).unwrap()].unwrap()];
    let all = b.used.clone();
    let mut star: Vec<Vertex> = (4..8).collect();
    star.shuffle(rng);
    for z in star {
        let r: f64 = rng.random();
        if r < 0.8 {
            b.pick(rng, 3, z, &triangle);
        } else if r < 0.9 {
            b.pick(rng, 3, z, &all);
        } else {
            b.fresh(3, z);
        }
    }
    b.finish()
}

fn sample_triangles<R: Rng + ?Sized>(rng: &mut R) -> DenseColouring {
    let g = triangles_host();
    let mut b = Builder::new(g, 0);
    let mut r7: Vec<Edge> = g.edges().iter().copied().filter(|&(_, v)| v < 7).collect();
    colour_reusing(&mut b, rng, &mut r7, 0.6);
    let r7_cols = b.used.clone();
    let mut t10: Vec<Edge> = g.edges().iter().copied().filter(|&(u, _)| u >= 7).collect();
    t10.shuffle(rng);
    for (u, v) in t10 {
        let r: f64 = rng.random();
        if r < 0.6 {
            b.pick(rng, u, v, &r7_cols);
        } else if r < 0.85 {
            let pool = b.used.clone();
            b.pick(rng, u, v, &pool);
        } else {
            b.fresh(u, v);
        }
    }
    b.finish()
}

/// Third vertex of the triangle of `T_k` or `KDelta` containing `uv`, for
/// hosts whose left side ends at `off`.
fn third_vertex<R: Rng + ?Sized>(rng: &mut R, lemma: Lemma, off: Vertex, (u, v): Edge) -> Vertex {
    let (a, b) = (u - off, v - off);
    let local = match lemma {
        Lemma::RainbowK6 => {
            if a == 0 {
                if b % 2 == 1 {
                    b + 1
                } else {
                    b - 1
                }
            } else {
                0
            }
        }
        _ => {
            if a == 0 && b <= SKELETON {
                1 + SKELETON + (b - 1) * APEXES + rng.random_range(0..APEXES)
            } else if a == 0 {
                1 + (b - 1 - SKELETON) / APEXES
            } else {
                0
            }
        }
    };
    local + off
}

/// Colouring of a join: a random proper colouring on the left with heavy
/// reuse, a rainbow cross part with its own colours, and a right side that
/// keeps reusing left colours and cross colours near each edge.
fn sample_join<R: Rng + ?Sized>(rng: &mut R, lemma: Lemma, split: Vertex) -> DenseColouring {
    let g = lemma.host();
    let right_n = g.n() as Vertex - split;
    let cross_base: Colour = 1 << 12;
    let mut b = Builder::new(g, 0);
    let mut left: Vec<Edge> = g.edges().iter().copied().filter(|&(_, v)| v < split).collect();
    assert!(left.len() < cross_base as usize);
    colour_reusing(&mut b, rng, &mut left, 0.7);
    let left_cols = b.used.clone();
    b.next = cross_base + split * right_n;
    for (i, &(x, y)) in g.edges().iter().enumerate() {
        if x < split && y >= split {
            b.cols[i] = Some(cross_base + x * right_n + (y - split));
        }
    }
    let mut right: Vec<Edge> = g.edges().iter().copied().filter(|&(u, _)| u >= split).collect();
    right.shuffle(rng);
    for (u, v) in right {
        let r: f64 = rng.random();
        if r < 0.4 {
            b.pick(rng, u, v, &left_cols);
        } else if r < 0.8 {
            let w = third_vertex(rng, lemma, split, (u, v));
            let x = rng.random_range(0..split);
            let c = cross_base + x * right_n + (w - split);
            if !b.try_set(u, v, c) {
                b.fresh(u, v);
            }
        } else {
            b.fresh(u, v);
        }
    }
    b.finish()
}

fn sample_matchings<R: Rng + ?Sized>(rng: &mut R) -> Vec<Vec<Edge>> {
    let f = f_host();
    let count = if rng.random_bool(0.7) { MAX_MATCHINGS } else { rng.random_range(0..=MAX_MATCHINGS) };
    let mut leaves: Vec<Vertex> = (1..=SKELETON).collect();
    leaves.shuffle(rng);
    let target = leaves[count.min(leaves.len() - 1)];
    let mut apexes: Vec<Vertex> = (0..APEXES).map(|j| 1 + SKELETON + (target - 1) * APEXES + j).collect();
    apexes.shuffle(rng);
    let adversarial = rng.random_bool(0.5);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut m: Vec<Edge> = Vec::new();
        let mut touched = HashSet::new();
        let mut add = |m: &mut Vec<Edge>, (u, v): Edge| {
            if !touched.contains(&u) && !touched.contains(&v) {
                touched.insert(u);
                touched.insert(v);
                m.push(norm(u, v));
            }
        };
        if adversarial {
            add(&mut m, (0, apexes[2 * i]));
            add(&mut m, (target, apexes[2 * i + 1]));
        } else if rng.random_bool(0.8) {
            add(&mut m, (0, leaves[i]));
        }
        for _ in 0..rng.random_range(0..60) {
            let (u, v) = f.edges()[rng.random_range(0..f.m())];
            add(&mut m, (u, v));
        }
        out.push(m);
    }
    out
}

// ---------------------------------------------------------------------------
// Falsification harness
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRecord {
    pub lemma: Lemma,
    pub seed: u64,
    pub trial: u64,
    pub error: serde_json::Value,
    pub input: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub lemma: Lemma,
    pub trials: u64,
    pub seed: u64,
    pub passed: u64,
    pub counterexamples: Vec<CounterexampleRecord>,
    /// File holding the counterexamples, once archived.
    pub archive: Option<PathBuf>,
}

impl CertifyReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Writes the counterexamples, if any, to `<dir>/<lemma>-counterexamples.json`.
    pub fn archive_to(&mut self, dir: &Path) -> Result<()> {
        if self.ok() {
            return Ok(());
        }
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}-counterexamples.json", self.lemma));
        std::fs::write(&path, serde_json::to_string_pretty(&self.counterexamples)?)?;
        self.archive = Some(path);
        Ok(())
    }
}

/// Samples one input for `lemma` and runs its extractor. Returns the
/// counterexample, if the extractor produced one.
pub fn run_trial(lemma: Lemma, seed: u64, trial: u64) -> Result<Option<CounterexampleRecord>> {
    let mut rng = trial_rng(seed, trial);
    let (outcome, input) = match lemma {
        Lemma::SurvivingTriangle => {
            let ms = sample_matchings(&mut rng);
            (surviving_triangle(&ms).map(|_| ()), serde_json::to_value(&ms)?)
        }
        _ => {
            let psi = sample_colouring(lemma, &mut rng);
            let outcome = match lemma {
                Lemma::RainbowK4 => extract_rainbow_k4(&psi).map(|_| ()),
                Lemma::RainbowK5 => extract_rainbow_k5(&psi).map(|_| ()),
                Lemma::DisjointTriangles => disjoint_colour_triangles(&psi).map(|_| ()),
                Lemma::RainbowK6 => extract_rainbow_k6(&psi).map(|_| ()),
                Lemma::RainbowK7 => extract_rainbow_k7(&psi).map(|_| ()),
                Lemma::SurvivingTriangle => unreachable!(),
            };
            let input =
                if outcome.is_err() { serde_json::to_value(psi.to_edge_colouring())? } else { serde_json::Value::Null };
            (outcome, input)
        }
    };
    match outcome {
        Ok(()) => Ok(None),
        Err(LabError::Counterexample(payload)) => {
            Ok(Some(CounterexampleRecord { lemma, seed, trial, error: serde_json::from_str(&payload)?, input }))
        }
        Err(e) => Err(e),
    }
}

/// An adversarial colouring of the host of `lemma` that meets its
/// precondition.
pub fn sample_colouring<R: Rng + ?Sized>(lemma: Lemma, rng: &mut R) -> DenseColouring {
    match lemma {
        Lemma::RainbowK4 => sample_k4(rng),
        Lemma::RainbowK5 => sample_k5(rng),
        Lemma::DisjointTriangles => sample_triangles(rng),
        Lemma::RainbowK6 => sample_join(rng, lemma, (7 * R7_COPIES) as Vertex),
        Lemma::RainbowK7 => sample_join(rng, lemma, (7 * HATK_COPIES) as Vertex),
        Lemma::SurvivingTriangle => {
            let mut b = Builder::new(f_host(), 0);
            colour_reusing(&mut b, rng, &mut f_host().edges().to_vec(), 0.7);
            b.finish()
        }
    }
}

/// Runs `trials` independent trials of `lemma`. Trial `t` uses stream `t` of
/// `seed`, so the report does not depend on the thread count.
pub fn certify(lemma: Lemma, trials: u64, seed: u64) -> Result<CertifyReport> {
    let found = (0..trials).into_par_iter().map(|t| run_trial(lemma, seed, t)).collect::<Result<Vec<_>>>()?;
    let counterexamples: Vec<CounterexampleRecord> = found.into_iter().flatten().collect();
    Ok(CertifyReport {
        lemma,
        trials,
        seed,
        passed: trials - counterexamples.len() as u64,
        counterexamples,
        archive: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every edge of `g` gets its own colour, starting from 100.
    fn fresh(g: &Graph) -> EdgeColouring {
        let mut psi = EdgeColouring::new();
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            psi.set(u, v, 100 + i as Colour);
        }
        psi
    }

    #[test]
    fn k4_fresh_and_reused() {
        let mut psi = fresh(k4_host());
        assert_eq!(extract_rainbow_k4(&psi).unwrap(), vec![0, 1, 4, 5]);
        for (z, l) in [(5, 1), (6, 2), (7, 3)] {
            psi.set(4, z, psi.get(0, l).unwrap());
        }
        let k = extract_rainbow_k4(&psi).unwrap();
        assert!(k.contains(&4) && k.contains(&8));
    }

    #[test]
    fn k5_fresh_reused_and_rejected() {
        let mut psi = fresh(k5_host());
        assert_eq!(extract_rainbow_k5(&psi).unwrap(), vec![0, 1, 2, 3, 4]);
        for (z, (a, b)) in [(4, (0, 1)), (5, (0, 2)), (6, (1, 2))] {
            psi.set(3, z, psi.get(a, b).unwrap());
        }
        assert_eq!(extract_rainbow_k5(&psi).unwrap(), vec![0, 1, 2, 3, 7]);
        psi.set(0, 4, psi.get(1, 5).unwrap());
        assert!(matches!(extract_rainbow_k5(&psi), Err(LabError::Domain(_))));
    }

    #[test]
    fn triangles_collision_case() {
        let mut psi = fresh(triangles_host());
        psi.set(10, 11, psi.get(8, 9).unwrap());
        let pair = disjoint_colour_triangles(&psi).unwrap();
        assert_eq!(pair, TrianglePair { q1: [7, 8, 9], q2: [0, 1, 3] });
    }

    #[test]
    fn k6_skips_three_clashing_blocks() {
        let g = k6_host();
        let mut psi = fresh(g);
        let plain = extract_rainbow_k6(&psi).unwrap();
        assert_eq!(plain, vec![0, 1, 3, 217, 218, 219]);
        // Recolour the edges of Q with cross colours from the first three
        // copies, each towards the vertex opposite the edge.
        let q = [217, 218, 219];
        for (k, (a, b, opp)) in [(218, 219, 217), (217, 219, 218), (217, 218, 219)].into_iter().enumerate() {
            let x = 7 * k as Vertex;
            psi.set(a, b, psi.get(x, opp).unwrap());
        }
        let k = extract_rainbow_k6(&psi).unwrap();
        assert_eq!(k, vec![21, 22, 24, q[0], q[1], q[2]]);
    }

    #[test]
    fn k7_skips_three_clashing_blocks() {
        let g = k7_host();
        let mut psi = fresh(g);
        let t = [28, 29, 54];
        assert_eq!(extract_rainbow_k7(&psi).unwrap(), vec![0, 1, 2, 3, t[0], t[1], t[2]]);
        for (k, (a, b, opp)) in [(t[1], t[2], t[0]), (t[0], t[2], t[1]), (t[0], t[1], t[2])].into_iter().enumerate() {
            psi.set(a, b, psi.get(7 * k as Vertex, opp).unwrap());
        }
        assert_eq!(extract_rainbow_k7(&psi).unwrap(), vec![21, 22, 23, 24, t[0], t[1], t[2]]);
    }

    #[test]
    fn surviving_triangle_cases() {
        assert_eq!(surviving_triangle(&[]).unwrap(), [0, 1, 26]);
        let ms: Vec<Vec<Edge>> = (0..24).map(|m| vec![(0, 26 + 2 * m), (1, 27 + 2 * m)]).collect();
        assert_eq!(surviving_triangle(&ms).unwrap(), [0, 1, 74]);
        assert!(matches!(surviving_triangle(&[vec![(0, 1), (0, 2)]]), Err(LabError::Domain(_))));
        assert!(matches!(surviving_triangle(&[vec![(1, 2)]]), Err(LabError::Domain(_))));
    }

    #[test]
    fn samplers_meet_preconditions() {
        for lemma in Lemma::ALL {
            let report = certify(lemma, 60, 5).unwrap();
            assert!(report.ok(), "{lemma}: {:?}", report.counterexamples);
        }
    }
}
