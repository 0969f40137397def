//! Simple undirected graphs on `0..n` with bitset adjacency, the fixed
//! constructions used throughout the lab, copy enumeration and exact density
//! functionals.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{domain, LabError, Result};

pub type Vertex = u32;
/// An edge with `u < v`.
pub type Edge = (Vertex, Vertex);

#[inline]
pub fn norm(u: Vertex, v: Vertex) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Simple graph with dense adjacency rows and a sorted edge list.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[Vertex; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = LabError;
    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::from_edges(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr { n: g.n, edges: g.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = bits::words_for(n);
        Graph { n, words, rows: vec![0; n * words], edges: Vec::new() }
    }

    /// Builds a graph from an edge iterator. Duplicates are merged; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.check_pair(u, v)?;
            let (a, b) = (u as usize, v as usize);
            bits::set(g.row_mut(a), b);
            bits::set(g.row_mut(b), a);
            g.edges.push(norm(u, v));
        }
        g.edges.sort_unstable();
        g.edges.dedup();
        Ok(g)
    }

    fn check_pair(&self, u: Vertex, v: Vertex) -> Result<()> {
        if u == v {
            return domain(format!("loop at vertex {u}"));
        }
        if u as usize >= self.n || v as usize >= self.n {
            return domain(format!("edge ({u},{v}) out of range for n={}", self.n));
        }
        Ok(())
    }

    fn row_mut(&mut self, v: usize) -> &mut [u64] {
        &mut self.rows[v * self.words..(v + 1) * self.words]
    }

    /// Inserts an edge, returning whether it was new.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        self.check_pair(u, v)?;
        let e = norm(u, v);
        match self.edges.binary_search(&e) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.edges.insert(pos, e);
                bits::set(self.row_mut(u as usize), v as usize);
                bits::set(self.row_mut(v as usize), u as usize);
                Ok(true)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn row(&self, v: Vertex) -> &[u64] {
        let v = v as usize;
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        (u as usize) < self.n && (v as usize) < self.n && bits::test(self.row(u), v as usize)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        bits::count(self.row(v))
    }

    pub fn neighbours(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        bits::ones(self.row(v)).map(|x| x as Vertex)
    }

    /// Position of `uv` in [`Graph::edges`].
    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edges.binary_search(&norm(u, v)).ok()
    }

    pub fn is_complete(&self) -> bool {
        self.m() * 2 == self.n * self.n.saturating_sub(1)
    }

    /// Subgraph induced on `vs`, relabelled so that `vs[i]` becomes `i`.
    pub fn induced(&self, vs: &[Vertex]) -> Graph {
        let mut edges = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if self.has_edge(vs[i], vs[j]) {
                    edges.push((i as Vertex, j as Vertex));
                }
            }
        }
        Graph::from_edges(vs.len(), edges).expect("induced edges are valid")
    }

    /// Spanning subgraph keeping the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(Edge) -> bool) -> Graph {
        let kept: Vec<Edge> = self.edges.iter().copied().filter(|&e| keep(e)).collect();
        Graph::from_edges(self.n, kept).expect("subset of valid edges")
    }

    /// Union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return domain(format!("union of graphs on {} and {} vertices", self.n, other.n));
        }
        Graph::from_edges(self.n, self.edges.iter().chain(other.edges.iter()).copied())
    }

    /// Vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        Graph::from_edges(self.n, self.edges.iter().map(|&(u, v)| (perm[u as usize], perm[v as usize])))
            .expect("permutation of valid edges")
    }

    /// Disjoint union with parts placed consecutively.
    pub fn disjoint_union(parts: &[Graph]) -> Graph {
        let n = parts.iter().map(|g| g.n).sum();
        let mut edges = Vec::new();
        let mut off = 0;
        for g in parts {
            edges.extend(g.edges.iter().map(|&(u, v)| (u + off, v + off)));
            off += g.n as Vertex;
        }
        Graph::from_edges(n, edges).expect("offset edges are valid")
    }

    /// Disjoint union of `left` and `right` plus every edge between them.
    pub fn join(left: &Graph, right: &Graph) -> Graph {
        let off = left.n as Vertex;
        let edges = left
            .edges
            .iter()
            .copied()
            .chain(right.edges.iter().map(|&(u, v)| (u + off, v + off)))
            .chain((0..off).flat_map(|u| (0..right.n as Vertex).map(move |v| (u, v + off))));
        Graph::from_edges(left.n + right.n, edges).expect("join edges are valid")
    }

    /// Vertices adjacent to every member of `xs`, excluding `xs`.
    pub fn common_neighbourhood(&self, xs: &[Vertex]) -> Vec<Vertex> {
        let mut acc = vec![!0u64; self.words];
        if self.n % 64 != 0 && self.words > 0 {
            acc[self.words - 1] = (1u64 << (self.n % 64)) - 1;
        }
        for &x in xs {
            for (a, r) in acc.iter_mut().zip(self.row(x)) {
                *a &= r;
            }
        }
        for &x in xs {
            bits::clear(&mut acc, x as usize);
        }
        bits::ones(&acc).map(|v| v as Vertex).collect()
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex. Isolated vertices form singleton components.
    pub fn component_vertex_sets(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s as Vertex];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for w in self.neighbours(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connected components with their vertex maps back into `self`.
    pub fn components(&self) -> Vec<Component> {
        self.component_vertex_sets()
            .into_iter()
            .map(|vertices| Component { graph: self.induced(&vertices), vertices })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_vertex_sets().len() == 1
    }

    /// All `r`-cliques as ascending vertex lists, in lexicographic order.
    pub fn cliques(&self, r: usize) -> Vec<Vec<Vertex>> {
        let mut out = Vec::new();
        if r == 0 {
            return out;
        }
        let mut stack = Vec::with_capacity(r);
        let mut full = vec![!0u64; self.words];
        if self.n % 64 != 0 && self.words > 0 {
            full[self.words - 1] = (1u64 << (self.n % 64)) - 1;
        }
        self.extend_cliques(&full, r, &mut stack, &mut out);
        out
    }

    fn extend_cliques(&self, cand: &[u64], r: usize, stack: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if stack.len() == r {
            out.push(stack.clone());
            return;
        }
        let need = r - stack.len();
        if bits::count(cand) < need {
            return;
        }
        for v in bits::ones(cand) {
            let mut next: Vec<u64> = cand.iter().zip(self.row(v as Vertex)).map(|(a, b)| a & b).collect();
            bits::clear_upto(&mut next, v);
            stack.push(v as Vertex);
            self.extend_cliques(&next, r, stack, out);
            stack.pop();
        }
    }

    pub fn triangles(&self) -> Vec<[Vertex; 3]> {
        self.cliques(3).into_iter().map(|c| [c[0], c[1], c[2]]).collect()
    }

    /// Writes the `n m` / `u v` edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut nums = text
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| LabError::Parse(format!("not a number: {t}"))));
        let mut next = |what: &str| nums.next().unwrap_or_else(|| Err(LabError::Parse(format!("missing {what}"))));
        let n = next("n")? as usize;
        let m = next("m")? as usize;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let u = next("edge endpoint")? as Vertex;
            let v = next("edge endpoint")? as Vertex;
            if u >= v {
                return Err(LabError::Parse(format!("edge {u} {v} must satisfy u < v")));
            }
            edges.push((u, v));
        }
        if nums.next().is_some() {
            return Err(LabError::Parse("trailing data after edge list".into()));
        }
        let g = Graph::from_edges(n, edges)?;
        if g.m() != m {
            return Err(LabError::Parse("duplicate edges in edge list".into()));
        }
        Ok(g)
    }
}

/// A connected component and the original label of each of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    pub graph: Graph,
}

// ============================================================================
// Named constructions
// ============================================================================

/// Fixed graphs used by the lab. Vertex labellings are part of the contract:
///
/// * `R7`: `u1,u2,u3,w1,w2,w3,w4` are `0..7`.
/// * `T{k}`: centre `0`, then `v1..v2k` as `1..=2k`; triangles `0, 2i-1, 2i`.
/// * `KDelta{s,t}`: centre `0`, leaves `1..=s`, then the `t` apexes on leaf `i`
///   at `1 + s + (i-1)t ..`.
/// * `HatK{a,b}`: clique on `0..a`, independent set after it.
/// * `Star{k}`: centre `0` and `k` leaves. `Path{k}` has `k` vertices.
/// * `Join` and `DisjointUnion` place parts consecutively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NamedGraph {
    Clique { r: usize },
    CompleteBipartite { a: usize, b: usize },
    Path { k: usize },
    Star { k: usize },
    HatK { a: usize, b: usize },
    R7,
    T { k: usize },
    KDelta { s: usize, t: usize },
    Join { left: Box<NamedGraph>, right: Box<NamedGraph> },
    DisjointUnion { parts: Vec<NamedGraph> },
}

impl NamedGraph {
    pub fn build(&self) -> Result<Graph> {
        use NamedGraph::*;
        Ok(match self {
            Clique { r } => {
                if *r == 0 {
                    return domain("clique needs at least one vertex");
                }
                complete(*r)
            }
            CompleteBipartite { a, b } => Graph::join(&Graph::empty(*a), &Graph::empty(*b)),
            Path { k } => {
                if *k == 0 {
                    return domain("path needs at least one vertex");
                }
                Graph::from_edges(*k, (1..*k as Vertex).map(|i| (i - 1, i)))?
            }
            Star { k } => Graph::from_edges(k + 1, (1..=*k as Vertex).map(|i| (0, i)))?,
            HatK { a, b } => Graph::join(&complete(*a), &Graph::empty(*b)),
            R7 => {
                Graph::from_edges(7, [(0, 1), (1, 2), (0, 3), (0, 4), (1, 3), (1, 4), (1, 5), (1, 6), (2, 5), (2, 6)])?
            }
            T { k } => {
                let k = *k as Vertex;
                let mut e = Vec::new();
                for i in 1..=k {
                    let (a, b) = (2 * i - 1, 2 * i);
                    e.extend([(0, a), (0, b), (a, b)]);
                }
                Graph::from_edges(2 * k as usize + 1, e)?
            }
            KDelta { s, t } => {
                let (s, t) = (*s as Vertex, *t as Vertex);
                let n = 1 + s + s * t;
                let mut e = Vec::new();
                for i in 1..=s {
                    e.push((0, i));
                    for j in 0..t {
                        let apex = 1 + s + (i - 1) * t + j;
                        e.push((0, apex));
                        e.push((i, apex));
                    }
                }
                Graph::from_edges(n as usize, e)?
            }
            Join { left, right } => Graph::join(&left.build()?, &right.build()?),
            DisjointUnion { parts } => {
                let built = parts.iter().map(|p| p.build()).collect::<Result<Vec<_>>>()?;
                Graph::disjoint_union(&built)
            }
        })
    }
}

pub fn complete(r: usize) -> Graph {
    let r = r as Vertex;
    Graph::from_edges(r as usize, (0..r).flat_map(|u| (u + 1..r).map(move |v| (u, v)))).expect("clique edges are valid")
}

impl fmt::Display for NamedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use NamedGraph::*;
        match self {
            Clique { r } => write!(f, "K{r}"),
            CompleteBipartite { a, b } => write!(f, "kbip({a},{b})"),
            Path { k } => write!(f, "path({k})"),
            Star { k } => write!(f, "star({k})"),
            HatK { a, b } => write!(f, "hatk({a},{b})"),
            R7 => write!(f, "r7"),
            T { k } => write!(f, "t({k})"),
            KDelta { s, t } => write!(f, "kdelta({s},{t})"),
            Join { left, right } => write!(f, "join({left},{right})"),
            DisjointUnion { parts } => {
                write!(f, "union(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses `K4`, `kbip(1,3)`, `path(4)`, `star(3)`, `hatk(3,4)`, `r7`, `t(10)`,
/// `kdelta(25,49)`, `join(A,B)` and `union(A,B,..)`.
impl FromStr for NamedGraph {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let bad = || LabError::Parse(format!("unrecognised graph name `{s}`"));
        if lower == "r7" {
            return Ok(NamedGraph::R7);
        }
        if let Some(digits) = lower.strip_prefix('k') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return Ok(NamedGraph::Clique { r: digits.parse().map_err(|_| bad())? });
            }
        }
        let open = lower.find('(').ok_or_else(bad)?;
        if !lower.ends_with(')') {
            return Err(bad());
        }
        let head = &lower[..open];
        let args = split_top_level(&s[open + 1..s.len() - 1]);
        let nums =
            || -> Result<Vec<usize>> { args.iter().map(|a| a.trim().parse::<usize>().map_err(|_| bad())).collect() };
        let want = |k: usize, v: Vec<usize>| if v.len() == k { Ok(v) } else { Err(bad()) };
        Ok(match head {
            "k" | "clique" => NamedGraph::Clique { r: want(1, nums()?)?[0] },
            "kbip" => {
                let v = want(2, nums()?)?;
                NamedGraph::CompleteBipartite { a: v[0], b: v[1] }
            }
            "path" => NamedGraph::Path { k: want(1, nums()?)?[0] },
            "star" => NamedGraph::Star { k: want(1, nums()?)?[0] },
            "hatk" => {
                let v = want(2, nums()?)?;
                NamedGraph::HatK { a: v[0], b: v[1] }
            }
            "t" => NamedGraph::T { k: want(1, nums()?)?[0] },
            "kdelta" => {
                let v = want(2, nums()?)?;
                NamedGraph::KDelta { s: v[0], t: v[1] }
            }
            "join" => {
                if args.len() != 2 {
                    return Err(bad());
                }
                NamedGraph::Join { left: Box::new(args[0].parse()?), right: Box::new(args[1].parse()?) }
            }
            "union" => NamedGraph::DisjointUnion { parts: args.iter().map(|a| a.parse()).collect::<Result<_>>()? },
            _ => return Err(bad()),
        })
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

// ============================================================================
// Copies of a pattern
// ============================================================================

/// Every copy of `h` in `g` (not necessarily induced), one embedding per copy.
///
/// An embedding maps `h`-vertex `i` to `emb[i]`. Embeddings that differ by an
/// automorphism of `h` are reported once.
pub fn enumerate_copies(g: &Graph, h: &Graph) -> Vec<Vec<Vertex>> {
    if h.n() == 0 || h.n() > g.n() {
        return Vec::new();
    }
    if h.is_complete() {
        return g.cliques(h.n());
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for_each_embedding(g, h, |emb| {
        let mut vs = emb.to_vec();
        vs.sort_unstable();
        let mut es: Vec<Edge> = h.edges().iter().map(|&(a, b)| norm(emb[a as usize], emb[b as usize])).collect();
        es.sort_unstable();
        if seen.insert((vs, es)) {
            out.push(emb.to_vec());
        }
        true
    });
    out
}

/// Calls `f` on every injective edge-preserving map `h -> g`, stopping early
/// when `f` returns false.
pub fn for_each_embedding(g: &Graph, h: &Graph, mut f: impl FnMut(&[Vertex]) -> bool) {
    let k = h.n();
    if k == 0 || k > g.n() {
        return;
    }
    // Order h's vertices so each one has as many earlier neighbours as possible.
    let mut order: Vec<usize> = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    while order.len() < k {
        let best = (0..k)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let back = order.iter().filter(|&&u| h.has_edge(u as Vertex, v as Vertex)).count();
                (back, h.degree(v as Vertex), std::cmp::Reverse(v))
            })
            .unwrap();
        placed[best] = true;
        order.push(best);
    }
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (0..i).filter(|&j| h.has_edge(order[j] as Vertex, v as Vertex)).collect())
        .collect();
    let hdeg: Vec<usize> = order.iter().map(|&v| h.degree(v as Vertex)).collect();
    let gdeg: Vec<usize> = (0..g.n()).map(|v| g.degree(v as Vertex)).collect();
    let mut img = vec![0 as Vertex; k];
    let mut used = vec![false; g.n()];
    let mut emb = vec![0 as Vertex; k];

    fn rec(
        i: usize,
        g: &Graph,
        order: &[usize],
        back: &[Vec<usize>],
        hdeg: &[usize],
        gdeg: &[usize],
        img: &mut [Vertex],
        used: &mut [bool],
        emb: &mut [Vertex],
        f: &mut dyn FnMut(&[Vertex]) -> bool,
    ) -> bool {
        if i == order.len() {
            for (j, &v) in order.iter().enumerate() {
                emb[v] = img[j];
            }
            return f(emb);
        }
        let cands: Vec<Vertex> = if back[i].is_empty() {
            (0..g.n() as Vertex).collect()
        } else {
            let mut acc = g.row(img[back[i][0]]).to_vec();
            for &j in &back[i][1..] {
                for (a, r) in acc.iter_mut().zip(g.row(img[j])) {
                    *a &= r;
                }
            }
            bits::ones(&acc).map(|x| x as Vertex).collect()
        };
        for c in cands {
            if used[c as usize] || gdeg[c as usize] < hdeg[i] {
                continue;
            }
            used[c as usize] = true;
            img[i] = c;
            let go_on = rec(i + 1, g, order, back, hdeg, gdeg, img, used, emb, f);
            used[c as usize] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(0, g, &order, &back, &hdeg, &gdeg, &mut img, &mut used, &mut emb, &mut f);
}

/// Number of automorphisms of `h`.
pub fn automorphism_count(h: &Graph) -> u64 {
    let mut count = 0u64;
    for_each_embedding(h, h, |_| {
        count += 1;
        true
    });
    count
}

// ============================================================================
// Densities
// ============================================================================

pub type Rational = Ratio<i64>;

/// Largest vertex count accepted by the exhaustive density routines.
pub const DENSITY_MAX_VERTICES: usize = 22;

/// `e(G[S])` for every vertex subset `S`, indexed by bitmask.
pub(crate) fn subset_edge_counts(h: &Graph) -> Vec<u16> {
    let v = h.n();
    let masks: Vec<u32> = (0..v).map(|i| h.neighbours(i as Vertex).fold(0u32, |m, w| m | 1 << w)).collect();
    let mut e = vec![0u16; 1 << v];
    for s in 1usize..(1 << v) {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        e[s] = e[rest] + (masks[low] & rest as u32).count_ones() as u16;
    }
    e
}

fn check_size(h: &Graph, limit: usize) -> Result<()> {
    if h.n() > limit {
        return domain(format!("exhaustive density needs at most {limit} vertices, got {}", h.n()));
    }
    Ok(())
}

/// `m1(H) = max e(J)/v(J)` over non-empty subgraphs.
pub fn max_density(h: &Graph) -> Result<Rational> {
    check_size(h, DENSITY_MAX_VERTICES)?;
    if h.n() == 0 {
        return domain("max density of the empty graph");
    }
    let e = subset_edge_counts(h);
    let mut best = Rational::from_integer(0);
    for s in 1..e.len() {
        let r = Rational::new(e[s] as i64, s.count_ones() as i64);
        if r > best {
            best = r;
        }
    }
    Ok(best)
}

/// `m2(H) = max (e(J)-1)/(v(J)-2)` over subgraphs with at least two edges.
pub fn max_two_density(h: &Graph) -> Result<Rational> {
    check_size(h, DENSITY_MAX_VERTICES)?;
    if h.m() < 2 {
        return domain("two-density needs at least two edges");
    }
    let e = subset_edge_counts(h);
    let mut best: Option<Rational> = None;
    for s in 1..e.len() {
        if e[s] < 2 {
            continue;
        }
        let r = Rational::new(e[s] as i64 - 1, s.count_ones() as i64 - 2);
        if best.is_none_or(|b| r > b) {
            best = Some(r);
        }
    }
    Ok(best.expect("some subset carries every edge"))
}

/// Bipartition density: the least, over partitions `V1 ⊎ V2`, of
/// `max(m1(H[V1]), m1(H[V2]))`, with an empty side contributing zero.
pub fn max_bipartition_density(h: &Graph) -> Result<Rational> {
    check_size(h, 16)?;
    let v = h.n();
    if v == 0 {
        return domain("bipartition density of the empty graph");
    }
    let e = subset_edge_counts(h);
    let full = (1usize << v) - 1;
    // m1 of every subset via a max over submasks, one bit at a time.
    let mut m1: Vec<Rational> = (0..=full)
        .map(|s| if s == 0 { Rational::from_integer(0) } else { Rational::new(e[s] as i64, s.count_ones() as i64) })
        .collect();
    for b in 0..v {
        for s in 0..=full {
            if s >> b & 1 == 1 {
                let t = m1[s ^ (1 << b)];
                if t > m1[s] {
                    m1[s] = t;
                }
            }
        }
    }
    let mut best: Option<Rational> = None;
    for s in 0..=full {
        if s & 1 == 0 {
            continue;
        }
        let val = m1[s].max(m1[full ^ s]);
        if best.is_none_or(|b| val < b) {
            best = Some(val);
        }
    }
    Ok(best.unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    #[serde(serialize_with = "ser_ratio")]
    pub m1: Rational,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub m2: Option<Rational>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub m_bip2: Option<Rational>,
}

/// `m1` always, `m2` when `H` has two edges, `m_bip2` up to 16 vertices.
pub fn densities(h: &Graph) -> Result<DensityReport> {
    Ok(DensityReport {
        m1: max_density(h)?,
        m2: if h.m() >= 2 { Some(max_two_density(h)?) } else { None },
        m_bip2: if h.n() <= 16 { Some(max_bipartition_density(h)?) } else { None },
    })
}

pub fn ratio_string(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

pub(crate) fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&ratio_string(r)),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ng(s: &str) -> Graph {
        s.parse::<NamedGraph>().unwrap().build().unwrap()
    }

    #[test]
    fn fixed_sizes() {
        let t5 = ng("t(5)");
        assert_eq!((t5.n(), t5.m()), (11, 15));
        assert_eq!((0..11).filter(|&v| t5.degree(v) == 10).count(), 1);
        let kd = ng("kdelta(25,49)");
        assert_eq!((kd.n(), kd.m()), (1251, 2475));
        let r7 = ng("r7");
        assert_eq!((r7.n(), r7.m()), (7, 10));
        assert_eq!(r7.degree(1), 6);
        let hat = ng("hatk(3,4)");
        assert_eq!((hat.n(), hat.m()), (7, 15));
    }

    #[test]
    fn named_round_trip_text() {
        for s in ["K4", "kbip(2,3)", "join(star(3),star(4))", "union(r7,t(10))"] {
            let g: NamedGraph = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<NamedGraph>().unwrap(), g);
        }
        assert!("banana".parse::<NamedGraph>().is_err());
    }

    #[test]
    fn clique_densities() {
        for r in 3..=12 {
            assert_eq!(max_two_density(&complete(r)).unwrap(), Rational::new(r as i64 + 1, 2));
        }
    }

    #[test]
    fn join_of_stars_bipartition_density() {
        let j = ng("join(star(3),star(4))");
        assert_eq!(max_bipartition_density(&j).unwrap(), Rational::new(4, 5));
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(Graph::parse_edge_list("3 1\n2 1\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        let g = Graph::parse_edge_list("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn copies_of_path_in_triangle() {
        // P3 in K3: three copies, one per middle vertex.
        assert_eq!(enumerate_copies(&complete(3), &ng("path(3)")).len(), 3);
        assert_eq!(automorphism_count(&ng("r7")), 8);
    }
}
