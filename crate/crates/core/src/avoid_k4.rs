//! Proper colourings of `K_{U,W} ∪ R` without rainbow `K4`, for random `R`
//! whose components inside each part are small forests.
//!
//! Every `K4` in such a graph is a seed 4-cycle plus one `R`-edge inside `U`
//! and one inside `W`. Components inside a part are coloured from `{1,2,3}`;
//! the edges between a component `L` of `U` and a component `R` of `W` take a
//! private palette of `|L|·|R|` colours laid out by a fixed table.

use serde::Serialize;

use crate::colouring::{Colour, EdgeColouring};
use crate::emergence::sampling::PerturbedInstance;
use crate::error::{domain, LabError, Result};
use crate::graph::{norm, Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ComponentKind {
    K1,
    K2,
    P3,
    K13,
    P4,
}

/// A component with its vertices in frame order: the path order for paths,
/// centre first for the star.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifiedComponent {
    pub kind: ComponentKind,
    pub order: Vec<Vertex>,
}

/// Classifies a connected component given by its original vertex labels.
pub fn classify(g: &Graph, vertices: &[Vertex]) -> Result<ClassifiedComponent> {
    let unsupported =
        || Err(LabError::StructureUnsupported(format!("component on {vertices:?} is not one of K1, K2, P3, K13, P4")));
    let mut vs = vertices.to_vec();
    vs.sort_unstable();
    let deg = |v: Vertex| vs.iter().filter(|&&w| g.has_edge(v, w)).count();
    let m: usize = vs.iter().map(|&v| deg(v)).sum::<usize>() / 2;
    let (kind, order) = match (vs.len(), m) {
        (1, 0) => (ComponentKind::K1, vs.clone()),
        (2, 1) => (ComponentKind::K2, vs.clone()),
        (3, 2) => {
            let mid = *vs.iter().find(|&&v| deg(v) == 2).unwrap();
            let ends: Vec<Vertex> = vs.iter().copied().filter(|&v| v != mid).collect();
            (ComponentKind::P3, vec![ends[0], mid, ends[1]])
        }
        (4, 3) => {
            if let Some(&y) = vs.iter().find(|&&v| deg(v) == 3) {
                let mut order = vec![y];
                order.extend(vs.iter().copied().filter(|&v| v != y));
                (ComponentKind::K13, order)
            } else {
                let start = *vs.iter().find(|&&v| deg(v) == 1).unwrap();
                let mut order = vec![start];
                while order.len() < 4 {
                    let last = *order.last().unwrap();
                    let next = vs.iter().copied().find(|&w| g.has_edge(last, w) && !order.contains(&w));
                    match next {
                        Some(w) => order.push(w),
                        None => return unsupported(),
                    }
                }
                (ComponentKind::P4, order)
            }
        }
        _ => return unsupported(),
    };
    Ok(ClassifiedComponent { kind, order })
}

/// Edges inside a component and their colours from `{1,2,3}`.
pub fn colour_inside(c: &ClassifiedComponent) -> Vec<((Vertex, Vertex), Colour)> {
    let o = &c.order;
    match c.kind {
        ComponentKind::K1 => vec![],
        ComponentKind::K2 => vec![(norm(o[0], o[1]), 1)],
        ComponentKind::P3 | ComponentKind::P4 => (1..o.len()).map(|i| (norm(o[i - 1], o[i]), i as Colour)).collect(),
        ComponentKind::K13 => (1..4).map(|i| (norm(o[0], o[i]), i as Colour)).collect(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Frame {
    Star,
    Path,
}

fn frame(kind: ComponentKind, other: ComponentKind) -> Frame {
    match kind {
        ComponentKind::K13 => Frame::Star,
        ComponentKind::P3 | ComponentKind::P4 => Frame::Path,
        ComponentKind::K1 | ComponentKind::K2 => {
            if other == ComponentKind::K13 {
                Frame::Star
            } else {
                Frame::Path
            }
        }
    }
}

/// `(left index, right index, class)`. Star frames list `y, x1, x2, x3`;
/// path frames list the path in order. Classes `4..=7` are shared by several
/// edges; classes from 8 on are single edges.
#[rustfmt::skip]
const STAR_STAR: [(usize, usize, u8); 16] = [
    (1, 2, 4), (0, 0, 4), (2, 3, 4), (3, 1, 4),
    (0, 2, 5), (3, 0, 5),
    (1, 0, 6), (0, 3, 6),
    (2, 0, 7), (0, 1, 7),
    (1, 1, 8), (1, 3, 9), (2, 1, 10), (2, 2, 11), (3, 2, 12), (3, 3, 13),
];

#[rustfmt::skip]
const STAR_PATH: [(usize, usize, u8); 16] = [
    (0, 0, 4), (2, 1, 4),
    (0, 3, 5), (2, 2, 5),
    (1, 2, 6), (0, 1, 6), (3, 0, 6),
    (1, 3, 7), (0, 2, 7), (3, 1, 7),
    (1, 0, 8), (1, 1, 9), (2, 0, 10), (2, 3, 11), (3, 2, 12), (3, 3, 13),
];

#[rustfmt::skip]
const PATH_PATH: [(usize, usize, u8); 16] = [
    (0, 2, 4), (1, 3, 4), (2, 0, 4), (3, 1, 4),
    (0, 1, 5), (1, 2, 5), (2, 3, 5),
    (1, 0, 6), (2, 1, 6), (3, 2, 6),
    (0, 0, 8), (1, 1, 9), (2, 2, 10), (3, 3, 11), (0, 3, 12), (3, 0, 13),
];

/// Colours every edge between `left` and `right` from the palette starting at
/// `palette`, which must hold `|left|·|right|` colours.
pub fn cross_table(
    left: &ClassifiedComponent,
    right: &ClassifiedComponent,
    palette: Colour,
    palette_len: usize,
) -> Result<Vec<((Vertex, Vertex), Colour)>> {
    let need = left.order.len() * right.order.len();
    if palette_len < need {
        return domain(format!("palette of {palette_len} colours, need {need}"));
    }
    let (fl, fr) = (frame(left.kind, right.kind), frame(right.kind, left.kind));
    let entries: Vec<(usize, usize, u8)> = match (fl, fr) {
        (Frame::Star, Frame::Star) => STAR_STAR.to_vec(),
        (Frame::Star, Frame::Path) => STAR_PATH.to_vec(),
        (Frame::Path, Frame::Star) => STAR_PATH.iter().map(|&(l, r, c)| (r, l, c)).collect(),
        (Frame::Path, Frame::Path) => PATH_PATH.to_vec(),
    };
    let mut kept: Vec<(usize, usize, u8)> =
        entries.into_iter().filter(|&(l, r, _)| l < left.order.len() && r < right.order.len()).collect();
    kept.sort_unstable();
    let mut class_colour: Vec<(u8, Colour)> = Vec::new();
    let mut out = Vec::with_capacity(kept.len());
    for (l, r, class) in kept {
        let c = match class_colour.iter().find(|(k, _)| *k == class) {
            Some(&(_, c)) => c,
            None => {
                let c = palette + class_colour.len() as Colour;
                class_colour.push((class, c));
                c
            }
        };
        out.push((norm(left.order[l], right.order[r]), c));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct K4Avoidance {
    pub colouring: EdgeColouring,
    pub u_components: Vec<ClassifiedComponent>,
    pub w_components: Vec<ClassifiedComponent>,
}

fn side_components(random: &Graph, part: &[Vertex]) -> Result<Vec<ClassifiedComponent>> {
    let inner = random.induced(part);
    inner
        .component_vertex_sets()
        .into_iter()
        .map(|c| {
            let orig: Vec<Vertex> = c.iter().map(|&i| part[i as usize]).collect();
            classify(random, &orig)
        })
        .collect()
}

/// Colours `seed ∪ random` for an instance with a complete bipartite seed.
/// Random edges between the parts coincide with seed edges and need no rule.
pub fn avoid_k4(inst: &PerturbedInstance) -> Result<K4Avoidance> {
    let (u, w) = inst.parts();
    for &a in &u {
        for &b in &w {
            if !inst.seed.has_edge(a, b) {
                return domain("seed is not complete bipartite between the parts");
            }
        }
    }
    let uc = side_components(&inst.random, &u)?;
    let wc = side_components(&inst.random, &w)?;
    let mut psi = EdgeColouring::new();
    for c in uc.iter().chain(&wc) {
        for ((a, b), col) in colour_inside(c) {
            psi.set(a, b, col);
        }
    }
    let mut next: Colour = 4;
    for l in &uc {
        for r in &wc {
            let size = l.order.len() * r.order.len();
            for ((a, b), col) in cross_table(l, r, next, size)? {
                psi.set(a, b, col);
            }
            next += size as Colour;
        }
    }
    Ok(K4Avoidance { colouring: psi, u_components: uc, w_components: wc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{is_proper, rainbow_cliques};

    const KINDS: [ComponentKind; 5] =
        [ComponentKind::K1, ComponentKind::K2, ComponentKind::P3, ComponentKind::K13, ComponentKind::P4];

    fn component_edges(kind: ComponentKind, off: Vertex) -> (usize, Vec<(Vertex, Vertex)>) {
        let (n, e): (usize, Vec<(Vertex, Vertex)>) = match kind {
            ComponentKind::K1 => (1, vec![]),
            ComponentKind::K2 => (2, vec![(0, 1)]),
            ComponentKind::P3 => (3, vec![(0, 1), (1, 2)]),
            ComponentKind::K13 => (4, vec![(0, 1), (0, 2), (0, 3)]),
            ComponentKind::P4 => (4, vec![(0, 1), (1, 2), (2, 3)]),
        };
        (n, e.into_iter().map(|(a, b)| (a + off, b + off)).collect())
    }

    #[test]
    fn every_pair_type_is_proper_and_k4_free() {
        for &a in &KINDS {
            for &b in &KINDS {
                let (na, ea) = component_edges(a, 0);
                let (nb, eb) = component_edges(b, na as Vertex);
                let n = na + nb;
                let mut edges = ea.clone();
                edges.extend(eb.iter().copied());
                for x in 0..na as Vertex {
                    for y in na as Vertex..n as Vertex {
                        edges.push((x, y));
                    }
                }
                let g = Graph::from_edges(n, edges).unwrap();
                let ga = Graph::from_edges(n, ea).unwrap();
                let gb = Graph::from_edges(n, eb).unwrap();
                let l = classify(&ga, &(0..na as Vertex).collect::<Vec<_>>()).unwrap();
                let r = classify(&gb, &(na as Vertex..n as Vertex).collect::<Vec<_>>()).unwrap();
                assert_eq!((l.kind, r.kind), (a, b));
                let mut psi = EdgeColouring::new();
                for ((x, y), c) in colour_inside(&l).into_iter().chain(colour_inside(&r)) {
                    psi.set(x, y, c);
                }
                let cross = cross_table(&l, &r, 4, na * nb).unwrap();
                assert_eq!(cross.len(), na * nb);
                let distinct: std::collections::HashSet<_> = cross.iter().map(|x| x.1).collect();
                assert!(distinct.iter().all(|&c| (4..4 + (na * nb) as Colour).contains(&c)));
                for ((x, y), c) in cross {
                    psi.set(x, y, c);
                }
                assert!(psi.is_total_on(&g));
                assert!(is_proper(&g, &psi).unwrap(), "{a:?} {b:?}");
                assert!(rainbow_cliques(&g, &psi, 4).is_empty(), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn rejects_triangles_and_large_trees() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(classify(&tri, &[0, 1, 2]), Err(LabError::StructureUnsupported(_))));
        let p5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(classify(&p5, &[0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn small_palette_rejected() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let c = classify(&g, &[0, 1]).unwrap();
        assert!(cross_table(&c, &c, 4, 3).is_err());
    }
}
