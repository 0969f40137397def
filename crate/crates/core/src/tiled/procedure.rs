//! The partial colouring procedure run alongside a generating sequence.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::colouring::{Colour, EdgeColouring, Palette};
use crate::error::Result;
use crate::graph::{norm, Edge, Graph, Vertex};

use super::{GenStep, GeneratingSequence};

pub type Triangle = [Vertex; 3];

/// Knobs for one run of the procedure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Strategy {
    /// Which of the three perfect matchings of a `K4` base gets the shared
    /// colour.
    pub base_matching: usize,
    /// Use `xw, yz` rather than `xz, yw` in standard steps when both are free.
    pub alt_standard: bool,
    /// Kill the new `K4` of an edge-step by pairing an added edge with its
    /// opposite edge.
    pub colour_edge_steps: bool,
    /// Edges kept uncoloured until the edge-step that completes their `K4`.
    pub reserve: BTreeSet<Edge>,
    /// Triangles whose vertex-steps are deliberately left uncoloured.
    pub skip: BTreeSet<Triangle>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialColouringState {
    pub colouring: EdgeColouring,
    /// Vertex-steps attached to each triangle, `k(T)`.
    pub vertex_steps: BTreeMap<Triangle, usize>,
    /// Colours saturating each triangle at the end of the run.
    pub saturation: BTreeMap<Triangle, usize>,
    /// Largest `saturation(T) − k(T) − 1` seen after any step, over all
    /// triangles present at that moment.
    pub peak_saturation_excess: i64,
    /// Vertex-steps that coloured nothing, in step order.
    pub problematic: Vec<Triangle>,
    /// Indices of steps whose new `K4` got no repeated colour.
    pub uncoloured_steps: Vec<usize>,
    pub next_colour: Colour,
}

pub(crate) fn tri(a: Vertex, b: Vertex, c: Vertex) -> Triangle {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

struct Run<'a> {
    psi: EdgeColouring,
    at: Vec<HashSet<Colour>>,
    palette: Palette,
    strategy: &'a Strategy,
}

impl Run<'_> {
    fn colour(&mut self, u: Vertex, v: Vertex, c: Colour) {
        self.psi.set(u, v, c);
        self.at[u as usize].insert(c);
        self.at[v as usize].insert(c);
    }

    fn pair_new(&mut self, a: Edge, b: Edge) {
        let c = self.palette.fresh();
        self.colour(a.0, a.1, c);
        self.colour(b.0, b.1, c);
    }

    fn free(&self, e: Edge) -> bool {
        self.psi.get(e.0, e.1).is_none() && !self.strategy.reserve.contains(&norm(e.0, e.1))
    }

    /// Rules (i) and (ii) for a new vertex `x` on triangle `t`.
    fn vertex_step(&mut self, t: Triangle, x: Vertex) -> bool {
        let sides = [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])];
        for &(a, b, o) in &sides {
            if let Some(chi) = self.psi.get(a, b) {
                if !self.at[o as usize].contains(&chi) {
                    self.colour(x, o, chi);
                    return true;
                }
            }
        }
        for &(a, b, o) in &sides {
            if self.free((a, b)) {
                self.pair_new(norm(a, b), norm(x, o));
                return true;
            }
        }
        false
    }

    fn edge_step(&mut self, quad: [Vertex; 4], added: &[Edge]) -> bool {
        let opposite = |(a, b): Edge| -> Edge {
            let rest: Vec<Vertex> = quad.iter().copied().filter(|&v| v != a && v != b).collect();
            norm(rest[0], rest[1])
        };
        for &e in added {
            let o = opposite(e);
            if let Some(chi) = self.psi.get(o.0, o.1) {
                if !self.at[e.0 as usize].contains(&chi) && !self.at[e.1 as usize].contains(&chi) {
                    self.colour(e.0, e.1, chi);
                    return true;
                }
            }
        }
        for &e in added {
            let o = opposite(e);
            if self.psi.get(o.0, o.1).is_none() {
                self.pair_new(e, o);
                return true;
            }
        }
        false
    }
}

/// Colours saturating `t` under `psi`: some side of `t` has that colour and
/// so does an edge at the opposite vertex.
pub fn saturating_colours(psi: &EdgeColouring, at: &[HashSet<Colour>], t: Triangle) -> usize {
    let sides = [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])];
    let mut cs: Vec<Colour> =
        sides.iter().filter_map(|&(a, b, o)| psi.get(a, b).filter(|c| at[o as usize].contains(c))).collect();
    cs.sort_unstable();
    cs.dedup();
    cs.len()
}

/// Replays `seq` on `n` vertices, colouring as it goes, with colours drawn
/// from `first_colour` upwards.
pub fn partial_colouring(
    seq: &GeneratingSequence,
    n: usize,
    strategy: &Strategy,
    first_colour: Colour,
) -> Result<PartialColouringState> {
    let graphs = seq.replay(n)?;
    let mut run = Run {
        psi: EdgeColouring::new(),
        at: vec![HashSet::new(); n],
        palette: Palette::starting_at(first_colour),
        strategy,
    };
    let b = &seq.base;
    if b.len() == 5 {
        let c0 = run.palette.block(5);
        for i in 0..5 {
            for j in i + 1..5 {
                run.colour(b[i], b[j], c0 + ((i + j) % 5) as Colour);
            }
        }
    } else {
        let m = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]][strategy.base_matching % 3];
        run.pair_new(norm(b[m[0].0], b[m[0].1]), norm(b[m[1].0], b[m[1].1]));
    }
    let mut vertex_steps: BTreeMap<Triangle, usize> = BTreeMap::new();
    let mut problematic = Vec::new();
    let mut uncoloured_steps = Vec::new();
    let mut peak = i64::MIN;
    let mut measure = |run: &Run, g: &Graph, ks: &BTreeMap<Triangle, usize>| {
        for t in g.triangles() {
            let s = saturating_colours(&run.psi, &run.at, t) as i64;
            let k = ks.get(&t).copied().unwrap_or(0) as i64;
            peak = peak.max(s - k - 1);
        }
    };
    measure(&run, &graphs[0], &vertex_steps);
    for (i, step) in seq.steps.iter().enumerate() {
        let ok = match step {
            GenStep::Standard { z, w, x, y } => {
                let a = [norm(*x, *z), norm(*y, *w)];
                let bb = [norm(*x, *w), norm(*y, *z)];
                let (first, second) = if strategy.alt_standard { (bb, a) } else { (a, bb) };
                let pick = if first.iter().all(|&e| run.free(e)) { first } else { second };
                run.pair_new(pick[0], pick[1]);
                true
            }
            GenStep::Vertex { y, z, w, x, .. } => {
                let t = tri(*y, *z, *w);
                *vertex_steps.entry(t).or_default() += 1;
                let ok = !strategy.skip.contains(&t) && run.vertex_step(t, *x);
                if !ok {
                    problematic.push(t);
                }
                ok
            }
            GenStep::Edge { quad, added } => strategy.colour_edge_steps && run.edge_step(*quad, added),
        };
        if !ok {
            uncoloured_steps.push(i);
        }
        measure(&run, &graphs[i + 1], &vertex_steps);
    }
    let last = graphs.last().unwrap();
    let saturation = last.triangles().into_iter().map(|t| (t, saturating_colours(&run.psi, &run.at, t))).collect();
    Ok(PartialColouringState {
        next_colour: run.palette.peek(),
        colouring: run.psi,
        vertex_steps,
        saturation,
        peak_saturation_excess: peak,
        problematic,
        uncoloured_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{is_proper, rainbow_cliques};
    use crate::graph::complete;

    #[test]
    fn k5_base_has_no_rainbow_k4() {
        let seq = GeneratingSequence { base: vec![0, 1, 2, 3, 4], steps: vec![] };
        let st = partial_colouring(&seq, 5, &Strategy::default(), 0).unwrap();
        let k5 = complete(5);
        assert!(st.colouring.is_total_on(&k5));
        assert!(is_proper(&k5, &st.colouring).unwrap());
        assert!(rainbow_cliques(&k5, &st.colouring, 4).is_empty());
        assert_eq!(st.colouring.colours().len(), 5);
    }

    #[test]
    fn standard_steps_never_fail() {
        let seq = GeneratingSequence {
            base: vec![0, 1, 2, 3],
            steps: vec![GenStep::Standard { z: 0, w: 1, x: 4, y: 5 }, GenStep::Standard { z: 4, w: 5, x: 6, y: 7 }],
        };
        let st = partial_colouring(&seq, 8, &Strategy::default(), 0).unwrap();
        assert!(st.problematic.is_empty());
        assert!(st.uncoloured_steps.is_empty());
        assert!(st.peak_saturation_excess <= 0);
    }

    #[test]
    fn third_vertex_step_on_a_triangle_can_fail() {
        let steps = (4..8).map(|x| GenStep::Vertex { y: 0, z: 1, w: 2, x, missing: vec![] }).collect();
        let seq = GeneratingSequence { base: vec![0, 1, 2, 3], steps };
        let st = partial_colouring(&seq, 8, &Strategy::default(), 0).unwrap();
        assert_eq!(st.vertex_steps[&[0, 1, 2]], 4);
        assert!(!st.problematic.is_empty());
        assert!(st.uncoloured_steps.iter().all(|&i| i >= 2));
        assert!(st.peak_saturation_excess <= 0);
    }
}
