//! The density condition behind the Janson-type existence statements:
//! `min v(J) − x·e(J)` over induced subgraphs `J` with at least one edge.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::{ser_ratio, subset_edge_counts, Graph, Rational, Vertex, DENSITY_MAX_VERTICES};

/// How fast `n^{v(J)} p^{e(J)}` has to grow for every `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Margin {
    /// `ω(1)`: the minimum must be at least 0.
    Constant,
    /// `ω(n)`: the minimum must be at least 1.
    Linear,
}

impl std::str::FromStr for Margin {
    type Err = crate::LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "constant" | "omega1" => Ok(Margin::Constant),
            "n" | "linear" | "omegan" => Ok(Margin::Linear),
            _ => Err(crate::LabError::Parse(format!("unknown margin {s:?}, expected 1 or n"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityConditionReport {
    #[serde(serialize_with = "ser_ratio")]
    pub x: Rational,
    pub margin: Margin,
    /// Exact minimum, when the core was small enough to scan.
    #[serde(serialize_with = "crate::graph::ser_opt_ratio")]
    pub min_value: Option<Rational>,
    /// Vertices of a minimising induced subgraph.
    pub minimiser: Vec<Vertex>,
    /// Size of the `⌈1/x⌉`-core that was scanned.
    pub core_size: usize,
    pub degeneracy: usize,
    /// `degeneracy · x ≤ 1`, which forces every value to be at least 1.
    pub degeneracy_certificate: bool,
    /// The minimum is at least 0.
    pub omega_one: bool,
    /// The minimum is at least 1.
    pub omega_n: bool,
    /// The condition for the requested margin.
    pub holds: bool,
}

/// Degeneracy of `h` and the vertices of its `k`-core.
pub fn degeneracy_and_core(h: &Graph, k: usize) -> (usize, Vec<Vertex>) {
    let n = h.n();
    let mut deg: Vec<usize> = (0..n).map(|v| h.degree(v as Vertex)).collect();
    let mut alive = vec![true; n];
    let mut d = 0;
    let mut core = None;
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| deg[v]).unwrap();
        if core.is_none() && deg[v] >= k {
            core = Some((0..n as Vertex).filter(|&u| alive[u as usize]).collect());
        }
        d = d.max(deg[v]);
        alive[v] = false;
        for w in h.neighbours(v as Vertex) {
            if alive[w as usize] {
                deg[w as usize] -= 1;
            }
        }
    }
    (d, core.unwrap_or_default())
}

/// Evaluates the density condition for exponent `x > 0`.
///
/// Deleting a vertex of degree below `1/x` never increases `v − x·e`, so a
/// minimiser is either a single edge or lies in the `⌈1/x⌉`-core, which is
/// scanned exhaustively.
pub fn density_condition(h: &Graph, x: Rational, margin: Margin) -> Result<DensityConditionReport> {
    if !x.is_positive() {
        return domain("exponent must be positive");
    }
    if h.m() == 0 {
        return domain("graph has no edges");
    }
    let k = (Rational::one() / x).ceil().to_integer() as usize;
    let (degeneracy, core) = degeneracy_and_core(h, k);
    let degeneracy_certificate = Rational::from_integer(degeneracy as i64) * x <= Rational::one();
    let (a, b) = (*x.numer(), *x.denom());
    // Scaled values b·v − a·e.
    let edge = h.edges()[0];
    let mut best = (2 * b - a, vec![edge.0, edge.1]);
    let mut scanned = true;
    if !core.is_empty() {
        if core.len() > DENSITY_MAX_VERTICES {
            scanned = false;
        } else {
            let sub = h.induced(&core);
            let e = subset_edge_counts(&sub);
            for (mask, &em) in e.iter().enumerate() {
                if em == 0 {
                    continue;
                }
                let val = b * mask.count_ones() as i64 - a * em as i64;
                if val < best.0 {
                    best = (val, (0..core.len()).filter(|i| mask >> i & 1 == 1).map(|i| core[i]).collect());
                }
            }
        }
    }
    if !scanned && !degeneracy_certificate {
        return domain(format!(
            "core of {} vertices is too large to scan and degeneracy gives no certificate",
            core.len()
        ));
    }
    let min_value = scanned.then(|| Rational::new(best.0, b));
    let lower = min_value.unwrap_or_else(Rational::one);
    let omega_one = !lower.is_negative();
    let omega_n = lower >= Rational::one() || degeneracy_certificate;
    Ok(DensityConditionReport {
        x,
        margin,
        min_value,
        minimiser: if scanned { best.1 } else { vec![] },
        core_size: core.len(),
        degeneracy,
        degeneracy_certificate,
        omega_one,
        omega_n,
        holds: match margin {
            Margin::Constant => omega_one,
            Margin::Linear => omega_n,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NamedGraph;
    use num_traits::Zero;

    fn ng(s: &str) -> Graph {
        s.parse::<NamedGraph>().unwrap().build().unwrap()
    }

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    /// Minimum of `b·v − a·e` over all vertex subsets with an edge.
    fn oracle(h: &Graph, x: Rational) -> Rational {
        let n = h.n();
        let mut best: Option<i64> = None;
        for mask in 1u64..(1 << n) {
            let e = h.edges().iter().filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1).count() as i64;
            if e == 0 {
                continue;
            }
            let val = x.denom() * mask.count_ones() as i64 - x.numer() * e;
            best = Some(best.map_or(val, |b| b.min(val)));
        }
        Rational::new(best.unwrap(), *x.denom())
    }

    #[test]
    fn small_graphs_match_oracle() {
        for (g, x) in [
            ("K3", r(1, 1)),
            ("star(4)", r(1, 1)),
            ("r7", r(2, 3)),
            ("hatk(3,4)", r(7, 15)),
            ("t(5)", r(2, 3)),
            ("kdelta(2,3)", r(7, 15)),
        ] {
            let h = ng(g);
            let rep = density_condition(&h, x, Margin::Constant).unwrap();
            assert_eq!(rep.min_value, Some(oracle(&h, x)), "{g}");
        }
    }

    #[test]
    fn named_conclusions() {
        assert!(density_condition(&ng("r7"), r(2, 3), Margin::Constant).unwrap().min_value.unwrap() > Rational::zero());
        assert!(density_condition(&ng("hatk(3,4)"), r(7, 15), Margin::Constant).unwrap().holds);
        assert!(density_condition(&ng("t(10)"), r(2, 3), Margin::Linear).unwrap().holds);
        let kd = density_condition(&ng("kdelta(25,49)"), r(7, 15), Margin::Linear).unwrap();
        assert!(kd.holds && kd.degeneracy_certificate && kd.core_size == 0);
        assert_eq!(kd.min_value, Some(r(23, 15)));
    }
}
