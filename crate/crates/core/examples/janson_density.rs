//! Janson bounds for a few patterns and the exact density condition at the
//! exponents that matter for them.

use rainbow_lab::emergence::{density_condition, janson_bound, Margin};
use rainbow_lab::graph::{ratio_string, NamedGraph, Rational};

fn main() -> rainbow_lab::Result<()> {
    for (name, n, x) in [("K3", 1000, 0.9), ("K4", 1000, 0.6), ("hatk(3,4)", 400, 0.45)] {
        let h = name.parse::<NamedGraph>()?.build()?;
        let p = (n as f64).powf(-x);
        let j = janson_bound(&h, n, p)?;
        println!(
            "{name:>10} n={n} p=n^-{x}: lambda={:.3e} delta={:.3e} P(no copy)<={:.3e}",
            j.lambda, j.delta_upper, j.nonexistence_bound
        );
    }
    println!();
    for (name, (a, b)) in [("hatk(3,4)", (7, 15)), ("r7", (1, 2)), ("t(10)", (1, 2)), ("kdelta(25,49)", (7, 15))] {
        let h = name.parse::<NamedGraph>()?.build()?;
        let rep = density_condition(&h, Rational::new(a, b), Margin::Constant)?;
        println!(
            "{name:>14} x={a}/{b}: min v-xe={} core={} degeneracy={} holds={}",
            rep.min_value.as_ref().map(ratio_string).unwrap_or_else(|| "via degeneracy".into()),
            rep.core_size,
            rep.degeneracy,
            rep.holds,
        );
    }
    Ok(())
}
