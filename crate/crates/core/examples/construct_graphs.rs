//! Builds the named graphs and prints their basic invariants.
//!
//! ```text
//! cargo run --example construct_graphs
//! ```

use rainbow_lab::graph::{densities, ratio_string, NamedGraph};

fn main() -> rainbow_lab::Result<()> {
    for name in ["K3", "star(4)", "r7", "t(10)", "hatk(3,4)", "kdelta(3,4)"] {
        let g = name.parse::<NamedGraph>()?.build()?;
        let d = densities(&g)?;
        println!(
            "{name:>12}  v={:<3} e={:<3} triangles={:<3} m={} m2={}",
            g.n(),
            g.m(),
            g.triangles().len(),
            ratio_string(&d.m1),
            d.m2.as_ref().map(ratio_string).unwrap_or_else(|| "-".into()),
        );
    }

    let g = "t(3)".parse::<NamedGraph>()?.build()?;
    print!("\nedge list of t(3):\n{}", g.to_edge_list());
    Ok(())
}
