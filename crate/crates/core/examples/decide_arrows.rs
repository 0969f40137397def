//! Exhaustively decides `G → H` (every proper colouring of `G` has a rainbow
//! `H`) for a few small pairs and prints the avoiding witness when there is one.
//!
//! ```text
//! cargo run --example decide_arrows
//! ```

use rainbow_lab::decide::{decide_arrows, Outcome};
use rainbow_lab::graph::NamedGraph;

fn main() -> rainbow_lab::Result<()> {
    let pairs = [("K4", "K4"), ("K5", "K4"), ("r7", "K4"), ("hatk(3,4)", "K5"), ("K6", "K4")];
    for (g, h) in pairs {
        let gg = g.parse::<NamedGraph>()?.build()?;
        let hh = h.parse::<NamedGraph>()?.build()?;
        let v = decide_arrows(&gg, &hh, 1 << 32)?;
        println!("{g:>10} -> {h:<3} {:?} after {} nodes", v.outcome, v.nodes);
        if v.outcome == Outcome::Witness {
            let w = v.witness.expect("witness outcome carries a colouring");
            let mut edges: Vec<_> = w.iter().collect();
            edges.sort_unstable();
            let shown: Vec<String> = edges.iter().map(|((a, b), c)| format!("{a}{b}:{c}")).collect();
            println!("{:>16}{}", "", shown.join(" "));
        }
    }
    Ok(())
}
