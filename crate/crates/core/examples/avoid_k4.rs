//! Samples `K_{n/2,n/2} ∪ G(n,p)` below the `K4` threshold, colours it without
//! a rainbow `K4`, and checks the result.
//!
//! ```text
//! cargo run --example avoid_k4 -- 200 0.5
//! ```

use rainbow_lab::avoid_k4::{avoid_k4, ComponentKind};
use rainbow_lab::colouring::{is_proper, rainbow_cliques};
use rainbow_lab::emergence::{sample_perturbed, trial_rng, SampleMode, SeedSpec};

fn main() -> rainbow_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let c: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let p = c * (n as f64).powf(-1.25);

    let inst = sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut trial_rng(7, 0))?;
    println!("n={n} p={p:.3e} random edges={}", inst.random.m());

    let av = avoid_k4(&inst)?;
    for (side, comps) in [("U", &av.u_components), ("W", &av.w_components)] {
        for comp in comps.iter().filter(|c| c.kind != ComponentKind::K1) {
            println!("  {side}: {:?} on {:?}", comp.kind, comp.order);
        }
    }

    let g = inst.union();
    println!(
        "colours={} proper={} rainbow K4s={}",
        av.colouring.colours().len(),
        is_proper(&g, &av.colouring)?,
        rainbow_cliques(&g, &av.colouring, 4).len(),
    );
    Ok(())
}
