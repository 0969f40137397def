//! Colours `K_{n/2,n/2} ∪ G(n, n^-0.7)` without a rainbow `K6` and shows the
//! matching certificate behind each triangle component.
//!
//! ```text
//! cargo run --example avoid_k6 -- 300
//! ```

use rainbow_lab::avoid_k6::avoid_k6;
use rainbow_lab::colouring::{is_proper, rainbow_cliques};
use rainbow_lab::emergence::{sample_perturbed, trial_rng, SampleMode, SeedSpec};

fn main() -> rainbow_lab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let p = (n as f64).powf(-0.7);
    let inst = sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut trial_rng(5, 0))?;

    let av = avoid_k6(&inst)?;
    for cert in &av.certificates {
        println!("component of {:>2} vertices via {:?}", cert.vertices.len(), cert.method);
    }
    let red = av.colouring.iter().filter(|&(_, c)| c == av.red).count();
    let g = inst.union();
    println!(
        "red edges={red} proper={} rainbow K6s={}",
        is_proper(&g, &av.colouring)?,
        rainbow_cliques(&g, &av.colouring, 6).len(),
    );
    Ok(())
}
