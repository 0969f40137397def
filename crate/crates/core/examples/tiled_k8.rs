//! Two views of the `K8` machinery: a single `K4`-tiled graph coloured with a
//! cover certificate, then a perturbed instance at `p = n^-0.45`.
//!
//! ```text
//! cargo run --example tiled_k8
//! ```

use rainbow_lab::emergence::{sample_perturbed, trial_rng, verify_structure, SampleMode, SeedSpec};
use rainbow_lab::tiled::assemble::{avoid_k8_perturbed, within_parts};
use rainbow_lab::tiled::corpus::{random_tiled, CorpusConfig};
use rainbow_lab::tiled::{colour_tiled, phi};

fn main() -> rainbow_lab::Result<()> {
    let mut rng = trial_rng(3, 0);
    for _ in 0..5 {
        let (h, _) = random_tiled(&mut rng, &CorpusConfig::default());
        let tc = colour_tiled(&h)?;
        println!(
            "v={:<2} e={:<2} phi={} rainbow K4s={} certificate={:?}",
            h.n(),
            h.m(),
            phi(&h),
            tc.rainbow_k4s.len(),
            tc.certificate,
        );
    }

    let n = 120;
    let p = (n as f64).powf(-0.45);
    let (inst, report) = (1..)
        .map(|t| {
            let inst =
                sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut trial_rng(3, t))?;
            let report = verify_structure(&within_parts(&inst));
            Ok((inst, report))
        })
        .find(|r: &rainbow_lab::Result<_>| r.as_ref().map_or(true, |(_, rep)| rep.components.len() >= 2))
        .unwrap()?;
    println!("\nn={n}: {} K4-components, structure ok={}", report.components.len(), report.ok());
    let k8 = avoid_k8_perturbed(&inst)?;
    println!(
        "red edges={} red covers every rainbow K4={} rainbow K8s={}",
        k8.sparse.red.len(),
        k8.sparse.red_covers(),
        k8.rainbow_k8,
    );
    Ok(())
}
