//! Runs every lemma extractor on adversarial colourings of its host graph and
//! reports how many trials produced the promised structure.
//!
//! ```text
//! cargo run --example certify_lemmas -- 2000
//! ```

use rainbow_lab::lemmas::{certify, Lemma};

fn main() -> rainbow_lab::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    for lemma in Lemma::ALL {
        let rep = certify(lemma, trials, 0)?;
        println!("{lemma:<20} {}/{} passed, {} counterexamples", rep.passed, rep.trials, rep.counterexamples.len());
    }
    Ok(())
}
