//! Runs the whole acceptance battery at the quick budget and prints one line
//! per criterion.
//!
//! ```text
//! cargo run --release --example verify_all
//! ```

use rainbow_lab::verify::{verify_all, Budget};

fn main() {
    let report = verify_all(42, Budget::Quick, None);
    for c in &report.criteria {
        println!("{} criterion {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.title);
        for f in &c.failures {
            println!("    {f}");
        }
    }
    std::process::exit(if report.pass { 0 } else { 1 });
}
