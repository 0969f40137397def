//! Avoider success rates for `K4` across a small `(n, p)` grid, written as CSV.

use rainbow_lab::emergence::{rows_to_csv, threshold_scan, PExpr, ScanConfig, ScanMode};

fn main() -> rainbow_lab::Result<()> {
    let cfg = ScanConfig {
        ell: 4,
        ns: vec![50, 100, 200],
        p_grid: ["0.3n^-1.25", "n^-1.25", "n^-1", "n^-0.8"]
            .iter()
            .map(|s| s.parse::<PExpr>())
            .collect::<rainbow_lab::Result<_>>()?,
        trials: 50,
        mode: ScanMode::AvoiderSuccess,
        master_seed: 1,
        budget: 1_000_000,
        timing: false,
    };
    let rows = threshold_scan(&cfg)?;
    print!("{}", rows_to_csv(&rows));
    Ok(())
}
