//! Acceptance suite: one PASS/FAIL line per criterion, at full trial counts.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rainbow_lab::verify::{self, Budget, CriterionReport};

const SEED: u64 = 42;

fn line(r: &CriterionReport, extra: &str) -> bool {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    println!("{verdict} criterion {}: {} {}{extra}", r.id, r.title, r.details);
    for f in &r.failures {
        println!("    {f}");
    }
    r.pass
}

/// Runs `verify-all` through the binary and returns the report bytes.
fn verify_all_bytes(threads: usize, dir: &std::path::Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_rainbow-lab"))
        .args([
            "--threads",
            &threads.to_string(),
            "verify-all",
            "--seed",
            &SEED.to_string(),
            "--budget",
            "quick",
            "--out",
        ])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    std::fs::read(dir.join("verify-all.json")).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let c = Budget::Full.counts();
    let archive = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("lemma-counterexamples");
    let mut all = true;

    let start = Instant::now();
    let mut r = verify::check_decisions();
    let took = start.elapsed();
    if took >= Duration::from_secs(300) {
        r.pass = false;
        r.failures.push(format!("took {took:?}, limit 5 min"));
    }
    all &= line(&r, "");
    all &= line(&verify::check_avoid_k4(SEED, c.k4_per_cell), "");
    all &= line(&verify::check_avoid_k6(SEED, c.k6_per_n), "");
    all &= line(&verify::check_corpus(SEED, c.corpus, c.corpus_resolve), "");
    all &= line(&verify::check_avoid_k8(SEED, c.k8_per_n), "");
    all &= line(
        &verify::check_lemmas(SEED, c.lemma_trials, Some(&archive)),
        &format!(" archive dir {}", archive.display()),
    );
    all &= line(&verify::check_densities(), "");

    let tmp = tempfile::tempdir().expect("temp dir");
    let (a, b) = (tmp.path().join("threads-1"), tmp.path().join("threads-2"));
    let pass8 = match (verify_all_bytes(1, &a), verify_all_bytes(2, &b)) {
        (Ok(x), Ok(y)) if x == y => {
            println!(
                "PASS criterion 8: verify-all --seed {SEED} byte-identical under 1 and 2 threads ({} bytes)",
                x.len()
            );
            true
        }
        (Ok(_), Ok(_)) => {
            println!("FAIL criterion 8: verify-all outputs differ between 1 and 2 threads");
            false
        }
        (Err(e), _) | (_, Err(e)) => {
            println!("FAIL criterion 8: verify-all did not pass: {e}");
            false
        }
    };
    all &= pass8;

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
