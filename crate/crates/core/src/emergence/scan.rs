//! Monte Carlo scans over `(n, p)` grids.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colouring::{is_proper, rainbow_cliques, EdgeColouring};
use crate::decide::{decide_arrows, Outcome};
use crate::error::{domain, LabError, Result};
use crate::graph::{complete, for_each_embedding, Graph};

use super::sampling::{sample_gnp, sample_perturbed, trial_rng, SampleMode, SeedSpec};

/// `p = c · n^(−a)`, written `c*n^-a` with `a` a decimal or a fraction.
/// A bare number is a constant probability.
#[derive(Clone, Debug, PartialEq)]
pub struct PExpr {
    pub coefficient: f64,
    pub exponent: f64,
    text: String,
}

impl PExpr {
    pub fn constant(p: f64) -> Self {
        PExpr { coefficient: p, exponent: 0.0, text: p.to_string() }
    }

    pub fn power(coefficient: f64, exponent: f64) -> Self {
        PExpr { coefficient, exponent, text: format!("{coefficient}*n^-{exponent}") }
    }

    pub fn at(&self, n: usize) -> f64 {
        self.coefficient * (n as f64).powf(-self.exponent)
    }
}

impl fmt::Display for PExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn number(s: &str) -> Result<f64> {
    let bad = || LabError::Parse(format!("bad number {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => Ok(a.trim().parse::<f64>().map_err(|_| bad())? / b.trim().parse::<f64>().map_err(|_| bad())?),
        None => s.trim().parse().map_err(|_| bad()),
    }
}

impl FromStr for PExpr {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (coef, rest) = match t.find('n') {
            None => return Ok(PExpr { text: t.clone(), ..PExpr::constant(number(&t)?) }),
            Some(0) => ("1", &t[..]),
            Some(i) => (t[..i].strip_suffix('*').unwrap_or(&t[..i]), &t[i..]),
        };
        let exp = rest.strip_prefix("n^").ok_or_else(|| LabError::Parse(format!("expected n^-a in {s:?}")))?;
        let exp = exp.trim_start_matches('(').trim_end_matches(')');
        let exponent = match exp.strip_prefix('-') {
            Some(a) => number(a.trim_start_matches('(').trim_end_matches(')'))?,
            None => -number(exp)?,
        };
        Ok(PExpr { coefficient: number(coef)?, exponent, text: t })
    }
}

impl Serialize for PExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for PExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// The avoider for `K_ℓ` succeeds on `K_{n/2,n/2} ∪ G(n,p)` and its
    /// output validates.
    AvoiderSuccess,
    /// `G(n, p)` contains `K_⌈ℓ/2⌉`.
    Containment,
    /// Every proper colouring of `K_{n/2,n/2} ∪ G(n,p)` has a rainbow `K_ℓ`,
    /// decided exhaustively.
    DeciderOnTiny,
}

impl ScanMode {
    pub fn name(self) -> &'static str {
        match self {
            ScanMode::AvoiderSuccess => "avoider-success",
            ScanMode::Containment => "containment",
            ScanMode::DeciderOnTiny => "decider-on-tiny",
        }
    }
}

impl FromStr for ScanMode {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avoider-success" | "avoider-success-rate" | "avoider" => Ok(ScanMode::AvoiderSuccess),
            "containment" | "containment-rate" => Ok(ScanMode::Containment),
            "decider-on-tiny" | "decider" => Ok(ScanMode::DeciderOnTiny),
            _ => Err(LabError::Parse(format!("unknown scan mode {s:?}"))),
        }
    }
}

fn default_budget() -> u64 {
    1_000_000
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanConfig {
    pub ell: usize,
    pub ns: Vec<usize>,
    pub p_grid: Vec<PExpr>,
    pub trials: usize,
    pub mode: ScanMode,
    #[serde(default)]
    pub master_seed: u64,
    /// Node budget per decider call.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Record wall-clock time per row; off for byte-stable output.
    #[serde(default = "default_true")]
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub p: f64,
    pub p_expr: PExpr,
    pub trials: usize,
    pub successes: usize,
    /// Trials where an avoider returned an output that failed validation.
    pub invalid: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mode: ScanMode,
    pub elapsed_ms: u64,
}

/// 95% Wilson score interval.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let ph = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Trial {
    Success,
    Failure,
    Invalid,
}

fn validated(g: &Graph, psi: &EdgeColouring, ell: usize) -> Result<Trial> {
    let ok = psi.is_total_on(g) && is_proper(g, psi)? && rainbow_cliques(g, psi, ell).is_empty();
    Ok(if ok { Trial::Success } else { Trial::Invalid })
}

fn contains_clique(g: &Graph, r: usize) -> bool {
    let mut found = false;
    for_each_embedding(g, &complete(r), |_| {
        found = true;
        false
    });
    found
}

fn run_trial(cfg: &ScanConfig, n: usize, p: f64, master: u64, t: u64) -> Result<Trial> {
    let mut rng = trial_rng(master, t);
    match cfg.mode {
        ScanMode::Containment => {
            let g = sample_gnp(n, p, &mut rng)?;
            Ok(if contains_clique(&g, cfg.ell.div_ceil(2)) { Trial::Success } else { Trial::Failure })
        }
        ScanMode::DeciderOnTiny => {
            let inst = sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut rng)?;
            let v = decide_arrows(&inst.union(), &complete(cfg.ell), cfg.budget)?;
            Ok(if v.outcome == Outcome::Arrows { Trial::Success } else { Trial::Failure })
        }
        ScanMode::AvoiderSuccess => {
            let inst = sample_perturbed(&SeedSpec::BalancedBipartite, n, p, SampleMode::AllPairs, &mut rng)?;
            let union = inst.union();
            let out = match cfg.ell {
                4 => crate::avoid_k4::avoid_k4(&inst).map(|a| a.colouring),
                6 => crate::avoid_k6::avoid_k6(&inst).map(|a| a.colouring),
                8 => crate::tiled::avoid_k8_perturbed(&inst).map(|a| a.colouring),
                _ => unreachable!("checked in threshold_scan"),
            };
            match out {
                Ok(psi) => validated(&union, &psi, cfg.ell),
                Err(LabError::Domain(msg)) => Err(LabError::Domain(msg)),
                Err(_) => Ok(Trial::Failure),
            }
        }
    }
}

/// Runs every `(n, p)` cell of the grid. Trial `t` of row `r` draws from
/// stream `t` of master seed `master_seed + r`, so rows are reproducible
/// under any thread count.
pub fn threshold_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    match cfg.mode {
        ScanMode::AvoiderSuccess if ![4, 6, 8].contains(&cfg.ell) => {
            return domain(format!("no avoider for ell = {}, expected 4, 6 or 8", cfg.ell));
        }
        ScanMode::DeciderOnTiny if cfg.ns.iter().any(|&n| n > 12) => {
            return domain("decider-on-tiny takes n ≤ 12");
        }
        _ if cfg.ell < 2 => return domain("ell must be at least 2"),
        _ => {}
    }
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        for pe in &cfg.p_grid {
            let p = pe.at(n);
            if !(0.0..=1.0).contains(&p) {
                return domain(format!("{pe} gives p = {p} at n = {n}"));
            }
            let master = cfg.master_seed.wrapping_add(rows.len() as u64);
            let start = Instant::now();
            let outcomes = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(cfg, n, p, master, t))
                .collect::<Result<Vec<Trial>>>()?;
            let successes = outcomes.iter().filter(|&&o| o == Trial::Success).count();
            let invalid = outcomes.iter().filter(|&&o| o == Trial::Invalid).count();
            let (ci_low, ci_high) = wilson_interval(successes, cfg.trials);
            rows.push(ScanRow {
                n,
                p,
                p_expr: pe.clone(),
                trials: cfg.trials,
                successes,
                invalid,
                rate: if cfg.trials == 0 { 0.0 } else { successes as f64 / cfg.trials as f64 },
                ci_low,
                ci_high,
                mode: cfg.mode,
                elapsed_ms: if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 },
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "n,p,trials,successes,rate,ci_low,ci_high,mode,elapsed_ms";

pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6e},{},{},{:.6},{:.6},{:.6},{},{}",
            r.n,
            r.p,
            r.trials,
            r.successes,
            r.rate,
            r.ci_low,
            r.ci_high,
            r.mode.name(),
            r.elapsed_ms
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ell: usize, ns: Vec<usize>, ps: &[&str], trials: usize, mode: ScanMode) -> ScanConfig {
        ScanConfig {
            ell,
            ns,
            p_grid: ps.iter().map(|s| s.parse().unwrap()).collect(),
            trials,
            mode,
            master_seed: 11,
            budget: default_budget(),
            timing: false,
        }
    }

    #[test]
    fn parses_probability_expressions() {
        let e: PExpr = "0.3*n^-5/4".parse().unwrap();
        assert!((e.at(16) - 0.3 / 32.0).abs() < 1e-12);
        let e: PExpr = "n^-0.7".parse().unwrap();
        assert_eq!((e.coefficient, e.exponent), (1.0, 0.7));
        assert_eq!("0.25".parse::<PExpr>().unwrap().at(100), 0.25);
        assert!("0.3*m^-1".parse::<PExpr>().is_err());
    }

    #[test]
    fn wilson_brackets_the_rate() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert_eq!(wilson_interval(10, 10).1, 1.0);
    }

    #[test]
    fn zero_probability_never_contains() {
        let rows = threshold_scan(&cfg(6, vec![30], &["0"], 20, ScanMode::Containment)).unwrap();
        assert_eq!(rows[0].successes, 0);
    }

    #[test]
    fn sparse_k4_avoider_always_succeeds() {
        let rows = threshold_scan(&cfg(4, vec![200], &["0.1*n^-5/4"], 200, ScanMode::AvoiderSuccess)).unwrap();
        assert_eq!((rows[0].successes, rows[0].invalid), (200, 0));
    }

    #[test]
    fn deterministic_csv() {
        let c = cfg(3, vec![20, 40], &["0.5*n^-1/2"], 30, ScanMode::Containment);
        let a = rows_to_csv(&threshold_scan(&c).unwrap());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| rows_to_csv(&threshold_scan(&c).unwrap()));
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
    }

    #[test]
    fn tiny_decider_runs() {
        let rows = threshold_scan(&cfg(4, vec![6], &["0", "1"], 4, ScanMode::DeciderOnTiny)).unwrap();
        assert_eq!(rows[0].successes, 0);
    }
}
