//! Subcommand front end used by the `rainbow-lab` binary.
//!
//! Exit codes: 0 pass, 1 property violation, 2 out of regime or unsupported
//! structure, 3 usage error. Every file written is accompanied by a
//! [`RunManifest`] that records the argument vector needed to rerun it.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::avoid_k4::avoid_k4;
use crate::avoid_k6::avoid_k6;
use crate::colouring::{is_proper, rainbow_cliques, EdgeColouring};
use crate::decide::{decide_arrows, Outcome};
use crate::emergence::{
    density_condition, janson_bound, rows_to_csv, sample_perturbed, threshold_scan, trial_rng, verify_structure,
    Margin, PExpr, PerturbedInstance, SampleMode, ScanConfig, ScanMode, SeedSpec,
};
use crate::error::{LabError, Result};
use crate::graph::{Graph, NamedGraph, Rational};
use crate::lemmas::{certify, Lemma};
use crate::tiled::certify::PHI_MAX;
use crate::tiled::stretch::STRETCH_MAX_VERTICES;
use crate::tiled::{avoid_k8_perturbed, colour_tiled, k4_components, phi};
use crate::verify::{verify_all, Budget};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_REGIME: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

pub const THREADS_ENV: &str = "RAINBOW_LAB_THREADS";

#[derive(Parser, Debug, Serialize)]
#[command(name = "rainbow-lab", version, about = "Rainbow clique colourings of randomly perturbed graphs")]
pub struct Cli {
    /// Worker threads; falls back to RAINBOW_LAB_THREADS, then all cores.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build a named graph and print or save it.
    Construct(ConstructArgs),
    /// Decide whether every proper colouring of a graph has a rainbow target.
    Decide(DecideArgs),
    /// Colour a perturbed instance without rainbow K4.
    AvoidK4(AvoidArgs),
    /// Colour a perturbed instance without rainbow K6.
    AvoidK6(AvoidArgs),
    /// Colour a perturbed instance without rainbow K8.
    AvoidK8(AvoidArgs),
    /// K4-tiled graph tools.
    #[command(subcommand)]
    Tiled(TiledCommand),
    /// Run randomized trials of a lemma extractor.
    Certify(CertifyArgs),
    /// Expected copies and Janson's nonexistence bound.
    Janson(JansonArgs),
    /// Check the density condition for an exponent.
    Density(DensityArgs),
    /// Monte Carlo scan over a grid of n and p; writes CSV.
    Scan(ScanArgs),
    /// Run every acceptance check.
    VerifyAll(VerifyArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    /// Named graph, e.g. `hatk(3,4)`, `t10`, `join(r7,star(4))`.
    #[arg(long)]
    pub graph: String,
    /// `json` or `edges`.
    #[arg(long, default_value = "json")]
    pub format: String,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecideArgs {
    /// Host graph: a file (edge list or JSON) or a graph name.
    #[arg(long)]
    pub graph: String,
    /// Target graph, file or name.
    #[arg(long)]
    pub target: String,
    /// Search node budget.
    #[arg(long, default_value_t = 1 << 32)]
    pub nodes: u64,
    /// Write the verdict, including any witness colouring.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct AvoidArgs {
    #[arg(long)]
    pub n: usize,
    /// Literal probability or an expression such as `0.5*n^-5/4`.
    #[arg(long)]
    pub p: PExpr,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the colouring as `{edges: [[u, v, colour], ...]}`.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiledCommand {
    /// Decompose a graph into K4-components and certify each one.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    /// Graph file (edge list or JSON) or graph name.
    pub graph: String,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    pub lemma: Lemma,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the report and any counterexample archive.
    #[arg(long, default_value = "counterexamples")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct JansonArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: PExpr,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub graph: String,
    /// Exponent x in p = n^-x, as a fraction such as `7/15`.
    #[arg(long)]
    pub exponent: String,
    /// `1` for ω(1) growth, `n` for ω(n).
    #[arg(long, default_value = "1")]
    pub margin: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// JSON scan configuration; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<PExpr>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub mode: Option<ScanMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Leave elapsed_ms at 0 so the CSV is byte-stable.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long, default_value = "scan.csv")]
    pub emit: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "quick")]
    pub budget: Budget,
    #[arg(long, default_value = "verify-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub outputs: Vec<PathBuf>,
    pub exit_code: u8,
    pub summary: Value,
}

/// What a subcommand produced.
struct Finished {
    code: u8,
    summary: Value,
    outputs: Vec<PathBuf>,
}

fn done(code: u8, summary: Value) -> Finished {
    Finished { code, summary, outputs: Vec::new() }
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// Expands short names such as `hatk34`, `t10` and `k3` into the full syntax.
fn expand_name(s: &str) -> String {
    let lower = s.trim().to_ascii_lowercase();
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if let Some(d) = lower.strip_prefix("hatk").filter(|d| d.len() == 2 && digits(d)) {
        return format!("hatk({},{})", &d[..1], &d[1..]);
    }
    if let Some(d) = lower.strip_prefix('t').filter(|d| digits(d)) {
        return format!("t({d})");
    }
    lower
}

/// Reads a graph from a file (JSON `{n, edges}` or an edge list), or builds
/// a named graph.
pub fn load_graph(source: &str) -> Result<Graph> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return if text.trim_start().starts_with('{') {
            Ok(serde_json::from_str(&text)?)
        } else {
            Graph::parse_edge_list(&text)
        };
    }
    if source.ends_with(".json") || source.ends_with(".txt") {
        return Err(LabError::Parse(format!("graph file {source} not found")));
    }
    expand_name(source).parse::<NamedGraph>()?.build()
}

fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || LabError::Parse(format!("bad exponent {s:?}, expected a fraction such as 7/15"));
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if b == 0 {
        return Err(bad());
    }
    Ok(Rational::new(a, b))
}

fn sample(args: &AvoidArgs) -> Result<PerturbedInstance> {
    let p = args.p.at(args.n);
    sample_perturbed(&SeedSpec::BalancedBipartite, args.n, p, SampleMode::AllPairs, &mut trial_rng(args.seed, 0))
}

/// Properness, totality and the rainbow `K_r` count of a colouring.
fn validation(g: &Graph, psi: &EdgeColouring, r: usize) -> Result<(bool, usize)> {
    let ok = is_proper(g, psi)? && psi.is_total_on(g);
    Ok((ok, rainbow_cliques(g, psi, r).len()))
}

fn emit_colouring(emit: &Option<PathBuf>, psi: &EdgeColouring, out: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(path) = emit {
        write_json(path, psi)?;
        out.push(path.clone());
    }
    Ok(())
}

fn run_avoid(args: &AvoidArgs, ell: usize) -> Result<Finished> {
    let inst = sample(args)?;
    let union = inst.union();
    let mut outputs = Vec::new();
    let (psi, extra) = match ell {
        4 => {
            let av = avoid_k4(&inst)?;
            let mut kinds = std::collections::BTreeMap::<String, usize>::new();
            for c in av.u_components.iter().chain(&av.w_components) {
                *kinds.entry(format!("{:?}", c.kind)).or_default() += 1;
            }
            (av.colouring, json!({"component_kinds": kinds}))
        }
        6 => {
            let av = avoid_k6(&inst)?;
            (av.colouring, json!({"triangle_components": av.certificates.len()}))
        }
        _ => {
            let k8 = avoid_k8_perturbed(&inst)?;
            let extra = json!({
                "k4_components": k8.sparse.components.len(),
                "red_edges": k8.sparse.red.len(),
                "red_covers": k8.sparse.red_covers(),
            });
            if !k8.sparse.red_covers() {
                return Ok(done(EXIT_VIOLATION, extra));
            }
            (k8.colouring, extra)
        }
    };
    let (proper, rainbow) = validation(&union, &psi, ell)?;
    emit_colouring(&args.emit, &psi, &mut outputs)?;
    let pass = proper && rainbow == 0;
    Ok(Finished {
        code: if pass { EXIT_PASS } else { EXIT_VIOLATION },
        summary: json!({
            "n": args.n,
            "p": args.p.at(args.n),
            "seed": args.seed,
            "edges": union.m(),
            "random_edges": inst.random.m(),
            "colours": psi.colours().len(),
            "proper": proper,
            format!("rainbow_k{ell}"): rainbow,
            "details": extra,
            "pass": pass,
        }),
        outputs,
    })
}

fn run_analyze(args: &AnalyzeArgs) -> Result<Finished> {
    let g = load_graph(&args.graph)?;
    let (comps, rest) = k4_components(&g);
    let mut code = EXIT_PASS;
    let mut out = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        let ph = phi(&c.graph);
        let entry = if ph > PHI_MAX {
            code = code.max(EXIT_REGIME);
            json!({"index": i, "vertices": c.vertices, "phi": ph, "status": "out_of_regime"})
        } else if c.graph.n() > STRETCH_MAX_VERTICES {
            code = code.max(EXIT_REGIME);
            json!({"index": i, "vertices": c.vertices, "phi": ph, "status": "too_large"})
        } else {
            let tc = colour_tiled(&c.graph)?;
            let sound = tc.certificate.fits_class(ph) && tc.certificate.covers(&tc.rainbow_k4s);
            if !sound {
                code = EXIT_VIOLATION;
            }
            json!({
                "index": i,
                "vertices": c.vertices,
                "phi": ph,
                "status": if sound { "certified" } else { "unsound" },
                "certificate": tc.certificate,
                "rainbow_k4s": tc.rainbow_k4s.len(),
            })
        };
        out.push(entry);
    }
    let structure = verify_structure(&g);
    let summary = json!({
        "n": g.n(),
        "m": g.m(),
        "components": out,
        "leftover_edges": rest.len(),
        "structure_violations": structure.violations,
    });
    let mut outputs = Vec::new();
    if let Some(path) = &args.emit {
        write_json(path, &summary)?;
        outputs.push(path.clone());
    }
    Ok(Finished { code, summary, outputs })
}

fn scan_config(args: &ScanArgs) -> Result<ScanConfig> {
    let mut cfg: ScanConfig = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => ScanConfig {
            ell: 4,
            ns: vec![],
            p_grid: vec![],
            trials: 100,
            mode: ScanMode::AvoiderSuccess,
            master_seed: 0,
            budget: 1_000_000,
            timing: true,
        },
    };
    if let Some(ell) = args.ell {
        cfg.ell = ell;
    }
    if !args.n.is_empty() {
        cfg.ns = args.n.clone();
    }
    if !args.p.is_empty() {
        cfg.p_grid = args.p.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if args.no_timing {
        cfg.timing = false;
    }
    if cfg.ns.is_empty() || cfg.p_grid.is_empty() {
        return Err(LabError::Parse("scan needs at least one n and one p".into()));
    }
    Ok(cfg)
}

fn dispatch(cmd: &Command) -> Result<Finished> {
    match cmd {
        Command::Construct(a) => {
            let g = load_graph(&a.graph)?;
            let text = match a.format.as_str() {
                "json" => serde_json::to_string(&g)? + "\n",
                "edges" => g.to_edge_list(),
                f => return Err(LabError::Parse(format!("unknown format {f:?}, expected json or edges"))),
            };
            match &a.emit {
                Some(path) => {
                    write_file(path, &text)?;
                    Ok(Finished {
                        code: EXIT_PASS,
                        summary: json!({"n": g.n(), "m": g.m()}),
                        outputs: vec![path.clone()],
                    })
                }
                None => {
                    let _ = std::io::stdout().lock().write_all(text.as_bytes());
                    Ok(done(EXIT_PASS, Value::Null))
                }
            }
        }
        Command::Decide(a) => {
            let (g, h) = (load_graph(&a.graph)?, load_graph(&a.target)?);
            let v = decide_arrows(&g, &h, a.nodes)?;
            let mut outputs = Vec::new();
            if let Some(path) = &a.emit {
                write_json(path, &v)?;
                outputs.push(path.clone());
            }
            let code = if v.outcome == Outcome::Unknown { EXIT_REGIME } else { EXIT_PASS };
            Ok(Finished {
                code,
                summary: json!({"outcome": v.outcome, "nodes": v.nodes, "witness": v.witness}),
                outputs,
            })
        }
        Command::AvoidK4(a) => run_avoid(a, 4),
        Command::AvoidK6(a) => run_avoid(a, 6),
        Command::AvoidK8(a) => run_avoid(a, 8),
        Command::Tiled(TiledCommand::Analyze(a)) => run_analyze(a),
        Command::Certify(a) => {
            let mut rep = certify(a.lemma, a.trials, a.seed)?;
            rep.archive_to(&a.out)?;
            let path = a.out.join(format!("{}-report.json", a.lemma));
            let summary = json!({
                "lemma": rep.lemma,
                "trials": rep.trials,
                "seed": rep.seed,
                "passed": rep.passed,
                "counterexamples": rep.counterexamples.len(),
                "archive": rep.archive,
                "pass": rep.ok(),
            });
            write_json(&path, &summary)?;
            let mut outputs = vec![path];
            outputs.extend(rep.archive.clone());
            Ok(Finished { code: if rep.ok() { EXIT_PASS } else { EXIT_VIOLATION }, summary, outputs })
        }
        Command::Janson(a) => {
            let h = load_graph(&a.graph)?;
            let est = janson_bound(&h, a.n, a.p.at(a.n))?;
            Ok(done(EXIT_PASS, serde_json::to_value(est)?))
        }
        Command::Density(a) => {
            let h = load_graph(&a.graph)?;
            let rep = density_condition(&h, parse_ratio(&a.exponent)?, a.margin.parse::<Margin>()?)?;
            let code = if rep.holds { EXIT_PASS } else { EXIT_VIOLATION };
            Ok(done(code, serde_json::to_value(rep)?))
        }
        Command::Scan(a) => {
            let cfg = scan_config(a)?;
            let rows = threshold_scan(&cfg)?;
            write_file(&a.emit, &rows_to_csv(&rows))?;
            let invalid: usize = rows.iter().map(|r| r.invalid).sum();
            Ok(Finished {
                code: if invalid == 0 { EXIT_PASS } else { EXIT_VIOLATION },
                summary: json!({"rows": rows.len(), "invalid": invalid, "config": cfg}),
                outputs: vec![a.emit.clone()],
            })
        }
        Command::VerifyAll(a) => {
            let report = verify_all(a.seed, a.budget, Some(&a.out.join("counterexamples")));
            let path = a.out.join("verify-all.json");
            write_json(&path, &report)?;
            for c in &report.criteria {
                eprintln!("criterion {} {}: {}", c.id, c.title, if c.pass { "PASS" } else { "FAIL" });
            }
            let summary: Vec<Value> =
                report.criteria.iter().map(|c| json!({"id": c.id, "title": c.title, "pass": c.pass})).collect();
            Ok(Finished {
                code: if report.pass { EXIT_PASS } else { EXIT_VIOLATION },
                summary: json!({"pass": report.pass, "criteria": summary}),
                outputs: vec![path],
            })
        }
        Command::Replay(a) => {
            let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&a.manifest)?)?;
            let before: Vec<Option<Vec<u8>>> = m.outputs.iter().map(|p| std::fs::read(p).ok()).collect();
            let code = run(m.argv);
            let differing: Vec<&PathBuf> = m
                .outputs
                .iter()
                .zip(&before)
                .filter(|(p, old)| old.is_none() || std::fs::read(p).ok() != **old)
                .map(|(p, _)| p)
                .collect();
            let code = if differing.is_empty() && code == m.exit_code { code } else { EXIT_VIOLATION };
            Ok(done(
                code,
                json!({"replayed": m.command, "exit_code": code, "identical": differing.is_empty(), "differing": differing}),
            ))
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Construct(_) => "construct",
        Command::Decide(_) => "decide",
        Command::AvoidK4(_) => "avoid-k4",
        Command::AvoidK6(_) => "avoid-k6",
        Command::AvoidK8(_) => "avoid-k8",
        Command::Tiled(_) => "tiled",
        Command::Certify(_) => "certify",
        Command::Janson(_) => "janson",
        Command::Density(_) => "density",
        Command::Scan(_) => "scan",
        Command::VerifyAll(_) => "verify-all",
        Command::Replay(_) => "replay",
    }
}

fn command_seed(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::AvoidK4(a) | Command::AvoidK6(a) | Command::AvoidK8(a) => Some(a.seed),
        Command::Certify(a) => Some(a.seed),
        Command::Scan(a) => a.seed,
        Command::VerifyAll(a) => Some(a.seed),
        _ => None,
    }
}

/// Where the manifest for `outputs` goes: `manifest.json` in the output
/// directory when every output shares one, else next to the first output.
fn manifest_path(outputs: &[PathBuf]) -> PathBuf {
    let dir = |p: &PathBuf| p.parent().map(Path::to_path_buf).unwrap_or_default();
    let first = dir(&outputs[0]);
    if outputs.len() > 1 && outputs.iter().all(|p| dir(p) == first) {
        return first.join("manifest.json");
    }
    let mut name = outputs[0].clone().into_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn exit_code_for(e: &LabError) -> u8 {
    match e {
        LabError::OutOfRegime(_) | LabError::StructureUnsupported(_) | LabError::SearchExhausted { .. } => EXIT_REGIME,
        LabError::Counterexample(_) => EXIT_VIOLATION,
        LabError::Domain(_) | LabError::Parse(_) | LabError::Io(_) | LabError::Json(_) => EXIT_USAGE,
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// its exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    if let Some(k) = cli.threads {
        // Fails only when a pool already exists, as in a replay.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
    let started = now();
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if !outcome.summary.is_null() {
        let text = serde_json::to_string_pretty(&outcome.summary).unwrap_or_default();
        // A closed pipe is not an error worth reporting.
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    if !outcome.outputs.is_empty() && !matches!(cli.command, Command::Replay(_)) {
        let manifest = RunManifest {
            command: command_name(&cli.command).to_string(),
            argv: argv.clone(),
            config: serde_json::to_value(&cli).unwrap_or(Value::Null),
            seed: command_seed(&cli.command),
            version: env!("CARGO_PKG_VERSION").to_string(),
            started,
            finished: now(),
            outputs: outcome.outputs.clone(),
            exit_code: outcome.code,
            summary: outcome.summary.clone(),
        };
        if let Err(e) = write_json(&manifest_path(&outcome.outputs), &manifest) {
            eprintln!("error: writing manifest: {e}");
            return EXIT_USAGE;
        }
    }
    outcome.code
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args()))
}
