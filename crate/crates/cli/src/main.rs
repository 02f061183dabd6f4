mod cache;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bsscl_core::engine::{classify, lower_bound_report, scan_alternating, scl_length2_formula};
use bsscl_core::ratlp::solve_max;
use bsscl_core::surface::{build_band_surface, has_extremal_surface, minimal_scale, verify_certificate};
use bsscl_core::tree_qm::{defect_experiment, gap_classify, h_gamma};
use bsscl_core::words::{
    abelianize, britton_reduce, conjugacy_canonical, cyclically_reduce, is_alternating, parse, t_length,
};
use bsscl_core::{Caps, CyclicWord, Error, GapOutcome, GroupParams, LinearProgram, LpOutcome, SurfaceCertificate};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use cache::{write_atomic, Cache, CacheEntry, CacheKey};
use report::{field, table, Group, ReportEnvelope};

/// Exact stable commutator length in Baumslag-Solitar groups
/// BS(m, l) = <a, t | t a^m t^-1 = a^l>.
#[derive(Parser, Debug)]
#[command(name = "bsscl", version, allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// The m in t a^m t^-1 = a^l.
    #[arg(short = 'm', global = true, allow_negative_numbers = true)]
    m: Option<i64>,
    /// The l in t a^m t^-1 = a^l.
    #[arg(short = 'l', global = true, allow_negative_numbers = true)]
    l: Option<i64>,
    /// Print the JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Result cache directory.
    #[arg(long, global = true, env = "BSSCL_CACHE")]
    cache: Option<PathBuf>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on embedded circuits.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    cap_circuits: u64,
    /// Cap on circuit multisets examined for potential disks.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    cap_disks: u64,
    /// Step cap for the window sweep (default 10 n (|m| + |l|)).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    cap_canonicalization_iters: Option<u64>,
    /// Conjugator exponents tried when searching for a reversal witness.
    #[arg(long, global = true, default_value_t = 24, value_parser = clap::value_parser!(u64).range(1..))]
    cap_witness_search: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify scl of a word and compute it exactly where possible.
    Scl { word: String },
    /// Exact scl of every alternating word in a shape range.
    Scan {
        #[arg(long, default_value_t = 2)]
        r_max: usize,
        #[arg(long, default_value_t = 3)]
        e_max: i64,
    },
    /// Build a band-surface certificate for an alternating word.
    Surface {
        word: String,
        /// Scale; defaults to the least N making the LP optimum integral.
        #[arg(long = "N", short = 'N')]
        n: Option<u64>,
        /// Write the certificate report here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate written by `surface`.
    Verify { file: PathBuf },
    /// Tree quasimorphisms.
    Qm {
        #[command(subcommand)]
        command: QmCommand,
    },
    /// Dump the polytope LP of a word, or re-solve a dump with --solve.
    LpDump {
        #[arg(required_unless_present = "solve")]
        word: Option<String>,
        #[arg(long, conflicts_with = "word")]
        solve: Option<PathBuf>,
    },
    /// Closed formula for scl(t a^i t^-1 a^j).
    #[command(allow_negative_numbers = true)]
    Formula { i: i64, j: i64 },
    /// Reduction and conjugacy normal forms of a word.
    Reduce { word: String },
}

#[derive(Subcommand, Debug)]
enum QmCommand {
    /// Largest defects of f_gamma and h_gamma over random pairs.
    Defect {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Word whose certified fundamental domain is gamma.
        #[arg(long, default_value = "t a t^-1 a")]
        gamma: String,
    },
    /// Well-aligned witness or axis reversal.
    Gap { word: String },
    /// h_gamma(x) for gamma the certified fundamental domain of --gamma.
    H {
        #[arg(long)]
        gamma: String,
        x: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Output {
    Json,
    Table,
}

/// Everything a run depends on besides its arguments.
#[derive(Debug, Clone)]
struct RunConfig {
    params: Option<GroupParams>,
    caps: Caps,
    cache_dir: Option<PathBuf>,
    seed: u64,
    output: Output,
}

impl RunConfig {
    fn from_args(g: &GlobalArgs) -> Result<RunConfig> {
        let params = match (g.m, g.l) {
            (Some(m), Some(l)) => Some(GroupParams::new(m, l)?),
            (None, None) => None,
            _ => return Err(Error::InvalidParams { m: g.m.unwrap_or(0), ell: g.l.unwrap_or(0), reason: "give both -m and -l" }.into()),
        };
        let caps = Caps {
            max_circuits: g.cap_circuits as usize,
            max_disks: g.cap_disks as usize,
            canonicalization_iters: g.cap_canonicalization_iters.map(|c| c as usize),
            witness_search_bound: g.cap_witness_search as usize,
        };
        let output = if g.json { Output::Json } else { Output::Table };
        Ok(RunConfig { params, caps, cache_dir: g.cache.clone(), seed: g.seed, output })
    }

    fn params(&self) -> Result<GroupParams> {
        self.params.ok_or_else(|| Error::InvalidParams { m: 0, ell: 0, reason: "this command needs -m and -l" }.into())
    }

    fn group(&self) -> Option<Group> {
        self.params.map(|p| Group { m: p.m(), l: p.ell() })
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report payload serializes")
}

fn cyclic(word: &str, p: GroupParams) -> Result<CyclicWord> {
    Ok(cyclically_reduce(&parse(word)?, p).0)
}

fn cmd_scl(word: &str, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    let p = cfg.params()?;
    let w = parse(word)?;
    let normalized = if w.t_exponent() != 0 {
        britton_reduce(&w, p).to_string()
    } else {
        conjugacy_canonical(&cyclically_reduce(&w, p).0)?.to_string()
    };
    let mut env = ReportEnvelope::new("scl", cfg.group());
    env.input = Some(word.to_string());
    env.normalized = Some(normalized.clone());

    let key = CacheKey::new(p.m(), p.ell(), normalized, cfg.caps);
    let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;
    if let Some(hit) = cache.as_ref().and_then(|c| c.get(&key)) {
        env.result = hit.result;
        env.certificates = hit.certificates;
        env.timing.cache = Some("hit".into());
    } else {
        let mut r = classify(&w, p, &cfg.caps)?;
        let gap = r.gap.take();
        env.result = to_value(&r);
        env.certificates = json!({ "gap": gap });
        if let Some(c) = &cache {
            c.put(&CacheEntry { key, result: env.result.clone(), certificates: env.certificates.clone() })?;
            env.timing.cache = Some("miss".into());
        }
    }
    let res = &env.result;
    let gap = env.certificates.get("gap").and_then(|g| g.get("outcome")).and_then(|o| o.get("kind"));
    let text = table(&[
        ("group", format!("BS({},{})", p.m(), p.ell())),
        ("input", word.to_string()),
        ("normalized", env.normalized.clone().unwrap_or_default()),
        ("classification", field(res, "classification")),
        ("scl", field(res, "value")),
        ("L(g)", field(res, "lower_bound")),
        ("reported bound", field(res, "reported_bound")),
        ("gap decision", gap.and_then(Value::as_str).unwrap_or("-").to_string()),
        ("note", field(res, "note")),
    ]);
    Ok((env, text))
}

fn cmd_scan(r_max: usize, e_max: i64, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    let p = cfg.params()?;
    let scan = scan_alternating(p, r_max, e_max, &cfg.caps)?;
    let mut env = ReportEnvelope::new("scan", cfg.group());
    env.result = to_value(&scan);
    let mut rows = vec![
        ("group", format!("BS({},{})", p.m(), p.ell())),
        ("shape", format!("r <= {r_max}, |k| <= {e_max}")),
        ("classes", scan.entries.len().to_string()),
        ("min nonzero", scan.min_nonzero.as_ref().map_or("-".into(), |q| q.to_string())),
    ];
    let hist: Vec<String> = scan.histogram.iter().map(|(v, n)| format!("{v}: {n}")).collect();
    rows.push(("histogram", hist.join(", ")));
    let mut text = table(&rows);
    for e in &scan.entries {
        text.push_str(&format!("{}  {}\n", e.scl, e.word));
    }
    Ok((env, text))
}

fn cmd_surface(word: &str, n: Option<u64>, out: Option<&Path>, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    let p = cfg.params()?;
    let w = cyclic(word, p)?;
    let report = lower_bound_report(&w, &cfg.caps)?;
    let n = n.unwrap_or_else(|| minimal_scale(&report));
    let cert = build_band_surface(&report, n)?;
    let balance = has_extremal_surface(&w)?;
    let mut env = ReportEnvelope::new("surface", cfg.group());
    env.input = Some(word.to_string());
    env.normalized = Some(w.to_string());
    let gap = &cert.upper_bound - &report.value;
    env.result = json!({
        "N": cert.n_scale,
        "s": cert.s,
        "d": cert.d,
        "K": cert.k,
        "upper_bound": to_value_rational(&cert.upper_bound),
        "lower_bound": to_value_rational(&report.value),
        "gap": to_value_rational(&gap),
        "balance": to_value(&balance),
    });
    env.certificates = json!({ "surface": to_value(&cert) });
    let mut text = table(&[
        ("word", w.to_string()),
        ("N", cert.n_scale.to_string()),
        ("polygons s", cert.s.to_string()),
        ("filled d", cert.d.to_string()),
        ("K", cert.k.to_string()),
        ("upper bound", cert.upper_bound.to_string()),
        ("L(g)", report.value.to_string()),
        ("gap", gap.to_string()),
        ("balanced", balance.extremal_exists.to_string()),
    ]);
    if let Some(path) = out {
        write_atomic(path, env.to_json().as_bytes())?;
        text.push_str(&format!("certificate written to {}\n", path.display()));
    }
    Ok((env, text))
}

fn to_value_rational(q: &bsscl_core::Rational) -> Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

/// Reads a certificate report and checks it against a freshly built turn
/// graph; the report's own numbers are not trusted.
fn cmd_verify(file: &Path, cfg: &RunConfig) -> Result<(ReportEnvelope, String, bool)> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let env_in: ReportEnvelope = serde_json::from_str(&text).map_err(|e| parse_error(format!("certificate file: {e}")))?;
    if env_in.schema_version != report::SCHEMA_VERSION {
        bail!(parse_error(format!("schema version {} is not supported", env_in.schema_version)));
    }
    let group = env_in.group.ok_or_else(|| parse_error("certificate file has no group".into()))?;
    let p = GroupParams::new(group.m, group.l)?;
    let word = env_in.normalized.as_deref().ok_or_else(|| parse_error("certificate file has no word".into()))?;
    let w = CyclicWord::parse(word, p)?;
    let cert: SurfaceCertificate = serde_json::from_value(env_in.certificates.get("surface").cloned().unwrap_or(Value::Null))
        .map_err(|e| parse_error(format!("surface certificate: {e}")))?;
    let report = lower_bound_report(&w, &cfg.caps)?;
    let v = verify_certificate(&cert, &w, &report.graph);
    let mut env = ReportEnvelope::new("verify", Some(group));
    env.input = Some(file.display().to_string());
    env.normalized = Some(w.to_string());
    env.result = json!({
        "passed": v.passed,
        "violations": v.violations,
        "upper_bound": to_value_rational(&cert.upper_bound),
        "lower_bound": to_value_rational(&report.value),
        "attains_lower_bound": cert.upper_bound == report.value,
    });
    let text = table(&[
        ("word", w.to_string()),
        ("verdict", if v.passed { "pass".into() } else { "FAIL".into() }),
        ("upper bound", cert.upper_bound.to_string()),
        ("L(g)", report.value.to_string()),
        ("violations", if v.violations.is_empty() { "-".into() } else { v.violations.join("; ") }),
    ]);
    Ok((env, text, v.passed))
}

fn certified_domain(word: &str, p: GroupParams, caps: &Caps) -> Result<bsscl_core::SegmentPattern> {
    match gap_classify(&cyclic(word, p)?, caps)?.outcome {
        GapOutcome::WellAlignedWitness(gamma) => Ok(gamma),
        GapOutcome::ZeroByReversal => bail!("{word} has a reversed axis; no well-aligned fundamental domain"),
    }
}

fn cmd_qm(command: &QmCommand, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    let p = cfg.params()?;
    let mut env = ReportEnvelope::new("qm", cfg.group());
    let text = match command {
        QmCommand::Defect { samples, max_len, gamma } => {
            let pattern = certified_domain(gamma, p, &cfg.caps)?;
            let r = defect_experiment(&pattern, p, *samples, *max_len, cfg.seed)?;
            env.input = Some(gamma.clone());
            env.result = to_value(&r);
            env.certificates = json!({ "gamma": to_value(&pattern) });
            table(&[
                ("gamma from", gamma.clone()),
                ("samples", r.samples.to_string()),
                ("max length", r.max_len.to_string()),
                ("seed", r.seed.to_string()),
                ("pairs with f != 0", r.nonzero_pairs.to_string()),
                ("max f defect", r.max_f_defect.to_string()),
                ("max h defect", r.max_h_defect.to_string()),
            ])
        }
        QmCommand::Gap { word } => {
            let w = cyclic(word, p)?;
            let cert = gap_classify(&w, &cfg.caps)?;
            env.input = Some(word.clone());
            env.normalized = Some(w.to_string());
            env.certificates = json!({ "gap": to_value(&cert) });
            env.result = json!({ "outcome": env.certificates["gap"]["outcome"]["kind"], "stage": cert.stage });
            let witness = cert.witness.as_ref().map_or("-".into(), |h| h.to_string());
            table(&[
                ("word", w.to_string()),
                ("outcome", field(&env.result, "outcome")),
                ("stage", cert.stage.to_string()),
                ("reversal witness", witness),
            ])
        }
        QmCommand::H { gamma, x } => {
            let pattern = certified_domain(gamma, p, &cfg.caps)?;
            let h = h_gamma(&pattern, &parse(x)?)?;
            env.input = Some(x.clone());
            env.result = json!({ "h": to_value_rational(&h) });
            env.certificates = json!({ "gamma": to_value(&pattern) });
            table(&[("gamma from", gamma.clone()), ("x", x.clone()), ("h_gamma(x)", h.to_string())])
        }
    };
    Ok((env, text))
}

fn cmd_lp_dump(word: Option<&str>, solve: Option<&Path>, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    if let Some(path) = solve {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let dump: Value = serde_json::from_str(&text).map_err(|e| parse_error(format!("LP dump: {e}")))?;
        let lp: LinearProgram = serde_json::from_value(dump["result"]["lp"].clone())
            .map_err(|e| parse_error(format!("LP dump: {e}")))?;
        let outcome = solve_max(&lp)?;
        let mut env = ReportEnvelope::new("lp-dump", dump.get("group").and_then(|g| serde_json::from_value(g.clone()).ok()));
        env.input = Some(path.display().to_string());
        let stored: Option<LpOutcome> = serde_json::from_value(dump["result"]["outcome"].clone()).ok();
        let matches = stored.as_ref().map(|s| s == &outcome);
        env.result = json!({ "outcome": to_value(&outcome), "matches_dump": matches });
        let text = table(&[
            ("status", field(&env.result["outcome"], "status")),
            ("optimum", outcome.value.to_string()),
            ("matches dump", matches.map_or("-".into(), |b| b.to_string())),
        ]);
        return Ok((env, text));
    }
    let p = cfg.params()?;
    let word = word.expect("clap requires a word without --solve");
    let w = cyclic(word, p)?;
    let report = lower_bound_report(&w, &cfg.caps)?;
    let mut env = ReportEnvelope::new("lp-dump", cfg.group());
    env.input = Some(word.to_string());
    env.normalized = Some(w.to_string());
    env.result = json!({
        "lp": to_value(&report.program.lp),
        "outcome": to_value(&report.outcome),
        "lower_bound": to_value_rational(&report.value),
    });
    let text = table(&[
        ("word", w.to_string()),
        ("variables", report.program.lp.vars.join(" ")),
        ("constraints", report.program.lp.constraints.len().to_string()),
        ("optimum", report.outcome.value.to_string()),
        ("unique", report.outcome.unique.to_string()),
        ("L(g)", report.value.to_string()),
    ]);
    Ok((env, text))
}

fn cmd_formula(i: i64, j: i64, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    let p = cfg.params()?;
    let v = scl_length2_formula(p, i, j)?;
    let word = parse(&format!("t a^{i} t^-1 a^{j}"))?.to_string();
    let mut env = ReportEnvelope::new("formula", cfg.group());
    env.input = Some(word.clone());
    env.result = json!({ "value": to_value_rational(&v) });
    Ok((env, table(&[("word", word), ("scl", v.to_string())])))
}

fn cmd_reduce(word: &str, cfg: &RunConfig) -> Result<(ReportEnvelope, String)> {
    let p = cfg.params()?;
    let w = parse(word)?;
    let reduced = britton_reduce(&w, p);
    let (c, conj) = cyclically_reduce(&w, p);
    let canonical = conjugacy_canonical(&c)?;
    let ab = abelianize(&w, p);
    let mut env = ReportEnvelope::new("reduce", cfg.group());
    env.input = Some(word.to_string());
    env.normalized = Some(canonical.to_string());
    env.result = json!({
        "britton": reduced.to_string(),
        "cyclic": c.to_string(),
        "conjugator": conj.to_string(),
        "canonical": canonical.to_string(),
        "t_length": t_length(&c),
        "t_exponent": w.t_exponent(),
        "elliptic": c.n() == 0,
        "alternating": is_alternating(&c),
        "abelianization": to_value(&ab),
    });
    let text = table(&[
        ("britton", reduced.to_string()),
        ("cyclic", c.to_string()),
        ("conjugator", if conj.is_empty() { "1".into() } else { conj.to_string() }),
        ("canonical", canonical.to_string()),
        ("t-length", t_length(&c).to_string()),
        ("t-exponent", w.t_exponent().to_string()),
        ("elliptic", (c.n() == 0).to_string()),
        ("alternating", is_alternating(&c).to_string()),
    ]);
    Ok((env, text))
}

fn parse_error(reason: String) -> anyhow::Error {
    Error::Parse { position: 0, reason }.into()
}

/// 2: bad input, 3: a cap was hit, 4: internal inconsistency, 1: other.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Parse { .. } | Error::InvalidParams { .. }) => 2,
        Some(Error::LimitExceeded { .. } | Error::NonTerminating { .. }) => 3,
        Some(Error::InternalInconsistency(_)) => 4,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let start = Instant::now();
    let mut passed = true;
    let (mut env, text) = match &cli.command {
        Command::Scl { word } => cmd_scl(word, &cfg)?,
        Command::Scan { r_max, e_max } => cmd_scan(*r_max, *e_max, &cfg)?,
        Command::Surface { word, n, out } => cmd_surface(word, *n, out.as_deref(), &cfg)?,
        Command::Verify { file } => {
            let (env, text, ok) = cmd_verify(file, &cfg)?;
            passed = ok;
            (env, text)
        }
        Command::Qm { command } => cmd_qm(command, &cfg)?,
        Command::LpDump { word, solve } => cmd_lp_dump(word.as_deref(), solve.as_deref(), &cfg)?,
        Command::Formula { i, j } => cmd_formula(*i, *j, &cfg)?,
        Command::Reduce { word } => cmd_reduce(word, &cfg)?,
    };
    env.timing.elapsed_ms = start.elapsed().as_millis() as u64;
    match cfg.output {
        Output::Json => print!("{}", env.to_json()),
        Output::Table => print!("{text}"),
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
