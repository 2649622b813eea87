//! The `recigal` command line: argument parsing, dispatch and reports.

pub mod report;
pub mod schema;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use recigal::ffpoly::{parse_rational, Fq, FqPoly, RatPoly, SquareClass};
use recigal::galclass::{self, Status, DEFAULT_PRIME_BUDGET};
use recigal::hodgelab;
use recigal::lfunclab::{self, FqTCurve, PointCounter, SurveyOptions, POINT_BUDGET};
use recigal::orthfin::{self, CosetLabel, OrthSpace, ENUM_BUDGET};
use recigal::recpoly;
use recigal::sieve::{self, Remainders, SieveCell, SieveProblem, Subset};
use recigal::signedperm;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "recigal", version, about = "Galois groups of reciprocal polynomials and related exact computations")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "RECIGAL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Largest prime scanned by the classifier.
    #[arg(long, global = true, env = "RECIGAL_PRIME_BUDGET", default_value_t = DEFAULT_PRIME_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub prime_budget: u64,
    /// Cap on enumerations (group elements, polynomials).
    #[arg(long, global = true, env = "RECIGAL_ENUM_BUDGET", default_value_t = ENUM_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub enum_budget: u64,
    /// Cap on fiber counting work, `Q^{2k}`.
    #[arg(long, global = true, env = "RECIGAL_POINT_BUDGET", default_value_t = POINT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub point_budget: u64,
    /// Total-variation tolerance for statistical validators.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Add wall-clock timing to the report (reports then differ between runs).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the Galois group of a reciprocal polynomial over Q.
    Classify {
        /// Ascending coefficients, e.g. `1,0,3,0,1`.
        #[arg(long)]
        poly: String,
        /// Also compare Frobenius statistics up to this prime.
        #[arg(long)]
        chebotarev: Option<u64>,
    },
    /// Count irreducible monic polynomials of degree m by (h(2), h(-2)) class.
    CountIrred {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        /// Use the norm-map count instead of enumeration.
        #[arg(long)]
        norm: bool,
    },
    /// Class indices of a trace form over F_q.
    ClassifyH {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        h: String,
    },
    /// Densities of the classes C_i in each coset of O(V).
    OrthStats {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "sq")]
        disc: String,
    },
    /// Enumerate O(V) and count its cosets.
    OrthEnum {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "sq")]
        disc: String,
    },
    /// Joint type statistics of W_{2n} or W_{2n}^+.
    Wstats {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        plus: bool,
    },
    /// Selberg upper bound for a sieve problem given as JSON.
    SieveBound {
        #[arg(long)]
        problem: String,
    },
    /// Miss probabilities for C_i, or the positivity scan with --scan.
    Density {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        class: u8,
        #[arg(long, default_value = "7,11,13")]
        ells: String,
        #[arg(long, default_value = "sq")]
        disc: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        det: i32,
        #[arg(long, default_value = "sq")]
        spin: String,
        /// Reference constant c in (1 - c/N^2)^{|D|}.
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value = "3,4")]
        ns: String,
    },
    /// L-function of a quadratic twist.
    Lfunc {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value = "1")]
        twist: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Galois groups of L-functions over a twist family.
    LfuncSurvey {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Primitive Hodge numbers, signature and K for a hypersurface.
    Hodge {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Check a report against the bundled schema.
    ValidateReport {
        #[arg(long)]
        report: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::CountIrred { .. } => "count-irred",
            Command::ClassifyH { .. } => "classify-h",
            Command::OrthStats { .. } => "orth-stats",
            Command::OrthEnum { .. } => "orth-enum",
            Command::Wstats { .. } => "wstats",
            Command::SieveBound { .. } => "sieve-bound",
            Command::Density { .. } => "density",
            Command::Lfunc { .. } => "lfunc",
            Command::LfuncSurvey { .. } => "lfunc-survey",
            Command::Hodge { .. } => "hodge",
            Command::ValidateReport { .. } => "validate-report",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(String),
}

impl From<recigal::Error> for CliError {
    fn from(e: recigal::Error) -> CliError {
        CliError::Run(e.to_string())
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `args` (including the program name) and run.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Some(t) = cli.threads {
        // a global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let start = Instant::now();
    let res = execute(&cli);
    let timing = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    match res {
        Ok((input, result, code)) => {
            let doc = report::envelope(cli.command.name(), input, config(&cli), result, timing);
            let stdout = match cli.output {
                Output::Json => {
                    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
                    s.push('\n');
                    s
                }
                Output::Table => report::table(&doc),
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(CliError::Usage(m)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
        },
        Err(CliError::Run(m)) => Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
        },
    }
}

fn config(cli: &Cli) -> Value {
    json!({
        "seed": cli.seed,
        "prime_budget": cli.prime_budget,
        "enum_budget": cli.enum_budget,
        "point_budget": cli.point_budget,
        "tolerance": report::float(cli.tolerance),
        "threads": cli.threads.map(|t| t.to_string()).unwrap_or_else(|| "auto".into()),
        "output": match cli.output { Output::Json => "json", Output::Table => "table" },
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| usage(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn parse_class(s: &str) -> Result<SquareClass, CliError> {
    match s {
        "sq" | "square" | "1" => Ok(SquareClass::Square),
        "nonsq" | "nonsquare" | "-1" => Ok(SquareClass::NonSquare),
        _ => Err(usage(format!("square class must be sq or nonsq, got {s:?}"))),
    }
}

/// Ascending coefficients; integers reduce into the prime field, `#k` is
/// the element with digit code `k`.
pub fn parse_fq_poly(fq: &Fq, s: &str) -> Result<FqPoly, CliError> {
    let mut c = Vec::new();
    for t in s.split(',') {
        let t = t.trim();
        if let Some(code) = t.strip_prefix('#') {
            let k: u64 = code.parse().map_err(|_| usage(format!("bad element code {t:?}")))?;
            if k >= fq.order() {
                return Err(usage(format!("element code {k} out of range for {fq}")));
            }
            c.push(k);
        } else {
            let v: i64 = t.parse().map_err(|_| usage(format!("bad coefficient {t:?}")))?;
            c.push(fq.from_i64(v));
        }
    }
    Ok(FqPoly::new(c))
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Run(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{path}: {e}")))
}

fn json_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// `{"q": 5, "model": {"A": "..", "B": ".."}}` or
/// `{"q": 5, "a_invariants": {"a1": .., "a2": .., "a3": .., "a4": .., "a6": ..}}`.
pub fn parse_curve(v: &Value) -> Result<FqTCurve, CliError> {
    let q: u64 = v
        .get("q")
        .and_then(json_string)
        .ok_or_else(|| usage("curve: missing q"))?
        .parse()
        .map_err(|_| usage("curve: bad q"))?;
    let fq = Fq::with_order(q)?;
    let field = |o: &Value, k: &str| -> Result<FqPoly, CliError> {
        match o.get(k).and_then(json_string) {
            Some(s) => parse_fq_poly(&fq, &s),
            None => Ok(FqPoly::zero()),
        }
    };
    if let Some(m) = v.get("model") {
        return Ok(FqTCurve::new(&fq, field(m, "A")?, field(m, "B")?)?);
    }
    if let Some(a) = v.get("a_invariants") {
        let ai = [field(a, "a1")?, field(a, "a2")?, field(a, "a3")?, field(a, "a4")?, field(a, "a6")?];
        return Ok(FqTCurve::from_a_invariants(&fq, [&ai[0], &ai[1], &ai[2], &ai[3], &ai[4]])?);
    }
    Err(usage("curve: expected model or a_invariants"))
}

fn subset_of(v: &Value, k: usize) -> Result<Subset, CliError> {
    let a = v.as_array().ok_or_else(|| usage("support entries are index lists"))?;
    let mut d: Subset = 0;
    for i in a {
        let i = i
            .as_u64()
            .or_else(|| i.as_str().and_then(|s| s.parse().ok()))
            .ok_or_else(|| usage("bad index"))? as usize;
        if i >= k || i >= 64 {
            return Err(usage(format!("index {i} out of range")));
        }
        d |= 1 << i;
    }
    Ok(d)
}

/// Sieve problem JSON: `omegas` (required), `labels`, `x` (default 1),
/// `support` (`"powerset"` or index lists), `remainders` (`[{"set", "r"}]`).
pub fn parse_problem(v: &Value) -> Result<SieveProblem, CliError> {
    let om = v
        .get("omegas")
        .and_then(Value::as_array)
        .ok_or_else(|| usage("problem: missing omegas"))?;
    let omegas = om
        .iter()
        .map(|w| {
            let s = json_string(w).ok_or_else(|| usage("omega must be a number or string"))?;
            parse_rational(&s).map_err(usage)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let k = omegas.len();
    let labels = match v.get("labels").and_then(Value::as_array) {
        Some(l) => l.iter().map(|x| json_string(x).unwrap_or_default()).collect(),
        None => (0..k).map(|i| i.to_string()).collect(),
    };
    let x = match v.get("x").and_then(json_string) {
        Some(s) => parse_rational(&s).map_err(usage)?,
        None => parse_rational("1").map_err(usage)?,
    };
    let support = match v.get("support") {
        None => sieve::support_powerset(k)?,
        Some(Value::String(s)) if s == "powerset" => sieve::support_powerset(k)?,
        Some(Value::Array(a)) => {
            let mut s = a.iter().map(|d| subset_of(d, k)).collect::<Result<Vec<_>, _>>()?;
            s.sort_unstable();
            s.dedup();
            s
        }
        Some(_) => return Err(usage("support must be \"powerset\" or a list")),
    };
    let remainders = match v.get("remainders") {
        None | Some(Value::Null) => Remainders::Zero,
        Some(Value::Array(a)) => {
            let mut t = BTreeMap::new();
            for e in a {
                let d = subset_of(e.get("set").ok_or_else(|| usage("remainder without set"))?, k)?;
                let r = e.get("r").and_then(json_string).ok_or_else(|| usage("remainder without r"))?;
                t.insert(d, parse_rational(&r).map_err(usage)?);
            }
            Remainders::Table(t)
        }
        Some(_) => return Err(usage("remainders must be a list")),
    };
    Ok(SieveProblem::new(labels, omegas, x, remainders, support)?)
}

fn members(d: Subset) -> Vec<usize> {
    (0..64).filter(|i| d >> i & 1 == 1).collect()
}

fn base_change(e: FqTCurve, n: u32) -> Result<FqTCurve, CliError> {
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    if n == 1 {
        return Ok(e);
    }
    let big = Fq::new(e.field.characteristic(), e.field.degree() * n)?;
    Ok(e.base_change(&big)?)
}

type Executed = (Value, Value, i32);

fn execute(cli: &Cli) -> Result<Executed, CliError> {
    match &cli.command {
        Command::Classify { poly, chebotarev } => {
            let p = RatPoly::parse(poly).map_err(usage)?;
            let cert = galclass::classify(&p, cli.prime_budget)?;
            let mut res = to_value(&cert);
            if let (Some(bound), Some(g)) = (chebotarev, cert.claimed_group) {
                let r = galclass::chebotarev_validate(&cert.f, g, *bound, cli.tolerance)?;
                res["chebotarev"] = to_value(&r);
            }
            let code = match cert.status {
                Status::Inconclusive(_) => EXIT_INCONCLUSIVE,
                _ => EXIT_OK,
            };
            Ok((json!({"poly": poly, "chebotarev": chebotarev}), res, code))
        }
        Command::CountIrred { q, m, norm } => {
            let fq = Fq::with_order(*q)?;
            let c = if *norm {
                recpoly::count_irreducible_classes_norm(&fq, *m, cli.enum_budget)?
            } else {
                recpoly::count_irreducible_classes(&fq, *m, cli.enum_budget)?
            };
            Ok((json!({"q": q, "m": m, "norm": norm}), to_value(&c), EXIT_OK))
        }
        Command::ClassifyH { q, h } => {
            let fq = Fq::with_order(*q)?;
            let hp = parse_fq_poly(&fq, h)?;
            if hp.is_zero() || !hp.is_monic() || hp.deg() == 0 {
                return Err(usage("h must be monic and nonconstant"));
            }
            let classes = recpoly::classify_h(&fq, &hp);
            let profile = recpoly::profile(&fq, &hp).ok();
            let res = json!({
                "classes": classes,
                "in_p_n": recpoly::in_p_n(&fq, &hp),
                "profile": profile.map(|p| to_value(&p)),
            });
            Ok((json!({"q": q, "h": h}), res, EXIT_OK))
        }
        Command::OrthStats { q, n, disc } => {
            let fq = Fq::with_order(*q)?;
            let v = OrthSpace::new(&fq, *n, parse_class(disc)?)?;
            let mut rows = Vec::new();
            for label in CosetLabel::all() {
                let dens = orthfin::c_i_density_table(&v, label, cli.enum_budget)?;
                let dens: Vec<String> = dens.iter().map(recigal::ffpoly::rational_to_string).collect();
                rows.push(json!({"label": label, "densities": dens}));
            }
            Ok((json!({"q": q, "n": n, "disc": disc}), json!({"cosets": rows}), EXIT_OK))
        }
        Command::OrthEnum { q, n, disc } => {
            let fq = Fq::with_order(*q)?;
            let v = OrthSpace::new(&fq, *n, parse_class(disc)?)?;
            let table = orthfin::enumerate_o(&v, cli.enum_budget)?;
            let mut counts: BTreeMap<CosetLabel, u64> = BTreeMap::new();
            for a in table.iter() {
                *counts.entry(v.coset_label(&a)).or_insert(0) += 1;
            }
            let rows: Vec<Value> = counts
                .iter()
                .map(|(l, c)| json!({"label": l, "count": c}))
                .collect();
            let res = json!({"order": table.len(), "cosets": rows});
            Ok((json!({"q": q, "n": n, "disc": disc}), res, EXIT_OK))
        }
        Command::Wstats { n, plus } => {
            let stats = signedperm::class_statistics(*n, *plus)?;
            let rows: Vec<Value> = stats
                .iter()
                .map(|(t, p)| {
                    json!({
                        "x": t.x, "pairs": t.pairs, "eps1": t.eps1,
                        "proportion": recigal::ffpoly::rational_to_string(p),
                    })
                })
                .collect();
            let res = json!({"order": signedperm::w_order(*n, *plus), "types": rows});
            Ok((json!({"n": n, "plus": plus}), res, EXIT_OK))
        }
        Command::SieveBound { problem } => {
            let doc = read_json(problem)?;
            let p = parse_problem(&doc)?;
            let r = sieve::selberg_bound(&p)?;
            let mut res = to_value(&r);
            let lambdas: Vec<Value> = r
                .lambdas
                .iter()
                .map(|(d, l)| json!({"set": members(*d), "lambda": recigal::ffpoly::rational_to_string(l)}))
                .collect();
            res["lambdas"] = Value::Array(lambdas);
            Ok((json!({"problem": doc}), res, EXIT_OK))
        }
        Command::Density { n, class, ells, disc, det, spin, c, scan, ns } => {
            let ells: Vec<u64> = parse_list(ells, "ell")?;
            if *scan {
                let ns: Vec<usize> = parse_list(ns, "N")?;
                let t = sieve::prop15_scan(&ells, &ns, cli.enum_budget)?;
                let mut res = to_value(&t);
                res["mode"] = json!("scan");
                return Ok((json!({"ells": ells, "ns": ns}), res, EXIT_OK));
            }
            let label = CosetLabel { det: *det, spin: parse_class(spin)? };
            if label.det.abs() != 1 {
                return Err(usage("det must be 1 or -1"));
            }
            let disc = parse_class(disc)?;
            let cells: Vec<SieveCell> = ells.iter().map(|&ell| SieveCell { ell, disc, label }).collect();
            let cr = match c {
                Some(s) => Some(parse_rational(s).map_err(usage)?),
                None => None,
            };
            let e = sieve::density_experiment(*n, &cells, *class, cr.as_ref(), cli.enum_budget)?;
            let mut res = to_value(&e);
            res["mode"] = json!("experiment");
            let input = json!({"n": n, "class": class, "ells": ells, "cells": cells, "c": c});
            Ok((input, res, EXIT_OK))
        }
        Command::Lfunc { curve, twist, n } => {
            let doc = read_json(curve)?;
            let e = base_change(parse_curve(&doc)?, *n)?;
            let u = parse_fq_poly(&e.field, twist)?;
            let eu = lfunclab::quadratic_twist(&e, &u)?;
            let pc = PointCounter::with_budget(&eu.field, cli.point_budget);
            let l = lfunclab::l_function_with(&eu, &pc)?;
            let places = lfunclab::bad_places(&eu)?;
            let res = json!({
                "L": to_value(&l),
                "P": to_value(&l.normalized().to_json()),
                "places": to_value(&places),
                "root_modulus_error": report::float(l.root_modulus_error),
            });
            Ok((json!({"curve": doc, "twist": twist, "n": n}), res, EXIT_OK))
        }
        Command::LfuncSurvey { curve, d, n, sample } => {
            let doc = read_json(curve)?;
            let e = parse_curve(&doc)?;
            let opts = SurveyOptions {
                sample: *sample,
                seed: cli.seed,
                prime_budget: cli.prime_budget,
                point_budget: cli.point_budget,
            };
            let r = lfunclab::survey_delta(&e, *d, *n, &opts)?;
            Ok((json!({"curve": doc, "d": d, "n": n, "sample": sample}), to_value(&r), EXIT_OK))
        }
        Command::Hodge { n, d } => {
            let t = hodgelab::primitive_hodge(*n, *d)?;
            let (pass, k) = if d % 2 == 1 {
                let s = hodgelab::signature_congruence(*n, *d)?;
                (Some(s.pass), Some(to_value(&hodgelab::k_field_hypersurface(*d)?)))
            } else {
                (None, None)
            };
            let mut res = to_value(&t);
            res["congruence_pass"] = json!(pass);
            res["K"] = k.unwrap_or(Value::Null);
            Ok((json!({"n": n, "d": d}), res, EXIT_OK))
        }
        Command::ValidateReport { report } => {
            let doc = read_json(report)?;
            let v = schema::validate(&doc);
            let res = json!({
                "valid": v.valid,
                "version": v.version,
                "errors": v.errors,
                "warnings": v.warnings,
            });
            let code = if v.valid { EXIT_OK } else { EXIT_ERROR };
            Ok((json!({"report": report}), res, code))
        }
    }
}
