//! Command-line front end. `run` returns the text written to stdout (or to
//! `--output`) so the binary and the tests share one code path.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::betanum::NumerationSystem;
use crate::classify::{build_delta, classify, epsilon_sequence, DeltaMode};
use crate::dense::Matrix;
use crate::error::Error;
use crate::gibbs::{
    divergence_witness_b, m0_asymptotics, potential_limit_scan, potential_trace, weak_gibbs_verdict, witness_a,
    EXHAUSTIVE_CAP,
};
use crate::io::{dump_family, dump_system, load_family, load_system, parse_interval, parse_word, LoadedSystem};
use crate::matcore::Mat2;
use crate::measure::{monte_carlo, BernoulliMeasure, McTarget, REFINEMENT_TOLERANCE};
use crate::prodsim::{convergence_probe, mv_bounds, product_prefix, trajectory, ProbeConfig};
use crate::scalar::{format_rational, Rational};

/// Environment variable overriding the significant digits of JSON floats.
pub const DIGITS_ENV: &str = "INFPROD_DIGITS";
pub const DEFAULT_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "infprod", version, about = "Infinite products of 2x2 nonnegative matrices and Bernoulli convolutions")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide uniform convergence of a family from the case predicates.
    Classify(ClassifyArgs),
    /// Simulate products: convergence probe, trajectories, M_V bounds.
    Probe(ProbeArgs),
    /// Carry set, digit matrices and partition of a quadratic base.
    Numeration(NumerationArgs),
    /// Cylinder and interval masses of the Bernoulli convolution.
    Measure(MeasureArgs),
    /// n-step potentials along a word.
    Potential(PotentialArgs),
    /// Weak-Gibbs verdict, sup-gap scan, witnesses and M_0 asymptotics.
    Gibbs(GibbsArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// Also build the conjugating matrix for case 1 or 2.
    #[arg(long, value_enum)]
    pub delta: Option<DeltaArg>,
    /// Signs of the determinants' running products along a word.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Print the parsed family back as JSON.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DeltaArg {
    Case1,
    Case2,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 60)]
    pub depth: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
    /// Report the trajectory of `n(P_k V)` along this word instead.
    #[arg(long)]
    pub word: Option<String>,
    /// Exact product of the first letters of `--word`.
    #[arg(long)]
    pub exact: bool,
    /// Report the bounds defining M_V.
    #[arg(long)]
    pub mv_bounds: bool,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// System JSON file; alternatively give `--a`, `--b` and `--p`.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long, requires = "b")]
    pub a: Option<u32>,
    #[arg(long, requires = "a")]
    pub b: Option<u32>,
    /// Comma-separated digit weights; uniform when omitted.
    #[arg(long, requires = "a")]
    pub p: Option<String>,
}

#[derive(Debug, Args)]
pub struct NumerationArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Refine,
    Mc,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Cylinder word, for `mu*[w]`.
    #[arg(long, conflicts_with_all = ["interval", "h"])]
    pub cylinder: Option<String>,
    /// Interval `[x, y]`; endpoints may use `β` (or `b`, `beta`).
    #[arg(long, conflicts_with = "h")]
    pub interval: Option<String>,
    /// Measure the interval under `mu*` instead of `mu_p`.
    #[arg(long)]
    pub star: bool,
    /// Evaluate `H(x) = p_0^x mu_p([0, beta^x])` at `x <= 0`.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = REFINEMENT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Finite or eventually periodic word, e.g. `1(0)`.
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WitnessArg {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long)]
    pub verdict: bool,
    #[arg(long)]
    pub scan: bool,
    #[arg(long, default_value_t = 14)]
    pub depth: usize,
    #[arg(long, default_value_t = EXHAUSTIVE_CAP)]
    pub breadth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the scan table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub witness: Option<WitnessArg>,
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    /// Asymptotics of the powers of M_0.
    #[arg(long)]
    pub m0: bool,
}

fn digits() -> usize {
    std::env::var(DIGITS_ENV).ok().and_then(|s| s.parse().ok()).filter(|&d| (1..=17).contains(&d)).unwrap_or(DEFAULT_DIGITS)
}

fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r: f64 = format!("{:.*e}", digits - 1, x).parse().expect("formatted float");
            *v = json!(r);
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to the configured significant digits.
pub fn render<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_floats(&mut v, digits());
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn mat_strings(m: &Matrix<Rational>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

fn mat2_strings(m: &Mat2<Rational>) -> [[String; 2]; 2] {
    m.rows().map(|r| r.map(|x| format_rational(&x)))
}

fn load(args: &SystemArgs) -> Result<LoadedSystem, Error> {
    if let Some(path) = &args.system {
        return load_system(path);
    }
    let (Some(a), Some(b)) = (args.a, args.b) else {
        return Err(Error::Usage("give --system or --a/--b".into()));
    };
    let system = match &args.p {
        None => NumerationSystem::uniform(a, b)?,
        Some(p) => {
            let p = p
                .split(',')
                .map(|t| crate::scalar::parse_rational(t.trim()).map_err(|e| Error::Usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            NumerationSystem::new(a, b, p)?
        }
    };
    Ok(LoadedSystem { name: None, system, inexact: false })
}

fn cmd_classify(args: &ClassifyArgs) -> Result<String, Error> {
    let f = load_family(&args.family)?;
    if args.dump {
        return Ok(dump_family(&f) + "\n");
    }
    let verdict = classify(&f.family);
    let mut out = json!({
        "name": f.name,
        "inexact": f.inexact,
        "converges": verdict.converges,
        "cases": verdict.cases,
        "patterns": verdict.patterns,
        "reports": verdict.reports,
    });
    if let Some(mode) = args.delta {
        let mode = match mode {
            DeltaArg::Case1 => DeltaMode::Case1,
            DeltaArg::Case2 => DeltaMode::Case2,
        };
        let d = build_delta(&f.family, mode)?;
        out["delta"] = json!({
            "alpha": format_rational(&d.alpha),
            "delta": mat2_strings(&d.delta),
            "bounds": [d.bounds.0.as_ref().map(format_rational), d.bounds.1.as_ref().map(format_rational)],
            "transformed": d.transformed.matrices.iter().map(mat2_strings).collect::<Vec<_>>(),
        });
    }
    if let Some(w) = &args.epsilon {
        let word = parse_word(w)?;
        if !word.is_finite() {
            return Err(Error::Usage("--epsilon needs a finite word".into()));
        }
        out["epsilon"] = json!(epsilon_sequence(&f.family, &word.prefix)?);
    }
    Ok(render(&out))
}

fn cmd_probe(args: &ProbeArgs) -> Result<String, Error> {
    let f = load_family(&args.family)?;
    let fam = f.family.to_f64();
    if let Some(w) = &args.word {
        let word = parse_word(w)?;
        word.check_alphabet(fam.len())?;
        if args.exact {
            let letters = word.take(args.depth)?;
            let p = product_prefix(&f.family, &letters)?;
            return Ok(render(&json!({ "letters": letters, "product": mat2_strings(&p) })));
        }
        let v = fam.v.clone();
        let t = trajectory(&fam, &word, args.depth, &v, None)?;
        return Ok(render(&t));
    }
    if args.mv_bounds {
        let b = mv_bounds(&fam, args.depth.min(16), 1 << 16, args.seed);
        return Ok(render(&json!({
            "m_hat": b.m_hat,
            "big_m_hat": b.big_m_hat,
            "exhaustive": b.exhaustive,
            "prefixes": b.prefixes,
            "d_columns_mv": b.mv().map(|m| m.d_columns()),
        })));
    }
    let cfg = ProbeConfig { depth: args.depth, samples: args.samples, seed: args.seed, threshold: args.threshold };
    Ok(render(&convergence_probe(&fam, &cfg)?))
}

fn cmd_numeration(args: &NumerationArgs) -> Result<String, Error> {
    let s = load(&args.sys)?;
    if args.dump {
        return Ok(dump_system(&s) + "\n");
    }
    let sys = &s.system;
    let m = BernoulliMeasure::new(sys.clone())?;
    let fam = sys.families();
    let pieces: Vec<Value> = sys
        .pieces()
        .iter()
        .map(|p| {
            let (l, r) = p.interval();
            json!({ "left": l.to_string(), "right": r.to_string() })
        })
        .collect();
    Ok(render(&json!({
        "name": s.name,
        "inexact": s.inexact,
        "a": sys.a(),
        "b": sys.b(),
        "beta": sys.base().beta_f64(),
        "alpha": sys.alpha().to_string(),
        "carries": sys.carries().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "digit_matrices": sys.digit_matrices().iter().map(mat_strings).collect::<Vec<_>>(),
        "pieces": pieces,
        "star": fam.star.iter().map(mat_strings).collect::<Vec<_>>(),
        "reduced": fam.reduced.iter().map(mat_strings).collect::<Vec<_>>(),
        "stationary": m.describe_v(),
        "stationary_residual": m.stationary().residual,
    })))
}

fn cmd_measure(args: &MeasureArgs) -> Result<String, Error> {
    let s = load(&args.sys)?;
    let sys = s.system.clone();
    if args.method == MethodArg::Mc && args.samples == 0 {
        return Err(crate::measure::MeasureError::NoSamples.into());
    }
    let m = BernoulliMeasure::new(sys.clone())?;
    if let Some(w) = &args.cylinder {
        let word = parse_word(w)?;
        if !word.is_finite() {
            return Err(Error::Usage("--cylinder needs a finite word".into()));
        }
        let est = match args.method {
            MethodArg::Mc => crate::measure::monte_carlo_cylinders(&sys, std::slice::from_ref(&word.prefix), args.samples, args.seed)?[0],
            _ => m.cylinder_measure(&word.prefix)?,
        };
        let exact = m.cylinder_measure_exact(&word.prefix)?;
        return Ok(render(&json!({ "word": word.prefix, "estimate": est, "exact": format_rational(&exact) })));
    }
    if let Some(x) = args.h {
        return Ok(render(&json!({ "x": x, "estimate": m.h_sample(x)? })));
    }
    let Some(iv) = &args.interval else {
        return Err(Error::Usage("give one of --cylinder, --interval, --h".into()));
    };
    let (lo, hi) = parse_interval(iv, sys.base())?;
    let est = match (args.method, args.star) {
        (MethodArg::Mc, star) => {
            let target = if star { McTarget::Fractional } else { McTarget::Full };
            monte_carlo(&sys, lo.to_f64(), hi.to_f64(), args.samples, args.seed, target)?
        }
        (_, true) => m.mu_star(&lo, &hi, args.tolerance)?,
        (_, false) => {
            let Some((l, h)) = m.clip_to_support(&lo, &hi) else {
                return Ok(render(&json!({ "interval": [lo.to_string(), hi.to_string()], "estimate": { "value": 0.0, "stderr": 0.0, "method": "refinement" } })));
            };
            m.mu_full_tol(&l, &h, args.tolerance)?
        }
    };
    Ok(render(&json!({ "interval": [lo.to_string(), hi.to_string()], "star": args.star, "estimate": est })))
}

fn cmd_potential(args: &PotentialArgs) -> Result<String, Error> {
    let s = load(&args.sys)?;
    let m = BernoulliMeasure::new(s.system)?;
    let word = parse_word(&args.word)?;
    let letters = word.take(args.n)?;
    Ok(render(&potential_trace(&m, &letters, args.n)?))
}

fn cmd_gibbs(args: &GibbsArgs) -> Result<String, Error> {
    let s = load(&args.sys)?;
    let sys = s.system;
    let mut out = serde_json::Map::new();
    let chosen = args.verdict || args.scan || args.witness.is_some() || args.m0;
    if args.verdict || !chosen {
        let v = weak_gibbs_verdict(&sys);
        if !args.scan && args.witness.is_none() && !args.m0 {
            return Ok(render(&v));
        }
        out.insert("verdict".into(), serde_json::to_value(v).expect("serializable"));
    }
    if args.m0 {
        out.insert("m0".into(), serde_json::to_value(m0_asymptotics(&sys)?).expect("serializable"));
    }
    let m = BernoulliMeasure::new(sys)?;
    if args.scan {
        let r = potential_limit_scan(&m, args.depth, args.breadth, args.seed);
        if let Some(path) = &args.csv {
            std::fs::write(path, r.to_csv())?;
        }
        out.insert("scan".into(), serde_json::to_value(r).expect("serializable"));
    }
    if let Some(w) = args.witness {
        let (name, value) = match w {
            WitnessArg::A => ("a", witness_a(&m, args.n)?),
            WitnessArg::B => ("b", divergence_witness_b(&m, args.n)?),
        };
        out.insert("witness".into(), json!({ "kind": name, "n": args.n, "value": value }));
    }
    Ok(render(&Value::Object(out)))
}

fn dispatch(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Numeration(a) => cmd_numeration(a),
        Command::Measure(a) => cmd_measure(a),
        Command::Potential(a) => cmd_potential(a),
        Command::Gibbs(a) => cmd_gibbs(a),
    }
}

/// Runs a parsed command line; the result is written to `--output` when
/// given and returned otherwise.
pub fn run(cli: &Cli) -> Result<String, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Error::Usage(e.to_string()))?;
    let text = pool.install(|| dispatch(cli))?;
    match &cli.output {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
