//! Command-line front end: compute bounds for one query, sweep a time range
//! into CSV curves, evaluate exact Poisson quantities, and run randomized
//! brute-force verification.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 tolerance/limit error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::api::{lower_expectation, SetKind};
use crate::error::{Error, Result};
use crate::exact::{poisson_expectation, transition_probability};
use crate::function::FunctionSpec;
use crate::generator::{RateInterval, WindowFunction};
use crate::oracle::{brute_force_phi, OracleBudget};
use crate::semigroup::{phi_apply, BoundResult, TimeGrid};
use crate::Count;

/// Textual function descriptor.
///
/// One of `ind:k`, `indge:k`, `indle:k`, `id`, `poly:a,b,p`, or `file:PATH`
/// where the file holds newline-separated values for counts `0..` followed
/// by a final `tail=<v>` line.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionDsl {
    IndicatorEq(Count),
    IndicatorGe(Count),
    IndicatorLe(Count),
    Identity,
    Poly { a: f64, b: f64, p: u32 },
    File(PathBuf),
}

impl FunctionDsl {
    pub fn parse(desc: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(msg);
        if desc == "id" {
            return Ok(FunctionDsl::Identity);
        }
        if let Some(rest) = desc.strip_prefix("ind:") {
            return rest
                .parse()
                .map(FunctionDsl::IndicatorEq)
                .map_err(|_| bad(format!("bad count in `{desc}`")));
        }
        if let Some(rest) = desc.strip_prefix("indge:") {
            return rest
                .parse()
                .map(FunctionDsl::IndicatorGe)
                .map_err(|_| bad(format!("bad count in `{desc}`")));
        }
        if let Some(rest) = desc.strip_prefix("indle:") {
            return rest
                .parse()
                .map(FunctionDsl::IndicatorLe)
                .map_err(|_| bad(format!("bad count in `{desc}`")));
        }
        if let Some(rest) = desc.strip_prefix("poly:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(bad(format!("`{desc}` must look like poly:a,b,p")));
            }
            let a = parts[0]
                .parse()
                .map_err(|_| bad(format!("bad coefficient in `{desc}`")))?;
            let b = parts[1]
                .parse()
                .map_err(|_| bad(format!("bad coefficient in `{desc}`")))?;
            let p = parts[2]
                .parse()
                .map_err(|_| bad(format!("bad exponent in `{desc}`")))?;
            return Ok(FunctionDsl::Poly { a, b, p });
        }
        if let Some(rest) = desc.strip_prefix("file:") {
            return Ok(FunctionDsl::File(PathBuf::from(rest)));
        }
        Err(bad(format!(
            "unknown function `{desc}`; expected ind:k, indge:k, indle:k, \
             id, poly:a,b,p or file:PATH"
        )))
    }

    pub fn to_spec(&self) -> Result<FunctionSpec> {
        match self {
            FunctionDsl::IndicatorEq(k) => Ok(FunctionSpec::indicator_eq(*k)),
            FunctionDsl::IndicatorGe(k) => Ok(FunctionSpec::indicator_ge(*k)),
            FunctionDsl::IndicatorLe(k) => Ok(FunctionSpec::indicator_le(*k)),
            FunctionDsl::Identity => Ok(FunctionSpec::identity()),
            FunctionDsl::Poly { a, b, p } => FunctionSpec::polynomial(*a, *b, *p),
            FunctionDsl::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let mut values = Vec::new();
                let mut tail = None;
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() {
                        continue;
                    }
                    if let Some(rest) = line.strip_prefix("tail=") {
                        tail = Some(rest.trim().parse().map_err(|_| {
                            Error::InvalidParameter(format!("bad tail value `{rest}`"))
                        })?);
                        continue;
                    }
                    if tail.is_some() {
                        return Err(Error::InvalidParameter(
                            "tail= must be the last line".into(),
                        ));
                    }
                    values.push(line.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad value line `{line}`"))
                    })?);
                }
                let tail = tail.ok_or_else(|| {
                    Error::InvalidParameter("function file needs a final tail=<v> line".into())
                })?;
                FunctionSpec::from_values(values, tail)
            }
        }
    }
}

/// Which sets a sweep computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetChoice {
    Poisson,
    Consistent,
    Both,
}

impl SetChoice {
    fn parse(text: &str) -> Result<Self> {
        match text {
            "poisson" => Ok(SetChoice::Poisson),
            "consistent" => Ok(SetChoice::Consistent),
            "both" => Ok(SetChoice::Both),
            other => Err(Error::InvalidParameter(format!(
                "unknown set `{other}`; expected poisson, consistent or both"
            ))),
        }
    }

    fn kinds(&self) -> Vec<SetKind> {
        match self {
            SetChoice::Poisson => vec![SetKind::PoissonSet],
            SetChoice::Consistent => vec![SetKind::ConsistentSet],
            SetChoice::Both => {
                vec![SetKind::PoissonSet, SetKind::ConsistentSet]
            }
        }
    }
}

/// Resolved sweep parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub interval: RateInterval,
    pub x: Count,
    pub function: FunctionDsl,
    pub times: Vec<f64>,
    pub eps: f64,
    pub sets: SetChoice,
}

#[derive(Parser, Debug)]
#[command(
    name = "impois",
    about = "Lower and upper expectations of counting processes with \
             interval-valued rates",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower/upper expectation bounds for a single query.
    Bounds(BoundsArgs),
    /// Bounds over a range of horizons, one CSV row per time point.
    Sweep(SweepArgs),
    /// Exact Poisson transition probabilities and expectations.
    Exact(ExactArgs),
    /// Randomized brute-force verification of the recursion engine.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Lower end of the rate interval.
    #[arg(long)]
    lo: f64,
    /// Upper end of the rate interval.
    #[arg(long)]
    hi: f64,
    /// Conditioning time.
    #[arg(long)]
    t: f64,
    /// Target time.
    #[arg(long)]
    s: f64,
    /// Count at the conditioning time.
    #[arg(long)]
    x: Count,
    /// Function descriptor (ind:k, indge:k, indle:k, id, poly:a,b,p, file:PATH).
    #[arg(long)]
    f: String,
    /// Error tolerance.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// poisson, consistent or both.
    #[arg(long, default_value = "both")]
    set: String,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Flat key=value config file (keys: lo, hi, x, f, eps, sets, start,
    /// stop, step, times). Command-line flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    x: Option<Count>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// poisson, consistent or both.
    #[arg(long)]
    sets: Option<String>,
    /// First horizon.
    #[arg(long)]
    start: Option<f64>,
    /// Last horizon.
    #[arg(long)]
    stop: Option<f64>,
    /// Horizon increment.
    #[arg(long)]
    step: Option<f64>,
    /// Explicit comma-separated horizon list (overrides start/stop/step).
    #[arg(long)]
    times: Option<String>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    /// Poisson rate.
    #[arg(long)]
    rate: f64,
    /// Duration (transition-probability form, with --x and --y).
    #[arg(long)]
    dt: Option<f64>,
    /// Start count.
    #[arg(long)]
    x: Count,
    /// End count (transition-probability form).
    #[arg(long)]
    y: Option<Count>,
    /// Conditioning time (expectation form, with --s and --f).
    #[arg(long)]
    t: Option<f64>,
    /// Target time (expectation form).
    #[arg(long)]
    s: Option<f64>,
    /// Function descriptor (expectation form).
    #[arg(long)]
    f: Option<String>,
}

#[derive(Args, Debug)]
struct OracleCheckArgs {
    /// Number of randomized instances.
    #[arg(long)]
    cases: u64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Entry point used by the binary and by tests. Parses `args` (including
/// the program name) and runs the subcommand, writing results to `out` and
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version on stdout with success
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match cli.command {
        Command::Bounds(args) => fallible(cmd_bounds(&args, out), err),
        Command::Sweep(args) => fallible(cmd_sweep(&args, out), err),
        Command::Exact(args) => fallible(cmd_exact(&args, out), err),
        Command::OracleCheck(args) => oracle_check_run(args.cases, args.seed, 0.0, out),
    }
}

/// A command failure with its exit code and rendered message.
struct CliFailure {
    code: i32,
    message: String,
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        CliFailure {
            code: exit_code_for(&e),
            message: e.to_string(),
        }
    }
}

fn fallible(r: std::result::Result<(), CliFailure>, err: &mut dyn Write) -> i32 {
    match r {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ToleranceTooTight { .. } => 3,
        _ => 2,
    }
}

fn fmt12(v: f64) -> String {
    // canonicalize -0.0 so equal values always print identically
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.12}")
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(e.to_string())),
    }
}

fn bound_row(t: f64, s: f64, x: Count, set: SetKind, r: &BoundResult) -> String {
    format!(
        "{t},{s},{x},{set},{},{},{:.6e},{},{}",
        fmt12(r.lower),
        fmt12(r.upper),
        r.error_bound,
        r.steps,
        r.truncation_top
    )
}

fn bound_json(t: f64, s: f64, x: Count, set: SetKind, r: &BoundResult) -> String {
    format!(
        "{{\"t\":{t},\"s\":{s},\"x\":{x},\"set\":\"{set}\",\"lower\":{},\
         \"upper\":{},\"error_bound\":{:.6e},\"steps\":{},\
         \"truncation_top\":{}}}",
        fmt12(r.lower),
        fmt12(r.upper),
        r.error_bound,
        r.steps,
        r.truncation_top
    )
}

fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> std::result::Result<(), CliFailure> {
    let interval = RateInterval::new(args.lo, args.hi)?;
    let f = FunctionDsl::parse(&args.f)?.to_spec()?;
    let sets = SetChoice::parse(&args.set)?.kinds();
    let mut results = Vec::new();
    for set in sets {
        let r = lower_expectation(set, &interval, args.t, args.s, args.x, &f, args.eps)?;
        results.push((set, r));
    }
    let mut text = String::new();
    match args.format.as_str() {
        "csv" => {
            text.push_str("t,s,x,set,lower,upper,error_bound,steps,truncation_top\n");
            for (set, r) in &results {
                let _ = writeln!(text, "{}", bound_row(args.t, args.s, args.x, *set, r));
            }
        }
        "json" => {
            text.push_str("[\n");
            for (i, (set, r)) in results.iter().enumerate() {
                let sep = if i + 1 < results.len() { "," } else { "" };
                let _ = writeln!(
                    text,
                    "  {}{sep}",
                    bound_json(args.t, args.s, args.x, *set, r)
                );
            }
            text.push_str("]\n");
        }
        other => return Err(Error::InvalidParameter(format!("unknown format `{other}`")).into()),
    }
    emit(out, &args.out, &text)?;
    Ok(())
}

fn parse_times(text: &str) -> Result<Vec<f64>> {
    let mut times = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        times.push(
            part.parse()
                .map_err(|_| Error::InvalidParameter(format!("bad time `{part}`")))?,
        );
    }
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time list".into()));
    }
    Ok(times)
}

fn times_from_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && start >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "start must be >= 0, got {start}"
        )));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be > 0, got {step}"
        )));
    }
    if stop < start {
        return Err(Error::InvalidParameter(format!(
            "stop {stop} below start {start}"
        )));
    }
    let mut times = Vec::new();
    let n = ((stop - start) / step + 1e-9).floor() as u64;
    for k in 0..=n {
        times.push(start + step * k as f64);
    }
    Ok(times)
}

/// Merge the config file (when given) with command-line flags; flags win.
fn resolve_sweep(args: &SweepArgs) -> Result<SweepConfig> {
    let mut file: std::collections::HashMap<String, String> = Default::default();
    if let Some(path) = &args.config {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("config line `{line}` is not key=value"))
            })?;
            file.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    let take_f64 = |flag: Option<f64>, key: &str| -> Result<Option<f64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        file.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad {key} `{v}`")))
            })
            .transpose()
    };
    let missing = |key: &str| Error::InvalidParameter(format!("missing `{key}`"));

    let lo = take_f64(args.lo, "lo")?.ok_or_else(|| missing("lo"))?;
    let hi = take_f64(args.hi, "hi")?.ok_or_else(|| missing("hi"))?;
    let x = match args.x {
        Some(x) => x,
        None => file
            .get("x")
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad x `{v}`")))
            })
            .transpose()?
            .ok_or_else(|| missing("x"))?,
    };
    let fdesc = args
        .f
        .clone()
        .or_else(|| file.get("f").cloned())
        .ok_or_else(|| missing("f"))?;
    let eps = take_f64(args.eps, "eps")?.unwrap_or(1e-4);
    let sets = SetChoice::parse(
        args.sets
            .as_deref()
            .or(file.get("sets").map(|s| s.as_str()))
            .unwrap_or("both"),
    )?;
    let times_text = args.times.clone().or_else(|| file.get("times").cloned());
    let times = if let Some(text) = times_text {
        parse_times(&text)?
    } else {
        let start = take_f64(args.start, "start")?.ok_or_else(|| missing("start"))?;
        let stop = take_f64(args.stop, "stop")?.ok_or_else(|| missing("stop"))?;
        let step = take_f64(args.step, "step")?.ok_or_else(|| missing("step"))?;
        times_from_range(start, stop, step)?
    };
    Ok(SweepConfig {
        interval: RateInterval::new(lo, hi)?,
        x,
        function: FunctionDsl::parse(&fdesc)?,
        times,
        eps,
        sets,
    })
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> std::result::Result<(), CliFailure> {
    let config = resolve_sweep(args)?;
    let f = config.function.to_spec()?;
    let kinds = config.sets.kinds();
    let mut times = config.times.clone();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // fixed column order: consistent first, then poisson
    let ordered: Vec<SetKind> = {
        let mut v = Vec::new();
        if kinds.contains(&SetKind::ConsistentSet) {
            v.push(SetKind::ConsistentSet);
        }
        if kinds.contains(&SetKind::PoissonSet) {
            v.push(SetKind::PoissonSet);
        }
        v
    };
    let mut header = vec!["t".to_string()];
    for set in &ordered {
        header.push(format!("lower_{set}"));
        header.push(format!("upper_{set}"));
    }

    let mut rows: Vec<(f64, Vec<(SetKind, BoundResult)>)> = Vec::new();
    for &t in &times {
        let mut row = Vec::new();
        for set in &ordered {
            let r = lower_expectation(*set, &config.interval, 0.0, t, config.x, &f, config.eps)
                .map_err(|e| CliFailure {
                    code: exit_code_for(&e),
                    message: format!("at t = {t}: {e}"),
                })?;
            row.push((*set, r));
        }
        rows.push((t, row));
    }

    let mut text = String::new();
    match args.format.as_str() {
        "csv" => {
            let _ = writeln!(text, "{}", header.join(","));
            for (t, row) in &rows {
                let mut fields = vec![format!("{t}")];
                for (_, r) in row {
                    fields.push(fmt12(r.lower));
                    fields.push(fmt12(r.upper));
                }
                let _ = writeln!(text, "{}", fields.join(","));
            }
        }
        "json" => {
            text.push_str("[\n");
            for (i, (t, row)) in rows.iter().enumerate() {
                let mut obj = format!("  {{\"t\":{t}");
                for (set, r) in row {
                    let _ = write!(
                        obj,
                        ",\"lower_{set}\":{},\"upper_{set}\":{}",
                        fmt12(r.lower),
                        fmt12(r.upper)
                    );
                }
                obj.push('}');
                if i + 1 < rows.len() {
                    obj.push(',');
                }
                let _ = writeln!(text, "{obj}");
            }
            text.push_str("]\n");
        }
        other => return Err(Error::InvalidParameter(format!("unknown format `{other}`")).into()),
    }
    emit(out, &args.out, &text)?;
    Ok(())
}

fn cmd_exact(args: &ExactArgs, out: &mut dyn Write) -> std::result::Result<(), CliFailure> {
    match (args.dt, args.y, args.t, args.s, &args.f) {
        (Some(dt), Some(y), None, None, None) => {
            let p = transition_probability(args.rate, dt, args.x, y)?;
            writeln!(out, "{}", fmt12(p)).map_err(|e| Error::Io(e.to_string()))?;
            Ok(())
        }
        (None, None, Some(t), Some(s), Some(fdesc)) => {
            let f = FunctionDsl::parse(fdesc)?.to_spec()?;
            let v = poisson_expectation(args.rate, t, s, args.x, &f, 1e-13)?;
            writeln!(out, "{}", fmt12(v)).map_err(|e| Error::Io(e.to_string()))?;
            Ok(())
        }
        _ => Err(Error::InvalidParameter(
            "use either --rate --dt --x --y (transition probability) or \
             --rate --t --s --x --f (expectation)"
                .into(),
        )
        .into()),
    }
}

/// Randomized engine-vs-enumeration verification. `perturb` shifts the
/// engine's output and exists so the detector itself can be tested; the
/// command line always passes zero.
#[doc(hidden)]
pub fn oracle_check_run(cases: u64, seed: u64, perturb: f64, out: &mut dyn Write) -> i32 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = OracleBudget::default();
    let mut failures = 0u64;
    for case in 0..cases {
        let lo = rng.gen_range(0.0..2.0);
        let hi = lo + rng.gen_range(0.0..2.0);
        let interval = RateInterval::new(lo, hi).expect("valid interval");
        let len = rng.gen_range(2..=budget.max_window());
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let tail = *values.last().unwrap();
        let g = WindowFunction::new(0, values, tail).expect("valid window");
        let steps = rng.gen_range(1..=budget.max_steps()) as u64;
        let duration = steps as f64 * rng.gen_range(0.01..1.0) / (1.0 + interval.operator_norm());
        let grid = TimeGrid::uniform(0.0, duration, steps).expect("valid grid");

        let engine = phi_apply(&interval, &grid, &g).expect("engine run");
        let oracle = brute_force_phi(&interval, &grid, &g, &budget).expect("oracle run");
        let worst = engine
            .values()
            .iter()
            .zip(oracle.values())
            .map(|(a, b)| (a + perturb - b).abs())
            .fold(0.0f64, f64::max);
        if worst > 1e-12 {
            failures += 1;
            let _ = writeln!(
                out,
                "failure case={case} interval=[{lo},{hi}] window={:?} \
                 steps={steps} duration={duration} deviation={worst:e}",
                g.values()
            );
        }
    }
    let _ = writeln!(out, "cases={cases} failures={failures} seed={seed}");
    if failures == 0 {
        0
    } else {
        1
    }
}
