//! Command-line front end: `check`, `classify`, `chain`, `sweep`, `search`.
//!
//! Exit status: 0 when every verdict is `holds` or `inapplicable` (or the
//! classifier passes), 1 when any verdict is `violated` (or the classifier
//! fails), 2 on usage errors, 3 on inconclusive verdicts and I/O errors.
//!
//! Grid flags take `v`, `lo:hi:n` (n points, endpoints included) or a
//! comma-separated list of those. Search ranges take `v` or `lo:hi`.
//! `HH_SEED` (decimal) overrides the classifier and search seed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{self, Variant};
use crate::classify::{self, ClassParams, ClassVerdict, ClassifyOptions};
use crate::funcspec::{self, Family, FamilySpec, FunctionExpr};
use crate::quadrature::Interval;
use crate::report::{self, ChainOutput, ClassifyOutput, Emit, Format, ReportError};
use crate::verify::{
    self, FamilyGrid, Range, SearchBox, SearchOptions, SweepGrid, SweepOptions, SweepSummary, Theorem, Verdict,
    VerifyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const SEED_ENV: &str = "HH_SEED";

#[derive(Debug, Parser)]
#[command(name = "hhverify", version, about = "Numerically verify Hadamard-type inequalities for m- and (alpha,m)-logarithmically convex functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify one or more inequalities for a single function and interval.
    Check(CheckArgs),
    /// Test membership in the m- or (alpha,m)-logarithmically convex class.
    Classify(ClassifyArgs),
    /// Evaluate the dr1 or dr2 chain of means.
    Chain(ChainArgs),
    /// Evaluate inequalities over a Cartesian parameter grid.
    Sweep(SweepArgs),
    /// Search a parameter box for the smallest margin.
    Search(SearchArgs),
}

#[derive(Debug, Args)]
struct FunctionSource {
    /// Function expression in x, e.g. "exp(2*x)+1".
    #[arg(long = "f", value_name = "EXPR", conflicts_with = "family")]
    expr: Option<String>,
    /// Registered family: const, exp_linear, exp_affine, poly_shift.
    #[arg(long, value_name = "NAME")]
    family: Option<String>,
    /// Family parameter, NAME=VALUE (repeatable).
    #[arg(long = "fparam", value_name = "NAME=VALUE")]
    fparams: Vec<String>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    source: FunctionSource,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Comma-separated theorem ids or `all`.
    #[arg(long, value_parser = parse_theorems, default_value = "all")]
    theorem: TheoremSet,
    #[arg(long, value_parser = parse_variant, default_value = "corrected")]
    variant: Variant,
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    #[arg(long = "grid-n", default_value_t = classify::DEFAULT_GRID_N)]
    grid_n: usize,
    #[arg(long = "tol-rel", default_value_t = classify::DEFAULT_TOL_REL)]
    tol_rel: f64,
    /// Skip the hypothesis classifier.
    #[arg(long = "no-hypothesis")]
    no_hypothesis: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: FunctionSource,
    /// Upper end of the domain [0, upper]; defaults to b/m when --b is given.
    #[arg(long)]
    upper: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Test the (alpha,m) class instead of the m class.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "grid-n", default_value_t = classify::DEFAULT_GRID_N)]
    grid_n: usize,
    #[arg(long = "tol-rel", default_value_t = classify::DEFAULT_TOL_REL)]
    tol_rel: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[command(flatten)]
    source: FunctionSource,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// dr1 (three terms) or dr2 (six terms).
    #[arg(long, value_parser = parse_chain, default_value = "dr2")]
    which: Theorem,
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    family: String,
    /// NAME=GRID (repeatable).
    #[arg(long = "fparam", value_name = "NAME=GRID")]
    fparams: Vec<String>,
    #[arg(long, value_parser = parse_grid)]
    a: Grid,
    #[arg(long, value_parser = parse_grid)]
    b: Grid,
    #[arg(long, value_parser = parse_grid, default_value = "1")]
    alpha: Grid,
    #[arg(long, value_parser = parse_grid, default_value = "1")]
    m: Grid,
    #[arg(long, value_parser = parse_theorems, default_value = "all")]
    theorem: TheoremSet,
    #[arg(long, value_parser = parse_variant, default_value = "corrected")]
    variant: Variant,
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    /// Classify each family point once and attach the result.
    #[arg(long = "check-hypothesis")]
    check_hypothesis: bool,
    #[arg(long = "grid-n", default_value_t = classify::DEFAULT_GRID_N)]
    grid_n: usize,
    #[arg(long = "tol-rel", default_value_t = classify::DEFAULT_TOL_REL)]
    tol_rel: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    family: String,
    /// NAME=RANGE (repeatable).
    #[arg(long = "fparam", value_name = "NAME=RANGE")]
    fparams: Vec<String>,
    #[arg(long, value_parser = parse_range)]
    a: Range,
    #[arg(long, value_parser = parse_range)]
    b: Range,
    #[arg(long, value_parser = parse_range, default_value = "1")]
    alpha: Range,
    #[arg(long, value_parser = parse_range, default_value = "1")]
    m: Range,
    #[arg(long, value_parser = parse_single_theorem)]
    theorem: Theorem,
    #[arg(long, value_parser = parse_variant, default_value = "corrected")]
    variant: Variant,
    #[arg(long, default_value_t = 200)]
    budget: usize,
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq)]
struct TheoremSet(Vec<Theorem>);

#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

fn parse_theorems(s: &str) -> Result<TheoremSet, String> {
    if s == "all" {
        return Ok(TheoremSet(Theorem::ALL.to_vec()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<Theorem>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(TheoremSet)
}

fn parse_single_theorem(s: &str) -> Result<Theorem, String> {
    s.parse().map_err(|e: verify::VerifyError| e.to_string())
}

fn parse_chain(s: &str) -> Result<Theorem, String> {
    match parse_single_theorem(s)? {
        t @ (Theorem::Dr1 | Theorem::Dr2) => Ok(t),
        other => Err(format!("`{other}` is not a chain (expected dr1 or dr2)")),
    }
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    match s {
        "printed" => Ok(Variant::Printed),
        "corrected" => Ok(Variant::Corrected),
        _ => Err(format!("unknown variant `{s}` (expected printed or corrected)")),
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// `v`, `lo:hi:n`, or a comma-separated list of those.
pub fn parse_grid_values(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [v] => out.push(parse_f64(v)?),
            [lo, hi, n] => {
                let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
                let n: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a point count"))?;
                match n {
                    0 => return Err("grid needs at least one point".into()),
                    1 => out.push(lo),
                    _ => {
                        let steps = (n - 1) as f64;
                        out.extend((0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * (i as f64 / steps) }));
                    }
                }
            }
            _ => return Err(format!("`{part}` is not `v` or `lo:hi:n`")),
        }
    }
    Ok(out)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    parse_grid_values(s).map(Grid)
}

/// `v` or `lo:hi`.
pub fn parse_range(s: &str) -> Result<Range, String> {
    let fields: Vec<&str> = s.split(':').collect();
    match fields.as_slice() {
        [v] => Ok(Range::fixed(parse_f64(v)?)),
        [lo, hi] => {
            let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
            if lo > hi {
                return Err(format!("range `{s}` has lo > hi"));
            }
            Ok(Range::new(lo, hi))
        }
        _ => Err(format!("`{s}` is not `v` or `lo:hi`")),
    }
}

fn split_assignment(s: &str) -> Result<(&str, &str), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| format!("`{s}` is not NAME=VALUE"))
}

/// A failure that maps onto an exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Output(ReportError),
    /// The function could not be evaluated where needed.
    Undecided(String),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        Failure::Output(e)
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{flag}: {msg}"))
}

fn load_function(src: &FunctionSource) -> Result<FunctionExpr, Failure> {
    match (&src.expr, &src.family) {
        (Some(text), None) => funcspec::parse(text).map_err(|e| usage("--f", e)),
        (None, Some(name)) => {
            let mut spec = FamilySpec { name: name.clone(), params: Default::default() };
            for fp in &src.fparams {
                let (k, v) = split_assignment(fp).map_err(|e| usage("--fparam", e))?;
                spec.params.insert(k.to_string(), parse_f64(v).map_err(|e| usage("--fparam", e))?);
            }
            spec.instantiate().map_err(|e| usage("--family", e))
        }
        _ => Err(Failure::Usage("one of --f or --family is required".into())),
    }
}

fn interval(a: f64, b: f64) -> Result<Interval, Failure> {
    Interval::new(a, b).map_err(|e| usage("--a/--b", e))
}

fn class_params(alpha: f64, m: f64) -> Result<ClassParams, Failure> {
    ClassParams::new(alpha, m).map_err(|e| usage("--alpha/--m", e))
}

fn check_tol(tol: f64) -> Result<f64, Failure> {
    if tol.is_finite() && tol >= crate::quadrature::MIN_TOL {
        Ok(tol)
    } else {
        Err(usage("--tol", format!("{tol} is below {}", crate::quadrature::MIN_TOL)))
    }
}

fn classify_opts(grid_n: usize, tol_rel: f64, seed: Option<u64>) -> Result<ClassifyOptions, Failure> {
    if grid_n < 3 {
        return Err(usage("--grid-n", "must be at least 3"));
    }
    if !(tol_rel.is_finite() && tol_rel >= 0.0) {
        return Err(usage("--tol-rel", "must be finite and >= 0"));
    }
    Ok(ClassifyOptions { grid_n, tol_rel, seed: seed.unwrap_or(classify::DEFAULT_SEED) })
}

fn exit_for(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v {
            Verdict::Violated => return EXIT_VIOLATED,
            Verdict::Inconclusive => code = EXIT_INCONCLUSIVE,
            Verdict::Holds | Verdict::Inapplicable => {}
        }
    }
    code
}

fn emit(item: &dyn Emit, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    Ok(report::emit_report(item, output.format, output.out.as_deref(), stdout)?)
}

fn run_check(args: &CheckArgs, seed: Option<u64>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let f = load_function(&args.source)?;
    let iv = interval(args.a, args.b)?;
    let params = class_params(args.alpha, args.m)?;
    let opts = VerifyOptions {
        tol: check_tol(args.tol)?,
        check_hypothesis: !args.no_hypothesis,
        classify: classify_opts(args.grid_n, args.tol_rel, seed)?,
    };
    let reports: Vec<_> = args
        .theorem
        .0
        .iter()
        .map(|&t| verify::verify_theorem(t, args.variant, &f, iv, params, &opts))
        .collect();
    let code = exit_for(reports.iter().map(|r| r.verdict));
    if let [single] = reports.as_slice() {
        emit(single, &args.output, stdout)?;
    } else {
        emit(&SweepSummary::from_reports(reports), &args.output, stdout)?;
    }
    Ok(code)
}

fn run_classify(args: &ClassifyArgs, seed: Option<u64>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let f = load_function(&args.source)?;
    let upper = match (args.upper, args.b) {
        (Some(u), _) => u,
        (None, Some(b)) => b / args.m,
        (None, None) => return Err(Failure::Usage("one of --upper or --b is required".into())),
    };
    let opts = classify_opts(args.grid_n, args.tol_rel, seed)?;
    let (class, result) = match args.alpha {
        Some(alpha) => {
            let p = class_params(alpha, args.m)?;
            (
                format!("(alpha,m)-log-convex(alpha={alpha:?},m={:?}) on [0,{upper:?}]", args.m),
                classify::check_alpha_m_log_convex(&f, upper, p, &opts),
            )
        }
        None => (
            format!("m-log-convex(m={:?}) on [0,{upper:?}]", args.m),
            classify::check_m_log_convex(&f, upper, args.m, &opts),
        ),
    };
    let report = match result {
        Ok(r) => r,
        Err(e @ classify::ClassifyError::Eval { .. }) => return Err(Failure::Undecided(e.to_string())),
        Err(e) => return Err(usage("classify", e)),
    };
    let out = ClassifyOutput { class, label: report.label().to_string(), report };
    let text = out.render(args.output.format)?;
    report::write_text(&text, args.output.out.as_deref(), stdout)?;
    Ok(match out.report.verdict {
        ClassVerdict::Pass => EXIT_OK,
        ClassVerdict::Fail => EXIT_VIOLATED,
    })
}

fn run_chain(args: &ChainArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let f = load_function(&args.source)?;
    let iv = interval(args.a, args.b)?;
    let tol = check_tol(args.tol)?;
    let chain = match args.which {
        Theorem::Dr1 => bounds::chain_dr1(&f, iv, tol),
        _ => bounds::chain_dr2(&f, iv, tol),
    };
    let params = class_params(1.0, 1.0)?;
    let report = verify::verify_theorem(
        args.which,
        Variant::Corrected,
        &f,
        iv,
        params,
        &VerifyOptions { tol, check_hypothesis: false, ..VerifyOptions::default() },
    );
    let code = exit_for([report.verdict]);
    match chain {
        Ok(chain) => emit(&ChainOutput { chain, report }, &args.output, stdout)?,
        Err(_) => emit(&report, &args.output, stdout)?,
    }
    Ok(code)
}

fn run_sweep(args: &SweepArgs, seed: Option<u64>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let family: Family = args.family.parse().map_err(|e| usage("--family", e))?;
    let mut fgrid = FamilyGrid { family, params: Default::default() };
    for fp in &args.fparams {
        let (k, v) = split_assignment(fp).map_err(|e| usage("--fparam", e))?;
        fgrid.params.insert(k.to_string(), parse_grid_values(v).map_err(|e| usage("--fparam", e))?);
    }
    let grid = SweepGrid {
        families: fgrid.members(),
        a: args.a.0.clone(),
        b: args.b.0.clone(),
        alpha: args.alpha.0.clone(),
        m: args.m.0.clone(),
        theorems: args.theorem.0.clone(),
        variant: args.variant,
    };
    let opts = SweepOptions {
        tol: check_tol(args.tol)?,
        check_hypothesis: args.check_hypothesis,
        classify: classify_opts(args.grid_n, args.tol_rel, seed)?,
    };
    let summary = verify::sweep(&grid, &opts).map_err(|e| usage("sweep", e))?;
    let code = exit_for(summary.reports.iter().map(|r| r.verdict));
    emit(&summary, &args.output, stdout)?;
    Ok(code)
}

fn run_search(args: &SearchArgs, seed: Option<u64>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let family: Family = args.family.parse().map_err(|e| usage("--family", e))?;
    let mut family_ranges = std::collections::BTreeMap::new();
    for fp in &args.fparams {
        let (k, v) = split_assignment(fp).map_err(|e| usage("--fparam", e))?;
        family_ranges.insert(k.to_string(), parse_range(v).map_err(|e| usage("--fparam", e))?);
    }
    let bx = SearchBox { family, family_ranges, a: args.a, b: args.b, alpha: args.alpha, m: args.m };
    let opts = SearchOptions {
        budget: args.budget,
        tol: check_tol(args.tol)?,
        seed: seed.unwrap_or(classify::DEFAULT_SEED),
    };
    let result = verify::search_min_margin(&bx, args.theorem, args.variant, &opts).map_err(|e| usage("search", e))?;
    let code = exit_for(result.report.iter().map(|r| r.verdict));
    emit(&result, &args.output, stdout)?;
    Ok(code)
}

/// Parses `HH_SEED`.
pub fn parse_seed(value: Option<&str>) -> Result<Option<u64>, String> {
    value
        .map(|v| v.trim().parse::<u64>().map_err(|_| format!("{SEED_ENV}=`{v}` is not a decimal integer")))
        .transpose()
}

/// Runs the tool with explicit streams and seed override; returns the exit status.
pub fn run_with<I, T>(argv: I, seed_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let seed = match parse_seed(seed_env) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Check(args) => run_check(args, seed, stdout),
        Command::Classify(args) => run_classify(args, seed, stdout),
        Command::Chain(args) => run_chain(args, stdout),
        Command::Sweep(args) => run_sweep(args, seed, stdout),
        Command::Search(args) => run_search(args, seed, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Output(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INCONCLUSIVE
        }
        Err(Failure::Undecided(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INCONCLUSIVE
        }
    }
}

/// Runs the tool against the process streams and environment.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let seed = std::env::var(SEED_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, seed.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid_values("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid_values("0.25").unwrap(), vec![0.25]);
        assert_eq!(parse_grid_values("1,2:3:2").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid_values("0.1:0.3:3").unwrap().last(), Some(&0.3));
        assert!(parse_grid_values("0:1").is_err());
        assert!(parse_grid_values("0:1:0").is_err());
        assert!(parse_grid_values("x").is_err());
    }

    #[test]
    fn range_syntax() {
        assert_eq!(parse_range("0.1:0.9").unwrap(), Range::new(0.1, 0.9));
        assert_eq!(parse_range("1").unwrap(), Range::fixed(1.0));
        assert!(parse_range("0.9:0.1").is_err());
    }

    #[test]
    fn theorem_lists() {
        assert_eq!(parse_theorems("eq4,eq22").unwrap().0, vec![Theorem::Eq4, Theorem::Eq22]);
        assert_eq!(parse_theorems("all").unwrap().0.len(), 7);
        assert!(parse_theorems("bogus").is_err());
        assert!(parse_chain("eq4").is_err());
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed(None).unwrap(), None);
        assert_eq!(parse_seed(Some("42")).unwrap(), Some(42));
        assert!(parse_seed(Some("0x10")).is_err());
    }

    #[test]
    fn exit_priorities() {
        assert_eq!(exit_for([Verdict::Holds, Verdict::Inapplicable]), EXIT_OK);
        assert_eq!(exit_for([Verdict::Inconclusive, Verdict::Holds]), EXIT_INCONCLUSIVE);
        assert_eq!(exit_for([Verdict::Inconclusive, Verdict::Violated]), EXIT_VIOLATED);
    }
}
