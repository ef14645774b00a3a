//! `tf-hpm` command line: `slope`, `table`, `converge` and `oracle`.
//!
//! Results go to stdout as CSV or JSON and are byte-identical for identical
//! arguments; progress, timings and warnings go to stderr.

pub mod cache;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tf_hpm::algebra::{BigFloat, BigRational, MIN_DIGITS};
use tf_hpm::hankel::{default_window, required_order, track_sequence, RootSequence};
use tf_hpm::oracle::shoot_slope;
use tf_hpm::pade::tf_table;
use tf_hpm::series::EquationKind;

use output::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

pub const MAX_OFFSET: usize = 6;
pub const TABLE_GRID: &str = "1,5,10,20,50,100";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "tf-hpm", version, about = "Hankel-Pade slopes and profiles for Thomas-Fermi-type equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root sequence f_2^[D,d] and its slope estimates for each D.
    Slope(SlopeArgs),
    /// u(x) from the [M/N] Pade approximant at the converged slope.
    Table(TableArgs),
    /// The (D, L) convergence dataset for one or more offsets d.
    Converge(SlopeArgs),
    /// Slope by direct integration and bisection.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// atom or magnetic
    #[arg(long, default_value = "atom")]
    equation: EquationKind,
    /// Working precision in decimal digits.
    #[arg(long, default_value_t = 50)]
    precision: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Significant digits printed per value.
    #[arg(long, default_value_t = 20)]
    digits: usize,
    /// Directory for cached series tables (default: $TF_HANKEL_CACHE).
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SlopeArgs {
    #[command(flatten)]
    common: Common,
    /// Hankel offset; repeat for several sequences.
    #[arg(long = "d")]
    d: Vec<usize>,
    /// Largest Hankel dimension D.
    #[arg(long = "D-max", default_value_t = 15)]
    d_max: usize,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    common: Common,
    /// Pade orders as M/N.
    #[arg(long, default_value = "5/8")]
    pade: String,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',', default_value = TABLE_GRID)]
    x: Vec<String>,
    /// Use this u'(0) instead of computing the converged slope.
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<String>,
    /// Hankel offset for the slope computation.
    #[arg(long = "d")]
    d: Option<usize>,
    #[arg(long = "D-max", default_value_t = 15)]
    d_max: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Bisection stops once the slope bracket is narrower than this.
    #[arg(long, default_value = "1e-10")]
    tol: String,
    /// Initial slope bracket as lo,hi.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    bracket: Vec<String>,
}

/// Validated settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub equation: EquationKind,
    pub d: Vec<usize>,
    pub d_max: usize,
    pub precision: u32,
    pub digits: usize,
    pub pade: (usize, usize),
    pub xs: Vec<String>,
    pub format: OutputFormat,
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "equation": self.equation.tag(),
            "precision": self.precision,
            "digits": self.digits,
        });
        let map = v.as_object_mut().expect("object");
        if matches!(self.command, "slope" | "converge" | "table") {
            map.insert("d".into(), json!(self.d));
            map.insert("D_max".into(), json!(self.d_max));
        }
        if self.command == "table" {
            map.insert("pade".into(), json!(format!("{}/{}", self.pade.0, self.pade.1)));
            map.insert("x".into(), json!(self.xs));
        }
        v
    }
}

fn check_common(c: &Common) -> Result<(), CliError> {
    if c.precision < MIN_DIGITS {
        return Err(CliError::Usage(format!(
            "--precision {}: at least {MIN_DIGITS} digits are required; use --precision {MIN_DIGITS}",
            c.precision
        )));
    }
    if c.digits == 0 {
        return Err(CliError::Usage("--digits 0: print at least one digit; use --digits 20".into()));
    }
    Ok(())
}

fn check_offset(d: usize) -> Result<(), CliError> {
    if d < 3 {
        return Err(CliError::Usage(format!(
            "--d {d}: the Hankel offset must satisfy d >= 3; use --d 3"
        )));
    }
    if d > MAX_OFFSET {
        return Err(CliError::Usage(format!(
            "--d {d}: offsets above {MAX_OFFSET} are not supported; use --d {MAX_OFFSET}"
        )));
    }
    Ok(())
}

fn check_d_max(d_max: usize) -> Result<(), CliError> {
    if d_max < 3 {
        return Err(CliError::Usage(format!(
            "--D-max {d_max}: at least two Hankel dimensions are needed; use --D-max 3"
        )));
    }
    Ok(())
}

fn default_offsets(kind: EquationKind, many: bool) -> Vec<usize> {
    match (kind, many) {
        (EquationKind::Atom, false) => vec![3],
        (EquationKind::Atom, true) => vec![3, 4, 5],
        (EquationKind::MagneticField, false) => vec![4],
        (EquationKind::MagneticField, true) => vec![4, 5],
    }
}

fn parse_pade(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--pade {s}: expected M/N with M < N, e.g. --pade 5/8"));
    let (m, n) = s.split_once('/').ok_or_else(bad)?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if m >= n {
        return Err(bad());
    }
    Ok((m, n))
}

fn parse_decimal(flag: &str, s: &str, digits: u32) -> Result<BigFloat, CliError> {
    BigFloat::parse(s.trim(), digits)
        .map_err(|_| CliError::Usage(format!("{flag} {s}: not a decimal number; use e.g. {flag} 0.5")))
}

fn slope_config(command: &'static str, a: &SlopeArgs) -> Result<RunConfig, CliError> {
    check_common(&a.common)?;
    let d = if a.d.is_empty() {
        default_offsets(a.common.equation, command == "converge")
    } else {
        a.d.clone()
    };
    d.iter().try_for_each(|&d| check_offset(d))?;
    check_d_max(a.d_max)?;
    Ok(RunConfig {
        command,
        equation: a.common.equation,
        d,
        d_max: a.d_max,
        precision: a.common.precision,
        digits: a.common.digits,
        pade: (tf_hpm::pade::DEFAULT_M, tf_hpm::pade::DEFAULT_N),
        xs: Vec::new(),
        format: a.common.format,
        cache: cache::resolve_dir(a.common.cache.as_deref()),
    })
}

/// Runs the tracker for one offset, warming the series cache first.
fn sequence(cfg: &RunConfig, d: usize, err: &mut dyn Write) -> Result<RootSequence, CliError> {
    if let Some(dir) = &cfg.cache {
        cache::warm(dir, cfg.equation, required_order(d, cfg.d_max)).map_err(CliError::compute)?;
    }
    let started = Instant::now();
    let seq = track_sequence(cfg.equation, d, cfg.d_max, cfg.precision, &default_window())
        .map_err(CliError::compute)?;
    let last = seq.last().expect("at least two dimensions");
    let converged = seq
        .converged_digits()
        .map_or_else(|| "unknown".to_string(), |c| c.to_string());
    writeln!(
        err,
        "{} d={d} D={}: slope {} (~{converged} converged digits, {:.2?})",
        cfg.equation,
        last.dim,
        last.slope.to_sig_string(cfg.digits),
        started.elapsed()
    )?;
    Ok(seq)
}

fn fmt_l(l: &Option<BigFloat>) -> String {
    l.as_ref().map(|l| l.to_sig_string(6)).unwrap_or_default()
}

fn metadata(cfg: &RunConfig) -> Value {
    json!({
        "precision": cfg.precision,
        "log_base": "10",
        "versions": {
            "tf-hpm": tf_hpm::VERSION,
            "tf-hpm-cli": env!("CARGO_PKG_VERSION"),
            "cache_format": cache::FORMAT_VERSION,
        },
    })
}

fn emit(cfg: &RunConfig, table: Table, results: Value, out: &mut dyn Write) -> Result<(), CliError> {
    match cfg.format {
        OutputFormat::Csv => table.write_csv(out)?,
        OutputFormat::Json => {
            let doc = json!({
                "config": cfg.to_json(),
                "results": results,
                "metadata": metadata(cfg),
            });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn run_slope(a: &SlopeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = slope_config("slope", a)?;
    let mut table = Table::new(&["D", "d", "s_root", "slope", "L_base10"]);
    let mut results = Vec::new();
    for &d in &cfg.d {
        let seq = sequence(&cfg, d, err)?;
        let mut rows = Vec::new();
        for e in &seq.entries {
            let row = vec![
                e.dim.to_string(),
                d.to_string(),
                e.s_root.to_sig_string(cfg.digits),
                e.slope.to_sig_string(cfg.digits),
                fmt_l(&e.log_diff),
            ];
            rows.push(json!({
                "D": row[0], "d": row[1], "s_root": row[2], "slope": row[3], "L_base10": row[4],
            }));
            table.push(row);
        }
        let last = seq.last().expect("nonempty");
        results.push(json!({
            "d": d,
            "rows": rows,
            "final_slope": last.slope.to_sig_string(cfg.digits),
            "converged_digits": seq.converged_digits(),
        }));
    }
    emit(&cfg, table, Value::Array(results), out)
}

fn run_converge(a: &SlopeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = slope_config("converge", a)?;
    let mut table = Table::new(&["D", "d", "L_base10"]);
    let mut results = Vec::new();
    for &d in &cfg.d {
        let seq = sequence(&cfg, d, err)?;
        let mut points = Vec::new();
        for (dim, l) in tf_hpm::hankel::diagnostics(&seq).map_err(CliError::compute)? {
            let row = vec![dim.to_string(), d.to_string(), l.to_sig_string(6)];
            points.push(json!({"D": row[0], "d": row[1], "L_base10": row[2]}));
            table.push(row);
        }
        results.push(json!({
            "d": d,
            "points": points,
            "converged_digits": seq.converged_digits(),
        }));
    }
    emit(&cfg, table, Value::Array(results), out)
}

fn run_table(a: &TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    check_common(&a.common)?;
    let pade = parse_pade(&a.pade)?;
    let d = a.d.unwrap_or(default_offsets(a.common.equation, false)[0]);
    check_offset(d)?;
    check_d_max(a.d_max)?;
    let precision = a.common.precision;
    let mut xs = Vec::with_capacity(a.x.len());
    for s in &a.x {
        let x = parse_decimal("--x", s, precision)?;
        if x.signum() < 0 {
            return Err(CliError::Usage(format!("--x {s}: evaluation points must be non-negative")));
        }
        xs.push(x);
    }
    let cfg = RunConfig {
        command: "table",
        equation: a.common.equation,
        d: vec![d],
        d_max: a.d_max,
        precision,
        digits: a.common.digits,
        pade,
        xs: a.x.iter().map(|s| s.trim().to_string()).collect(),
        format: a.common.format,
        cache: cache::resolve_dir(a.common.cache.as_deref()),
    };
    let (slope, source) = match &a.slope {
        Some(s) => (parse_decimal("--slope", s, precision)?, "given"),
        None => (sequence(&cfg, d, err)?.last().expect("nonempty").slope.clone(), "hankel"),
    };

    let (approx, rows) =
        tf_table(cfg.equation, &slope, pade.0, pade.1, &xs).map_err(CliError::compute)?;
    if !approx.poles.is_empty() {
        let poles: Vec<String> = approx.poles.iter().map(|p| p.to_sig_string(12)).collect();
        writeln!(err, "note: denominator has real zeros at t = {}", poles.join(", "))?;
    }

    let mut table = Table::new(&["x", "u", "status"]);
    let mut json_rows = Vec::new();
    let mut failed = 0;
    for (label, row) in cfg.xs.iter().zip(&rows) {
        let (u, status) = match &row.u {
            Ok(u) => (u.to_sig_string(cfg.digits), "ok".to_string()),
            Err(e) => {
                failed += 1;
                (String::new(), e.to_string())
            }
        };
        json_rows.push(json!({"x": label, "u": u, "status": status}));
        table.push(vec![label.clone(), u, status]);
    }
    let results = json!({
        "slope": slope.to_sig_string(cfg.digits),
        "slope_source": source,
        "poles": approx.poles.iter().map(|p| p.to_sig_string(cfg.digits)).collect::<Vec<_>>(),
        "rows": json_rows,
    });
    emit(&cfg, table, results, out)?;
    if failed > 0 {
        return Err(CliError::Compute(format!("{failed} table row(s) could not be evaluated")));
    }
    Ok(())
}

fn run_oracle(a: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    check_common(&a.common)?;
    let precision = a.common.precision;
    let tol = parse_decimal("--tol", &a.tol, precision)?;
    if tol.signum() <= 0 {
        return Err(CliError::Usage(format!("--tol {}: must be positive; use --tol 1e-10", a.tol)));
    }
    let kind = a.common.equation;
    let (lo, hi) = match a.bracket.as_slice() {
        [] => match kind {
            EquationKind::Atom => ("-2".to_string(), "-1".to_string()),
            EquationKind::MagneticField => ("-2".to_string(), "-0.5".to_string()),
        },
        [lo, hi] => (lo.clone(), hi.clone()),
        _ => {
            return Err(CliError::Usage(
                "--bracket: expected two values lo,hi; use e.g. --bracket -2,-1".into(),
            ))
        }
    };
    let lo_f = parse_decimal("--bracket", &lo, precision)?;
    let hi_f = parse_decimal("--bracket", &hi, precision)?;
    let cfg = RunConfig {
        command: "oracle",
        equation: kind,
        d: Vec::new(),
        d_max: 0,
        precision,
        digits: a.common.digits,
        pade: (0, 0),
        xs: Vec::new(),
        format: a.common.format,
        cache: None,
    };
    let started = Instant::now();
    let slope = shoot_slope(kind, (&lo_f, &hi_f), &tol).map_err(CliError::compute)?;
    writeln!(err, "{kind} oracle slope found in {:.2?}", started.elapsed())?;
    // digits beyond the bracket width carry no information
    let meaningful = tol
        .log10()
        .map_or(cfg.digits, |l| ((-l.to_f64()).ceil() as usize + 1).min(cfg.digits));
    let row = vec![
        kind.tag().to_string(),
        slope.to_sig_string(meaningful),
        a.tol.trim().to_string(),
        lo.trim().to_string(),
        hi.trim().to_string(),
    ];
    let results = json!({
        "slope": row[1], "tol": row[2], "bracket": [row[3], row[4]],
    });
    let mut table = Table::new(&["equation", "slope", "tol", "bracket_lo", "bracket_hi"]);
    table.push(row);
    let mut cfg_json = cfg;
    cfg_json.xs = Vec::new();
    emit(&cfg_json, table, results, out)
}

/// Runs one command line and returns its exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Slope(a) => run_slope(a, out, err),
        Command::Converge(a) => run_converge(a, out, err),
        Command::Table(a) => run_table(a, out, err),
        Command::Oracle(a) => run_oracle(a, out, err),
    };
    let _ = out.flush();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Parses a decimal the way the CLI does, for callers comparing printed values.
pub fn parse_printed(s: &str) -> Option<BigRational> {
    BigRational::from_str_decimal(s.trim()).ok()
}
