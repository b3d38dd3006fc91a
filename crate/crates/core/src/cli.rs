//! `mmvar` command-line front end.
//!
//! Exit statuses: 0 success, 2 input error, 3 size limit, 4 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::concentration::{gap_report, TrueVarianceMode};
use crate::dist::{read_distribution, AlphabetBound};
use crate::error::Error;
use crate::extremal::{objective_alpha, solve_alpha, worst_case_distribution, AlphabetRatio};
use crate::simulate::estimate_variance;
use crate::variance::{variance, VarianceMethod};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "mmvar", version, about = "Missing-mass variance: exact, approximate, and extremal")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Record format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Variance of the missing mass for a distribution file.
    Variance {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long = "n")]
        n: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[command(flatten)]
        output: Output,
    },
    /// Solve the extremal program and build the worst-case distribution.
    Maximize {
        #[arg(long = "n")]
        n: u64,
        /// Alphabet size, or "inf".
        #[arg(long = "m")]
        m: String,
        #[command(flatten)]
        output: Output,
    },
    /// Tabulate alpha against b = m/n as CSV with header "b,val".
    Sweep {
        #[arg(long)]
        b_min: f64,
        #[arg(long)]
        b_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Linear)]
        spacing: Spacing,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Objective alpha(w, c) on a grid x grid lattice of [0,1] x (0, c_max].
    Landscape {
        #[arg(long)]
        c_max: f64,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo estimate of the missing-mass mean and variance.
    Simulate {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; the output does not depend on this.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// True variance against the sub-gamma and IID-majorization factors.
    Gap {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long = "n")]
        n: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Exact,
    Thm1,
    Poisson,
}

impl From<MethodArg> for VarianceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => VarianceMethod::Exact,
            MethodArg::Thm1 => VarianceMethod::Binomial,
            MethodArg::Poisson => VarianceMethod::Poissonized,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Poisson,
}

impl From<ModeArg> for TrueVarianceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => TrueVarianceMode::Exact,
            ModeArg::Poisson => TrueVarianceMode::Poissonized,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Geometric,
}

/// Failure carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub status: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { status: EXIT_INPUT, message: message.into() }
    }

    fn io(path: Option<&Path>, err: impl std::fmt::Display) -> Self {
        let message = match path {
            Some(p) => format!("{}: {err}", p.display()),
            None => err.to_string(),
        };
        Self { status: EXIT_IO, message }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TooLarge { .. } => EXIT_TOO_LARGE,
            _ => EXIT_INPUT,
        };
        Self { status, message: format!("{}: {e}", e.code()) }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Formats `x` with 17 significant digits: fixed notation for decimal
/// exponents in `[-5, 17)`, scientific otherwise. Reparsing the text gives
/// back the same `f64`.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

/// One `b,val` row of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub b: f64,
    pub val: f64,
}

/// Evenly spaced (linear or geometric) ratios from `b_min` to `b_max`.
pub fn sweep_points(b_min: f64, b_max: f64, steps: usize, spacing: Spacing) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                return b_max;
            }
            let t = i as f64 / last;
            match spacing {
                Spacing::Linear => b_min + (b_max - b_min) * t,
                Spacing::Geometric => b_min * (b_max / b_min).powf(t),
            }
        })
        .collect()
}

pub fn sweep(b_min: f64, b_max: f64, steps: usize, spacing: Spacing) -> CliResult<Vec<SweepRow>> {
    if !(b_min > 0.0) || !(b_max > b_min) || !b_max.is_finite() {
        return Err(CliError::input(format!(
            "INVALID_B: need 0 < b_min < b_max, got b_min={b_min}, b_max={b_max}"
        )));
    }
    if steps < 2 {
        return Err(CliError::input(format!("steps must be at least 2, got {steps}")));
    }
    sweep_points(b_min, b_max, steps, spacing)
        .into_iter()
        .map(|b| {
            let s = solve_alpha(AlphabetRatio::Finite(b))?;
            Ok(SweepRow { b, val: s.alpha })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["b", "val"])?;
    for r in rows {
        w.write_record([fmt_sig17(r.b), fmt_sig17(r.val)])?;
    }
    w.flush()
}

pub fn read_sweep_csv<R: Read>(input: R) -> io::Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["b", "val"] {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "expected header b,val"));
    }
    let bad = |e: std::num::ParseFloatError| io::Error::new(io::ErrorKind::InvalidData, e);
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(SweepRow { b: rec[0].parse().map_err(bad)?, val: rec[1].parse().map_err(bad)? })
        })
        .collect()
}

/// `(w, c, alpha)` over `w_i = i/(grid-1)`, `c_j = c_max (j+1)/grid`.
pub fn landscape(c_max: f64, grid: usize) -> CliResult<Vec<[f64; 3]>> {
    if !(c_max > 0.0) || !c_max.is_finite() {
        return Err(CliError::input(format!("c_max must be positive, got {c_max}")));
    }
    if grid < 2 {
        return Err(CliError::input(format!("grid must be at least 2, got {grid}")));
    }
    let mut rows = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let w = i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let c = c_max * (j + 1) as f64 / grid as f64;
            rows.push([w, c, objective_alpha(w, c)]);
        }
    }
    Ok(rows)
}

pub fn write_landscape_csv<W: Write>(rows: &[[f64; 3]], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["w", "c", "alpha"])?;
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt_sig17(x)))?;
    }
    w.flush()
}

/// Flat, ordered record printed by the single-record commands.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Field)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Record {
    fn num(mut self, k: &'static str, v: f64) -> Self {
        self.fields.push((k, Field::Num(v)));
        self
    }

    fn int(mut self, k: &'static str, v: u64) -> Self {
        self.fields.push((k, Field::Int(v)));
        self
    }

    fn text(mut self, k: &'static str, v: impl Into<String>) -> Self {
        self.fields.push((k, Field::Text(v.into())));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        for (k, v) in &self.fields {
            let value = match v {
                Field::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
                Field::Int(i) => Value::from(*i),
                Field::Text(s) => Value::from(s.as_str()),
            };
            map.insert((*k).to_string(), value);
        }
        let mut s = Value::Object(map).to_string();
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(self.fields.iter().map(|(k, _)| *k)).unwrap();
        w.write_record(self.fields.iter().map(|(_, v)| match v {
            Field::Num(x) => fmt_sig17(*x),
            Field::Int(i) => i.to_string(),
            Field::Text(s) => s.clone(),
        }))
        .unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn parse_alphabet(m: &str) -> CliResult<AlphabetBound> {
    if m.eq_ignore_ascii_case("inf") {
        return Ok(AlphabetBound::Infinite);
    }
    let v: u64 = m
        .parse()
        .map_err(|_| CliError::input(format!("INVALID_ALPHABET: expected an integer or \"inf\", got {m:?}")))?;
    Ok(AlphabetBound::finite(v)?)
}

pub fn cmd_variance(dist: &Path, n: u64, method: MethodArg) -> CliResult<Record> {
    let d = read_distribution(dist)?;
    let method: VarianceMethod = method.into();
    let est = variance(&d, n, method)?;
    Ok(Record::default().text("method", method.as_str()).int("n", n).num("value", est.value))
}

pub fn cmd_maximize(n: u64, m: &str) -> CliResult<Record> {
    let bound = parse_alphabet(m)?;
    let spec = worst_case_distribution::<f64>(n, bound)?;
    let s = spec.solution;
    Ok(Record::default()
        .int("n", n)
        .text("m", bound.to_string())
        .num("alpha", s.alpha)
        .num("w", s.w)
        .num("c", s.c)
        .text("regime", s.regime.as_str())
        .int("atom_count", spec.atom_count as u64)
        .num("atom_mass", spec.atom_mass)
        .num("dirac_mass", spec.dirac_mass)
        .num("variance_estimate", s.alpha / n as f64))
}

pub fn cmd_simulate(dist: &Path, n: u64, trials: u64, seed: u64, threads: Option<usize>) -> CliResult<Record> {
    let d = read_distribution(dist)?;
    let run = || estimate_variance(&d, n, trials, seed);
    let est = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CliError::input(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(Record::default()
        .int("n", n)
        .int("trials", est.trials)
        .int("seed", est.seed)
        .num("mean", est.mean)
        .num("variance", est.variance)
        .num("se_mean", est.se_mean)
        .num("se_variance", est.se_variance))
}

pub fn cmd_gap(dist: &Path, n: u64, mode: ModeArg) -> CliResult<Record> {
    let d = read_distribution(dist)?;
    let r = gap_report(&d, n, mode.into())?;
    Ok(Record::default()
        .int("n", n)
        .text("mode", r.mode.as_str())
        .num("true_variance", r.true_variance)
        .num("subgamma_v", r.subgamma_v)
        .num("iid_major_v", r.iid_major_v)
        .num("gap_subgamma", r.gap_subgamma)
        .num("gap_iid", r.gap_iid))
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(Some(path), e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).map_err(|e| CliError::io(Some(path), e))?;
            w.flush().map_err(|e| CliError::io(Some(path), e))
        }
        None => f(stdout).map_err(|e| CliError::io(None, e)),
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let (record, output) = match cli.command {
        Command::Variance { dist, n, method, output } => (cmd_variance(&dist, n, method)?, output),
        Command::Maximize { n, m, output } => (cmd_maximize(n, &m)?, output),
        Command::Simulate { dist, n, trials, seed, threads, output } => {
            (cmd_simulate(&dist, n, trials, seed, threads)?, output)
        }
        Command::Gap { dist, n, mode, output } => (cmd_gap(&dist, n, mode)?, output),
        Command::Sweep { b_min, b_max, steps, spacing, out } => {
            let rows = sweep(b_min, b_max, steps, spacing)?;
            return emit(out.as_deref(), stdout, |w| write_sweep_csv(&rows, w));
        }
        Command::Landscape { c_max, grid, out } => {
            let rows = landscape(c_max, grid)?;
            return emit(out.as_deref(), stdout, |w| write_landscape_csv(&rows, w));
        }
    };
    let text = record.render(output.format);
    emit(output.out.as_deref(), stdout, |w| w.write_all(text.as_bytes()))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit status.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return status;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.status
        }
    }
}
