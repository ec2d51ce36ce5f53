//! The `cantor-lab` command line. [`run`] parses arguments, dispatches to
//! the library and renders a [`Report`] as an aligned table, JSON or CSV.
//! Output depends only on the arguments (and `CANTOR_LAB_BUDGET` for box
//! counting), so repeated invocations are byte-identical.

use std::fmt::Display;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{Map, Value};

use crate::block_map::{BlockAlphabet, BlockError};
use crate::codec::{
    join_digits, parse_digit_list, CantorDigits, CodecError, Cylinder, QaryDigits, TailKind,
};
use crate::dimension::{self, DimensionError};
use crate::exec::Strategy;
use crate::projection::{ProjectionContext, ProjectionError};
use crate::rational::{format_float, parse_rational, to_f64, Fraction, Rational};
use crate::salem::{EvalResult, LimitClass, SalemError, Variant, WeightMatrix};
use crate::schedule::{BaseSchedule, ScheduleError};
use crate::selftest;

pub const CSV_HEADER: &str = "# cantor-lab v1";

#[derive(Parser, Debug)]
#[command(
    name = "cantor-lab",
    version,
    about = "Exact Cantor-series arithmetic, digit projections, Salem-type functions and the block map g"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Render rationals as decimals instead of num/den.
    #[arg(long, global = true)]
    pub float: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode, decode and transform Cantor-series digit words.
    Convert(ConvertArgs),
    /// Evaluate the projection f and its identities.
    EvalF(EvalFArgs),
    /// Jump of f at a Q-rational point.
    Jump(ProjectionArgs),
    /// Closed-form integral of f over [0, 1].
    Integral(ContextArgs),
    /// Cylinder ratio sequences and the differentiability verdict for f.
    ProbeF(ProbeFArgs),
    /// Evaluate F, F-tilde, the distribution function or the composition identity.
    EvalSalem(EvalSalemArgs),
    /// Report which non-differentiability hypotheses a weight matrix meets.
    CheckHypotheses(CheckHypothesesArgs),
    /// Difference quotients of F under single-digit perturbations.
    ProbeSalem(ProbeSalemArgs),
    /// Parse, expand or invert block words.
    ParseG(ParseGArgs),
    /// Evaluate g or check its shift commutation.
    EvalG(EvalGArgs),
    /// Monotonicity class, monotonicity sampling or difference quotients of g.
    ProbeG(ProbeGArgs),
    /// Dimensions of D(g) and E(g).
    Dim(DimArgs),
    /// Box counting on the graph of g.
    Boxcount(BoxcountArgs),
    /// Run the embedded invariant suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertOp {
    Encode,
    Decode,
    Canonicalize,
    Complement,
    Shift,
    Cylinder,
    Alternating,
    BaseAt,
    ProductTo,
    BoundedBy,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Schedule as a JSON descriptor, a tag such as Q[2,3;c4], or @file.
    #[arg(long)]
    pub schedule: String,
    /// Defaults to encode when --value is given, decode otherwise.
    #[arg(long, value_enum)]
    pub op: Option<ConvertOp>,
    /// Rational in [0, 1] as num/den or decimal.
    #[arg(long)]
    pub value: Option<String>,
    /// Dot-separated digits, "()" for none, trailing "!" for a max tail.
    #[arg(long)]
    pub word: Option<String>,
    /// Digit budget for encode.
    #[arg(long, default_value_t = 32)]
    pub digits: usize,
    /// Position or shift count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Target base for bounded-by.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
}

#[derive(Args, Debug)]
pub struct ContextArgs {
    #[arg(long)]
    pub schedule: String,
    /// Target base q >= q_n.
    #[arg(long)]
    pub q: u32,
}

#[derive(Args, Debug)]
pub struct ProjectionArgs {
    #[command(flatten)]
    pub ctx: ContextArgs,
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFOp {
    Eval,
    Symmetry,
    Shift,
    Compare,
}

#[derive(Args, Debug)]
pub struct EvalFArgs {
    #[command(flatten)]
    pub ctx: ContextArgs,
    #[arg(long)]
    pub word: String,
    #[arg(long, value_enum, default_value_t = EvalFOp::Eval)]
    pub op: EvalFOp,
    /// Shift count for --op shift.
    #[arg(long)]
    pub k: Option<usize>,
    /// Larger word for --op compare.
    #[arg(long)]
    pub word2: Option<String>,
}

#[derive(Args, Debug)]
pub struct ProbeFArgs {
    #[command(flatten)]
    pub ctx: ContextArgs,
    /// Point digits; padded with zeros to --depth.
    #[arg(long, default_value = "()")]
    pub word: String,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Scan only this many schedule positions when classifying.
    #[arg(long)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SalemOp {
    F,
    Tilde,
    Distribution,
    Composition,
}

#[derive(Args, Debug)]
pub struct EvalSalemArgs {
    /// Weight matrix JSON descriptor or @file.
    #[arg(long)]
    pub matrix: String,
    /// Defaults to distribution when --value is given, f otherwise.
    #[arg(long, value_enum)]
    pub op: Option<SalemOp>,
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long)]
    pub value: Option<String>,
    #[arg(long, default_value_t = 32)]
    pub terms: usize,
    /// Schedule of the projection for --op composition.
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Example1,
    Example2,
}

#[derive(Args, Debug)]
pub struct CheckHypothesesArgs {
    #[arg(long)]
    pub matrix: String,
    #[arg(long, value_enum, default_value_t = VariantArg::Example1)]
    pub variant: VariantArg,
}

#[derive(Args, Debug)]
pub struct ProbeSalemArgs {
    #[arg(long)]
    pub matrix: String,
    #[arg(long)]
    pub word: String,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
}

#[derive(Args, Debug)]
pub struct AlphabetArgs {
    #[arg(long)]
    pub q: u32,
    /// Padding digit.
    #[arg(long)]
    pub u: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParseGOp {
    Parse,
    Expand,
    Invert,
}

#[derive(Args, Debug)]
pub struct ParseGArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    /// Expanded digits for parse, alphas for expand, image digits for invert.
    #[arg(long)]
    pub word: String,
    #[arg(long, value_enum, default_value_t = ParseGOp::Parse)]
    pub op: ParseGOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalGOp {
    Eval,
    Shift,
}

#[derive(Args, Debug)]
pub struct EvalGArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    /// Block values alpha_1.alpha_2...
    #[arg(long)]
    pub alphas: String,
    #[arg(long, value_enum, default_value_t = EvalGOp::Eval)]
    pub op: EvalGOp,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeGOp {
    Class,
    Monotonicity,
    Derivative,
}

#[derive(Args, Debug)]
pub struct ProbeGArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(long, value_enum, default_value_t = ProbeGOp::Class)]
    pub op: ProbeGOp,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub alphas: Option<String>,
    /// Block position to perturb.
    #[arg(long)]
    pub n: Option<usize>,
    /// Maximum number of replacement values.
    #[arg(long, default_value_t = 16)]
    pub depth: usize,
    /// Run sweeps on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Args, Debug)]
pub struct DimArgs {
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct BoxcountArgs {
    #[arg(long)]
    pub q: u32,
    /// Padding digit; required unless --identity.
    #[arg(long)]
    pub u: Option<u32>,
    /// Single depth; otherwise fit over --m-min..=--m-max.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub m_min: usize,
    #[arg(long, default_value_t = 5)]
    pub m_max: usize,
    /// Count the diagonal y = x instead of the graph of g.
    #[arg(long)]
    pub identity: bool,
    /// Enumeration cap; defaults to CANTOR_LAB_BUDGET or 1000000.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub sequential: bool,
}

/// Process result: exit code plus captured streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain { name: &'static str, message: String },
}

trait Named: Display {
    fn error_name(&self) -> &'static str;
}

macro_rules! named {
    ($($t:ty),*) => {$(
        impl Named for $t {
            fn error_name(&self) -> &'static str {
                self.name()
            }
        }
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain { name: e.error_name(), message: e.to_string() }
            }
        }
    )*};
}

named!(
    ScheduleError,
    CodecError,
    ProjectionError,
    SalemError,
    BlockError,
    DimensionError
);

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| usage(format!("missing required flag {flag}")))
}

#[derive(Debug, Clone)]
enum Cell {
    Rat(Rational),
    Float(f64),
    Int(BigInt),
    Bool(bool),
    Text(String),
}

impl From<Rational> for Cell {
    fn from(r: Rational) -> Self {
        Cell::Rat(r)
    }
}
impl From<&Rational> for Cell {
    fn from(r: &Rational) -> Self {
        Cell::Rat(r.clone())
    }
}
impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}
impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}
impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}
impl From<BigInt> for Cell {
    fn from(n: BigInt) -> Self {
        Cell::Int(n)
    }
}
macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(n: $t) -> Self {
                Cell::Int(BigInt::from(n))
            }
        }
    )*};
}
int_cell!(u32, u64, usize, i64);

/// Command result: named scalar fields plus an optional table.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, Cell)>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    /// Columns emitted in CSV; later columns appear only in table and JSON.
    csv_width: Option<usize>,
}

impl Report {
    fn field(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    fn table(mut self, columns: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self.rows = rows;
        self
    }

    fn csv_width(mut self, width: usize) -> Self {
        self.csv_width = Some(width);
        self
    }

    fn text(cell: &Cell, float: bool) -> String {
        match cell {
            Cell::Rat(r) if float => format_float(to_f64(r)),
            Cell::Rat(r) => Fraction(r).to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json_value(cell: &Cell, float: bool) -> Value {
        let number = |x: f64| {
            format_float(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number)
        };
        match cell {
            Cell::Rat(r) if float => number(to_f64(r)),
            Cell::Rat(r) => Value::String(Fraction(r).to_string()),
            Cell::Float(x) => number(*x),
            Cell::Int(n) => n
                .to_i64()
                .map_or_else(|| Value::String(n.to_string()), Value::from),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    pub fn render(&self, format: Format, float: bool) -> String {
        match format {
            Format::Table => self.render_table(float),
            Format::Json => self.render_json(float),
            Format::Csv => self.render_csv(float),
        }
    }

    fn render_table(&self, float: bool) -> String {
        let mut out = String::new();
        let key_width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.fields {
            out.push_str(&format!("{k:<key_width$}  {}\n", Self::text(v, float)));
        }
        if self.columns.is_empty() {
            return out;
        }
        if !self.fields.is_empty() {
            out.push('\n');
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| Self::text(c, float)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([self.columns[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            let padded: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(&self.columns));
        for r in &cells {
            out.push_str(&line(r));
        }
        out
    }

    fn render_json(&self, float: bool) -> String {
        let mut obj = Map::new();
        for (k, v) in &self.fields {
            obj.insert(k.clone(), Self::json_value(v, float));
        }
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(|c| Self::json_value(c, float)))
                        .collect();
                    Value::Object(m)
                })
                .collect();
            obj.insert("rows".into(), Value::Array(rows));
        }
        serde_json::to_string_pretty(&Value::Object(obj)).expect("json renders") + "\n"
    }

    fn render_csv(&self, float: bool) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        if self.columns.is_empty() {
            w.write_record(["field", "value"]).expect("in-memory write");
            for (k, v) in &self.fields {
                w.write_record([k.clone(), Self::text(v, float)])
                    .expect("in-memory write");
            }
        } else {
            let width = self.csv_width.unwrap_or(self.columns.len());
            w.write_record(&self.columns[..width])
                .expect("in-memory write");
            for r in &self.rows {
                w.write_record(r[..width].iter().map(|c| Self::text(c, float)))
                    .expect("in-memory write");
            }
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
        format!("{CSV_HEADER}\n{body}")
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok((report, ok)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: report.render(cli.format, cli.float),
            stderr: String::new(),
        },
        Err(CliError::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(CliError::Domain { name, message }) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {name}: {message}\n"),
        },
    }
}

fn read_source(raw: &str, flag: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {flag} file {path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn parse_schedule(raw: &str) -> Result<BaseSchedule, CliError> {
    let text = read_source(raw, "--schedule")?;
    BaseSchedule::parse_any(&text).map_err(|e| match e {
        ScheduleError::BadTag(_) | ScheduleError::BadDescriptor(_) => {
            usage(format!("invalid value for --schedule: {e}"))
        }
        other => other.into(),
    })
}

fn parse_matrix(raw: &str) -> Result<WeightMatrix, CliError> {
    let text = read_source(raw, "--matrix")?;
    WeightMatrix::from_json(&text).map_err(|e| match e {
        SalemError::BadDescriptor(_) => usage(format!("invalid value for --matrix: {e}")),
        other => other.into(),
    })
}

fn parse_value(raw: &str, flag: &str) -> Result<Rational, CliError> {
    parse_rational(raw).map_err(|e| usage(format!("invalid value for {flag}: {e}")))
}

fn parse_digits(raw: &str, flag: &str) -> Result<(Vec<u32>, TailKind), CliError> {
    let (body, tail) = match raw.trim().strip_suffix('!') {
        Some(b) => (b, TailKind::Max),
        None => (raw, TailKind::Zero),
    };
    let digits =
        parse_digit_list(body).map_err(|_| usage(format!("invalid value for {flag}: {raw:?}")))?;
    Ok((digits, tail))
}

fn parse_word(schedule: &BaseSchedule, raw: &str, flag: &str) -> Result<CantorDigits, CliError> {
    let (digits, tail) = parse_digits(raw, flag)?;
    Ok(CantorDigits::new(schedule.clone(), digits, tail)?)
}

fn parse_qary(q: u32, raw: &str, flag: &str) -> Result<QaryDigits, CliError> {
    let (digits, tail) = parse_digits(raw, flag)?;
    Ok(QaryDigits::new(q, digits, tail)?)
}

fn word_text(digits: &[u32], tail: TailKind) -> String {
    let body = if digits.is_empty() {
        "()".to_string()
    } else {
        join_digits(digits)
    };
    match tail {
        TailKind::Zero => body,
        TailKind::Max => body + "!",
    }
}

fn cantor_text(w: &CantorDigits) -> String {
    word_text(w.digits(), w.tail())
}

fn strategy(sequential: bool) -> Strategy {
    if sequential {
        Strategy::Sequential
    } else {
        Strategy::default()
    }
}

fn context(args: &ContextArgs) -> Result<ProjectionContext, CliError> {
    Ok(ProjectionContext::new(
        parse_schedule(&args.schedule)?,
        args.q,
    )?)
}

fn alphabet(args: &AlphabetArgs) -> Result<BlockAlphabet, CliError> {
    Ok(BlockAlphabet::new(args.q, args.u)?)
}

/// Returns the report and whether the command succeeded.
fn execute(cmd: &Command) -> Result<(Report, bool), CliError> {
    let report = match cmd {
        Command::Convert(a) => convert(a)?,
        Command::EvalF(a) => eval_f(a)?,
        Command::Jump(a) => {
            let ctx = context(&a.ctx)?;
            let w = parse_word(ctx.schedule(), &a.word, "--word")?;
            let j = ctx.jump_at(&w)?;
            Report::default()
                .field("word", cantor_text(&w))
                .field("position", j.position)
                .field("jump", &j.jump)
                .field("lower_bound", &j.lower_bound)
                .field("upper_bound", &j.upper_bound)
                .field("bounds_asserted", j.bounds_asserted)
                .field("within_bounds", j.within_bounds())
        }
        Command::Integral(a) => {
            let ctx = context(a)?;
            let q = Rational::from_integer(BigInt::from(ctx.q()));
            let one = Rational::from_integer(BigInt::from(1));
            Report::default()
                .field("schedule", ctx.schedule().to_string())
                .field("q", ctx.q())
                .field("integral", ctx.integral_f())
                .field("f_one", ctx.f_one())
                .field(
                    "lower_bound",
                    &one / (Rational::from_integer(BigInt::from(2)) * (q - &one)),
                )
                .field("upper_bound", one / Rational::from_integer(BigInt::from(2)))
        }
        Command::ProbeF(a) => probe_f(a)?,
        Command::EvalSalem(a) => eval_salem(a)?,
        Command::CheckHypotheses(a) => {
            let m = parse_matrix(&a.matrix)?;
            let variant = match a.variant {
                VariantArg::Example1 => Variant::Example1,
                VariantArg::Example2 => Variant::Example2,
            };
            let r = m.check_nondiff_hypotheses(variant);
            let limit = |l: LimitClass| format!("{l:?}");
            let opt = |b: Option<bool>| b.map_or_else(|| "n/a".to_string(), |v| v.to_string());
            let mut rep = Report::default()
                .field("variant", format!("{:?}", r.variant))
                .field("adjacent_sign", r.adjacent_sign)
                .field("first_column_product", limit(r.first_column_product))
                .field("last_column_product", limit(r.last_column_product))
                .field("last_column_disjunction", opt(r.last_column_disjunction))
                .field("condition_four", opt(r.condition_four))
                .field("all_hold", r.all_hold);
            for (i, n) in r.notes.iter().enumerate() {
                rep = rep.field(&format!("note_{}", i + 1), n.as_str());
            }
            rep
        }
        Command::ProbeSalem(a) => {
            let m = parse_matrix(&a.matrix)?;
            let w = parse_word(m.schedule(), &a.word, "--word")?;
            let p = m.oscillation_probe(&w, a.depth, Strategy::default())?;
            let rows = p
                .rows
                .iter()
                .map(|r| vec![r.rank.into(), r.digit.into(), (&r.quotient).into()])
                .collect();
            Report::default()
                .field("sign_changes", p.sign_changes)
                .field("max_abs", &p.max_abs)
                .table(&["rank", "digit", "quotient"], rows)
        }
        Command::ParseG(a) => parse_g(a)?,
        Command::EvalG(a) => {
            let al = alphabet(&a.alphabet)?;
            let (alphas, _) = parse_digits(&a.alphas, "--alphas")?;
            let w = al.word(alphas)?;
            match a.op {
                EvalGOp::Eval => Report::default()
                    .field("alphas", w.to_string())
                    .field("expanded", word_text(&w.expand_digits(), TailKind::Zero))
                    .field("x", w.x_value())
                    .field("g", w.eval_g()),
                EvalGOp::Shift => {
                    let n = required(&a.n, "--n")?;
                    let (l, r) = w.g_shift_commutation(n)?;
                    Report::default()
                        .field("n", n)
                        .field("left", word_text(l.digits(), l.tail()))
                        .field("right", word_text(r.digits(), r.tail()))
                        .field("equal", l == r)
                }
            }
        }
        Command::ProbeG(a) => probe_g(a)?,
        Command::Dim(a) => {
            let al = alphabet(&a.alphabet)?;
            let d = dimension::dimension_dg(&al, a.tol)?;
            let e = dimension::dimension_eg(&al);
            Report::default()
                .field("q", al.q())
                .field("u", al.u())
                .field("tau", al.tau())
                .field("dim_domain", d.value)
                .field("residual", d.residual)
                .field("iterations", d.iterations)
                .field("bracket_lo", d.bracket.0)
                .field("bracket_hi", d.bracket.1)
                .field("dim_range", e)
                .field("dimension_preserved", (d.value - e).abs() <= a.tol)
                .field("note", "base symbol s read as q")
        }
        Command::Boxcount(a) => boxcount(a)?,
        Command::Selftest => {
            let checks = selftest::run();
            let ok = checks.iter().all(|c| c.outcome.is_ok());
            let rows = checks
                .iter()
                .map(|c| {
                    let status = match &c.outcome {
                        Ok(()) => "pass".to_string(),
                        Err(e) => format!("FAIL {e}"),
                    };
                    vec![c.name.into(), status.into()]
                })
                .collect();
            let rep = Report::default()
                .field("checks", checks.len())
                .field("all_pass", ok)
                .table(&["check", "status"], rows);
            return Ok((rep, ok));
        }
    };
    Ok((report, true))
}

fn convert(a: &ConvertArgs) -> Result<Report, CliError> {
    let s = parse_schedule(&a.schedule)?;
    let op = a.op.unwrap_or(if a.value.is_some() {
        ConvertOp::Encode
    } else {
        ConvertOp::Decode
    });
    let word = |flag: &str| -> Result<CantorDigits, CliError> {
        parse_word(&s, &required(&a.word, flag)?, flag)
    };
    let base = Report::default().field("schedule", s.to_string());
    Ok(match op {
        ConvertOp::Encode => {
            let x = parse_value(&required(&a.value, "--value")?, "--value")?;
            let enc = CantorDigits::encode(&x, &s, a.digits)?;
            let (lo, hi) = enc.residual_interval();
            base.field("value", &x)
                .field("word", cantor_text(&enc.word))
                .field("exact", enc.is_exact())
                .field("remainder", &enc.remainder)
                .field("interval_lo", lo)
                .field("interval_hi", hi)
        }
        ConvertOp::Decode => {
            let w = word("--word")?;
            base.field("word", cantor_text(&w))
                .field("value", w.decode())
        }
        ConvertOp::Canonicalize => {
            let w = word("--word")?;
            let c = w.canonicalize();
            base.field("word", cantor_text(&w))
                .field("canonical", cantor_text(&c))
                .field("value", c.decode())
                .field("value_preserved", c.decode() == w.decode())
        }
        ConvertOp::Complement => {
            let w = word("--word")?;
            let c = w.complement()?;
            base.field("word", cantor_text(&w))
                .field("complement", cantor_text(&c))
                .field("value", w.decode())
                .field("complement_value", c.decode())
                .field("sum", w.decode() + c.decode())
        }
        ConvertOp::Shift => {
            let w = word("--word")?;
            let n = required(&a.n, "--n")?;
            let sh = w.shift(n);
            let rebuilt = w.partial_sum(n) + sh.decode() / Rational::from_integer(s.product_to(n));
            base.field("word", cantor_text(&w))
                .field("shifted_schedule", sh.schedule().to_string())
                .field("shifted", cantor_text(&sh))
                .field("shifted_value", sh.decode())
                .field("identity_holds", rebuilt == w.decode())
        }
        ConvertOp::Cylinder => {
            let w = word("--word")?;
            let c = Cylinder::new(s.clone(), w.digits().to_vec())?;
            let (lo, hi) = c.interval();
            base.field("rank", c.rank()).field("lo", lo).field("hi", hi)
        }
        ConvertOp::Alternating => {
            let w = word("--word")?;
            base.field("word", cantor_text(&w))
                .field("alternating_value", w.decode_alternating()?)
        }
        ConvertOp::BaseAt => {
            let n = required(&a.n, "--n")?;
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            base.field("n", n).field("base", s.base_at(n))
        }
        ConvertOp::ProductTo => {
            let n = required(&a.n, "--n")?;
            base.field("n", n).field("product", s.product_to(n))
        }
        ConvertOp::BoundedBy => {
            let q = required(&a.q, "--q")?;
            let class = s.is_bounded_by(q, a.horizon)?;
            base.field("q", q).field("class", format!("{class:?}"))
        }
    })
}

fn eval_f(a: &EvalFArgs) -> Result<Report, CliError> {
    let ctx = context(&a.ctx)?;
    let w = parse_word(ctx.schedule(), &a.word, "--word")?;
    let base = Report::default().field("word", cantor_text(&w));
    Ok(match a.op {
        EvalFOp::Eval => base.field("x", w.decode()).field("f", ctx.eval_f(&w)?),
        EvalFOp::Symmetry => {
            let (fx, fc, one) = ctx.symmetry_check(&w)?;
            let sum = &fx + &fc;
            base.field("f", fx)
                .field("f_complement", fc)
                .field("sum", &sum)
                .field("f_one", &one)
                .field("holds", sum == one)
        }
        EvalFOp::Shift => {
            let k = required(&a.k, "--k")?;
            let (l, r) = ctx.shift_commutation_check(&w, k)?;
            base.field("k", k)
                .field("left", &l)
                .field("right", &r)
                .field("equal", l == r)
        }
        EvalFOp::Compare => {
            let other = parse_word(ctx.schedule(), &required(&a.word2, "--word2")?, "--word2")?;
            let m = ctx.monotonicity_witness(&w, &other)?;
            base.field("word2", cantor_text(&other))
                .field("first_difference", m.first_difference)
                .field("gap", &m.gap)
                .field("lower_bound", &m.lower_bound)
                .field(
                    "strictly_ordered",
                    m.gap > Rational::from_integer(BigInt::from(0)),
                )
        }
    })
}

fn probe_f(a: &ProbeFArgs) -> Result<Report, CliError> {
    let ctx = context(&a.ctx)?;
    let (digits, _) = parse_digits(&a.word, "--word")?;
    let p = ctx.derivative_probe_with_horizon(&digits, a.depth, a.horizon)?;
    let rows = p
        .ranks
        .iter()
        .zip(p.ratios.iter().zip(&p.secant_ratios))
        .map(|(&rank, (r, s))| {
            vec![
                rank.into(),
                r.numer().clone().into(),
                r.denom().clone().into(),
                to_f64(r).into(),
                s.into(),
            ]
        })
        .collect();
    Ok(Report::default()
        .field("schedule", ctx.schedule().to_string())
        .field("q", ctx.q())
        .field("class", format!("{:?}", ctx.class()))
        .field("verdict", format!("{:?}", p.verdict))
        .table(
            &[
                "rank",
                "ratio_numerator",
                "ratio_denominator",
                "ratio_float",
                "secant_ratio",
            ],
            rows,
        )
        .csv_width(4))
}

fn eval_report(r: &EvalResult) -> Report {
    Report::default()
        .field("value", &r.value)
        .field("tail_bound", &r.tail_bound)
        .field("terms_used", r.terms_used)
}

fn eval_salem(a: &EvalSalemArgs) -> Result<Report, CliError> {
    let m = parse_matrix(&a.matrix)?;
    let op = a.op.unwrap_or(if a.value.is_some() {
        SalemOp::Distribution
    } else {
        SalemOp::F
    });
    let word = |s: &BaseSchedule| parse_word(s, &required(&a.word, "--word")?, "--word");
    Ok(match op {
        SalemOp::F => eval_report(&m.eval_f(&word(m.schedule())?, a.terms)?),
        SalemOp::Tilde => eval_report(&m.eval_f_tilde(&word(m.schedule())?, a.terms)?),
        SalemOp::Distribution => {
            let x = parse_value(&required(&a.value, "--value")?, "--value")?;
            eval_report(&m.eval_distribution(&x, a.terms)?).field("x", x)
        }
        SalemOp::Composition => {
            let s = parse_schedule(&required(&a.schedule, "--schedule")?)?;
            let q = m
                .schedule()
                .constant_base()
                .ok_or(SalemError::NotConstantBase)?;
            let ctx = ProjectionContext::new(s, q)?;
            let c = m.composition_check(&ctx, &word(ctx.schedule())?, a.terms)?;
            let rows = c
                .direct
                .terms
                .iter()
                .zip(&c.composed.terms)
                .enumerate()
                .map(|(k, (d, e))| vec![(k + 1).into(), d.into(), e.into()])
                .collect();
            Report::default()
                .field("direct", &c.direct.value)
                .field("composed", &c.composed.value)
                .field("terms_equal", c.terms_equal())
                .table(&["k", "direct_term", "composed_term"], rows)
        }
    })
}

fn parse_g(a: &ParseGArgs) -> Result<Report, CliError> {
    let al = alphabet(&a.alphabet)?;
    Ok(match a.op {
        ParseGOp::Parse => {
            let w = al.parse_blocks(&parse_qary(al.q(), &a.word, "--word")?)?;
            Report::default()
                .field("alphas", w.to_string())
                .field("blocks", w.len())
        }
        ParseGOp::Expand => {
            let (alphas, _) = parse_digits(&a.word, "--word")?;
            let w = al.word(alphas)?;
            let e = w.expand_blocks();
            Report::default()
                .field("alphas", w.to_string())
                .field("expanded", word_text(e.digits(), e.tail()))
        }
        ParseGOp::Invert => {
            let y = parse_qary(al.q(), &a.word, "--word")?;
            let w = al.invert_g(&y)?;
            Report::default()
                .field("alphas", w.to_string())
                .field("expanded", word_text(&w.expand_digits(), TailKind::Zero))
                .field("x", w.x_value())
        }
    })
}

fn probe_g(a: &ProbeGArgs) -> Result<Report, CliError> {
    let al = alphabet(&a.alphabet)?;
    Ok(match a.op {
        ProbeGOp::Class => Report::default()
            .field("q", al.q())
            .field("u", al.u())
            .field("class", al.monotonicity_class().to_string())
            .field("note", "base symbol s read as q"),
        ProbeGOp::Monotonicity => {
            let r = al.monotonicity_probe(a.trials, a.seed, strategy(a.sequential));
            Report::default()
                .field("class", r.class.to_string())
                .field("trials", r.trials)
                .field("concordant", r.concordant)
                .field("discordant", r.discordant)
                .field("ties", r.ties)
                .field("consistent", r.consistent())
        }
        ProbeGOp::Derivative => {
            let (alphas, _) = parse_digits(&required(&a.alphas, "--alphas")?, "--alphas")?;
            let w = al.word(alphas)?;
            let n = a.n.unwrap_or(w.len());
            let p = w.g_derivative_probe(n, a.depth)?;
            let rows = p
                .rows
                .iter()
                .map(|r| {
                    let closed = r
                        .closed_form_quotient
                        .as_ref()
                        .map_or(Cell::Text("n/a".into()), Cell::from);
                    vec![
                        r.n.into(),
                        r.alpha.into(),
                        r.quotient.numer().clone().into(),
                        r.quotient.denom().clone().into(),
                        r.closed_form_exponent.into(),
                        closed,
                    ]
                })
                .collect();
            Report::default()
                .field("position", p.position)
                .field("base_alpha", p.base_alpha)
                .field("matches_closed_form", p.matches_closed_form())
                .table(
                    &[
                        "n",
                        "alpha",
                        "quotient_num",
                        "quotient_den",
                        "closed_form_exponent",
                        "closed_form_quotient",
                    ],
                    rows,
                )
                .csv_width(5)
        }
    })
}

fn boxcount(a: &BoxcountArgs) -> Result<Report, CliError> {
    let budget = a.budget.unwrap_or_else(dimension::budget_from_env);
    let strat = strategy(a.sequential);
    let al = if a.identity {
        None
    } else {
        Some(BlockAlphabet::new(a.q, required(&a.u, "--u")?)?)
    };
    let row = |r: &dimension::BoxCountRecord| {
        vec![
            r.depth.into(),
            r.box_count.into(),
            r.log_inv_side().into(),
            r.log_count().into(),
            r.fitted_slope.into(),
        ]
    };
    let columns = [
        "m",
        "box_count",
        "log_inv_side",
        "log_count",
        "fitted_slope",
    ];
    let base = Report::default().field("q", a.q).field(
        "graph",
        match al {
            Some(al) => format!("g u={}", al.u()),
            None => "identity".to_string(),
        },
    );
    if let Some(m) = a.m {
        let r = match &al {
            Some(al) => dimension::box_count_graph(al, m, budget, strat)?,
            None => dimension::box_count_identity(a.q, m, budget, strat)?,
        };
        let mut rep = base.field("box_count", r.box_count);
        if let Some(al) = &al {
            rep = rep.field("tau_power", u64::from(al.tau()).pow(m as u32));
        }
        return Ok(rep.table(&columns, vec![row(&r)]));
    }
    let g = match &al {
        Some(al) => dimension::graph_dimension_estimate(al, a.m_min, a.m_max, budget, strat)?,
        None => dimension::identity_dimension_estimate(a.q, a.m_min, a.m_max, budget, strat)?,
    };
    let max_residual = g.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(base
        .field("slope", g.slope)
        .field("intercept", g.intercept)
        .field("max_residual", max_residual)
        .table(&columns, g.records.iter().map(row).collect()))
}

/// Every library operation paired with a command line that reaches it.
pub const OPERATIONS: &[(&str, &[&str])] = &[
    (
        "base_at",
        &[
            "convert",
            "--schedule",
            "Q[2,3;c4]",
            "--op",
            "base-at",
            "--n",
            "5",
        ],
    ),
    (
        "product_to",
        &[
            "convert",
            "--schedule",
            "Q[2,3;c4]",
            "--op",
            "product-to",
            "--n",
            "4",
        ],
    ),
    (
        "is_bounded_by",
        &[
            "convert",
            "--schedule",
            "Q[2;c3]",
            "--op",
            "bounded-by",
            "--q",
            "3",
        ],
    ),
    (
        "decode",
        &["convert", "--schedule", "Q[;c2]", "--word", "1.0.1"],
    ),
    (
        "encode",
        &[
            "convert",
            "--schedule",
            r#"{"prefix":[],"tail":{"kind":"constant","value":2}}"#,
            "--value",
            "5/8",
            "--digits",
            "8",
        ],
    ),
    (
        "canonicalize",
        &[
            "convert",
            "--schedule",
            "Q[2,3;c4]",
            "--op",
            "canonicalize",
            "--word",
            "1.2!",
        ],
    ),
    (
        "complement",
        &[
            "convert",
            "--schedule",
            "Q[2,3;c4]",
            "--op",
            "complement",
            "--word",
            "1.0.3",
        ],
    ),
    (
        "shift",
        &[
            "convert",
            "--schedule",
            "Q[2,3;c4]",
            "--op",
            "shift",
            "--word",
            "1.2.3",
            "--n",
            "2",
        ],
    ),
    (
        "cylinder_interval",
        &[
            "convert",
            "--schedule",
            "Q[2,3;c4]",
            "--op",
            "cylinder",
            "--word",
            "1.2",
        ],
    ),
    (
        "decode_alternating",
        &[
            "convert",
            "--schedule",
            "Q[;c2]",
            "--op",
            "alternating",
            "--word",
            "1",
        ],
    ),
    (
        "eval_f",
        &[
            "eval-f",
            "--schedule",
            "Q[;c2]",
            "--q",
            "3",
            "--word",
            "1.0.1",
        ],
    ),
    (
        "jump_at",
        &["jump", "--schedule", "Q[;c2]", "--q", "3", "--word", "1"],
    ),
    (
        "symmetry_check",
        &[
            "eval-f",
            "--schedule",
            "Q[;c2]",
            "--q",
            "3",
            "--word",
            "1.1",
            "--op",
            "symmetry",
        ],
    ),
    (
        "shift_commutation_check",
        &[
            "eval-f",
            "--schedule",
            "Q[;c2]",
            "--q",
            "3",
            "--word",
            "1.0.1",
            "--op",
            "shift",
            "--k",
            "2",
        ],
    ),
    (
        "monotonicity_witness",
        &[
            "eval-f",
            "--schedule",
            "Q[;c2]",
            "--q",
            "3",
            "--word",
            "0.1.1",
            "--op",
            "compare",
            "--word2",
            "1",
        ],
    ),
    (
        "derivative_probe",
        &[
            "probe-f",
            "--schedule",
            "Q[;c2]",
            "--q",
            "3",
            "--depth",
            "8",
        ],
    ),
    (
        "integral_f",
        &["integral", "--schedule", "Q[;c2]", "--q", "3"],
    ),
    (
        "eval_F",
        &[
            "eval-salem",
            "--matrix",
            SALEM,
            "--word",
            "1.1",
            "--terms",
            "8",
        ],
    ),
    (
        "eval_distribution",
        &["eval-salem", "--matrix", SALEM, "--value", "3/4"],
    ),
    (
        "eval_F_tilde",
        &[
            "eval-salem",
            "--matrix",
            SALEM,
            "--op",
            "tilde",
            "--word",
            "()",
            "--terms",
            "12",
        ],
    ),
    (
        "check_nondiff_hypotheses",
        &["check-hypotheses", "--matrix", SIGNED],
    ),
    (
        "oscillation_probe",
        &[
            "probe-salem",
            "--matrix",
            SIGNED,
            "--word",
            "1.1.1.1.1.1",
            "--depth",
            "6",
        ],
    ),
    (
        "composition_check",
        &[
            "eval-salem",
            "--matrix",
            SIGNED,
            "--op",
            "composition",
            "--schedule",
            "Q[;c2]",
            "--word",
            "1.0.1",
            "--terms",
            "6",
        ],
    ),
    (
        "parse_blocks",
        &["parse-g", "--q", "5", "--u", "0", "--word", "0.0.3.0.2.1"],
    ),
    (
        "expand_blocks",
        &[
            "parse-g", "--q", "5", "--u", "0", "--op", "expand", "--word", "3.2.1",
        ],
    ),
    (
        "eval_g",
        &["eval-g", "--q", "5", "--u", "0", "--alphas", "3.2.1"],
    ),
    (
        "invert_g",
        &[
            "parse-g", "--q", "5", "--u", "0", "--op", "invert", "--word", "3.2.1",
        ],
    ),
    ("monotonicity_class", &["probe-g", "--q", "6", "--u", "2"]),
    (
        "monotonicity_probe",
        &[
            "probe-g",
            "--q",
            "5",
            "--u",
            "0",
            "--op",
            "monotonicity",
            "--trials",
            "200",
        ],
    ),
    (
        "g_shift_commutation",
        &[
            "eval-g", "--q", "5", "--u", "0", "--alphas", "3.2.1", "--op", "shift", "--n", "1",
        ],
    ),
    (
        "g_derivative_probe",
        &[
            "probe-g",
            "--q",
            "5",
            "--u",
            "0",
            "--op",
            "derivative",
            "--alphas",
            "4.4",
            "--n",
            "2",
        ],
    ),
    (
        "dimension_Dg",
        &["dim", "--q", "5", "--u", "0", "--tol", "1e-12"],
    ),
    ("dimension_Eg", &["dim", "--q", "5", "--u", "2"]),
    (
        "box_count_graph",
        &["boxcount", "--q", "5", "--u", "0", "--m", "2"],
    ),
    (
        "graph_dimension_estimate",
        &[
            "boxcount", "--q", "5", "--u", "0", "--m-min", "2", "--m-max", "4",
        ],
    ),
];

const SALEM: &str = r#"{"columns_prefix":[],"tail":{"kind":"constant","column":["3/10","7/10"]}}"#;
const SIGNED: &str = r#"{"tail":{"kind":"constant","column":["3/5","-1/5","3/5"]}}"#;
