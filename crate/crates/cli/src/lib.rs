//! Batch front end: argument parsing, dispatch and the report envelope.
//!
//! Every run produces one JSON report holding the tool version, the full
//! configuration, a verdict and the command's result. Exit codes:
//! 0 all verdicts pass, 1 usage or input error, 2 mathematical failure,
//! 3 inconclusive at the working precision.

mod commands;
mod suites;

use clap::{Args, Parser, Subcommand};
use periodkit::error::Error;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "periodkit", version, about = "Periods of motives over CM fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Stream one JSON line per finished sweep item on standard error.
    #[arg(long, global = true)]
    progress: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Decompose E (x) F into fields and tabulate alpha(tau, sigma).
    Decompose(DecomposeArgs),
    /// Check the structural axioms of motive data.
    Validate(InputArgs),
    /// Local periods delta, c+, c-, Q_i and Q^(j) at every sigma of the CM type.
    Periods(InputArgs),
    /// Critical integers of a Hodge multiset over Q.
    Critical(CriticalArgs),
    /// Split indices of a pair of exponent lists or of two motives.
    Split(SplitArgs),
    /// Emit the symbolic right-hand side of a critical value formula.
    Formula(FormulaArgs),
    /// Run a seeded verification sweep.
    Verify(VerifyArgs),
    /// Canonicalize, compare or derive symbolic period expressions.
    Rewrite(RewriteArgs),
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct BackendArgs {
    /// Exact arithmetic in Q(zeta_N), written `N=24` or `24`.
    #[arg(long, value_name = "N=CONDUCTOR", conflicts_with = "float")]
    pub exact: Option<String>,
    /// Complex ball arithmetic with this many decimal digits.
    #[arg(long, value_name = "DIGITS")]
    pub float: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact(u32),
    Float(u32),
}

pub const DEFAULT_CONDUCTOR: u32 = 24;

impl BackendArgs {
    pub fn select(&self) -> Result<Backend, CliError> {
        if let Some(d) = self.float {
            if d == 0 {
                return Err(CliError::usage("--float needs a positive number of digits"));
            }
            return Ok(Backend::Float(d));
        }
        match &self.exact {
            None => Ok(Backend::Exact(DEFAULT_CONDUCTOR)),
            Some(s) => {
                let t = s.trim();
                let t = t.strip_prefix("N=").unwrap_or(t);
                match t.parse::<u32>() {
                    Ok(n) if n >= 1 => Ok(Backend::Exact(n)),
                    _ => Err(CliError::usage(format!("cannot read conductor '{}'", s))),
                }
            }
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct DecomposeArgs {
    #[command(flatten)]
    backend: BackendArgs,
    /// Coefficient field as `label:c0,c1,...` (monic polynomial, low to high).
    #[arg(long, default_value = "Q:0,1")]
    e: String,
    /// CM base field in the same format.
    #[arg(long, default_value = "Q(i):1,0,1")]
    f: String,
}

#[derive(Args, Debug, Serialize)]
struct InputArgs {
    #[command(flatten)]
    backend: BackendArgs,
    /// Motive data in JSON.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CriticalArgs {
    /// Hodge multiset as a JSON list of [p, q] pairs.
    #[arg(long)]
    hodge: String,
}

#[derive(Args, Debug, Serialize)]
struct SplitArgs {
    #[command(flatten)]
    backend: BackendArgs,
    /// Exponents of M as a JSON list.
    #[arg(long)]
    p: Option<String>,
    /// Weight of M.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<i64>,
    /// Exponents of M' as a JSON list.
    #[arg(long)]
    r: Option<String>,
    /// Weight of M'.
    #[arg(long, allow_hyphen_values = true)]
    w2: Option<i64>,
    /// Motive data for M; use with --input2 instead of exponent lists.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Motive data for M'.
    #[arg(long)]
    input2: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FormulaArgs {
    /// deligne, automorphic, local-tensor, rank-one or guerberoff.
    #[arg(long)]
    kind: String,
    /// Infinity type of Pi in JSON, or `@path`.
    #[arg(long)]
    pi: Option<String>,
    /// Infinity type of Pi' (or of the character) in JSON, or `@path`.
    #[arg(long)]
    pi2: Option<String>,
    /// Evaluation point in the automorphic normalization, e.g. `0` or `1/2`.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Embedding label for the local tensor factor.
    #[arg(long)]
    sigma: Option<String>,
    /// Name of the first motive or representation.
    #[arg(long, default_value = "M")]
    motive1: String,
    /// Name of the second motive or representation.
    #[arg(long, default_value = "M'")]
    motive2: String,
    /// Unitary data in JSON, or `@path`, for the guerberoff kind.
    #[arg(long)]
    case: Option<String>,
    /// Name of the character psi for the guerberoff kind.
    #[arg(long, default_value = "psi")]
    psi: String,
    /// Weight a_0 of the unitary representation for the guerberoff kind.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    a0: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// tensor, global, conjugacy, planted or sign.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Field pair `E/F`, each as `label:c0,c1,...`; repeat to rotate through several.
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// Largest rank of M.
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    /// Largest rank of M' in the tensor suite.
    #[arg(long, default_value_t = 3)]
    pub max_n2: usize,
    /// Relative error allowed in float mode.
    #[arg(long, default_value_t = 1e-30)]
    pub tolerance: f64,
    /// Worker threads; does not affect the report.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct RewriteArgs {
    /// Expression in the canonical text grammar.
    #[arg(long)]
    expr: Option<String>,
    /// Second expression; checks equivalence with --expr.
    #[arg(long)]
    equiv: Option<String>,
    /// Equivalence level `tags;field`, e.g. `E(chi);Q` or `E(Pi);Fgal`.
    #[arg(long)]
    level: Option<String>,
    /// Declared objects in JSON, or `@path`.
    #[arg(long)]
    universe: Option<String>,
    /// leftmost, rightmost or seed:K.
    #[arg(long, default_value = "leftmost")]
    schedule: String,
    /// Turn an assumption off; repeatable.
    #[arg(long)]
    without: Vec<String>,
    /// local-periods or guerberoff.
    #[arg(long)]
    derivation: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    /// Unitary data in JSON, or `@path`, for the guerberoff derivation.
    #[arg(long)]
    case: Option<String>,
    /// Print the rule set for the universe.
    #[arg(long)]
    list_rules: bool,
}

/// Overall verdict of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Verdict::Pass => EXIT_PASS,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            Verdict::Fail => EXIT_FAIL,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, kind: "usage".into(), message: msg.into(), line: None, column: None }
    }

    pub fn json(what: &str, e: &serde_json::Error) -> Self {
        CliError {
            code: EXIT_USAGE,
            kind: "malformed-json".into(),
            message: format!("{}: {}", what, e),
            line: Some(e.line()),
            column: Some(e.column()),
        }
    }

    fn to_json(&self) -> Value {
        json!({"kind": self.kind, "message": self.message, "line": self.line, "column": self.column})
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::MiddleClass(_) => (EXIT_FAIL, "middle-class"),
            Error::NotCritical(_) => (EXIT_FAIL, "not-critical"),
            Error::Validation { .. } => (EXIT_FAIL, "validation"),
            Error::Singular | Error::DivisionByZero => (EXIT_FAIL, "degenerate"),
            Error::Undecidable => (EXIT_INCONCLUSIVE, "undecidable"),
            Error::Parse(_) => (EXIT_USAGE, "parse"),
            Error::NotEmbeddable { .. } => (EXIT_USAGE, "not-embeddable"),
            Error::Rewrite(_) => (EXIT_USAGE, "rewrite"),
            _ => (EXIT_USAGE, "input"),
        };
        CliError { code, kind: kind.into(), message: e.to_string(), line: None, column: None }
    }
}

/// What a command hands back to the envelope.
pub struct Finding {
    pub verdict: Verdict,
    pub result: Value,
}

/// The outcome of one run: exit status, the report (absent for help and
/// version requests) and the text to print.
pub struct Outcome {
    pub code: i32,
    pub report: Option<Value>,
    pub text: String,
    pub output: Option<PathBuf>,
}

/// Parse arguments (the first is the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            return Outcome { code, report: None, text: e.to_string(), output: None };
        }
    };
    let config = json!({
        "command": serde_json::to_value(&cli.command).unwrap_or(Value::Null),
        "output": cli.output,
    });
    let res = match &cli.command {
        Command::Decompose(a) => commands::decompose(&a.backend, &a.e, &a.f),
        Command::Validate(a) => commands::validate_cmd(&a.backend, &a.input),
        Command::Periods(a) => commands::periods(&a.backend, &a.input),
        Command::Critical(a) => commands::critical(&a.hodge),
        Command::Split(a) => commands::split(a),
        Command::Formula(a) => commands::formula(a),
        Command::Verify(a) => suites::verify(a, cli.progress),
        Command::Rewrite(a) => commands::rewrite(a),
    };
    let mut report = serde_json::Map::new();
    report.insert("tool".into(), json!("periodkit"));
    report.insert("version".into(), json!(VERSION));
    report.insert("config".into(), config);
    let code = match res {
        Ok(f) => {
            report.insert("verdict".into(), json!(f.verdict.label()));
            report.insert("result".into(), f.result);
            f.verdict.code()
        }
        Err(e) => {
            let label = match e.code {
                EXIT_FAIL => "fail",
                EXIT_INCONCLUSIVE => "inconclusive",
                _ => "error",
            };
            report.insert("verdict".into(), json!(label));
            report.insert("error".into(), e.to_json());
            e.code
        }
    };
    let report = Value::Object(report);
    let text = render(&report);
    Outcome { code, report: Some(report), text, output: cli.output }
}

/// Pretty JSON with a trailing newline. Object keys are sorted, so the bytes
/// depend only on the content.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Parse JSON text given inline or as `@path`.
pub(crate) fn json_arg(what: &str, s: &str) -> Result<Value, CliError> {
    match s.strip_prefix('@') {
        Some(path) => read_json(what, std::path::Path::new(path)),
        None => serde_json::from_str(s).map_err(|e| CliError::json(what, &e)),
    }
}

pub(crate) fn read_json(what: &str, path: &std::path::Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {} '{}': {}", what, path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(what, &e))
}
