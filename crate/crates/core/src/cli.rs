//! Command-line front end.

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classifier::{classify, verify_all, Report, DEFAULT_SCAN_BOUND, MIN_SCAN_BOUND};
use crate::cone::{contains, minimal_supported_face, ConeJson};
use crate::error::{Error, Result};
use crate::fano_db::{self, FanoRecord, VerdictLevel};
use crate::intersection::DivisorClass;
use crate::invariants::invariant_report;
use crate::rational::QVector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "balanced", version, about = "Exact a/b invariants and balancedness of Fano threefolds")]
pub struct Cli {
    /// Record database (JSON); the embedded one when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub db: Option<PathBuf>,

    /// Repeat for more detail on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List records.
    List,
    /// Print one record as JSON.
    Show { name: String },
    /// Compute a and b for a divisor (default -K).
    Inv {
        name: String,
        /// Coefficients c1,c2,... in the record's basis.
        #[arg(long, value_name = "c1,c2,...", allow_hyphen_values = true)]
        divisor: Option<String>,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Classify one record.
    Classify {
        name: String,
        #[arg(long, default_value_t = DEFAULT_SCAN_BOUND)]
        scan_bound: u32,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Classify every record and compare with the stored verdicts.
    VerifyAll {
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SCAN_BOUND)]
        scan_bound: u32,
    },
    /// Cone operations on a JSON cone file.
    Cone {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: ConeOp,
        /// Vector for member and face, e.g. 1,-2,3/4.
        #[arg(allow_hyphen_values = true)]
        vector: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeOp {
    Dualize,
    Member,
    Face,
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Style { color: !no_color && std::io::stdout().is_terminal() }
    }

    fn paint(&self, ok: bool, text: &str) -> String {
        match (self.color, ok) {
            (false, _) => text.to_string(),
            (true, true) => format!("\x1b[32m{text}\x1b[0m"),
            (true, false) => format!("\x1b[31m{text}\x1b[0m"),
        }
    }
}

/// Serializes through `serde_json::Value`, whose maps are sorted, so that
/// identical inputs give byte-identical output.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, canonical_json(value)?)?;
    Ok(())
}

fn load_db(path: Option<&Path>) -> Result<Vec<FanoRecord>> {
    let Some(path) = path else {
        return fano_db::load_builtin();
    };
    let records = fano_db::load_file(path)?;
    for rec in &records {
        let violations = fano_db::validate(rec);
        if !violations.is_empty() {
            return Err(Error::CorruptData { name: rec.name.clone(), violations: violations.join("; ") });
        }
    }
    Ok(records)
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let style = Style::detect();
    match &cli.command {
        Command::Cone { file, op, vector } => cone_command(file, *op, vector.as_deref(), out),
        Command::List => {
            let records = load_db(cli.db.as_deref())?;
            writeln!(out, "{:<16} {:>4} {:>5} {:>6}  {}", "name", "rho", "index", "degree", "expected").map_err(io)?;
            for r in &records {
                let index = r.index.map_or("-".to_string(), |i| i.to_string());
                writeln!(out, "{:<16} {:>4} {:>5} {:>6}  {}", r.name, r.rank, index, r.degree, r.expected.verdict)
                    .map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Show { name } => {
            let records = load_db(cli.db.as_deref())?;
            let rec = fano_db::find(&records, name)?;
            write!(out, "{}", canonical_json(rec)?).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Inv { name, divisor, json } => {
            let records = load_db(cli.db.as_deref())?;
            let rec = fano_db::find(&records, name)?;
            let model = rec.model()?;
            let l = match divisor {
                Some(s) => DivisorClass(s.parse::<QVector>()?),
                None => model.anticanonical(),
            };
            // warn before computing: a class off the stored cone's interior fails below
            if let Some(w) = model.low_confidence(&l) {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            let report = invariant_report(&model, &l)?;
            writeln!(out, "L = {l}").map_err(io)?;
            writeln!(out, "a = {}", report.a).map_err(io)?;
            writeln!(out, "b = {}", report.b).map_err(io)?;
            writeln!(out, "adjoint = {}", report.adjoint).map_err(io)?;
            writeln!(out, "witness_facets = {:?}", report.witness_facets).map_err(io)?;
            if let Some(path) = json {
                write_json(&report, path)?;
            }
            Ok(EXIT_OK)
        }
        Command::Classify { name, scan_bound, json } => {
            let records = load_db(cli.db.as_deref())?;
            let rec = fano_db::find(&records, name)?;
            let expected = rec.expected.verdict;
            match classify(rec, *scan_bound) {
                Ok(v) => {
                    let ok = v.level == expected && v.exceptional_set == rec.expected.exceptional_set;
                    writeln!(out, "{}: {}", rec.name, style.paint(ok, v.level.as_str())).map_err(io)?;
                    writeln!(out, "exceptional set: {}", display_set(&v.exceptional_set)).map_err(io)?;
                    writeln!(out, "expected: {} ({})", expected, display_set(&rec.expected.exceptional_set))
                        .map_err(io)?;
                    for w in &v.witnesses {
                        let a = w.a.as_ref().map_or("?".into(), |a| a.to_string());
                        let b = w.b.map_or("?".into(), |b| b.to_string());
                        let le = if w.a_is_bound { "<=" } else { "=" };
                        writeln!(
                            out,
                            "  {}: a {le} {a}, b = {b}  [{:?}/{:?}]",
                            w.object, w.outcome.a_cmp, w.outcome.b_cmp
                        )
                        .map_err(io)?;
                    }
                    if let Some(path) = json {
                        write_json(&v, path)?;
                    }
                    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
                }
                Err(e @ Error::InsufficientAnnotations { .. }) => {
                    writeln!(out, "{}: {}", rec.name, VerdictLevel::Unclassified).map_err(io)?;
                    writeln!(out, "reason: {e}").map_err(io)?;
                    Ok(if expected == VerdictLevel::Unclassified { EXIT_OK } else { EXIT_MISMATCH })
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyAll { json, scan_bound } => {
            if *scan_bound < MIN_SCAN_BOUND {
                return Err(Error::InvalidScanBound(*scan_bound));
            }
            let records = load_db(cli.db.as_deref())?;
            let report = verify_all(&records, *scan_bound);
            print_report(&report, &style, cli.verbose, out, err)?;
            if let Some(path) = json {
                write_json(&report, path)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

fn display_set(s: &str) -> &str {
    if s.is_empty() {
        "(empty)"
    } else {
        s
    }
}

fn print_report(report: &Report, style: &Style, verbose: u8, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    for w in &report.warnings {
        writeln!(err, "warning: {w}").map_err(io)?;
    }
    writeln!(out, "{:<16} {:<18} {:<18} {}", "name", "computed", "expected", "result").map_err(io)?;
    for r in &report.results {
        let unclassified = r.expected == VerdictLevel::Unclassified.as_str();
        let status = if unclassified {
            "skip".to_string()
        } else if r.matched {
            style.paint(true, "ok")
        } else {
            style.paint(false, "MISMATCH")
        };
        writeln!(out, "{:<16} {:<18} {:<18} {}", r.name, r.computed, r.expected, status).map_err(io)?;
        if !r.matched && !unclassified && r.computed_exceptional_set != r.expected_exceptional_set {
            writeln!(
                out,
                "  exceptional set: computed {:?}, expected {:?}",
                r.computed_exceptional_set, r.expected_exceptional_set
            )
            .map_err(io)?;
        }
        if verbose > 0 {
            if let Some(e) = &r.error {
                writeln!(err, "{}: {e}", r.name).map_err(io)?;
            }
        }
    }
    let s = report.summary;
    writeln!(out, "pass {}  fail {}  unclassified {}", s.pass, s.fail, s.unclassified).map_err(io)?;
    if report.passed() {
        writeln!(out, "{}", style.paint(true, "all classified entries match the stored verdicts")).map_err(io)?;
    } else {
        writeln!(out, "{}", style.paint(false, &format!("{} entries do not match", s.fail))).map_err(io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FaceOutput {
    codim: usize,
    tight_facets: Vec<usize>,
    face: ConeJson,
}

fn cone_command(file: &Path, op: ConeOp, vector: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(file)?;
    let parsed: ConeJson = serde_json::from_str(&text).map_err(|e| Error::Parse {
        location: format!("{}:{}:{}", file.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    let cone = parsed.into_cone()?;
    let vec = || -> Result<QVector> {
        vector
            .ok_or_else(|| Error::Parse { location: "argv".into(), message: "this operation needs a vector".into() })?
            .parse()
    };
    match op {
        ConeOp::Dualize => write!(out, "{}", canonical_json(&cone.to_json())?).map_err(io)?,
        ConeOp::Member => writeln!(out, "{}", contains(&cone, &vec()?)?).map_err(io)?,
        ConeOp::Face => {
            let face = minimal_supported_face(&cone, &vec()?)?;
            let output = FaceOutput { codim: face.codim, tight_facets: face.tight_facets, face: face.face.to_json() };
            write!(out, "{}", canonical_json(&output)?).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}
