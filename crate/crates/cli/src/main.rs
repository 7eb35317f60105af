//! `entwitness` command-line front end.
//!
//! Exit codes:
//! 0 success or inconclusive, 1 internal failure (or a set that fails verification),
//! 2 usage error / invalid parameter / unsupported dimension, 3 entanglement detected,
//! 4 no threshold crossing, 5 output path not writable.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entwitness::measurements::MeasurementKind;
use entwitness::measures::SkewOrder;
use entwitness::operator::DenseLimit;
use entwitness::threshold::{
    find_threshold_with, linear_grid, sweep, write_csv, Detector, Family, FamilyEvaluator, FamilySpec, NoiseFamily,
    DEFAULT_TOLERANCE, MAX_DENSE_ANTISYM,
};
use entwitness::{Error, MeasurementSet, Provenance};
use serde_json::Value;

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ENTANGLED: u8 = 3;
const EXIT_NO_CROSSING: u8 = 4;
const EXIT_UNWRITABLE: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "entwitness", version, about = "Skew-information and variance entanglement criteria")]
struct Cli {
    /// Override the dense state-vector dimension cap (also read from ENTWITNESS_DENSE_LIMIT).
    #[arg(long, global = true)]
    dense_limit: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the defining relations of a built-in measurement set.
    Verify {
        #[arg(long)]
        kind: MeasurementKind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate both criteria for one noisy family member.
    Evaluate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the noise level where a detector switches on.
    Threshold {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "skew")]
        detector: Detector,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the criteria on a grid of noise levels.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        /// `start:stop:steps`, inclusive of both ends.
        #[arg(long, default_value = "0:1:101")]
        grid: String,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the threshold tables.
    Table {
        #[arg(long, value_enum)]
        table: TableId,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in measurement set as JSON.
    ExportMeasurements {
        #[arg(long)]
        kind: MeasurementKind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// dicke, w, antisym or two_qutrit.
    #[arg(long)]
    family: Family,
    /// Number of parties; two_qutrit defaults to 2.
    #[arg(long = "N")]
    parties: Option<usize>,
    #[arg(long, default_value = "mum")]
    measurement: MeasurementKind,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    s: f64,
    /// Closed-form moments instead of a state vector (antisym only).
    #[arg(long)]
    analytic: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableId {
    #[value(name = "I", alias = "i", alias = "1")]
    One,
    #[value(name = "II", alias = "ii", alias = "2")]
    Two,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
    Write(PathBuf, io::Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(
                Error::InvalidParameter(_) | Error::UnsupportedDimension { .. } | Error::Capacity { .. },
            ) => EXIT_USAGE,
            Failure::Core(_) | Failure::Io(_) => EXIT_FAILURE,
            Failure::Write(..) => EXIT_UNWRITABLE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) => m.clone(),
            Failure::Write(path, e) => format!("cannot write {}: {e}", path.display()),
            Failure::Io(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limit = match cli.dense_limit {
        Some(v) => DenseLimit::from_env().with_max_dim(v),
        None => DenseLimit::from_env(),
    };
    match run(cli.command, &limit) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(command: Command, limit: &DenseLimit) -> Result<u8, Failure> {
    match command {
        Command::Verify { kind, d, out } => {
            let report = MeasurementSet::load(kind, d)?.verify(entwitness::measurements::CONSTRUCTION_TOLERANCE);
            let value = serde_json::to_value(&report).map_err(|e| Failure::Io(e.into()))?;
            emit(out.as_deref(), &json_text(&value))?;
            if !report.passed {
                eprintln!("{}", report.summary());
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Evaluate { family, p, out } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Failure::Usage(format!("--p must lie in [0, 1], got {p}")));
            }
            let spec = family.spec(Detector::Skew)?;
            let report = FamilyEvaluator::new(&spec, limit)?.report(p)?;
            emit(out.as_deref(), &json_text(&report.to_json()))?;
            Ok(if report.verdict.is_entangled() { EXIT_ENTANGLED } else { EXIT_OK })
        }
        Command::Threshold { family, detector, tol, out } => {
            let spec = family.spec(detector)?;
            let result = find_threshold_with(&FamilyEvaluator::new(&spec, limit)?, detector, tol)?;
            emit(out.as_deref(), &json_text(&result.to_json(&spec)))?;
            Ok(if result.p_star.is_some() { EXIT_OK } else { EXIT_NO_CROSSING })
        }
        Command::Sweep { family, grid, format, out } => {
            let (start, stop, steps) = parse_grid(&grid)?;
            let spec = family.spec(Detector::Skew)?;
            let evaluator = FamilyEvaluator::new(&spec, limit)?;
            let rows = sweep(&evaluator, &linear_grid(start, stop, steps)?)?;
            let text = match format {
                SweepFormat::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf).map_err(Failure::Io)?;
                    String::from_utf8(buf).expect("csv is ascii")
                }
                SweepFormat::Json => {
                    let value = Value::Array(rows.iter().map(|r| r.report.to_json()).collect());
                    json_text(&value)
                }
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Table { table, out } => {
            let text = match table {
                TableId::One => table_one(limit)?,
                TableId::Two => table_two(limit)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::ExportMeasurements { kind, d, out } => {
            emit(out.as_deref(), &json_text(&MeasurementSet::load(kind, d)?.to_json()))?;
            Ok(EXIT_OK)
        }
    }
}

impl FamilyArgs {
    fn spec(&self, detector: Detector) -> Result<FamilySpec, Failure> {
        let parties = match (self.parties, &self.family) {
            (Some(n), _) => n,
            (None, Family::TwoQutrit) => 2,
            (None, f) => return Err(Failure::Usage(format!("--N is required for family {f}"))),
        };
        let order = SkewOrder::for_criteria(self.s)?;
        Ok(FamilySpec::new(self.family.clone(), parties, self.measurement, order, detector)?.with_analytic(self.analytic)?)
    }
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), Failure> {
    let bad = || Failure::Usage(format!("--grid expects start:stop:steps, got '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(start.is_finite() && stop.is_finite()) || steps == 0 {
        return Err(bad());
    }
    Ok((start, stop, steps))
}

fn json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values always serialize");
    text.push('\n');
    text
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).and_then(|_| lock.flush()).map_err(Failure::Io)
        }
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Write(path.to_path_buf(), e))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| Failure::Write(path.to_path_buf(), e))
        }
    }
}

const CELL: usize = 16;
const NO_DETECTION: &str = "✗ no detection";
const EXTERNAL: &str = "n/a (external)";

/// One table cell: the 4-decimal threshold, a marker for analytic moments, or no detection.
fn threshold_cell(
    family: Family,
    parties: usize,
    measurement: MeasurementKind,
    detector: Detector,
    limit: &DenseLimit,
) -> Result<String, Failure> {
    let analytic = family == Family::Antisym && parties > MAX_DENSE_ANTISYM;
    let spec = FamilySpec::new(family, parties, measurement, SkewOrder::FISHER, detector)?.with_analytic(analytic)?;
    let evaluator = FamilyEvaluator::new(&spec, limit)?;
    let result = find_threshold_with(&evaluator, detector, DEFAULT_TOLERANCE)?;
    Ok(match result.p_star {
        None => NO_DETECTION.to_string(),
        Some(p) if evaluator.provenance() == Provenance::Analytic => format!("{p:.4} *"),
        Some(p) => format!("{p:.4}"),
    })
}

fn render(title: &str, columns: &[usize], rows: &[(String, Vec<String>)], notes: &[&str]) -> String {
    let label_width = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0).max(9) + 2;
    let mut text = String::new();
    writeln!(text, "{title}").unwrap();
    let mut header = format!("{:<label_width$}", "criterion");
    for n in columns {
        header.push_str(&pad(&format!("N={n}")));
    }
    writeln!(text, "{}", header.trim_end()).unwrap();
    for (label, cells) in rows {
        let mut line = format!("{label:<label_width$}");
        for cell in cells {
            line.push_str(&pad(cell));
        }
        writeln!(text, "{}", line.trim_end()).unwrap();
    }
    for note in notes {
        writeln!(text, "{note}").unwrap();
    }
    text
}

// format! width counts chars, which keeps the ✗ column aligned
fn pad(cell: &str) -> String {
    format!("{cell:<CELL$}")
}

fn table_one(limit: &DenseLimit) -> Result<String, Failure> {
    let columns = [3, 4, 5, 8, 9];
    let mut rows = Vec::new();
    for (family, name) in [(Family::Dicke, "dicke"), (Family::Antisym, "antisym")] {
        for detector in [Detector::Skew, Detector::Variance] {
            let cells = columns
                .iter()
                .map(|&n| threshold_cell(family.clone(), n, MeasurementKind::Mum, detector, limit))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((format!("{name} {detector}"), cells));
        }
        rows.push((format!("{name} external"), vec![EXTERNAL.to_string(); columns.len()]));
    }
    Ok(render(
        "Table I: entangled for p > p*  (MUBs, kappa = 1, s = -1)",
        &columns,
        &rows,
        &["* computed from analytic moments (no state vector)"],
    ))
}

fn table_two(limit: &DenseLimit) -> Result<String, Failure> {
    let columns = [3, 4, 5, 6, 7];
    let mut rows = Vec::new();
    for detector in [Detector::Skew, Detector::Variance] {
        let cells = columns
            .iter()
            .map(|&n| threshold_cell(Family::W, n, MeasurementKind::Gsic, detector, limit))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((format!("w {detector}"), cells));
    }
    rows.push(("w external".to_string(), vec![EXTERNAL.to_string(); columns.len()]));
    Ok(render(
        "Table II: entangled for p_N < p <= 1  (GSIC d = 2, eta = 1/4, s = -1)",
        &columns,
        &rows,
        &[],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:101").unwrap(), (0.0, 1.0, 101));
        assert_eq!(parse_grid(" 0.2 : 0.4 : 3").unwrap(), (0.2, 0.4, 3));
        for bad in ["0:1", "0:1:0", "a:1:2", "0:1:2:3", "0:inf:2", "0:1:-2"] {
            assert!(matches!(parse_grid(bad), Err(Failure::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn exit_codes_by_error_class() {
        let core = |e| Failure::Core(e).exit_code();
        assert_eq!(core(Error::InvalidParameter("x".into())), EXIT_USAGE);
        assert_eq!(core(Error::UnsupportedDimension { kind: "MUB", d: 6, supported: "" }), EXIT_USAGE);
        assert_eq!(core(Error::Capacity { what: "x", requested: "9".into(), limit: 1 }), EXIT_USAGE);
        assert_eq!(core(Error::NoConvergence(4)), EXIT_FAILURE);
        assert_eq!(core(Error::MultipleCrossings { crossings: 2, locations: vec![] }), EXIT_FAILURE);
        let io = || io::Error::new(io::ErrorKind::PermissionDenied, "no");
        assert_eq!(Failure::Write(PathBuf::from("x"), io()).exit_code(), EXIT_UNWRITABLE);
        assert_eq!(Failure::Io(io()).exit_code(), EXIT_FAILURE);
    }

    #[test]
    fn two_qutrit_defaults_to_two_parties() {
        let args = FamilyArgs {
            family: Family::TwoQutrit,
            parties: None,
            measurement: MeasurementKind::Gsic,
            s: -1.0,
            analytic: false,
        };
        assert_eq!(args.spec(Detector::Variance).unwrap().parties(), 2);
        let args = FamilyArgs { family: Family::Dicke, ..args };
        assert!(matches!(args.spec(Detector::Skew), Err(Failure::Usage(_))));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
