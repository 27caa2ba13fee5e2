use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use genhilbert::io::{
    fmt_g17, report_to_csv, section_to_csv, section_to_json, sequence_from_csv, sequence_to_csv, sequence_to_json,
};
use genhilbert::operator::{apply_truncated, apply_via_quadrature, hankel_fast_apply, EnEvalConfig};
use genhilbert::{
    classify_boundedness, convergence_sweep_with_tol, entry, finite_section, hilbert_inequality_check, parse_measure, Error,
    Measure, NormVerdict, PExponent, SequenceVector,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "genhilbert", version, about = "Generalized Hilbert matrices built from measures on [0, 1]")]
struct Cli {
    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print one matrix entry C_{n,k}.
    Entry {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Print the N x N finite section.
    Section {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long = "N")]
        size: usize,
    },
    /// Apply the operator to a sequence read from CSV.
    Apply {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        sequence: PathBuf,
        /// Number of output rows; defaults to the sequence length.
        #[arg(long)]
        rows: Option<usize>,
        /// Use only the first `terms` values of the sequence.
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Tail tolerance of the e_n series (quadrature method).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Closed-form l^p norm, or the reason the operator is unbounded.
    Norm {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        p: PExponent,
    },
    /// Boundedness verdict with the formula that decided it.
    Classify {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        p: PExponent,
    },
    /// Numerical lower bounds over an (eps, N) grid.
    Certify {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        p: PExponent,
        /// Comma-separated epsilon values.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// Comma-separated sizes; each is used for both K and N.
        #[arg(long = "N", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Power-iteration tolerance for the p = 2 series.
        #[arg(long, default_value_t = genhilbert::certify::DEFAULT_POWER_TOL)]
        tol: f64,
    },
    /// Check Hilbert's inequality on seeded random sequences.
    HilbertCheck {
        #[arg(long)]
        p: PExponent,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum length of each random sequence.
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
}

#[derive(Args)]
struct MeasureArg {
    /// Measure file (JSON).
    #[arg(long)]
    measure: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Auto,
    Truncated,
    Quadrature,
    Fft,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { .. }
            | Error::InvalidField { .. }
            | Error::DuplicateAtom { .. }
            | Error::Format { .. }
            | Error::InvalidExponent(_)
            | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_measure(arg: &MeasureArg) -> Run<Measure> {
    Ok(parse_measure(&read(&arg.measure)?)?)
}

struct Ctx {
    quiet: bool,
    output: Option<Format>,
}

impl Ctx {
    fn progress(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn format_or(&self, default: Format) -> Format {
        self.output.unwrap_or(default)
    }
}

#[derive(Serialize)]
struct NormRecord {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    p: PExponent,
}

fn verdict_csv(v: &NormVerdict) -> String {
    let (status, value) = match v.norm() {
        Some(n) => ("bounded", fmt_g17(n)),
        None => ("unbounded", v.reason().map(|r| r.to_string()).unwrap_or_default()),
    };
    let formula = v.formula_used.map(|f| serde_json::to_value(f).unwrap().as_str().unwrap().to_string()).unwrap_or_default();
    format!("p,status,value,formula\n{},{status},{value},{formula}\n", v.p)
}

fn run(cli: Cli) -> Run<String> {
    let ctx = Ctx { quiet: cli.quiet, output: cli.output };
    match cli.command {
        Command::Entry { measure, n, k } => {
            let v = entry(&load_measure(&measure)?, n, k);
            Ok(match ctx.output {
                None => format!("{}\n", fmt_g17(v)),
                Some(Format::Csv) => format!("n,k,value\n{n},{k},{}\n", fmt_g17(v)),
                Some(Format::Json) => format!("{}\n", serde_json::json!({ "n": n, "k": k, "value": v })),
            })
        }
        Command::Section { measure, size } => {
            let mu = load_measure(&measure)?;
            ctx.progress(&format!("building {size} x {size} section"));
            let s = finite_section(&mu, size)?;
            Ok(match ctx.format_or(Format::Csv) {
                Format::Csv => section_to_csv(&s),
                Format::Json => format!("{}\n", section_to_json(&s)),
            })
        }
        Command::Apply { measure, sequence, rows, terms, method, tol } => {
            let mu = load_measure(&measure)?;
            let file = sequence_from_csv(&read(&sequence)?)?;
            let mut values = file.values.into_values();
            if let Some(t) = terms {
                if t > values.len() {
                    return Err(Failure::Usage(format!("--terms {t} exceeds the sequence length {}", values.len())));
                }
                values.truncate(t);
            }
            let a = SequenceVector::new(values);
            let rows = rows.unwrap_or(a.len());
            ctx.progress(&format!("applying to {} terms, {rows} rows", a.len()));
            let d = match method {
                Method::Auto => genhilbert::apply_auto(&mu, &a, rows)?,
                Method::Truncated => apply_truncated(&mu, &a, rows)?,
                Method::Quadrature => {
                    let defaults = EnEvalConfig::default();
                    let cfg = EnEvalConfig::new(tol.unwrap_or(defaults.tail_tol), defaults.max_terms)?;
                    apply_via_quadrature(&mu, &a, rows, cfg)?
                }
                Method::Fft => {
                    let c = mu
                        .as_scaled_lebesgue()
                        .ok_or_else(|| Failure::Usage("--method fft needs a measure of the form c dt".into()))?;
                    let d = hankel_fast_apply(&a, rows)?;
                    SequenceVector::new(d.values().iter().map(|v| c * v).collect())
                }
            };
            Ok(match ctx.format_or(Format::Csv) {
                Format::Csv => sequence_to_csv(d.values(), file.p),
                Format::Json => format!("{}\n", sequence_to_json(d.values(), file.p)),
            })
        }
        Command::Norm { measure, p } => {
            let v = classify_boundedness(&load_measure(&measure)?, p);
            Ok(match ctx.format_or(Format::Json) {
                Format::Csv => verdict_csv(&v),
                Format::Json => {
                    let record = NormRecord {
                        status: if v.is_bounded() { "bounded" } else { "unbounded" },
                        norm: v.norm(),
                        reason: v.reason().map(|r| r.to_string()),
                        p,
                    };
                    format!("{}\n", serde_json::to_string(&record).unwrap())
                }
            })
        }
        Command::Classify { measure, p } => {
            let v = classify_boundedness(&load_measure(&measure)?, p);
            Ok(match ctx.format_or(Format::Json) {
                Format::Csv => verdict_csv(&v),
                Format::Json => format!("{}\n", v.to_json()),
            })
        }
        Command::Certify { measure, p, eps, sizes, tol } => {
            let mu = load_measure(&measure)?;
            ctx.progress(&format!("sweeping {} x {} grid at p = {p}", eps.len(), sizes.len()));
            let report = convergence_sweep_with_tol(&mu, p, &eps, &sizes, tol)?;
            Ok(match ctx.format_or(Format::Json) {
                Format::Csv => report_to_csv(&report),
                Format::Json => format!("{}\n", report.to_json()),
            })
        }
        Command::HilbertCheck { p, trials, seed, terms } => {
            ctx.progress(&format!("{trials} trials, seed {seed}"));
            let check = hilbert_inequality_check(p, trials, seed, terms)?;
            let out = match ctx.format_or(Format::Json) {
                Format::Json => format!("{}\n", serde_json::to_string(&check).unwrap()),
                Format::Csv => {
                    let mut s = String::from("p,trials,seed,max_len,max_ratio,violations\n");
                    writeln!(s, "{p},{trials},{seed},{terms},{},{}", fmt_g17(check.max_ratio), check.violations).unwrap();
                    s
                }
            };
            if check.violations > 0 {
                print!("{out}");
                return Err(Failure::Domain(format!("{} of {trials} trials violate the inequality", check.violations)));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
