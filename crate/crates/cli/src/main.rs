use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use suq2_core::decomp::index_pairing;
use suq2_core::export::{dump_operator, OperatorName};
use suq2_core::harness::{evaluate_suite, run_suite, spectrum_table, Status, SuiteConfig, SuiteReport};
use suq2_core::{HalfInt, Triple};

#[derive(Parser)]
#[command(name = "suq2", version, about = "Truncated spectral triples on quantum SU(2)")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Deformation parameter, 0 < q < 1.
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Truncation level (half-integer, e.g. 6 or 5/2).
    #[arg(long, global = true)]
    nmax: Option<HalfInt>,
    /// Truncation of the symbolic Gram–Schmidt oracle.
    #[arg(long, global = true)]
    oracle_nmax: Option<HalfInt>,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Seed for the mutation checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report directory for `check`; output file for the other commands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and write report.json and report.csv.
    Check {
        /// Run only these checks (default: all).
        #[arg(long = "only", value_name = "CHECK")]
        only: Vec<String>,
    },
    /// Operator export.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Eigenvalues of a Dirac operator with counted and closed-form multiplicities.
    Spectrum {
        #[arg(long, default_value = "dlssv")]
        triple: Triple,
    },
    /// Index pairing of the fundamental corepresentation with a triple.
    Index {
        /// `cp`, `dlssv`, or both when omitted.
        #[arg(long)]
        triple: Option<Triple>,
        /// Singular value threshold; repeatable.
        #[arg(long = "threshold", default_values_t = [1e-6, 1e-4, 1e-2])]
        thresholds: Vec<f64>,
    },
    /// Build (or load) the Gram–Schmidt oracle and compare it with the approximate generators.
    Oracle,
}

#[derive(Subcommand)]
enum OpAction {
    /// Write an operator in coordinate format with a convention header.
    Dump {
        /// Operator name, e.g. pi_prime_alpha, hat_beta, diff_alpha_star, d1, dirac_dlssv, unitary_u.
        #[arg(long)]
        name: String,
    },
}

fn config(common: &Common) -> anyhow::Result<SuiteConfig> {
    let mut cfg = SuiteConfig::default().with_env_overrides()?;
    if let Some(q) = common.q {
        cfg.q = q;
    }
    if let Some(n) = common.nmax {
        cfg.nmax = n;
    }
    cfg.oracle_nmax = common.oracle_nmax.unwrap_or_else(|| cfg.oracle_nmax.min(cfg.nmax));
    cfg.exact_nmax = cfg.exact_nmax.min(cfg.oracle_nmax);
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    for t in &common.tol {
        let (name, value) = t.split_once('=').with_context(|| format!("--tol expects NAME=VALUE, got '{t}'"))?;
        let value: f64 = value.trim().parse().with_context(|| format!("--tol {name}: '{value}' is not a number"))?;
        cfg.set_tolerance(name.trim(), value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn table<T: Serialize>(rows: &[T], format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(rows)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    })
}

fn summarize(report: &SuiteReport) {
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
            Status::Skipped => "SKIP",
        };
        let detail = c.detail.strip_prefix("skipped: ").unwrap_or(&c.detail);
        if detail.is_empty() {
            eprintln!("{status} {}", c.name);
        } else {
            eprintln!("{status} {}: {detail}", c.name);
        }
    }
}

fn print_report(report: &SuiteReport, format: Format) -> anyhow::Result<()> {
    summarize(report);
    print!("{}", if format == Format::Json { report.to_json()? } else { report.to_csv()? });
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let common = &cli.common;
    let mut cfg = config(common)?;
    let out = common.out.as_deref();
    match cli.command {
        Command::Check { only } => {
            if let Some(dir) = out {
                cfg.output_dir = dir.to_path_buf();
            }
            let report = if only.is_empty() {
                run_suite(cfg)?
            } else {
                let names: Vec<&str> = only.iter().map(String::as_str).collect();
                let report = evaluate_suite(cfg, &names)?;
                report.write(&report.config.output_dir)?;
                report
            };
            print_report(&report, common.format)?;
            Ok(!report.failed())
        }
        Command::Oracle => {
            let report = evaluate_suite(cfg, &["oracle_alpha", "oracle_beta"])?;
            summarize(&report);
            let text = if common.format == Format::Json { report.to_json()? } else { report.to_csv()? };
            emit(&text, out)?;
            Ok(!report.failed())
        }
        Command::Op { action: OpAction::Dump { name } } => {
            let name: OperatorName = name.parse()?;
            emit(&dump_operator(name, cfg.truncation()?, cfg.q, cfg.precision)?, out)?;
            Ok(true)
        }
        Command::Spectrum { triple } => {
            let rows = spectrum_table(triple, cfg.truncation()?)?;
            let consistent = rows.iter().all(|r| r.multiplicity == r.expected);
            emit(&table(&rows, common.format)?, out)?;
            Ok(consistent)
        }
        Command::Index { triple, thresholds } => {
            if thresholds.is_empty() {
                bail!("at least one --threshold is required");
            }
            let triples = triple.map_or_else(|| vec![Triple::Cp, Triple::Dlssv], |t| vec![t]);
            let t = cfg.truncation()?;
            let mut rows = Vec::new();
            for tr in triples {
                for &th in &thresholds {
                    rows.push(index_pairing(tr, t, cfg.q, th)?);
                }
            }
            let agreed = rows.iter().all(|r| r.index == rows[0].index);
            emit(&table(&rows, common.format)?, out)?;
            Ok(agreed && rows[0].index != 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
