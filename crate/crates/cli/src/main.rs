//! `normcoh`: compute coherence measures, search for axiom violations, and
//! print reproduction tables.
//!
//! Exit codes: 0 success, 1 violation found or table row failed, 2 usage or
//! input error.

mod repro;

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normcoh::axioms::{falsify_with, AxiomReport, FalsifyConfig, VIOLATION_TOL};
use normcoh::catalog::j_state;
use normcoh::io::{read_state, to_json_string, to_json_string_pretty, write_json};
use normcoh::{CoherenceMeasure, MeasureMethod, MeasureSpec};
use serde::Serialize;
use serde_json::json;

use repro::{render_table, ReproOptions, Section};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "normcoh", version, about = "Norm-induced coherence measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the coherence of a state under a measure.
    Coherence(CoherenceArgs),
    /// Print a reproduction table; exits 1 if any row fails.
    Repro(ReproArgs),
    /// Search for axiom violations; exits 1 if any are found.
    Falsify(FalsifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Args)]
struct CoherenceArgs {
    /// Density matrix JSON file.
    #[arg(long)]
    state: PathBuf,
    /// Measure spec as inline JSON or a path to a JSON file.
    #[arg(long)]
    measure: String,
    /// Solver tolerance (numerical methods only).
    #[arg(long)]
    tol: Option<f64>,
    /// Solver seed (numerical methods only).
    #[arg(long)]
    seed: Option<u64>,
    /// Divide by the coherence of J2/2 under the same measure.
    #[arg(long)]
    normalize: bool,
    /// Also write coherence.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    #[arg(value_enum)]
    section: Section,
    /// Trials (sufficiency) or instances per check (lemmas).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write `<section>.<format>` into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FalsifyArgs {
    /// Measure spec as inline JSON or a path to a JSON file.
    #[arg(long)]
    measure: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Violation tolerance.
    #[arg(long, default_value_t = VIOLATION_TOL)]
    tol: f64,
    /// Largest random state dimension.
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
    /// Largest number of rows per Kraus operator.
    #[arg(long, default_value_t = 8)]
    max_rows: usize,
    /// Largest number of Kraus operators.
    #[arg(long, default_value_t = 4)]
    max_ops: usize,
    /// Write `falsify.<format>` into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_measure(arg: &str) -> CliResult<MeasureSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| format!("cannot read measure file {arg}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("invalid measure spec: {e}").into())
}

fn with_solver_overrides(spec: MeasureSpec, tol: Option<f64>, seed: Option<u64>) -> CliResult<MeasureSpec> {
    let adjust = |mut cfg: normcoh::SolverConfig| {
        if let Some(t) = tol {
            cfg.tolerance = t;
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg
    };
    let method = match spec.method() {
        MeasureMethod::ClosedForm => return Ok(spec),
        MeasureMethod::MinDiag(cfg) => MeasureMethod::MinDiag(adjust(*cfg)),
        MeasureMethod::Yu(cfg) => MeasureMethod::Yu(adjust(*cfg)),
    };
    Ok(MeasureSpec::new(spec.norm().clone(), method)?)
}

fn output_path(dir: &Path, stem: &str, ext: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(format!("{stem}.{ext}")))
}

fn csv_string<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
}

fn cmd_coherence(args: &CoherenceArgs) -> CliResult<ExitCode> {
    let spec = with_solver_overrides(parse_measure(&args.measure)?, args.tol, args.seed)?;
    let rho = read_state(&args.state).map_err(|e| format!("cannot load state {}: {e}", args.state.display()))?;
    let result = spec.compute(&rho)?;
    let mut report = json!({
        "measure": spec,
        "method": spec.method_name(),
        "value": result.value,
        "minimizer": result.minimizer,
        "normalized": args.normalize,
    });
    if args.normalize {
        let base = spec.compute(&j_state(2))?.value;
        if base <= 0.0 {
            return Err("cannot normalize: C(J2/2) is zero".into());
        }
        report["value"] = json!(result.value / base);
        report["raw_value"] = json!(result.value);
        report["normalization"] = json!(base);
    }
    report["solver"] = json!(result.trace);
    println!("{}", to_json_string_pretty(&report)?);
    if let Some(dir) = &args.out {
        write_json(output_path(dir, "coherence", "json")?, &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_repro(args: &ReproArgs) -> CliResult<ExitCode> {
    let opts = ReproOptions {
        trials: args.trials,
        seed: args.seed,
    };
    let out = repro::run(args.section, &opts)?;
    print!("{}", render_table(&out.rows));
    let failed = out.rows.iter().filter(|r| !r.pass).count();
    println!("{} rows, {failed} failed", out.rows.len());
    if let Some(dir) = &args.out {
        let path = output_path(dir, args.section.name(), args.format.extension())?;
        match args.format {
            Format::Csv => fs::write(&path, csv_string(&out.rows)?)?,
            Format::Json => write_json(&path, &out.rows)?,
        }
        if let Some(summary) = &out.oracle {
            write_json(output_path(dir, "oracle_summary", "json")?, summary)?;
        }
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct ViolationCsvRow {
    axiom: String,
    gap: f64,
    tolerance: f64,
    source: String,
    trial: Option<u64>,
    witness: String,
}

fn violation_rows(reports: &[AxiomReport]) -> CliResult<Vec<ViolationCsvRow>> {
    reports
        .iter()
        .map(|r| {
            Ok(ViolationCsvRow {
                axiom: format!("{:?}", r.axiom),
                gap: r.gap,
                tolerance: r.tolerance,
                source: r.witness["source"].as_str().unwrap_or("").to_string(),
                trial: r.witness["trial"].as_u64(),
                witness: to_json_string(&r.witness)?,
            })
        })
        .collect()
}

fn cmd_falsify(args: &FalsifyArgs) -> CliResult<ExitCode> {
    let spec = parse_measure(&args.measure)?;
    if args.max_dim == 0 || args.max_rows == 0 || args.max_ops == 0 {
        return Err("--max-dim, --max-rows and --max-ops must be positive".into());
    }
    let cfg = FalsifyConfig {
        trials: args.trials,
        seed: args.seed,
        max_dim: args.max_dim,
        max_rows: args.max_rows,
        max_ops: args.max_ops,
        tolerance: args.tol,
    };
    let violations = falsify_with(&spec, &cfg)?;
    let text = match args.format {
        Format::Json => {
            let report = json!({
                "measure": spec,
                "trials": args.trials,
                "seed": args.seed,
                "tolerance": args.tol,
                "violations": violations,
            });
            to_json_string_pretty(&report)? + "\n"
        }
        Format::Csv => csv_string(&violation_rows(&violations)?)?,
    };
    match &args.out {
        Some(dir) => fs::write(output_path(dir, "falsify", args.format.extension())?, &text)?,
        None => print!("{text}"),
    }
    match violations.first() {
        Some(top) => eprintln!(
            "{}: {} violations, largest gap {:e} ({:?})",
            spec.describe(),
            violations.len(),
            top.gap,
            top.axiom
        ),
        None => eprintln!("{}: no violations", spec.describe()),
    }
    Ok(if violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coherence(a) => cmd_coherence(a),
        Command::Repro(a) => cmd_repro(a),
        Command::Falsify(a) => cmd_falsify(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
