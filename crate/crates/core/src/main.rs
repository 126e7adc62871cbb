use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toml::{Table, Value};

use kpzlab::config::{parse_config, ExperimentKind};
use kpzlab::experiment::{emit_report, run_experiment, ReportFormat};

#[derive(Parser)]
#[command(name = "kpzlab", version, about = "SHE/KPZ temporal-process simulation and path statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the stochastic heat equation over an ensemble of replicas.
    Simulate(Common),
    /// Sample fractional Brownian motion paths.
    Fbm(Common),
    /// Compute path statistics from a paths CSV.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Paths CSV to analyse (overrides stats.input).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run acceptance criteria and write a report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated criterion numbers (overrides verify.checks).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<u32>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    replicas: Option<u64>,
    #[arg(long, value_name = "N")]
    threads: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    override_boundary_guard: bool,
    /// Report format written after the run.
    #[arg(long, value_enum, default_value = "text")]
    report: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn section<'a>(root: &'a mut Table, name: &str) -> Result<&'a mut Table, String> {
    root.entry(name)
        .or_insert_with(|| Value::Table(Table::new()))
        .as_table_mut()
        .ok_or_else(|| format!("'{name}' must be a section"))
}

fn build_config(kind: ExperimentKind, c: &Common, extra: impl FnOnce(&mut Table) -> Result<(), String>) -> Result<kpzlab::config::ExperimentConfig, String> {
    let mut root: Table = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            text.parse().map_err(|e: toml::de::Error| format!("{}: {e}", p.display()))?
        }
        None => Table::new(),
    };
    let run = section(&mut root, "run")?;
    match run.get("kind").and_then(Value::as_str) {
        Some(k) if k != kind.name() => return Err(format!("config declares run.kind = '{k}' but the subcommand runs '{kind}'")),
        _ => {}
    }
    run.insert("kind".into(), kind.name().into());
    let int = |v: u64| Value::Integer(v as i64);
    if let Some(s) = c.seed {
        run.insert("seed".into(), int(s));
    }
    if let Some(r) = c.replicas {
        run.insert("replicas".into(), int(r));
    }
    if let Some(t) = c.threads {
        run.insert("threads".into(), int(t));
    }
    if let Some(o) = &c.out {
        run.insert("out".into(), o.display().to_string().into());
    }
    if c.override_boundary_guard {
        run.insert("override_boundary_guard".into(), true.into());
    }
    extra(&mut root)?;
    parse_config(&root.to_string()).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Simulate(c) => (ExperimentKind::SimulateShe, c),
        Command::Fbm(c) => (ExperimentKind::SimulateFbm, c),
        Command::Stats { common, .. } => (ExperimentKind::Stats, common),
        Command::Verify { common, .. } => (ExperimentKind::Verify, common),
    };
    let config = build_config(kind, common, |root| {
        match &cli.command {
            Command::Stats { input: Some(p), .. } => {
                section(root, "stats")?.insert("input".into(), p.display().to_string().into());
            }
            Command::Verify { checks, .. } if !checks.is_empty() => {
                let list = checks.iter().map(|c| Value::Integer(*c as i64)).collect();
                section(root, "verify")?.insert("checks".into(), Value::Array(list));
            }
            _ => {}
        }
        Ok(())
    });
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let manifest = match run_experiment(&config) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let format = match common.report {
        Format::Text => ReportFormat::TextTable,
        Format::Csv => ReportFormat::Csv,
    };
    match emit_report(&manifest, format) {
        Ok(path) => {
            if let Ok(text) = std::fs::read_to_string(&path) {
                print!("{text}");
            }
            eprintln!("report: {}", path.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    for (stream, msg) in &manifest.failures {
        eprintln!("replica {stream} failed: {msg}");
    }
    let verify_failed = kind == ExperimentKind::Verify
        && std::fs::read_to_string(manifest.out_dir.join("report.csv")).map(|t| t.lines().skip(1).any(|l| l.ends_with(",false"))).unwrap_or(true);
    if manifest.failures.is_empty() && !verify_failed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
