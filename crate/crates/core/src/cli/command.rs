//! Argument parsing and dispatch for the `killing` binary.

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::scalar::Mode;

use super::catalog::{self, parse_number};
use super::config::AnalysisConfig;
use super::metric_file::{load_metric, parse_point};
use super::report::{analyze, compare, resolve_point};

#[derive(Debug, Parser)]
#[command(name = "killing", version, about = "Local Killing fields of a metric at a point")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full analysis of a metric file or `catalog:<name>`.
    Analyze {
        source: String,
        #[command(flatten)]
        opts: Options,
    },
    /// Built-in metrics.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Jet-oracle dimension per order against the flag's terminal rank.
    Compare {
        source: String,
        #[command(flatten)]
        opts: Options,
        /// Emit JSON instead of the text table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// Names, dimensions and default points.
    List,
    /// Analysis of a catalog entry.
    Analyze {
        name: String,
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Comma-separated coordinates, e.g. `1/2,0.25`; defaults to the metric's point.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Rational arithmetic (default).
    #[arg(long, conflicts_with = "float")]
    pub exact: bool,
    /// Floating-point arithmetic.
    #[arg(long)]
    pub float: bool,
    /// Relative rank tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Cap on the covariant-derivative order of the flag.
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Jet-oracle order.
    #[arg(long)]
    pub jet_order: Option<usize>,
    /// Number of probe points.
    #[arg(long, default_value_t = 4)]
    pub probes: usize,
    /// Per-coordinate probe displacement bound.
    #[arg(long, default_value = "1/100")]
    pub probe_radius: String,
    #[arg(long, default_value_t = 0x6b69_6c6c)]
    pub probe_seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

impl Options {
    pub fn config(&self) -> Result<AnalysisConfig> {
        let config = AnalysisConfig {
            mode: if self.float { Mode::Float } else { Mode::Exact },
            tol: self.tol,
            max_order: self.max_order,
            jet_order: self.jet_order,
            probes: self.probes,
            probe_radius: parse_number(&self.probe_radius)?,
            probe_seed: self.probe_seed,
        };
        config.validate()?;
        Ok(config)
    }
}

fn emit(text: &str, opts: &Options, out: &mut dyn Write) -> Result<()> {
    match &opts.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

fn run_analyze(source: &str, opts: &Options, out: &mut dyn Write) -> Result<i32> {
    let config = opts.config()?;
    let loaded = load_metric(source)?;
    let point = opts.point.as_deref().map(parse_point).transpose()?;
    let x = resolve_point(&loaded, point)?;
    let report = analyze(&loaded, &x, &config)?;
    emit(&report.to_json(), opts, out)?;
    Ok(report.exit_code())
}

fn run_compare(source: &str, opts: &Options, json: bool, out: &mut dyn Write) -> Result<i32> {
    let config = opts.config()?;
    let loaded = load_metric(source)?;
    let point = opts.point.as_deref().map(parse_point).transpose()?;
    let x = resolve_point(&loaded, point)?;
    let table = compare(&loaded, &x, &config)?;
    let text = if json { table.to_json() } else { table.table() };
    emit(&text, opts, out)?;
    Ok(table.exit_code())
}

fn catalog_list(out: &mut dyn Write) -> Result<i32> {
    let mut text = String::new();
    for e in catalog::catalog() {
        text.push_str(&format!(
            "{:<16} dim {}  point ({})  {}\n",
            e.name,
            e.dim(),
            e.default_point.join(", "),
            e.description
        ));
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))?;
    Ok(0)
}

/// Runs a parsed command, writing results to `out` and errors to `err`.
/// Returns the process exit code: 0 clean, 2 on warnings that cast doubt
/// on the result, 1 on errors.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Analyze { source, opts } => run_analyze(source, opts, out),
        Command::Compare { source, opts, json } => run_compare(source, opts, *json, out),
        Command::Catalog { action: CatalogAction::List } => catalog_list(out),
        Command::Catalog {
            action: CatalogAction::Analyze { name, opts },
        } => run_analyze(&format!("catalog:{name}"), opts, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error [{}]: {e}", e.module());
            1
        }
    }
}
