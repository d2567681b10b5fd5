//! `ecd`: command-line front end for `ecd-core`.
//!
//! Exit codes: 0 for a conclusive run, 2 when an ordering check ends in
//! `Neither`, 1 for any error.

pub mod config;
pub mod render;

mod dist;
mod examples;
mod mc;
mod order;
mod scan;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ecd_core::{SchurTarget, SystemKind};

use config::{
    set, CommandName, ExampleChoice, GridConfig, OutputFormat, RelationChoice, RunConfig, Spacing,
    SystemConfig,
};

pub use examples::{example_artifacts, Artifact};

/// Environment variable naming the default directory for `examples`.
pub const OUT_DIR_ENV: &str = "ECD_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEITHER: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ecd",
    version,
    about = "Exponentiated Chen lifetimes of series and parallel systems"
)]
pub struct Cli {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Output file; for `examples`, the output directory
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate cdf, sf, pdf, hazard and reversed hazard of one component
    Dist(DistArgs),
    /// Compare two systems in the st, hr, rh or lr order
    OrderCheck(OrderArgs),
    /// Regenerate the worked examples and figure data
    Examples(ExamplesArgs),
    /// Sample the Schur difference of a system function
    SchurScan(ScanArgs),
    /// Compare analytic and Monte Carlo survival functions
    McVerify(McArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Abscissae, comma separated or repeated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Args, Default)]
pub struct SystemArgs {
    /// Structure of both systems: series or parallel
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<SystemKind>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a_alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a_beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a_lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b_alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b_beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b_lambda: Option<Vec<f64>>,
}

#[derive(Debug, Args, Default)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub grid_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub grid_count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Explicit abscissae, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid_points: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub systems: SystemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum)]
    pub relation: Option<RelationChoice>,
    /// Check the preconditions of theorem 1-5 and report its predicted direction
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub theorem: Option<u8>,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    #[arg(value_enum)]
    pub which: Option<ExampleChoice>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// series-sf-lambda, parallel-cdf-lambda, parallel-cdf-beta or series-sf-alpha
    #[arg(long, value_parser = parse_target)]
    pub target: Option<SchurTarget>,
    /// Point of the varied parameter vector
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub vector: Option<Vec<f64>>,
    /// Shared alpha (default 1; ignored when alpha is varied)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Shared beta (default 1; ignored when beta is varied)
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Shared lambda (default 1; ignored when lambda is varied)
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub systems: SystemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Draws per system
    #[arg(long, short = 'n')]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_kind(s: &str) -> Result<SystemKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown system kind `{s}` (series or parallel)"))
}

fn parse_target(s: &str) -> Result<SchurTarget, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
        format!(
            "unknown target `{s}` (series-sf-lambda, parallel-cdf-lambda, parallel-cdf-beta, series-sf-alpha)"
        )
    })
}

impl SystemArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let a = cfg.system_a.get_or_insert_with(SystemConfig::default);
        set(&mut a.alpha, self.a_alpha);
        set(&mut a.beta, self.a_beta);
        set(&mut a.lambda, self.a_lambda);
        set(&mut a.kind, self.kind);
        let any_b = self.b_alpha.is_some() || self.b_beta.is_some() || self.b_lambda.is_some();
        if any_b || cfg.system_b.is_some() {
            let b = cfg.system_b.get_or_insert_with(SystemConfig::default);
            set(&mut b.alpha, self.b_alpha);
            set(&mut b.beta, self.b_beta);
            set(&mut b.lambda, self.b_lambda);
            set(&mut b.kind, self.kind);
        }
    }
}

impl GridArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let given = self.grid_min.is_some()
            || self.grid_max.is_some()
            || self.grid_count.is_some()
            || self.spacing.is_some()
            || self.grid_points.is_some();
        if !given {
            return;
        }
        let g = cfg.grid.get_or_insert_with(GridConfig::default);
        if self.grid_points.is_some() {
            *g = GridConfig::default();
        } else if self.grid_min.is_some() || self.grid_max.is_some() {
            g.points = None;
        }
        set(&mut g.min, self.grid_min);
        set(&mut g.max, self.grid_max);
        set(&mut g.count, self.grid_count);
        set(&mut g.spacing, self.spacing);
        set(&mut g.points, self.grid_points);
    }
}

/// What a command produced: text for stdout (or `--output`) and an exit code.
pub struct Report {
    pub text: String,
    pub exit: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, exit: EXIT_OK }
    }
}

/// Merges the config file and flags into one `RunConfig`.
pub fn build_config(cli: Cli) -> anyhow::Result<(RunConfig, Command)> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.format, cli.format);
    set(&mut cfg.output, cli.output);
    let name = match &cli.command {
        Command::Dist(_) => CommandName::Dist,
        Command::OrderCheck(_) => CommandName::OrderCheck,
        Command::Examples(_) => CommandName::Examples,
        Command::SchurScan(_) => CommandName::SchurScan,
        Command::McVerify(_) => CommandName::McVerify,
    };
    cfg.claim(name)?;
    Ok((cfg, cli.command))
}

fn execute(cli: Cli) -> anyhow::Result<Report> {
    let (mut cfg, command) = build_config(cli)?;
    let report = match command {
        Command::Dist(a) => dist::run(&mut cfg, a)?,
        Command::OrderCheck(a) => order::run(&mut cfg, a)?,
        Command::Examples(a) => return examples::run(&mut cfg, a),
        Command::SchurScan(a) => scan::run(&mut cfg, a)?,
        Command::McVerify(a) => mc::run(&mut cfg, a)?,
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, &report.text)
            .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?;
        return Ok(Report {
            text: String::new(),
            exit: report.exit,
        });
    }
    Ok(report)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(r) => {
            print!("{}", r.text);
            r.exit
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
