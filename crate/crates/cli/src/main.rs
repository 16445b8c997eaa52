//! Pipeline orchestrator over files. Subcommands: extract, measure,
//! evaluate, sweep, roc, synth, report.
//!
//! Configuration comes from a flat `key = value` file (`--config`), with
//! every key overridable by the same-named command-line flag. Exit codes:
//! 0 success, 1 validation error, 2 I/O error.

mod commands;
mod config;
mod manifest;
mod stages;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use forumrank_core::error::{Error, Result};

use config::{RunConfig, Settings};

#[derive(Parser)]
#[command(name = "forumrank", version, about = "Forum communication-network pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build monthly communication graphs from the post corpus
    Extract(CommonArgs),
    /// Compute centralities and activity indicators per snapshot
    Measure(CommonArgs),
    /// Evaluate score tables against vendor sales
    Evaluate(CommonArgs),
    /// Re-extract and re-evaluate over an extraction-parameter grid
    Sweep(CommonArgs),
    /// ROC sweeps per month, measure, and vendor-group definition
    Roc(CommonArgs),
    /// Generate a seeded synthetic corpus
    Synth(CommonArgs),
    /// Run the full pipeline and assemble a summary report
    Report(CommonArgs),
}

/// Every config key as a flag; flags override config-file values.
#[derive(Args, Default)]
struct CommonArgs {
    /// Flat `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Posts file (CSV or JSONL)
    #[arg(long)]
    posts: Option<String>,
    /// Sales observations CSV
    #[arg(long)]
    sales: Option<String>,
    /// Posts format: csv or jsonl (default: by extension)
    #[arg(long)]
    format: Option<String>,
    /// Output directory
    #[arg(long)]
    out_dir: Option<String>,
    /// Month range, e.g. 2014-01..2015-03 (default: corpus span)
    #[arg(long)]
    months: Option<String>,
    #[arg(long)]
    delta_o: Option<String>,
    /// Duration, e.g. 1month, 14d, 3600
    #[arg(long)]
    delta_t: Option<String>,
    #[arg(long)]
    omega_lower: Option<String>,
    /// Duration at which the weight floor is reached
    #[arg(long)]
    t_lim: Option<String>,
    #[arg(long)]
    omega_first: Option<String>,
    /// Comma-separated measure list
    #[arg(long)]
    measures: Option<String>,
    /// Rank-cut fraction
    #[arg(long)]
    fraction: Option<String>,
    /// ROC threshold step in percent
    #[arg(long)]
    roc_step: Option<String>,
    #[arg(long)]
    damping: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    /// Top-k listing size
    #[arg(long)]
    top_k: Option<String>,
    /// "Low activity" post-count threshold for ROC groups
    #[arg(long)]
    activity_threshold: Option<String>,
    /// Seed for synthetic generation
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    grid_delta_o: Option<String>,
    #[arg(long)]
    grid_delta_t: Option<String>,
    #[arg(long)]
    grid_omega_lower: Option<String>,
    #[arg(long)]
    grid_t_lim: Option<String>,
    #[arg(long)]
    grid_omega_first: Option<String>,
    #[arg(long)]
    synth_users: Option<String>,
    #[arg(long)]
    synth_vendor_fraction: Option<String>,
    #[arg(long)]
    synth_months: Option<String>,
    /// First synthetic month, e.g. 2020-01
    #[arg(long)]
    synth_start: Option<String>,
    #[arg(long)]
    synth_topic_rate: Option<String>,
    #[arg(long)]
    synth_reply_rate: Option<String>,
    #[arg(long)]
    synth_delay_hours: Option<String>,
    #[arg(long)]
    synth_delay_sigma: Option<String>,
    #[arg(long)]
    synth_coupling: Option<String>,
    #[arg(long)]
    synth_sales_base: Option<String>,
    #[arg(long)]
    synth_sales_noise: Option<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut settings = Settings::default();
        if let Some(path) = &self.config {
            settings.load_file(path)?;
        }
        let overrides: [(&str, &Option<String>); 33] = [
            ("posts", &self.posts),
            ("sales", &self.sales),
            ("format", &self.format),
            ("out_dir", &self.out_dir),
            ("months", &self.months),
            ("delta_o", &self.delta_o),
            ("delta_t", &self.delta_t),
            ("omega_lower", &self.omega_lower),
            ("t_lim", &self.t_lim),
            ("omega_first", &self.omega_first),
            ("measures", &self.measures),
            ("fraction", &self.fraction),
            ("roc_step", &self.roc_step),
            ("damping", &self.damping),
            ("tolerance", &self.tolerance),
            ("max_iters", &self.max_iters),
            ("top_k", &self.top_k),
            ("activity_threshold", &self.activity_threshold),
            ("seed", &self.seed),
            ("grid_delta_o", &self.grid_delta_o),
            ("grid_delta_t", &self.grid_delta_t),
            ("grid_omega_lower", &self.grid_omega_lower),
            ("grid_t_lim", &self.grid_t_lim),
            ("grid_omega_first", &self.grid_omega_first),
            ("synth_users", &self.synth_users),
            ("synth_vendor_fraction", &self.synth_vendor_fraction),
            ("synth_months", &self.synth_months),
            ("synth_start", &self.synth_start),
            ("synth_topic_rate", &self.synth_topic_rate),
            ("synth_reply_rate", &self.synth_reply_rate),
            ("synth_delay_hours", &self.synth_delay_hours),
            ("synth_delay_sigma", &self.synth_delay_sigma),
            ("synth_coupling", &self.synth_coupling),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                settings.set(key, v.clone());
            }
        }
        if let Some(v) = &self.synth_sales_base {
            settings.set("synth_sales_base", v.clone());
        }
        if let Some(v) = &self.synth_sales_noise {
            settings.set("synth_sales_noise", v.clone());
        }
        RunConfig::resolve(&settings)
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let (cfg, runner): (RunConfig, fn(&RunConfig) -> Result<()>) = match &cli.command {
        Command::Extract(args) => (args.resolve()?, commands::extract::run),
        Command::Measure(args) => (args.resolve()?, commands::measure::run),
        Command::Evaluate(args) => (args.resolve()?, commands::evaluate::run),
        Command::Sweep(args) => (args.resolve()?, commands::sweep::run),
        Command::Roc(args) => (args.resolve()?, commands::roc::run),
        Command::Synth(args) => (args.resolve()?, commands::synth::run),
        Command::Report(args) => (args.resolve()?, commands::report::run),
    };
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| with_path(e, &cfg.out_dir))?;
    runner(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

// path-context I/O helpers shared by the command modules

pub(crate) fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| with_path(e, path))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| with_path(e, path))
}

pub(crate) fn open_reader(path: &Path) -> Result<impl Read> {
    std::fs::File::open(path)
        .map(std::io::BufReader::new)
        .map_err(|e| with_path(e, path))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| with_path(e, parent))?;
        }
    }
    std::fs::write(path, bytes).map_err(|e| with_path(e, path))
}
