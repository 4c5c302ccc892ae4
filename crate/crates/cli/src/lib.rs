//! Library side of the `ayev` binary: configuration, reports, and one
//! function per subcommand.

pub mod commands;
pub mod config;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Identity;
use config::{ConfigError, Format, RunConfig};
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "ayev", version, about = "Checks the evaluation map of the affine super Yangian of gl(m|n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with any of the flags below; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: RunConfig,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the finite presentation on the evaluation images.
    VerifyRelations,
    /// Check an identity of the surjectivity argument.
    CheckIdentity {
        #[arg(value_enum)]
        which: Identity,
    },
    /// Witness for one diagonal target E_jj(a), chosen with --row and --a.
    Witness,
    /// Witnesses for every E_jj(a) with |a| <= N.
    DensityReport,
    /// Print the image of one generator, e.g. h[1,1] or x+[0,1].
    DumpImage { generator: String },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cfg = cli.flags.over(&file);
    cfg.rank()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Report, ConfigError> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::VerifyRelations => commands::verify_relations(&cfg),
        Command::CheckIdentity { which } => commands::check_identity(&cfg, *which),
        Command::Witness => commands::witness(&cfg),
        Command::DensityReport => commands::density_report(&cfg),
        Command::DumpImage { generator } => commands::dump_image(&cfg, generator),
    }
}

/// Runs the parsed command, writes the report, and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("ayev: configuration error: {e}");
            return EXIT_CONFIG;
        }
    };
    let text = match report.config.format() {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    let written = match &report.config.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("ayev: cannot write report: {e}");
        return EXIT_CONFIG;
    }
    if let Some(err) = &report.error {
        eprintln!("ayev: {err}");
    } else if let Some(first) = report.entries.iter().find(|e| !e.passed()) {
        eprintln!("ayev: {} failed ({})", first.id, first.anchor);
    }
    if report.ok() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}
