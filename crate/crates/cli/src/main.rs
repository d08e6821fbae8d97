use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qwalk_core::experiment::{load_config, run, run_serial, save_run, write_config};

#[derive(Parser)]
#[command(name = "qwalk", about = "Run decoherent quantum walk experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment and write its CSV and run record.
    Run {
        config: PathBuf,
        /// Root directory for outputs; overrides `output` in the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Evaluate sweep cells one at a time.
        #[arg(long)]
        serial: bool,
    },
    /// Check a config and print its canonical form.
    Validate { config: PathBuf },
    /// Print the tool version.
    Version,
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, output, serial } => {
            let cfg = load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            let record = if serial { run_serial(&cfg) } else { run(&cfg) }
                .with_context(|| format!("running {}", config.display()))?;
            let root = output.unwrap_or_else(|| PathBuf::from(&cfg.output));
            let dir = save_run(&cfg, &record, &root).context("saving run")?;
            eprintln!(
                "{}: {} rows in {:.2}s",
                record.experiment,
                record.table.rows.len(),
                record.wall_time_s
            );
            println!("{}", dir.display());
        }
        Command::Validate { config } => {
            let cfg = load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            let cells = cfg.cells()?.len();
            print!("{}", write_config(&cfg));
            eprintln!("ok: {} ({cells} sweep cell{}), digest {}", cfg.experiment, if cells == 1 { "" } else { "s" }, cfg.digest());
        }
        Command::Version => println!("qwalk {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
