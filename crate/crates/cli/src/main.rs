use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dualwell_cli::config::{self, Prepared};
use dualwell_cli::output::write_outcome;
use dualwell_cli::plot::write_plots;
use dualwell_cli::run::{check_load, run, spec_checks};
use dualwell_cli::table::Table;
use dualwell_cli::CliError;

#[derive(Parser)]
#[command(name = "dualwell", version, about = "Critical points and stability of the radial double-well problem")]
struct Cli {
    /// Directory for artifacts; overrides output.directory in the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write fields.csv, report.json and extras.
    Solve { config: PathBuf },
    /// Check the problem parameters and load hypotheses only.
    Validate { config: PathBuf },
    /// Draw displacement, dual-field and stress plots from a fields.csv.
    Plot { fields: PathBuf },
}

fn prepare(path: &Path) -> Result<Prepared, CliError> {
    config::prepare(config::load(path)?)
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    match &cli.command {
        Command::Solve { config } => {
            let prepared = prepare(config)?;
            let dir = cli
                .output_dir
                .clone()
                .unwrap_or_else(|| prepared.config.output.directory.clone());
            let outcome = run(&prepared, timestamp())?;
            let written = write_outcome(&outcome, &dir)?;
            let mut lines: Vec<String> = outcome
                .report
                .branches
                .iter()
                .map(|b| {
                    format!(
                        "branch {}: I = {:.12e}, gap {:.2e}, {}",
                        b.branch, b.energies.primal, b.energies.gap, b.stability.verdict
                    )
                })
                .collect();
            lines.extend(written.iter().map(|p| format!("wrote {}", p.display())));
            Ok(lines)
        }
        Command::Validate { config } => {
            let prepared = prepare(config)?;
            let mut lines: Vec<String> = spec_checks(&prepared)
                .iter()
                .map(|c| format!("ok   {} ({})", c.name, c.detail))
                .collect();
            let load = check_load(&prepared)?;
            lines.push(format!("ok   balance (residual {:e})", load.balance_residual));
            lines.push(format!("ok   single interior zero (r3 = {:?})", load.r3));
            lines.push(format!("ok   L1 bound ({:e} < {:e})", load.l1_norm, load.l1_bound));
            Ok(lines)
        }
        Command::Plot { fields } => {
            let table = Table::read_csv(fields)?;
            let dir = cli.output_dir.clone().unwrap_or_else(|| {
                fields
                    .parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| PathBuf::from("."))
            });
            let written = write_plots(&table, &dir)?;
            Ok(written.iter().map(|p| format!("wrote {}", p.display())).collect())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(lines) => {
            if !cli.quiet {
                for line in lines {
                    println!("{line}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
