use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hpqfim_cli::config::SweepConfig;
use hpqfim_cli::show::{parse_values, show_point, to_json_string};
use hpqfim_cli::sweep::run_sweep;
use hpqfim_cli::verify::{run_verify, Hooks, Suite};
use hpqfim_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "hpqfim", version, about = "Hybrid quantum Fisher information bounds for qubit models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the interest parameter and write inv_L, inv_M, inv_U as CSV.
    Sweep { config: PathBuf },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Print every intermediate quantity at one point as JSON.
    Show {
        config: PathBuf,
        /// Interest value(s), comma separated.
        #[arg(long, allow_hyphen_values = true)]
        theta_i: String,
        /// Nuisance value for the pointwise QFIM.
        #[arg(long, allow_hyphen_values = true)]
        theta_n: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Matrix,
    Models,
    Bounds,
    Measurement,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Matrix => Suite::Matrix,
            SuiteArg::Models => Suite::Models,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::Measurement => Suite::Measurement,
            SuiteArg::All => Suite::All,
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Sweep { config } => {
            let cfg = SweepConfig::load(&config)?;
            run_sweep(&cfg, &mut out)?;
        }
        Command::Verify { suite } => {
            let report = run_verify(suite.into(), &Hooks::default(), &mut out)?;
            if !report.passed() {
                return Err(CliError::Verification {
                    failed: report.failed(),
                    total: report.checks.len(),
                });
            }
        }
        Command::Show {
            config,
            theta_i,
            theta_n,
        } => {
            let cfg = SweepConfig::load(&config)?;
            let theta_i = parse_values(&theta_i, "--theta-i")?;
            let theta_n = theta_n.map(|t| parse_values(&t, "--theta-n")).transpose()?;
            let doc = show_point(&cfg, &theta_i, theta_n.as_deref())?;
            out.write_all(to_json_string(&doc)?.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
