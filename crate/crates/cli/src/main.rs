use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liefield::{catalog, config, exit, CliError};

#[derive(Parser)]
#[command(
    name = "liefield",
    version,
    about = "Run liefield scenario configs and report residual checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config, writing report.json and artifacts into OUTDIR.
    Run {
        config: PathBuf,
        outdir: PathBuf,
        /// Seed for every randomized field (overrides the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// `key.path=value`, applied to the config before validation. Repeatable.
        #[arg(long = "override", value_name = "KEY=VAL")]
        overrides: Vec<String>,
    },
    /// List scenario kinds, their checks, and the named Lagrangians and gauges.
    List,
    /// Validate a config without running it.
    CheckConfig { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::PASS
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run {
            config,
            outdir,
            seed,
            overrides,
        } => {
            let report = liefield::run_scenario(&config, &outdir, seed, &overrides)?;
            for c in &report.checks {
                println!(
                    "{} {:<22} {:.3e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value
                );
            }
            println!("{}: {} failure(s)", report.scenario, report.failures);
            Ok(if report.passed() {
                exit::PASS
            } else {
                exit::CHECK_FAILED
            })
        }
        Command::List => {
            print!("{}", catalog::listing());
            Ok(exit::PASS)
        }
        Command::CheckConfig { config } => {
            let cfg = config::load(&config, &[], None)?;
            println!(
                "{}: ok (kind {}, {} checks)",
                cfg.id,
                cfg.kind,
                cfg.checks.len()
            );
            Ok(exit::PASS)
        }
    }
}
