use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moment_cli::{list_fixtures, run, Overrides, RunConfig};
use moment_core::suites::Suite;

#[derive(Parser)]
#[command(
    name = "cmc-moment",
    version,
    about = "Verify moment-class identities of CMC surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites selected by a TOML or JSON config.
    Run {
        config: PathBuf,
        /// Seed for sampled checks (default: config value, else 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides the config).
        #[arg(long, env = "CMC_MOMENT_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Suite to run; repeatable, replaces the config list.
        #[arg(long = "suite")]
        suites: Vec<Suite>,
        /// Multiplies every tolerance.
        #[arg(long)]
        tolerance_scale: Option<f64>,
        /// Do not echo the summary.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Print the fixture catalog.
    ListFixtures,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::ListFixtures => {
            print!("{}", list_fixtures());
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            seed,
            out_dir,
            suites,
            tolerance_scale,
            quiet,
        } => {
            let ov = Overrides {
                seed,
                out_dir,
                suites,
                tolerance_scale,
            };
            let result = RunConfig::load(&config).and_then(|cfg| run(cfg, &ov));
            match result {
                Ok(out) => {
                    if !quiet {
                        print!("{}", out.summary);
                        println!("reports written to {}", out.out_dir.display());
                    }
                    ExitCode::from(out.exit_code())
                }
                Err(e) => {
                    eprintln!("cmc-moment: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
    }
}
