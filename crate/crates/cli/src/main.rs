use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rodwave_cli::{reverdict, run_experiment, sweep, ExperimentConfig, RunOptions, Verdict, EXIT_CONFIG};

/// Experiments for the generalised hyperelastic-rod equation.
#[derive(Parser)]
#[command(name = "rodwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        config: PathBuf,
        /// Run even when the model hypotheses fail.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run every config matching a glob pattern in parallel.
    Sweep {
        pattern: String,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute the verdict of a finished run from its files.
    Verdict { run_dir: PathBuf },
}

fn print_verdict(v: &Verdict) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Run {
            config,
            force,
            output_dir,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_experiment(&cfg, &RunOptions { force, output_dir })?;
            print_verdict(&outcome.verdict)?;
            Ok(outcome.exit_code())
        }
        Command::Sweep { pattern, jobs } => {
            let entries = sweep::sweep(&pattern, jobs)?;
            for e in &entries {
                let dir = e.dir.as_ref().map_or_else(|| "-".into(), |d| d.display().to_string());
                println!("{}\t{}\t{}\t{}", e.exit_code, e.config.display(), dir, e.message);
            }
            Ok(sweep::sweep_exit_code(&entries))
        }
        Command::Verdict { run_dir } => {
            let v = reverdict(&run_dir)?;
            print_verdict(&v)?;
            Ok(v.exit_code)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match Cli::try_parse() {
        Ok(cli) => execute(cli).unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                0
            }
        }
    };
    ExitCode::from(code as u8)
}
