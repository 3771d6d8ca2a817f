use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entrolab_cli::{compare, render_table, resolve_jobs, run, CliError, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "entrolab", version, about = "Run entropy-decay and coupling verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of an experiment config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (ENTROLAB_JOBS takes precedence).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Tabulate theorem constants against estimates from several reports.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Print the model's constants without running any suite.
    Constants { config: PathBuf },
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, out, seed, jobs } => {
            let config = ExperimentConfig::from_path(&config)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(resolve_jobs(jobs)?)
                .build()
                .map_err(|e| CliError::config("jobs", e))?;
            let outcome = pool.install(|| run(&config, &RunOptions { out, seed }))?;
            let r = &outcome.report;
            if let Some(h) = &r.failed_hypothesis {
                println!("hypothesis not satisfied: {h}");
            }
            for s in &r.suites {
                let extra = s.error.as_deref().or(s.note.as_deref()).unwrap_or("");
                println!("{:<14} {:<6} {extra}", s.suite.name(), format!("{:?}", s.status).to_lowercase());
            }
            println!("report: {}", outcome.out_dir.join("report.json").display());
            Ok(outcome.exit_code())
        }
        Command::Compare { reports } => {
            print!("{}", render_table(&compare(&reports)?));
            Ok(0)
        }
        Command::Constants { config } => {
            let model = ExperimentConfig::from_path(&config)?.build_model()?;
            println!("{}", serde_json::to_string_pretty(&model.kappa).expect("constants serialize"));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("entrolab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
