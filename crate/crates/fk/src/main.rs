use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fk::{emit_plot_data, CliError, Overrides, PlotKind, ScenarioConfig};

#[derive(Parser)]
#[command(name = "fk", version, about = "Feynman-Kac amplitude experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        config: PathBuf,
        /// Override `run.master_seed` (takes precedence over FK_SEED).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
        /// Override `out_dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Extract a plot-ready CSV from a result file.
    Plot {
        result: PathBuf,
        /// modulus_vs_lambda, a_vs_rho or a_vs_direction.
        #[arg(long)]
        kind: String,
        /// Output path; defaults to plot_<kind>.csv next to the result.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a config, then print the resolved form.
    Validate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run(config: &Path, overrides: Overrides, workers: Option<usize>) -> Result<(), CliError> {
    let cfg = ScenarioConfig::load(config, &overrides)?;
    let summary = fk::run(&cfg, workers)?;
    for (name, ok) in &summary.outcome.checks {
        println!("{:<24} {}", name, if *ok { "pass" } else { "FAIL" });
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    println!("{} finished in {:.1}s", cfg.scenario, summary.wall_clock_seconds);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run { config, seed, workers, out_dir } => run(&config, Overrides { seed, out_dir }, workers),
        Command::Plot { result, kind, out } => kind
            .parse::<PlotKind>()
            .and_then(|k| emit_plot_data(&result, k, out.as_deref()))
            .map(|p| println!("wrote {}", p.display())),
        Command::Validate { config, seed, out_dir } => ScenarioConfig::load(&config, &Overrides { seed, out_dir })
            .and_then(|cfg| cfg.to_toml())
            .map(|t| print!("{t}")),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
