use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpp_cli::acceptance::Sizes;
use fpp_cli::config::{apply_env, load_config};
use fpp_cli::{exit, render_report, replay, run, CliError, Experiment, ExperimentConfig, RunManifest};

#[derive(Parser)]
#[command(name = "fpp", version, about = "First-passage percolation experiments on Poisson point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments listed in a config file.
    Run { config: PathBuf },
    /// Summarise an output directory.
    Report { dir: PathBuf },
    /// Run only the acceptance suite, with the seed and output directory of a config.
    Acceptance { config: PathBuf },
    /// Recompute a stored run into a new directory and compare digests.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the default config.
    DefaultConfig,
}

fn init_threads(cfg: &ExperimentConfig) {
    if let Some(t) = cfg.threads {
        // fails only if a pool already exists, which keeps the existing one
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let mut cfg = load_config(path)?;
    apply_env(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: ExperimentConfig) -> Result<(), CliError> {
    init_threads(&cfg);
    let outcome = run(cfg, &Sizes::stated(), |line| eprintln!("{line}"))?;
    if let Some(criteria) = &outcome.acceptance {
        print!("{}", fpp_cli::acceptance::render(criteria));
    }
    match outcome.acceptance_failures() {
        0 => Ok(()),
        k => Err(CliError::Acceptance(k, outcome.acceptance.map_or(0, |c| c.len()))),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => execute(load(&config)?),
        Command::Acceptance { config } => {
            let mut cfg = load(&config)?;
            cfg.experiments = vec![Experiment::Acceptance];
            execute(cfg)
        }
        Command::Report { dir } => {
            print!("{}", render_report(&dir).map_err(|e| CliError::Corrupt(e.to_string()))?);
            Ok(())
        }
        Command::Replay { manifest, out } => {
            let text = std::fs::read_to_string(&manifest).map_err(|e| CliError::Corrupt(format!("{}: {e}", manifest.display())))?;
            let m: RunManifest = fpp_cli::parse_manifest(&text)?;
            init_threads(&m.config);
            let mismatches = replay(&m, out, &Sizes::stated())?;
            for x in &mismatches {
                eprintln!("{}: expected {}, found {}", x.file, x.expected, x.found.as_deref().unwrap_or("nothing"));
            }
            if mismatches.is_empty() {
                println!("all digests reproduced");
                Ok(())
            } else {
                Err(CliError::Replay(format!("{} files differ", mismatches.len())))
            }
        }
        Command::DefaultConfig => {
            println!("{}", ExperimentConfig::default().to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
