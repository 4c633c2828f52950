use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chpfem_cli::commands;
use chpfem_cli::config::RunConfig;
use chpfem_cli::exit_code_for;

/// p-version continuous-Galerkin solver for the Cahn-Hilliard system.
#[derive(Parser)]
#[command(name = "chpfem", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override one config key (repeatable), e.g. --set eps2=0.01
    #[arg(long = "set", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured problem and write diagnostics + snapshots
    Run,
    /// Smallest Laplace-Neumann eigenpairs of the configured domain
    Eigen,
    /// Spinodal/binodal points of the polynomial expansions vs logarithmic
    Critical,
    /// 1D stationary-profile convergence study over degrees x complexities
    Convergence,
    /// Stationary-state sweep around the first bifurcation, with fits
    Sweep,
    /// Print the effective configuration (defaults + overrides)
    ConfigDump,
}

fn build_config(cli: &Cli) -> chpfem::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    cfg.apply_overrides(&cli.set)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run => commands::cmd_run(&cfg, &cli.out),
        Command::Eigen => commands::cmd_eigen(&cfg, &cli.out),
        Command::Critical => commands::cmd_critical(&cfg, &cli.out),
        Command::Convergence => commands::cmd_convergence(&cfg, &cli.out),
        Command::Sweep => commands::cmd_sweep(&cfg, &cli.out),
        Command::ConfigDump => {
            print!("{}", cfg.dump());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
