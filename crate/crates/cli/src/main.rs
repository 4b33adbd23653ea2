//! Command-line driver: configuration ingestion, job orchestration and
//! result emission for the spectra, resolvents and verification checks.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "krein",
    about = "Renormalized point interactions on model manifolds: spectra, resolvents, verification"
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted (overrides [output].path).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format (overrides [output].format).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for parallel sweeps (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for the randomized test-function battery.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    /// Bound-state table for the configured model.
    Spectrum,
    /// Resolvent kernel values at configured (x, y, E) samples.
    Resolvent,
    /// Pseudo-resolvent identity residuals.
    CheckIdentity,
    /// Strong-limit probe |E_k| R(E_k) f -> f.
    CheckLimit,
    /// Conjugate symmetry R(E)^dag = R(E^*).
    CheckSymmetry,
    /// Heat-kernel, Jacobian, alpha and Phi^{-1} bound suite.
    CheckBounds,
    /// Subordination identity residuals on an (s, lambda) grid.
    CheckSubordination,
    /// Relativistic decay functional sweep.
    CheckDecay,
    /// Lee-model ground state table.
    LeeSpectrum,
    /// Lee-model norm and ground-state bound suite.
    LeeBounds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let Some(config_path) = cli.config.clone() else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(1);
    };
    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };

    let outcome = match cli.command {
        Cmd::Spectrum => commands::spectrum(&cfg),
        Cmd::Resolvent => commands::resolvent(&cfg),
        Cmd::CheckIdentity => commands::check_identity(&cfg, cli.seed),
        Cmd::CheckLimit => commands::check_limit(&cfg, cli.seed),
        Cmd::CheckSymmetry => commands::check_symmetry(&cfg, cli.seed),
        Cmd::CheckBounds => commands::check_bounds(&cfg),
        Cmd::CheckSubordination => commands::check_subordination(&cfg),
        Cmd::CheckDecay => commands::check_decay(&cfg),
        Cmd::LeeSpectrum => commands::lee_spectrum(&cfg),
        Cmd::LeeBounds => commands::lee_bounds(&cfg),
    };

    match outcome {
        Ok(out) => {
            if let Err(e) = output::emit(&cfg, &cli.output, cli.format, &out) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
