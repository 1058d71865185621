//! Experiment driver: JSON configs in, CSV and JSON artifacts out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;
pub use output::Artifacts;

#[derive(Debug, Parser)]
#[command(name = "phasegroup", version, about = "Poisson-Lie and symplectic groupoid experiments")]
pub struct Cli {
    /// JSON configuration for the subcommand
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Overrides the configured seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor SL(N, C) elements as u gamma and gamma u
    Decompose(DecomposeArgs),
    /// Integrate the free particle on SL(N, C)
    EvolveSun(EvolveArgs),
    /// Evaluate the maps F, E on SB(N) and optionally their inverses
    FeMaps(FeArgs),
    /// Geodesic endpoint map on SB(N)
    Phi(PhiArgs),
    /// Hamiltonian/Lagrangian compatibility residuals
    Compat(CompatArgs),
    /// Generating-function examples on symplectic groupoids
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Commutation and isotropy checks for Casimir flows on T*SU(N)
    CasimirChecks(CasimirArgs),
}

#[derive(Debug, Subcommand)]
pub enum ExamplesAction {
    /// Run one example: 1 (T*SU(N)), 2 (pair groupoid), 3 (constant Poisson space)
    Run {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
    },
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Matrix to factor: inline JSON or a path
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Initial point: inline JSON or a path
    #[arg(long)]
    pub g0: Option<String>,
    /// Project back onto det = 1 after each step
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also report inverse round trips
    #[arg(long)]
    pub invert: bool,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Initial momentum in su(N): inline JSON or a path
    #[arg(long)]
    pub eta0: Option<String>,
    /// Compare against the coordinate oracle
    #[arg(long)]
    pub oracle: bool,
    /// Sample a seeded grid of initial momenta
    #[arg(long)]
    pub grid: bool,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompatArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub directions: Option<usize>,
    /// eps_min:eps_max:steps,c_min:c_max:steps
    #[arg(long, allow_hyphen_values = true)]
    pub scan: Option<String>,
}

#[derive(Debug, Args)]
pub struct CasimirArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Execute one parsed command line. Artifacts written before a failure stay
/// on disk; `art` lists them either way.
pub fn run(cli: &Cli, art: &mut Artifacts) -> Result<(), CliError> {
    let path = cli.config.as_deref();
    match &cli.command {
        Command::Decompose(a) => commands::decompose(a, path, cli.seed, art)?,
        Command::EvolveSun(a) => commands::evolve_sun(a, path, cli.seed, art)?,
        Command::FeMaps(a) => commands::fe_maps(a, path, cli.seed, art)?,
        Command::Phi(a) => commands::phi(a, path, cli.seed, art)?,
        Command::Compat(a) => commands::compat(a, path, cli.seed, art)?,
        Command::Examples {
            action: ExamplesAction::Run { which },
        } => commands::examples(*which, path, cli.seed, art)?,
        Command::CasimirChecks(a) => commands::casimir_checks(a, path, cli.seed, art)?,
    }
    Ok(())
}
