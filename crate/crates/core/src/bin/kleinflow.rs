use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kleinflow::cli::commands::{identity_options, EXIT_IDENTITY_FAILURE};
use kleinflow::cli::{cmd_identities, cmd_packet, cmd_plane, exit_code, RunContext, ScenarioConfig};
use kleinflow::Error;

/// Bohmian trajectories at a Klein step.
#[derive(Parser)]
#[command(name = "kleinflow", version)]
struct Cli {
    /// Directory for CSV and SVG outputs.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Recorded in output headers; start selection is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the analytic identities.
    Identities {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Add this to r before the continuity checks.
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_r: f64,
    },
    /// Plane-mode trajectory: closed form against ODE integration.
    Plane {
        #[arg(long)]
        config: PathBuf,
    },
    /// Incoming wave packet: densities, R/T, trajectory ensemble.
    Packet {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    let ctx = RunContext::new(cli.out_dir, cli.seed);
    match cli.command {
        Command::Identities { config, perturb_r } => {
            let cfg = config.as_deref().map(ScenarioConfig::load).transpose()?;
            let opts = identity_options(cfg.as_ref(), perturb_r)?;
            let summary = cmd_identities(&ctx, &opts)?;
            for c in &summary.checks {
                println!(
                    "{:4}  {:<40} samples {:4}  max residual {:.3e}",
                    if c.passed() { "ok" } else { "FAIL" },
                    c.name,
                    c.samples,
                    c.max_residual
                );
            }
            if summary.passed() {
                Ok(0)
            } else {
                eprintln!("identity failure: {}", summary.failures().join("; "));
                Ok(EXIT_IDENTITY_FAILURE)
            }
        }
        Command::Plane { config } => {
            let s = cmd_plane(&ctx, &ScenarioConfig::load(&config)?)?;
            println!("max |x0_ode - x0_closed| = {:.3e}", s.max_deviation);
            s.files.iter().for_each(|f| println!("wrote {}", f.display()));
            Ok(0)
        }
        Command::Packet { config } => {
            let s = cmd_packet(&ctx, &ScenarioConfig::load(&config)?)?;
            println!("k order {}  R {:.6}  T {:.6}", s.k_order, s.budget.reflection, s.budget.transmission);
            if !s.trajectories.is_empty() {
                println!(
                    "transmitted {}/{}  crossings {}  max speed {:.9}",
                    s.transmitted_count(),
                    s.trajectories.len(),
                    s.crossings.len(),
                    s.max_speed()
                );
            }
            s.files.iter().for_each(|f| println!("wrote {}", f.display()));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
