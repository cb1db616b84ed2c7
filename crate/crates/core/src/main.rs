use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use awe_takeoff::commands::{self, Format, Selection, SweepKind, SweepOptions};
use awe_takeoff::{ConceptRegistry, Error, Result, Scenario};

#[derive(Parser)]
#[command(
    name = "awe-takeoff",
    version,
    about = "Take-off assessment for rigid-wing airborne wind energy systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Built-in parameter set.
    #[arg(long, global = true, default_value = "paper")]
    preset: String,
    /// Scenario file (JSON); sections it omits come from the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Directory for CSV tables and trajectories.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Aircraft number (1-based) or `all`.
    #[arg(long, global = true, default_value = "all")]
    aircraft: Selection,
    /// Print the effective scenario as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Size every take-off concept and compute the comparison criteria.
    Assess {
        /// Restrict to the named concept; repeatable.
        #[arg(long)]
        concept: Vec<String>,
    },
    /// Write rotational sweep tables (maximum elevation, power against arm and elevation).
    RotationalSweep {
        /// Restrict to one table kind: max-gamma, power-arm, power-gamma; repeatable.
        #[arg(long)]
        only: Vec<SweepKind>,
        /// Line length of the power tables [m].
        #[arg(long, default_value_t = 1.0)]
        line: f64,
        /// Arm of the power-against-elevation table [m].
        #[arg(long)]
        arm: Option<f64>,
        /// Elevation of the power-against-arm table [deg].
        #[arg(long)]
        gamma_v_deg: Option<f64>,
    },
    /// Simulate the linear take-off and write trajectories.
    Simulate {
        /// Override the simulated horizon [s].
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Compare static and simulated linear take-off power.
    Compare,
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    match &cli.config {
        Some(path) => Scenario::load(path),
        None => Scenario::preset(&cli.preset),
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let s = scenario(cli)?;
    if cli.dump_config {
        return Ok(s.to_json()? + "\n");
    }
    match &cli.command {
        Command::Assess { concept } => {
            commands::assess(&s, &ConceptRegistry::builtin(), cli.aircraft, concept)?
                .render(cli.format)
        }
        Command::RotationalSweep {
            only,
            line,
            arm,
            gamma_v_deg,
        } => {
            let mut opts = SweepOptions {
                line: *line,
                arm: *arm,
                gamma_v: gamma_v_deg.map(f64::to_radians),
                ..SweepOptions::default()
            };
            if !only.is_empty() {
                opts.kinds = only.clone();
            }
            let tables = commands::rotational_sweep(&s, cli.aircraft, &opts)?;
            let files = commands::write_sweep_tables(&tables, &cli.out)?;
            commands::render_sweep(&tables, &files, cli.format)
        }
        Command::Simulate { duration } => {
            let reports = commands::simulate(&s, cli.aircraft, *duration)?;
            commands::write_trajectories(&reports, &cli.out)?;
            let text = commands::render_simulations(&reports, cli.format)?;
            if let Some(r) = reports.iter().find(|r| r.failure.is_some()) {
                print!("{text}");
                return Err(Error::Diverged {
                    time: r.trajectory.records.last().map_or(0.0, |rec| rec.t),
                    reason: format!(
                        "aircraft {}: {}",
                        r.aircraft,
                        r.failure.as_deref().unwrap_or_default()
                    ),
                });
            }
            Ok(text)
        }
        Command::Compare => {
            commands::render_comparison(&commands::compare(&s, cli.aircraft)?, cli.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("AWE_TAKEOFF_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: AWE_TAKEOFF_THREADS must be a positive integer, got '{n}'");
                return ExitCode::from(2);
            }
        }
    }
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
