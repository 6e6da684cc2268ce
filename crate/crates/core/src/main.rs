use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vortex_twm::cli::{self, FigureId, Level, RadiusChoice, RunConfig, SweepParam};
use vortex_twm::propagation::OutputKind;
use vortex_twm::Error;

/// Dual-channel optical-vortex transfer through three-wave mixing in a
/// ladder-type three-level medium.
#[derive(Debug, Parser)]
#[command(name = "vortex-twm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute all output fields for one configuration.
    Fields {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce a figure preset (fig3, fig4, fig5, fig6).
    Figure {
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one configuration per parameter value.
    Sweep {
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Azimuthal intensity profile of one output field.
    Profile {
        #[arg(long)]
        field: OutputKind,
        #[arg(long, default_value = "auto")]
        radius: RadiusChoice,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the oracle suites.
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
}

const EXIT_VERIFY: u8 = 3;

fn configure_threads() {
    let Ok(raw) = std::env::var("VORTEX_TWM_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size thread pool: {e}");
            }
        }
        Err(_) => log::warn!("ignoring VORTEX_TWM_THREADS={raw:?}: not a non-negative integer"),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    let manifest = match command {
        Command::Fields { config, out } => cli::run_config(&RunConfig::load(&config)?, &out)?,
        Command::Figure { id, out } => cli::reproduce_figure(id.parse::<FigureId>()?, &out)?,
        Command::Sweep {
            param,
            values,
            config,
            out,
        } => cli::sweep(param, &values, &RunConfig::load(&config)?, &out)?,
        Command::Profile {
            field,
            radius,
            config,
            out,
        } => cli::profile(&RunConfig::load(&config)?, field, radius, &out)?,
        Command::Verify { level } => {
            let report = cli::verify(level);
            print!("{}", report.render());
            return Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY)
            });
        }
    };
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} files ({})", manifest.files.len() + 1, manifest.command);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
