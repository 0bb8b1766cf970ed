use clap::{Parser, Subcommand};
use rimbound_cli::{compare, run, CliError, ExperimentConfig, Outcome};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rimbound", version, about = "Bound-state certification for symbols minimal on a sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for result files. Without it the JSON document goes to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for the data-parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task named in the config.
    Run { config: PathBuf },
    /// Compare the certified count with the direct-diagonalization count.
    Compare { config: PathBuf },
}

fn execute(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(k) = cli.threads {
        rimbound::par::set_threads(k).map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let (path, is_compare) = match &cli.command {
        Command::Run { config } => (config, false),
        Command::Compare { config } => (config, true),
    };
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = cli.output {
        config.output = Some(out);
    }
    let outcome = if is_compare { compare(&config)? } else { run(&config)? };
    match &config.output {
        Some(dir) => {
            for p in outcome.write(dir)? {
                println!("{}", p.display());
            }
        }
        None => print!("{}", outcome.document.to_json()),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(outcome) => {
            let code = outcome.exit_code();
            if code != 0 {
                eprintln!("status: {:?}", outcome.document.status);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
