use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpreg_cli::{run, run_batch, run_config, Experiment, Format, RunOptions};

#[derive(Parser)]
#[command(name = "fpreg", version, about = "Regularity, 3AP and random-set experiments over F_p^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for inner parallel loops
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Record wall time in the report (breaks byte-for-byte reproducibility)
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    #[command(flatten)]
    Experiment(Experiment),
    /// Run an experiment described by a TOML config file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the config files listed in a TOML manifest, in order
    Batch {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let opts = RunOptions { format: cli.format, out: cli.out, timing: cli.timing };
    let result = match &cli.command {
        Command::Experiment(e) => run(e, &opts),
        Command::Run { config } => run_config(config, &opts),
        Command::Batch { manifest } => run_batch(manifest, &opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
