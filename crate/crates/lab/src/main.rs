use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use degenlab::commands::{execute, Command};
use degenlab::{exit, plotdata, ExperimentConfig, LabError};

#[derive(Debug, Parser)]
#[command(name = "degenlab", version, about = "Eigenvalue degeneracy experiments on flat tori and round spheres")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON configuration; defaults are used for missing sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run directory; defaults to runs/<command>-<timestamp>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with code 4 when any built-in check fails.
    #[arg(long)]
    acceptance: bool,
    /// Overrides of the form --section.key=value.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Flat-torus spectrum, multiplicities and lattice degeneracy counts.
    Torus(RunArgs),
    /// Exact sphere harmonic product certificates.
    Sphere(RunArgs),
    /// Splitting matrices, first-order validation and cokernel tests.
    Perturb(RunArgs),
    /// Lowest eigenvalues along conformal families.
    Noncross(RunArgs),
    /// Regenerate plot files from an existing run directory.
    Plotdata {
        run_dir: PathBuf,
    },
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("LAB_THREADS") {
        let n: usize = v.parse().with_context(|| format!("LAB_THREADS={v} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(command: Command, args: RunArgs) -> Result<(), LabError> {
    let mut config = ExperimentConfig::load(args.config.as_deref(), &args.overrides)?;
    if config.seed.is_none() {
        let seed: u64 = rand::random();
        eprintln!("seed: {seed}");
        config.seed = Some(seed);
    }
    let out = args.out.unwrap_or_else(|| {
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
        PathBuf::from("runs").join(format!("{}-{stamp}", command.as_str()))
    });
    let record = execute(command, &config, &out, args.acceptance)?;
    let summary = serde_json::to_string_pretty(&record.output.summary).map_err(LabError::computation)?;
    println!("{summary}");
    for (name, ok) in &record.output.assertions {
        eprintln!("{} {name}", if *ok { "PASS" } else { "FAIL" });
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(exit::CONFIG as u8);
    }
    let result = match cli.command {
        Sub::Torus(a) => run(Command::Torus, a),
        Sub::Sphere(a) => run(Command::Sphere, a),
        Sub::Perturb(a) => run(Command::Perturb, a),
        Sub::Noncross(a) => run(Command::Noncross, a),
        Sub::Plotdata { run_dir } => plotdata::emit_for_run_dir(&run_dir).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
