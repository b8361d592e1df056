//! `cloakbench`: experiment driver CLI.
//!
//! Usage: `cloakbench <subcommand> --config <path> [--out <dir>] [--seed <u64>]`
//! with subcommands named after the experiment kinds. Exit codes: 0 pass,
//! 2 acceptance-band failure, 3 configuration error, 4 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cloak::harness::{run, ExperimentConfig, ExperimentKind};
use cloak::Error;

#[derive(Parser)]
#[command(name = "cloakbench", about = "Regularized-cloak scattering experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed recorded into the config hash.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// PEC sphere far field against the separation-of-variables oracle.
    ValidateSphere(RunArgs),
    /// Full-cloak δ-sweep on the tube domain with slope fit.
    SweepFull(RunArgs),
    /// Partial-cloak δ-sweep on the slab domain with slope fit.
    SweepPartial(RunArgs),
    /// Aperture sweep at fixed δ over a list of ε values.
    ApertureSweep(RunArgs),
    /// Small-δ operator expansion residual tables.
    ExpansionCheck(RunArgs),
    /// Leading-order screen model against the full slab solve.
    LeadingOrderCheck(RunArgs),
    /// Material tensor export over the physical cloak annulus.
    ExportMaterials(RunArgs),
    /// Exponent calculus report for (r, s, t).
    Rates(RunArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::ValidateSphere(_) => ExperimentKind::ValidateSphere,
            Command::SweepFull(_) => ExperimentKind::SweepFull,
            Command::SweepPartial(_) => ExperimentKind::SweepPartial,
            Command::ApertureSweep(_) => ExperimentKind::ApertureSweep,
            Command::ExpansionCheck(_) => ExperimentKind::ExpansionCheck,
            Command::LeadingOrderCheck(_) => ExperimentKind::LeadingOrderCheck,
            Command::ExportMaterials(_) => ExperimentKind::ExportMaterials,
            Command::Rates(_) => ExperimentKind::Rates,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::ValidateSphere(a)
            | Command::SweepFull(a)
            | Command::SweepPartial(a)
            | Command::ApertureSweep(a)
            | Command::ExpansionCheck(a)
            | Command::LeadingOrderCheck(a)
            | Command::ExportMaterials(a)
            | Command::Rates(a) => a,
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let args = cli.command.args();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", args.config.display());
            return ExitCode::from(3);
        }
    };
    let mut cfg = match ExperimentConfig::parse(kind, &text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    match run(&cfg) {
        Ok(table) => {
            println!("experiment: {}", kind.as_str());
            println!("config_hash: {}", table.config_hash);
            if let Some(fit) = table.fit {
                println!("slope: {:.4}  r2: {:.4}", fit.slope, fit.r2);
            }
            for n in &table.notes {
                println!("{n}");
            }
            if table.passed {
                println!("verdict: pass");
                ExitCode::SUCCESS
            } else {
                println!("verdict: fail");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
