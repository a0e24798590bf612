//! Command-line interface: computes functional spaces, alignments, stepwise
//! rearrangements, and area/effort Pareto fronts for multi-room scenes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mutualspace::cli::{
    cmd_align, cmd_pareto, cmd_rearrange, cmd_spaces, resolve_config, Overrides,
};
use mutualspace::spaces::SpaceKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mutualspace",
    version,
    about = "Mutual functional-space analysis for multi-room scenes"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Standable,
    Sittable,
}

impl From<KindArg> for SpaceKind {
    fn from(kind: KindArg) -> SpaceKind {
        match kind {
            KindArg::Standable => SpaceKind::Standable,
            KindArg::Sittable => SpaceKind::Sittable,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Scene description (JSON).
    scene: PathBuf,
    /// Functional-space kind to analyze.
    #[arg(long, value_enum, default_value = "standable")]
    kind: KindArg,
    /// Config file; defaults to $MUTUALSPACE_CONFIG, then built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed (overrides every GA block of the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Raster resolution in meters (overrides the config).
    #[arg(long)]
    resolution: Option<f64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-room standable and sittable spaces.
    Spaces(CommonArgs),
    /// Align rooms rigidly to maximize the mutual functional space.
    Align(CommonArgs),
    /// Grow the mutual space stepwise by rearranging furniture.
    Rearrange(CommonArgs),
    /// Trace the area/effort Pareto front of rearrangements.
    Pareto(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Spaces(c) | Command::Align(c) | Command::Rearrange(c) | Command::Pareto(c) => {
                c
            }
        }
    }
}

fn run(cli: &CliArgs) -> mutualspace::Result<()> {
    let common = cli.command.common();
    let overrides = Overrides {
        seed: common.seed,
        resolution: common.resolution,
        out: common.out.clone(),
    };
    let config = resolve_config(common.config.as_deref(), &overrides)?;
    let kind = SpaceKind::from(common.kind);
    match &cli.command {
        Command::Spaces(c) => cmd_spaces(&c.scene, &config),
        Command::Align(c) => cmd_align(&c.scene, kind, &config),
        Command::Rearrange(c) => cmd_rearrange(&c.scene, kind, &config),
        Command::Pareto(c) => cmd_pareto(&c.scene, kind, &config),
    }
}

fn main() -> ExitCode {
    let cli = CliArgs::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
