//! `vo`: file-based visual odometry pipeline.
//!
//! Subcommands: `f2f-solve` (per-pair rotation solving from 2D matches),
//! `adjust` (splice solved rotations into predicted trajectories), `eval`
//! (trajectory metrics), `simulate` (synthetic sequence generation) and
//! `losses` (view-synthesis loss audit).
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure.

mod evaluate;
mod losses_cmd;
mod pipeline;
mod simulate;
mod util;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "vo", version, about = "Visual odometry geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve per-pair relative rotations from a 2D match file.
    #[command(name = "f2f-solve")]
    F2fSolve(F2fSolveArgs),
    /// Replace the rotations of a predicted trajectory with solved ones.
    Adjust(AdjustArgs),
    /// Evaluate an estimated trajectory against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic sequence (poses, matches, optional depth).
    Simulate(SimulateArgs),
    /// Compute the view-synthesis losses for one frame pair.
    Losses(LossesArgs),
}

#[derive(clap::Args)]
struct F2fSolveArgs {
    /// Match file: per pair a `pair <t> <t+1>` header, then `u1 v1 u2 v2 conf` rows.
    #[arg(long)]
    matches: PathBuf,
    /// Pinhole intrinsics as `fx,fy,cx,cy,width,height`. Overrides --config.
    #[arg(long)]
    intrinsics: Option<String>,
    /// Run configuration (TOML): intrinsics, solver settings, init mode.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Solver initialization: `identity`, `constant`, or `prior:POSEFILE`.
    /// Overrides the config's init mode.
    #[arg(long)]
    init: Option<String>,
    /// Output pose file: accumulated rotation-only trajectory (KITTI 3x4 rows).
    #[arg(long)]
    out: PathBuf,
    /// Sidecar with per-pair unit translation directions (default: `<out>.dirs`).
    #[arg(long)]
    dirs_out: Option<PathBuf>,
    /// Per-pair diagnostics CSV (default: `<out>.stats.csv`).
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Matches below this confidence are dropped before solving.
    /// Overrides the config's threshold.
    #[arg(long)]
    confidence_threshold: Option<f64>,
}

#[derive(clap::Args)]
struct AdjustArgs {
    /// Predicted trajectory (pose file).
    #[arg(long)]
    pred: PathBuf,
    /// Solved trajectory supplying the rotations (pose file).
    #[arg(long)]
    f2f: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Estimated trajectory (pose file).
    #[arg(long)]
    est: PathBuf,
    /// Ground-truth trajectory (pose file).
    #[arg(long)]
    gt: PathBuf,
    /// Alignment: `7dof` (similarity) or `6dof` (rigid).
    #[arg(long, default_value = "7dof")]
    align: String,
    /// Frame step for the relative pose error.
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Metrics CSV.
    #[arg(long)]
    out: PathBuf,
    /// Aligned-trajectory CSV for plotting (default: `<out>.aligned.csv`).
    #[arg(long)]
    aligned_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Scene description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct LossesArgs {
    /// Target frame image (PGM/PPM).
    #[arg(long)]
    image_a: PathBuf,
    /// Source frame image (PGM/PPM).
    #[arg(long)]
    image_b: PathBuf,
    /// Target frame depth (DPF1).
    #[arg(long)]
    depth_a: PathBuf,
    /// Source frame depth (DPF1).
    #[arg(long)]
    depth_b: PathBuf,
    /// Optional target-frame disparity (DPF1, values in (0,1]); derived from
    /// --depth-a with the depth limits when absent.
    #[arg(long)]
    disp_a: Option<PathBuf>,
    /// Pose file whose first line is the 3x4 point transform mapping
    /// frame-a coordinates into frame b.
    #[arg(long)]
    motion: PathBuf,
    /// Pinhole intrinsics as `fx,fy,cx,cy,width,height`.
    #[arg(long)]
    intrinsics: String,
    /// Depth limit used for disparity conversion.
    #[arg(long, default_value_t = 0.1)]
    min_depth: f64,
    /// Depth limit used for disparity conversion.
    #[arg(long, default_value_t = 100.0)]
    max_depth: f64,
    /// Compare the synthesis against the resampled source frame instead of
    /// the target frame.
    #[arg(long)]
    compare_source: bool,
    /// Use second-order disparity gradients in the smoothness term.
    #[arg(long)]
    second_order: bool,
    /// Report CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::F2fSolve(args) => pipeline::run_f2f_solve(&args),
        Command::Adjust(args) => pipeline::run_adjust(&args),
        Command::Eval(args) => evaluate::run_eval(&args),
        Command::Simulate(args) => simulate::run_simulate(&args),
        Command::Losses(args) => losses_cmd::run_losses(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
