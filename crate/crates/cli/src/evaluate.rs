//! The `eval` subcommand.

use crate::util::{fmt_float, format_error, read_text, warn_reorthonormalized, write_file, CliError};
use crate::EvalArgs;
use std::path::PathBuf;
use vo_core::eval::{evaluate, rpe, EvalError, Trajectory};
use vo_core::io::parse_pose_file;

fn map_eval_error(err: EvalError) -> CliError {
    match err {
        EvalError::ZeroVariance => CliError::numerical("eval", err),
        other => CliError::input("eval", other),
    }
}

pub fn run_eval(args: &EvalArgs) -> Result<(), CliError> {
    let with_scale = match args.align.as_str() {
        "7dof" => true,
        "6dof" => false,
        other => {
            return Err(CliError::Input(format!(
                "align must be 7dof or 6dof, got {other:?}"
            )))
        }
    };

    let est_text = read_text(&args.est)?;
    let est_load = parse_pose_file(&est_text).map_err(|e| format_error(&args.est, e))?;
    warn_reorthonormalized(&args.est, &est_load.reorthonormalized);
    let gt_text = read_text(&args.gt)?;
    let gt_load = parse_pose_file(&gt_text).map_err(|e| format_error(&args.gt, e))?;
    warn_reorthonormalized(&args.gt, &gt_load.reorthonormalized);

    let est = Trajectory::from_poses(est_load.poses);
    let gt = Trajectory::from_poses(gt_load.poses);

    let (mut report, alignment) = evaluate(&est, &gt, with_scale).map_err(map_eval_error)?;
    if args.step != 1 {
        let (rpe_m, rpe_deg) = rpe(&est, &gt, args.step).map_err(map_eval_error)?;
        report.rpe_m = rpe_m;
        report.rpe_deg = rpe_deg;
    }

    let sequence = args
        .est
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sequence".into());
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    let mut csv = String::from("sequence,t_err_percent,r_err_deg_per_100m,ate_m,rpe_m,rpe_deg\n");
    csv.push_str(&format!(
        "{sequence},{},{},{},{},{}\n",
        opt(report.t_err_percent),
        opt(report.r_err_deg_per_100m),
        fmt_float(report.ate_m),
        fmt_float(report.rpe_m),
        fmt_float(report.rpe_deg)
    ));
    write_file(&args.out, csv)?;

    let aligned_path = args.aligned_out.clone().unwrap_or_else(|| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(".aligned.csv");
        PathBuf::from(name)
    });
    let mut aligned = String::from("frame,est_x,est_y,est_z,gt_x,gt_y,gt_z\n");
    for ((idx, est_pose), (_, gt_pose)) in est.entries().iter().zip(gt.entries()) {
        let p = alignment.apply(&est_pose.translation);
        let g = gt_pose.translation;
        aligned.push_str(&format!(
            "{idx},{},{},{},{},{},{}\n",
            fmt_float(p.x),
            fmt_float(p.y),
            fmt_float(p.z),
            fmt_float(g.x),
            fmt_float(g.y),
            fmt_float(g.z)
        ));
    }
    write_file(&aligned_path, aligned)
}
