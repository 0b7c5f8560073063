//! The `f2f-solve` and `adjust` subcommands.

use crate::util::{
    fmt_float, format_error, parse_intrinsics, read_text, warn_reorthonormalized, write_file,
    CliError,
};
use crate::{AdjustArgs, F2fSolveArgs};
use nalgebra::Vector3;
use std::path::PathBuf;
use vo_core::eval::accumulate;
use vo_core::f2f::{
    epipolar_normals, solve_f2f, translation_reliability, BearingPairSet, InitMode,
};
use vo_core::io::{
    parse_match_file, parse_pose_file, parse_run_config, write_pose_file, InitChoice,
    MatchPairBlock, RunConfig,
};
use vo_core::se3::{Pixel, RigidMotion, Rotation};

enum InitSpec {
    Identity,
    Constant,
    Prior(Vec<RigidMotion>),
}

fn parse_init(spec: &str) -> Result<InitSpec, CliError> {
    match spec {
        "identity" => Ok(InitSpec::Identity),
        "constant" => Ok(InitSpec::Constant),
        other => {
            if let Some(path) = other.strip_prefix("prior:") {
                if path.is_empty() {
                    return Err(CliError::Input("prior: needs a pose file path".into()));
                }
                let path = PathBuf::from(path);
                let text = read_text(&path)?;
                let load = parse_pose_file(&text).map_err(|e| format_error(&path, e))?;
                warn_reorthonormalized(&path, &load.reorthonormalized);
                Ok(InitSpec::Prior(load.poses))
            } else {
                Err(CliError::Input(format!(
                    "init must be identity, constant, or prior:POSEFILE, got {other:?}"
                )))
            }
        }
    }
}

/// Match blocks must cover consecutive frame pairs (t, t+1), (t+1, t+2), ...
fn check_consecutive(blocks: &[MatchPairBlock]) -> Result<(), CliError> {
    for (i, block) in blocks.iter().enumerate() {
        if block.frame_b != block.frame_a + 1 {
            return Err(CliError::Input(format!(
                "pair {} {}: only consecutive frame pairs are supported",
                block.frame_a, block.frame_b
            )));
        }
        if i > 0 && block.frame_a != blocks[i - 1].frame_a + 1 {
            return Err(CliError::Input(format!(
                "pair {} {}: blocks must advance one frame at a time",
                block.frame_a, block.frame_b
            )));
        }
    }
    Ok(())
}

struct PairOutcome {
    frame_a: usize,
    frame_b: usize,
    rotation: Rotation,
    direction: Vector3<f64>,
    lambda_min: f64,
    iterations: usize,
    converged: &'static str,
    n_matches: usize,
    n_filtered: usize,
    reliability: f64,
}

pub fn run_f2f_solve(args: &F2fSolveArgs) -> Result<(), CliError> {
    let run_config: Option<RunConfig> = match &args.config {
        Some(path) => Some(
            parse_run_config(&read_text(path)?).map_err(|e| format_error(path, e))?,
        ),
        None => None,
    };
    let intrinsics = match (&args.intrinsics, &run_config) {
        (Some(spec), _) => parse_intrinsics(spec)?,
        (None, Some(cfg)) => cfg.intrinsics,
        (None, None) => {
            return Err(CliError::Input(
                "either --intrinsics or --config is required".into(),
            ))
        }
    };
    let text = read_text(&args.matches)?;
    let blocks = parse_match_file(&text).map_err(|e| format_error(&args.matches, e))?;
    check_consecutive(&blocks)?;

    let init_string = match (&args.init, &run_config) {
        (Some(spec), _) => spec.clone(),
        (None, Some(cfg)) => match cfg.init {
            InitChoice::Identity => "identity".into(),
            InitChoice::Constant => "constant".into(),
            InitChoice::Prior => {
                return Err(CliError::Input(
                    "config init mode `prior` needs --init prior:POSEFILE for the pose file".into(),
                ))
            }
        },
        (None, None) => "identity".into(),
    };
    let init_spec = parse_init(&init_string)?;

    let mut cfg = run_config.as_ref().map(|c| c.f2f).unwrap_or_default();
    if let Some(threshold) = args.confidence_threshold {
        cfg.confidence_threshold = threshold;
    }

    if let InitSpec::Prior(poses) = &init_spec {
        let last_frame = blocks.last().map(|b| b.frame_b).unwrap_or(0);
        if poses.len() <= last_frame {
            return Err(CliError::Input(format!(
                "prior pose file has {} poses but the matches reference frame {last_frame}",
                poses.len()
            )));
        }
    }

    let mut outcomes: Vec<PairOutcome> = Vec::with_capacity(blocks.len());
    let mut previous_rotation = Rotation::identity();
    for block in &blocks {
        let matches: Vec<(Pixel, Pixel, Option<f64>)> = block
            .matches
            .iter()
            .map(|m| {
                (
                    Pixel::new(m.u1, m.v1),
                    Pixel::new(m.u2, m.v2),
                    Some(m.confidence),
                )
            })
            .collect();
        let init = match &init_spec {
            InitSpec::Identity => InitMode::Identity,
            InitSpec::Constant => InitMode::ConstantMotion(previous_rotation),
            InitSpec::Prior(poses) => InitMode::Prior(
                poses[block.frame_a]
                    .rotation
                    .transpose()
                    .compose(&poses[block.frame_b].rotation),
            ),
        };

        let pair_set = BearingPairSet::from_pixel_matches(
            &intrinsics,
            (block.frame_a, block.frame_b),
            &matches,
        );
        let outcome = match pair_set.and_then(|set| {
            solve_f2f(&set, &init, &cfg).map(|solution| {
                let normals = epipolar_normals(&set, &solution.rotation);
                let reliability = translation_reliability(&solution, &normals);
                let n_filtered = set.filtered(cfg.confidence_threshold).len();
                (solution, reliability, n_filtered)
            })
        }) {
            Ok((solution, reliability, n_filtered)) => PairOutcome {
                frame_a: block.frame_a,
                frame_b: block.frame_b,
                rotation: solution.rotation,
                direction: solution.translation_direction,
                lambda_min: solution.lambda_min,
                iterations: solution.iterations,
                converged: if solution.converged { "true" } else { "false" },
                n_matches: block.matches.len(),
                n_filtered,
                reliability,
            },
            // Skip-with-identity keeps long sequences alive; the stats row
            // records the skip.
            Err(_) => PairOutcome {
                frame_a: block.frame_a,
                frame_b: block.frame_b,
                rotation: Rotation::identity(),
                direction: Vector3::zeros(),
                lambda_min: 0.0,
                iterations: 0,
                converged: "skipped",
                n_matches: block.matches.len(),
                n_filtered: 0,
                reliability: 0.0,
            },
        };
        previous_rotation = outcome.rotation;
        outcomes.push(outcome);
    }

    let relatives: Vec<RigidMotion> = outcomes
        .iter()
        .map(|o| RigidMotion::new(o.rotation, Vector3::zeros()))
        .collect();
    let trajectory = accumulate(&relatives);
    let poses: Vec<RigidMotion> = trajectory.entries().iter().map(|(_, p)| *p).collect();
    write_file(&args.out, write_pose_file(&poses))?;

    let dirs_path = args
        .dirs_out
        .clone()
        .unwrap_or_else(|| sibling(&args.out, ".dirs"));
    let mut dirs = String::new();
    for o in &outcomes {
        dirs.push_str(&format!(
            "{} {} {} {} {}\n",
            o.frame_a,
            o.frame_b,
            fmt_float(o.direction.x),
            fmt_float(o.direction.y),
            fmt_float(o.direction.z)
        ));
    }
    write_file(&dirs_path, dirs)?;

    let stats_path = args
        .stats
        .clone()
        .unwrap_or_else(|| sibling(&args.out, ".stats.csv"));
    let mut stats = String::from("pair,lambda_min,iterations,converged,n_matches,n_filtered,reliability\n");
    for o in &outcomes {
        stats.push_str(&format!(
            "{}-{},{},{},{},{},{},{}\n",
            o.frame_a,
            o.frame_b,
            fmt_float(o.lambda_min),
            o.iterations,
            o.converged,
            o.n_matches,
            o.n_filtered,
            fmt_float(o.reliability)
        ));
    }
    write_file(&stats_path, stats)?;
    Ok(())
}

fn sibling(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn run_adjust(args: &AdjustArgs) -> Result<(), CliError> {
    let pred_text = read_text(&args.pred)?;
    let pred = parse_pose_file(&pred_text).map_err(|e| format_error(&args.pred, e))?;
    warn_reorthonormalized(&args.pred, &pred.reorthonormalized);
    let f2f_text = read_text(&args.f2f)?;
    let solved = parse_pose_file(&f2f_text).map_err(|e| format_error(&args.f2f, e))?;
    warn_reorthonormalized(&args.f2f, &solved.reorthonormalized);

    if pred.poses.len() != solved.poses.len() {
        return Err(CliError::Input(format!(
            "trajectory lengths differ: {} vs {}",
            pred.poses.len(),
            solved.poses.len()
        )));
    }
    if pred.poses.len() < 2 {
        return Err(CliError::Input("need at least two poses".into()));
    }

    let decompose = |poses: &[RigidMotion]| -> Vec<RigidMotion> {
        poses
            .windows(2)
            .map(|w| w[0].inverse().compose(&w[1]))
            .collect()
    };
    let pred_rel = decompose(&pred.poses);
    let f2f_rel = decompose(&solved.poses);
    let combined: Vec<RigidMotion> = pred_rel
        .iter()
        .zip(&f2f_rel)
        .map(|(p, s)| RigidMotion::new(s.rotation, p.translation))
        .collect();
    let trajectory = accumulate(&combined);
    let poses: Vec<RigidMotion> = trajectory.entries().iter().map(|(_, p)| *p).collect();
    write_file(&args.out, write_pose_file(&poses))
}
