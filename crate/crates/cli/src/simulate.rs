//! The `simulate` subcommand: emits ground-truth poses, noisy predicted
//! poses, a match file and optional depth maps for a synthetic sequence.

use crate::util::{format_error, read_text, write_file, CliError};
use crate::SimulateArgs;
use vo_core::eval::accumulate;
use vo_core::io::{
    parse_scene_config, write_depth_file, write_match_file, write_pose_file, MatchPairBlock,
    MatchRecord, SceneFileConfig,
};
use vo_core::rng::DetRng;
use vo_core::se3::RigidMotion;
use vo_core::synth::{
    gen_relative_motions, gen_scene_with_relative, perturb_relatives, SceneConfig,
};

pub fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let text = read_text(&args.config)?;
    let cfg: SceneFileConfig = parse_scene_config(&text).map_err(|e| format_error(&args.config, e))?;
    let intrinsics = cfg.intrinsics.build().map_err(|e| format_error(&args.config, e))?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::input(&args.out.display().to_string(), e))?;

    let mut seeder = DetRng::new(cfg.seed);
    let motion_seed = seeder.next_u64();
    let pred_seed = seeder.next_u64();

    let mut gt_rel = gen_relative_motions(
        motion_seed,
        cfg.frames,
        cfg.forward_step,
        cfg.max_turn_deg.to_radians(),
    );
    if cfg.pure_rotation {
        for rel in &mut gt_rel {
            rel.translation = nalgebra::Vector3::zeros();
        }
    }

    let pred_rel = perturb_relatives(
        &gt_rel,
        cfg.pred_rotation_noise_deg.to_radians(),
        cfg.pred_translation_noise,
        pred_seed,
    );

    let mut blocks = Vec::with_capacity(gt_rel.len());
    let mut depths = Vec::new();
    for (k, rel) in gt_rel.iter().enumerate() {
        let pair_seed = seeder.next_u64();
        let scene_cfg = SceneConfig {
            point_count: cfg.matches_per_pair,
            depth_range: (cfg.depth_min, cfg.depth_max),
            rotation_range: (0.0, 0.0),
            translation_range: (0.0, 0.0),
            pixel_noise_sigma: cfg.pixel_noise_sigma,
            outlier_fraction: cfg.outlier_fraction,
            pure_rotation: cfg.pure_rotation,
            seed: pair_seed,
            intrinsics,
        };
        let mut rng = DetRng::new(pair_seed);
        let scene = gen_scene_with_relative(&scene_cfg, rel, &mut rng)
            .map_err(|e| CliError::numerical("simulate", e))?;

        let records: Vec<MatchRecord> = scene
            .corrupted_pairs
            .pairs()
            .iter()
            .map(|pair| {
                let p1 = intrinsics.project(&pair.f).expect("bearing in front");
                let p2 = intrinsics.project(&pair.f_prime).expect("bearing in front");
                MatchRecord {
                    u1: p1.u,
                    v1: p1.v,
                    u2: p2.u,
                    v2: p2.v,
                    confidence: 1.0,
                }
            })
            .collect();
        blocks.push(MatchPairBlock {
            frame_a: k,
            frame_b: k + 1,
            matches: records,
        });
        if cfg.emit_depth {
            if k == 0 {
                depths.push(scene.depth_a.clone());
            }
            depths.push(scene.depth_b.clone());
        }
    }

    let to_poses = |rels: &[RigidMotion]| -> Vec<RigidMotion> {
        accumulate(rels).entries().iter().map(|(_, p)| *p).collect()
    };
    write_file(&args.out.join("poses_gt.txt"), write_pose_file(&to_poses(&gt_rel)))?;
    write_file(
        &args.out.join("poses_pred.txt"),
        write_pose_file(&to_poses(&pred_rel)),
    )?;
    write_file(&args.out.join("matches.txt"), write_match_file(&blocks))?;
    write_file(
        &args.out.join("intrinsics.txt"),
        format!(
            "{},{},{},{},{},{}\n",
            intrinsics.fx,
            intrinsics.fy,
            intrinsics.cx,
            intrinsics.cy,
            intrinsics.width,
            intrinsics.height
        ),
    )?;
    for (k, depth) in depths.iter().enumerate() {
        write_file(
            &args.out.join(format!("depth_{k:06}.dpf")),
            write_depth_file(depth),
        )?;
    }
    Ok(())
}
