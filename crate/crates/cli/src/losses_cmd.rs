//! The `losses` subcommand: evaluates the view-synthesis losses for one
//! frame pair and writes an unweighted/weighted report.

use crate::util::{
    fmt_float, format_error, parse_intrinsics, read_bytes, read_text, write_file, CliError,
};
use crate::LossesArgs;
use vo_core::image::{DisparityMap, Image};
use vo_core::io::{parse_depth_file, parse_pnm, parse_pose_file};
use vo_core::losses::{
    depth_consistency_loss, fill_invalid_from, photometric_loss, smoothness_loss_with, ssim, warp,
    GradientOrder, LossError, LossReport, LossWeights, SSIM_C1, SSIM_C2, SSIM_WINDOW,
};

fn map_loss_error(err: LossError) -> CliError {
    match err {
        LossError::EmptyMask => CliError::numerical("losses", err),
        other => CliError::input("losses", other),
    }
}

fn load_image(path: &std::path::Path) -> Result<Image, CliError> {
    parse_pnm(&read_bytes(path)?).map_err(|e| format_error(path, e))
}

pub fn run_losses(args: &LossesArgs) -> Result<(), CliError> {
    let intrinsics = parse_intrinsics(&args.intrinsics)?;
    if !(args.min_depth > 0.0 && args.max_depth > args.min_depth) {
        return Err(CliError::Input(format!(
            "depth limits must satisfy 0 < min < max, got ({}, {})",
            args.min_depth, args.max_depth
        )));
    }

    let image_a = load_image(&args.image_a)?;
    let image_b = load_image(&args.image_b)?;
    let depth_a = parse_depth_file(&read_bytes(&args.depth_a)?)
        .map_err(|e| format_error(&args.depth_a, e))?;
    let depth_b = parse_depth_file(&read_bytes(&args.depth_b)?)
        .map_err(|e| format_error(&args.depth_b, e))?;

    let motion_text = read_text(&args.motion)?;
    let motion_load =
        parse_pose_file(&motion_text).map_err(|e| format_error(&args.motion, e))?;
    let motion = motion_load.poses[0];

    let disparity = match &args.disp_a {
        Some(path) => {
            let raw = parse_depth_file(&read_bytes(path)?).map_err(|e| format_error(path, e))?;
            DisparityMap::new(
                raw.width(),
                raw.height(),
                raw.data().to_vec(),
                args.min_depth,
                args.max_depth,
            )
            .map_err(|e| CliError::input("disparity", e))?
        }
        None => {
            // Derive normalized disparity from the target depth; invalid
            // pixels map to the far limit.
            let inv_min = 1.0 / args.min_depth;
            let inv_max = 1.0 / args.max_depth;
            let data: Vec<f64> = depth_a
                .data()
                .iter()
                .zip(depth_a.validity())
                .map(|(&z, &ok)| {
                    if ok {
                        (((1.0 / z) - inv_max) / (inv_min - inv_max)).clamp(1e-12, 1.0)
                    } else {
                        1e-12
                    }
                })
                .collect();
            DisparityMap::new(depth_a.width(), depth_a.height(), data, args.min_depth, args.max_depth)
                .map_err(|e| CliError::input("disparity", e))?
        }
    };

    let (synth_raw, mask) =
        warp(&image_b, &depth_a, &motion, &intrinsics).map_err(map_loss_error)?;
    let target = if args.compare_source { &image_b } else { &image_a };
    let synth = fill_invalid_from(&synth_raw, target, &mask).map_err(map_loss_error)?;
    let (photo_map, photometric) =
        photometric_loss(target, &synth, &mask).map_err(map_loss_error)?;
    let ssim_map = ssim(target, &synth, SSIM_WINDOW, SSIM_C1, SSIM_C2).map_err(map_loss_error)?;
    let mut ssim_sum = 0.0;
    let mut ssim_count = 0usize;
    for (value, &ok) in ssim_map.data().iter().zip(mask.data()) {
        if ok {
            ssim_sum += value;
            ssim_count += 1;
        }
    }
    if ssim_count == 0 {
        return Err(map_loss_error(LossError::EmptyMask));
    }
    let ssim_mean = ssim_sum / ssim_count as f64;

    let order = if args.second_order {
        GradientOrder::Second
    } else {
        GradientOrder::First
    };
    let report = LossReport {
        photometric,
        smoothness: smoothness_loss_with(&disparity, &image_a, order).map_err(map_loss_error)?,
        depth_consistency: depth_consistency_loss(&depth_a, &depth_b, &motion, &intrinsics)
            .map_err(map_loss_error)?,
        valid_pixels: photo_map.valid.count(),
    };

    let weights = LossWeights::default();
    let weighted_photo = report.photometric;
    let weighted_smooth = weights.smoothness * report.smoothness;
    let weighted_dc = weights.depth_consistency * report.depth_consistency;
    let total = weighted_photo + weighted_smooth + weighted_dc;

    let mut csv = String::from("metric,unweighted,weighted\n");
    csv.push_str(&format!(
        "photometric,{},{}\n",
        fmt_float(report.photometric),
        fmt_float(weighted_photo)
    ));
    csv.push_str(&format!(
        "smoothness,{},{}\n",
        fmt_float(report.smoothness),
        fmt_float(weighted_smooth)
    ));
    csv.push_str(&format!(
        "depth_consistency,{},{}\n",
        fmt_float(report.depth_consistency),
        fmt_float(weighted_dc)
    ));
    csv.push_str(&format!("ssim_mean,{},\n", fmt_float(ssim_mean)));
    csv.push_str(&format!("valid_pixels,{},\n", report.valid_pixels));
    csv.push_str(&format!("weighted_total,,{}\n", fmt_float(total)));
    write_file(&args.out, csv)
}
