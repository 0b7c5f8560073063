//! Synthetic ground-truth problems: two-view scenes with exact and corrupted
//! matches, analytic plane renders for warp verification, multi-frame
//! trajectories, and a brute-force grid search over rotations.
//!
//! Everything here is deterministic given a seed (see [`crate::rng`]), so
//! the generated test vectors are portable.

use crate::f2f::{BearingPair, BearingPairSet};
use crate::image::{DepthMap, Image};
use crate::rng::DetRng;
use crate::se3::{exp_vec, so3_exp, AxisAngle, CameraIntrinsics, Pixel, RigidMotion, Rotation};
use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("could not place {missing} of {requested} points in both frustums")]
    FrustumExhausted { requested: usize, missing: usize },
    #[error("invalid scene config: {0}")]
    InvalidConfig(String),
    #[error("brute-force resolution must be at least 1e-3 rad, got {0}")]
    ResolutionTooFine(f64),
}

/// Parameters of a synthetic two-view problem.
#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub point_count: usize,
    /// Depth interval (meters) for points in the first frame.
    pub depth_range: (f64, f64),
    /// Rotation magnitude interval (radians).
    pub rotation_range: (f64, f64),
    /// Translation magnitude interval (meters).
    pub translation_range: (f64, f64),
    /// Isotropic pixel noise applied to the corrupted pairs.
    pub pixel_noise_sigma: f64,
    /// Fraction of corrupted pairs replaced by random bearings.
    pub outlier_fraction: f64,
    /// Forces a zero baseline.
    pub pure_rotation: bool,
    pub seed: u64,
    pub intrinsics: CameraIntrinsics,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            point_count: 200,
            depth_range: (4.0, 30.0),
            rotation_range: (0.0, 0.3),
            translation_range: (0.2, 1.5),
            pixel_noise_sigma: 0.0,
            outlier_fraction: 0.0,
            pure_rotation: false,
            seed: 0,
            intrinsics: CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0, 640, 480)
                .expect("default intrinsics"),
        }
    }
}

impl SceneConfig {
    fn validate(&self) -> Result<(), SynthError> {
        if self.point_count == 0 {
            return Err(SynthError::InvalidConfig("point_count must be > 0".into()));
        }
        for (name, (lo, hi)) in [
            ("depth_range", self.depth_range),
            ("rotation_range", self.rotation_range),
            ("translation_range", self.translation_range),
        ] {
            if !(lo >= 0.0 && hi >= lo) {
                return Err(SynthError::InvalidConfig(format!(
                    "{name} must be ordered and non-negative, got ({lo}, {hi})"
                )));
            }
        }
        if self.depth_range.0 <= 0.0 {
            return Err(SynthError::InvalidConfig("depth_range.0 must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) {
            return Err(SynthError::InvalidConfig(
                "outlier_fraction must be in [0, 1)".into(),
            ));
        }
        if self.pixel_noise_sigma < 0.0 {
            return Err(SynthError::InvalidConfig("negative noise sigma".into()));
        }
        Ok(())
    }
}

/// A generated two-view ground-truth problem.
#[derive(Debug, Clone)]
pub struct SceneSample {
    /// Scene points in the first camera frame.
    pub points: Vec<Vector3<f64>>,
    /// Camera-to-world pose of the first camera (identity).
    pub pose_a: RigidMotion,
    /// Camera-to-world pose of the second camera.
    pub pose_b: RigidMotion,
    /// Ground-truth relative pose of camera b in camera a's frame.
    pub relative: RigidMotion,
    pub exact_pairs: BearingPairSet,
    pub corrupted_pairs: BearingPairSet,
    /// True for pairs that were not replaced by outliers.
    pub inlier_labels: Vec<bool>,
    /// Point-splat depth renders (valid only at projected pixels).
    pub depth_a: DepthMap,
    pub depth_b: DepthMap,
}

/// Draws a relative pose from the configured motion ranges.
pub fn sample_relative_pose(cfg: &SceneConfig, rng: &mut DetRng) -> RigidMotion {
    let rot_axis = rng.unit_vector();
    let rot_angle = rng.range(cfg.rotation_range.0, cfg.rotation_range.1);
    let rotation = Rotation::nearest(&exp_vec(&(rot_axis * rot_angle)));
    let translation = if cfg.pure_rotation {
        Vector3::zeros()
    } else {
        rng.unit_vector() * rng.range(cfg.translation_range.0, cfg.translation_range.1)
    };
    RigidMotion::new(rotation, translation)
}

/// Generates a scene for the given ground-truth relative pose. The exact
/// bearing pairs satisfy the coplanarity constraint to machine precision by
/// construction; all points pass the cheirality check in both views.
pub fn gen_scene_with_relative(
    cfg: &SceneConfig,
    relative: &RigidMotion,
    rng: &mut DetRng,
) -> Result<SceneSample, SynthError> {
    cfg.validate()?;
    let k = &cfg.intrinsics;
    let b_from_a = relative.inverse();

    let mut points = Vec::with_capacity(cfg.point_count);
    let mut exact = Vec::with_capacity(cfg.point_count);
    let max_attempts = cfg.point_count * 500;
    let mut attempts = 0usize;
    while points.len() < cfg.point_count && attempts < max_attempts {
        attempts += 1;
        let pixel = Pixel::new(
            rng.range(1.0, (k.width - 1) as f64),
            rng.range(1.0, (k.height - 1) as f64),
        );
        let depth = rng.range(cfg.depth_range.0, cfg.depth_range.1);
        let x_a = k.lift(&pixel, depth).expect("positive depth");
        let x_b = b_from_a.transform_point(&x_a);
        if x_b.z <= cfg.depth_range.0 * 0.05 {
            continue;
        }
        let Ok(p_b) = k.project(&x_b) else { continue };
        if !k.contains(&p_b) {
            continue;
        }
        exact.push(BearingPair {
            f: x_a.normalize(),
            f_prime: x_b.normalize(),
            confidence: None,
        });
        points.push(x_a);
    }
    if points.len() < cfg.point_count {
        return Err(SynthError::FrustumExhausted {
            requested: cfg.point_count,
            missing: cfg.point_count - points.len(),
        });
    }

    let exact_pairs =
        BearingPairSet::new((0, 1), exact).expect("generated bearings are unit and finite");
    let corrupt_seed = rng.next_u64();
    let (corrupted_pairs, inlier_labels) = corrupt(
        &exact_pairs,
        cfg.pixel_noise_sigma,
        cfg.outlier_fraction,
        k,
        corrupt_seed,
    );

    let depth_a = splat_depth(k, points.iter());
    let points_b: Vec<Vector3<f64>> = points.iter().map(|p| b_from_a.transform_point(p)).collect();
    let depth_b = splat_depth(k, points_b.iter());

    Ok(SceneSample {
        points,
        pose_a: RigidMotion::identity(),
        pose_b: *relative,
        relative: *relative,
        exact_pairs,
        corrupted_pairs,
        inlier_labels,
        depth_a,
        depth_b,
    })
}

/// Generates a scene, drawing the relative pose from the config ranges.
pub fn gen_scene(cfg: &SceneConfig) -> Result<SceneSample, SynthError> {
    let mut rng = DetRng::new(cfg.seed);
    let relative = sample_relative_pose(cfg, &mut rng);
    gen_scene_with_relative(cfg, &relative, &mut rng)
}

/// Nearest-pixel depth splats with a validity mask; pixels nobody hits stay
/// invalid.
fn splat_depth<'a>(
    k: &CameraIntrinsics,
    points: impl Iterator<Item = &'a Vector3<f64>>,
) -> DepthMap {
    let mut data = vec![0.0; k.width * k.height];
    let mut valid = vec![false; k.width * k.height];
    for p in points {
        let Ok(pixel) = k.project(p) else { continue };
        let x = pixel.u.round();
        let y = pixel.v.round();
        if x < 0.0 || y < 0.0 || x >= k.width as f64 || y >= k.height as f64 {
            continue;
        }
        let idx = y as usize * k.width + x as usize;
        // Keep the nearest surface when splats collide.
        if !valid[idx] || p.z < data[idx] {
            data[idx] = p.z;
            valid[idx] = true;
        }
    }
    DepthMap::new(k.width, k.height, data, valid).expect("splat depths positive")
}

/// Corrupts bearing pairs: projects them to pixels, adds isotropic Gaussian
/// noise, renormalizes, and replaces a fraction with uniform random
/// in-frustum bearings. Returns the pairs with inlier labels. With zero
/// noise and zero outlier fraction the input is returned unchanged.
pub fn corrupt(
    pairs: &BearingPairSet,
    sigma_pixels: f64,
    outlier_fraction: f64,
    k: &CameraIntrinsics,
    seed: u64,
) -> (BearingPairSet, Vec<bool>) {
    let n = pairs.len();
    if sigma_pixels == 0.0 && outlier_fraction == 0.0 {
        return (pairs.clone(), vec![true; n]);
    }
    let mut rng = DetRng::new(seed);

    let perturb = |f: &Vector3<f64>, rng: &mut DetRng| -> Vector3<f64> {
        if sigma_pixels == 0.0 {
            return *f;
        }
        // Bearings generated in-frustum always have z > 0.
        let pixel = k.project(f).expect("bearing in front of camera");
        let noisy = Pixel::new(
            pixel.u + sigma_pixels * rng.normal(),
            pixel.v + sigma_pixels * rng.normal(),
        );
        k.bearing(&noisy)
    };

    let mut corrupted: Vec<BearingPair> = pairs
        .pairs()
        .iter()
        .map(|pair| BearingPair {
            f: perturb(&pair.f, &mut rng),
            f_prime: perturb(&pair.f_prime, &mut rng),
            confidence: pair.confidence,
        })
        .collect();

    let mut labels = vec![true; n];
    let outlier_count = (outlier_fraction * n as f64).round() as usize;
    let order = rng.permutation(n);
    for &idx in order.iter().take(outlier_count) {
        let pixel = Pixel::new(
            rng.range(0.0, k.width as f64),
            rng.range(0.0, k.height as f64),
        );
        corrupted[idx].f_prime = k.bearing(&pixel);
        labels[idx] = false;
    }

    let set = BearingPairSet::new(pairs.frames(), corrupted).expect("corrupted bearings unit");
    (set, labels)
}

/// Coarse-to-fine grid search over axis-angle space for the rotation
/// minimizing the smallest covariance eigenvalue. Independent of the
/// Levenberg-Marquardt path; used as its optimality oracle.
///
/// The search covers the ball of radius pi/2. The epipolar objective always
/// has a second exact minimum (the twisted-pair rotation, a half turn about
/// the translation direction composed with the solution) at geodesic
/// distance pi; bounding the search keeps the oracle on the
/// frame-to-frame branch.
pub fn brute_force_rotation(
    pairs: &BearingPairSet,
    resolution: f64,
) -> Result<Rotation, SynthError> {
    if resolution < 1e-3 {
        return Err(SynthError::ResolutionTooFine(resolution));
    }
    let objective = |omega: &Vector3<f64>| -> f64 {
        let r = exp_vec(omega);
        let mut m = nalgebra::Matrix3::zeros();
        for pair in pairs.pairs() {
            let n = pair.f.cross(&(r * pair.f_prime));
            m += n * n.transpose();
        }
        crate::eigen::sym_eigenvalues3(&m)[0]
    };

    // Coarse pass over the half-canonical ball.
    let radius = std::f64::consts::FRAC_PI_2;
    let coarse_step = 0.2;
    let mut best = Vector3::zeros();
    let mut best_value = objective(&best);
    let span = (radius / coarse_step).ceil() as i64;
    for ix in -span..=span {
        for iy in -span..=span {
            for iz in -span..=span {
                let omega = Vector3::new(
                    ix as f64 * coarse_step,
                    iy as f64 * coarse_step,
                    iz as f64 * coarse_step,
                );
                if omega.norm() > radius {
                    continue;
                }
                let value = objective(&omega);
                if value < best_value {
                    best_value = value;
                    best = omega;
                }
            }
        }
    }

    // Three refinement levels down to the requested resolution.
    let factor = (coarse_step / resolution).powf(1.0 / 3.0);
    let mut step = coarse_step;
    for _ in 0..3 {
        let next = step / factor;
        let cells = factor.ceil() as i64;
        let center = best;
        for ix in -cells..=cells {
            for iy in -cells..=cells {
                for iz in -cells..=cells {
                    let omega =
                        center + Vector3::new(ix as f64 * next, iy as f64 * next, iz as f64 * next);
                    let value = objective(&omega);
                    if value < best_value {
                        best_value = value;
                        best = omega;
                    }
                }
            }
        }
        step = next;
    }
    let _ = step;
    Ok(Rotation::nearest(&exp_vec(&best)))
}

/// Per-frame relative motions of a driving-style trajectory: mostly-forward
/// translation with a smoothly wandering yaw-dominant turn.
pub fn gen_relative_motions(
    seed: u64,
    frames: usize,
    forward_step: f64,
    max_turn: f64,
) -> Vec<RigidMotion> {
    let mut rng = DetRng::new(seed);
    let mut turn_rate = 0.0;
    (0..frames.saturating_sub(1))
        .map(|_| {
            turn_rate = 0.9 * turn_rate + 0.1 * rng.range(-max_turn, max_turn);
            let omega = Vector3::new(
                rng.range(-0.1, 0.1) * max_turn,
                turn_rate,
                rng.range(-0.05, 0.05) * max_turn,
            );
            let rotation = Rotation::nearest(&exp_vec(&omega));
            let translation = Vector3::new(
                rng.range(-0.02, 0.02) * forward_step,
                rng.range(-0.01, 0.01) * forward_step,
                forward_step * rng.range(0.9, 1.1),
            );
            RigidMotion::new(rotation, translation)
        })
        .collect()
}

/// Perturbs relative motions with geodesic rotation noise of the given
/// magnitude and relative translation noise.
pub fn perturb_relatives(
    relatives: &[RigidMotion],
    rotation_noise: f64,
    translation_noise_rel: f64,
    seed: u64,
) -> Vec<RigidMotion> {
    let mut rng = DetRng::new(seed);
    relatives
        .iter()
        .map(|rel| {
            let noise_rot = so3_exp(
                &AxisAngle::new(rng.unit_vector() * rotation_noise).expect("noise below pi"),
            );
            let jitter = Vector3::new(rng.normal(), rng.normal(), rng.normal())
                * (translation_noise_rel * rel.translation.norm() / 3f64.sqrt());
            RigidMotion::new(noise_rot.compose(&rel.rotation), rel.translation + jitter)
        })
        .collect()
}

/// An analytically rendered two-view scene of a textured tilted plane:
/// images and depth maps are exact, so the only error left in a warp is
/// bilinear resampling.
#[derive(Debug, Clone)]
pub struct PlaneScene {
    pub image_a: Image,
    pub image_b: Image,
    pub depth_a: DepthMap,
    pub depth_b: DepthMap,
    /// Point transform from frame a into frame b.
    pub motion_a_to_b: RigidMotion,
    pub intrinsics: CameraIntrinsics,
}

/// Renders a plane at depth `plane_depth` (slightly tilted) seen from frame
/// a, and from frame b displaced by `relative` (the pose of camera b in
/// frame a). The texture is band-limited (periods of 64+ pixels) so bilinear
/// resampling stays well under 1e-3.
pub fn gen_plane_scene(
    k: &CameraIntrinsics,
    relative: &RigidMotion,
    plane_depth: f64,
) -> PlaneScene {
    // Plane n . X = d in frame a, gently tilted away from fronto-parallel.
    let normal = Vector3::new(0.05, -0.08, 1.0).normalize();
    let d = plane_depth * normal.z;

    let texture = |p: &Vector3<f64>| -> f64 {
        // Plane-surface coordinates in units of source pixels.
        let px_scale = plane_depth / k.fx;
        let s = p.x / px_scale;
        let t = p.y / px_scale;
        let tau = std::f64::consts::TAU;
        0.5 + 0.17 * (tau * s / 64.0).sin() * (tau * t / 80.0).cos()
            + 0.12 * (tau * (s + t) / 96.0).sin()
            + 0.08 * (tau * (s - 0.5 * t) / 72.0).cos()
            + 0.05 * (s / 2000.0).clamp(-1.0, 1.0)
    };

    let render = |world_from_cam: Option<&RigidMotion>| -> (Image, DepthMap) {
        // Intersect each pixel ray with the plane expressed in this camera's
        // frame.
        let (n_cam, d_cam) = match world_from_cam {
            // Frame b: n_b = R n, d_b = d + n_b . t for X_b = R X_a + t.
            Some(motion) => {
                let n_b = motion.rotation.rotate(&normal);
                (n_b, d + n_b.dot(&motion.translation))
            }
            None => (normal, d),
        };
        let mut intensities = Vec::with_capacity(k.width * k.height);
        let mut depths = Vec::with_capacity(k.width * k.height);
        for y in 0..k.height {
            for x in 0..k.width {
                let dir = Vector3::new(
                    (x as f64 - k.cx) / k.fx,
                    (y as f64 - k.cy) / k.fy,
                    1.0,
                );
                let denom = n_cam.dot(&dir);
                let s = d_cam / denom;
                let point_cam = dir * s;
                // Texture lookups happen in frame a's plane coordinates.
                let point_a = match world_from_cam {
                    Some(motion) => motion.inverse().transform_point(&point_cam),
                    None => point_cam,
                };
                intensities.push(texture(&point_a).clamp(0.0, 1.0));
                depths.push(point_cam.z);
            }
        }
        let image = Image::new(k.width, k.height, 1, intensities).expect("texture in range");
        let depth = DepthMap::from_values(k.width, k.height, depths).expect("plane in front");
        (image, depth)
    };

    let (image_a, depth_a) = render(None);
    let motion_a_to_b = relative.inverse();
    let (image_b, depth_b) = render(Some(&motion_a_to_b));
    PlaneScene {
        image_a,
        image_b,
        depth_a,
        depth_b,
        motion_a_to_b,
        intrinsics: *k,
    }
}
