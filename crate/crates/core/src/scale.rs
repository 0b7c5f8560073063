//! Metric scale recovery for a two-view translation: triangulate matches
//! against a unit baseline, fit the linear model Y_d = s * X_t between
//! triangulated and depth-lifted points with RANSAC, and gate the result on
//! cheirality and on delta = |1 - s|.

use crate::f2f::BearingPairSet;
use crate::rng::DetRng;
use crate::se3::{RigidMotion, Rotation};
use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScaleError {
    #[error("rays are near-parallel (sin of angle {0:.3e} below 1e-9)")]
    DegenerateRays(f64),
    #[error("need at least 3 correspondences for the scale fit, got {0}")]
    InsufficientPoints(usize),
    #[error("triangulation requires a non-zero baseline")]
    ZeroBaseline,
    #[error("point sets must correspond index-wise: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// RANSAC and gating parameters for the scale fit.
#[derive(Debug, Clone, Copy)]
pub struct ScaleAlignConfig {
    /// Outer sampling rounds.
    pub rounds: usize,
    /// Fraction of correspondences drawn per round.
    pub sample_fraction: f64,
    /// Relative residual |,,y,, - s ,,x,,| / ,,y,, below which a
    /// correspondence counts as an inlier.
    pub inlier_threshold: f64,
    /// Minimum fraction of matches that must pass the cheirality check.
    pub cheirality_min_fraction: f64,
    /// Maximum accepted delta = |1 - s|.
    pub delta_max: f64,
    pub seed: u64,
}

impl Default for ScaleAlignConfig {
    fn default() -> Self {
        ScaleAlignConfig {
            rounds: 10,
            sample_fraction: 0.8,
            inlier_threshold: 1e-3,
            cheirality_min_fraction: 0.51,
            delta_max: 0.5,
            seed: 0,
        }
    }
}

impl ScaleAlignConfig {
    pub fn validate(&self) -> Result<(), ScaleError> {
        if self.rounds == 0 {
            return Err(ScaleError::InvalidConfig("rounds must be positive".into()));
        }
        for (name, v) in [
            ("sample_fraction", self.sample_fraction),
            ("cheirality_min_fraction", self.cheirality_min_fraction),
        ] {
            let in_unit = v > 0.0 && v <= 1.0;
            if !in_unit {
                return Err(ScaleError::InvalidConfig(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        let thresholds_valid = self.inlier_threshold.is_finite()
            && self.inlier_threshold > 0.0
            && self.delta_max.is_finite()
            && self.delta_max > 0.0;
        if !thresholds_valid {
            return Err(ScaleError::InvalidConfig(
                "thresholds must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One triangulated correspondence: the midpoint between the two rays in the
/// first camera's frame plus the signed depths along each bearing.
#[derive(Debug, Clone, Copy)]
pub struct Triangulated {
    pub point: Vector3<f64>,
    pub depth_a: f64,
    pub depth_b: f64,
}

/// Midpoint triangulation of one bearing pair under `motion`, the relative
/// pose of camera b expressed in camera a's frame (ray a starts at the
/// origin along f, ray b starts at the translation along R f').
pub fn triangulate(
    f: &Vector3<f64>,
    f_prime: &Vector3<f64>,
    motion: &RigidMotion,
) -> Result<Triangulated, ScaleError> {
    let t = motion.translation;
    if t.norm() == 0.0 {
        return Err(ScaleError::ZeroBaseline);
    }
    let d1 = *f;
    let d2 = motion.rotation.rotate(f_prime);
    let cross_norm = d1.cross(&d2).norm();
    if cross_norm < 1e-9 {
        return Err(ScaleError::DegenerateRays(cross_norm));
    }
    // Closest points: minimize |s d1 - (t + u d2)|^2 for unit directions.
    let a = d1.dot(&d2);
    let b1 = d1.dot(&t);
    let b2 = d2.dot(&t);
    let denom = 1.0 - a * a;
    let s = (b1 - a * b2) / denom;
    let u = (a * b1 - b2) / denom;
    let p1 = d1 * s;
    let p2 = t + d2 * u;
    Ok(Triangulated {
        point: (p1 + p2) * 0.5,
        depth_a: s,
        depth_b: u,
    })
}

/// Keeps triangulations with both signed depths positive, reporting the kept
/// fraction over the input set.
pub fn cheirality_filter(triangulated: &[Triangulated]) -> (Vec<usize>, f64) {
    let kept: Vec<usize> = triangulated
        .iter()
        .enumerate()
        .filter(|(_, t)| t.depth_a > 0.0 && t.depth_b > 0.0)
        .map(|(i, _)| i)
        .collect();
    let fraction = if triangulated.is_empty() {
        0.0
    } else {
        kept.len() as f64 / triangulated.len() as f64
    };
    (kept, fraction)
}

/// Seeded RANSAC fit of Y_d = s * X_t over index-wise corresponding point
/// sets. Each round draws `sample_fraction` of the correspondences (round r
/// uses the substream (seed, r)), scores single-point ratio hypotheses by
/// the relative residual | |y| - s |x| | / |y|, and refits s as the
/// least-squares ratio sum<x, y> / sum<x, x> over the winning consensus set.
/// The round with the smallest delta = |1 - s| wins.
pub fn ransac_scale(
    triangulated: &[Vector3<f64>],
    depth_lifted: &[Vector3<f64>],
    cfg: &ScaleAlignConfig,
) -> Result<(f64, f64), ScaleError> {
    cfg.validate()?;
    if triangulated.len() != depth_lifted.len() {
        return Err(ScaleError::LengthMismatch(
            triangulated.len(),
            depth_lifted.len(),
        ));
    }
    let n = triangulated.len();
    if n < 3 {
        return Err(ScaleError::InsufficientPoints(n));
    }

    let mut best: Option<(f64, f64)> = None;
    for round in 0..cfg.rounds {
        let mut rng = DetRng::substream(cfg.seed, round as u64);
        let sample_size = ((n as f64 * cfg.sample_fraction).floor() as usize).clamp(1, n);
        let permutation = rng.permutation(n);
        let sample = &permutation[..sample_size];

        // Best single-point hypothesis by consensus size.
        let mut best_inliers: Vec<usize> = Vec::new();
        for &hyp in sample {
            let nx = triangulated[hyp].norm();
            let ny = depth_lifted[hyp].norm();
            if nx <= 0.0 || ny <= 0.0 {
                continue;
            }
            let s_hyp = ny / nx;
            let inliers: Vec<usize> = sample
                .iter()
                .copied()
                .filter(|&i| {
                    let y = depth_lifted[i].norm();
                    if y <= 0.0 {
                        return false;
                    }
                    ((y - s_hyp * triangulated[i].norm()) / y).abs() <= cfg.inlier_threshold
                })
                .collect();
            if inliers.len() > best_inliers.len() {
                best_inliers = inliers;
            }
        }
        if best_inliers.is_empty() {
            continue;
        }

        let mut num = 0.0;
        let mut den = 0.0;
        for &i in &best_inliers {
            num += triangulated[i].dot(&depth_lifted[i]);
            den += triangulated[i].dot(&triangulated[i]);
        }
        if den <= 0.0 {
            continue;
        }
        let s = num / den;
        let delta = (1.0 - s).abs();
        if best.is_none_or(|(_, d)| delta < d) {
            best = Some((s, delta));
        }
    }

    best.ok_or_else(|| ScaleError::InvalidConfig("no round produced a consensus".into()))
}

/// Outcome of the scale recovery for one frame pair.
#[derive(Debug, Clone)]
pub struct ScaleResult {
    pub scale: f64,
    pub delta: f64,
    pub cheirality_fraction: f64,
    pub accepted: bool,
    /// The scaled translation when accepted; `None` means fall back to the
    /// predicted translation.
    pub scaled_translation: Option<Vector3<f64>>,
}

/// Applies the acceptance gates: the result is accepted only when the
/// cheirality fraction reaches the configured minimum and delta stays within
/// its bound. `direction` must already carry the sign chosen by the
/// cheirality vote; `baseline_norm` is the length of the translation used
/// for triangulation.
pub fn scale_decision(
    scale: f64,
    delta: f64,
    cheirality_fraction: f64,
    baseline_norm: f64,
    direction: &Vector3<f64>,
    cfg: &ScaleAlignConfig,
) -> ScaleResult {
    let accepted = cheirality_fraction >= cfg.cheirality_min_fraction && delta <= cfg.delta_max;
    ScaleResult {
        scale,
        delta,
        cheirality_fraction,
        accepted,
        scaled_translation: accepted.then(|| direction * (scale * baseline_norm)),
    }
}

/// Full scale-recovery pipeline for one frame pair: resolves the sign of the
/// solver's translation direction by cheirality vote, triangulates against a
/// unit baseline, fits the scale against depth-lifted points and applies the
/// acceptance gates. `depth_lifted[i]` must be the back-projected 3D point
/// (camera a frame) for pair i; entries may be `None` where no depth exists.
pub fn recover_scaled_translation(
    pairs: &BearingPairSet,
    rotation: &Rotation,
    direction: &Vector3<f64>,
    depth_lifted: &[Option<Vector3<f64>>],
    cfg: &ScaleAlignConfig,
) -> Result<ScaleResult, ScaleError> {
    cfg.validate()?;
    if depth_lifted.len() != pairs.len() {
        return Err(ScaleError::LengthMismatch(depth_lifted.len(), pairs.len()));
    }

    let triangulate_all = |dir: &Vector3<f64>| -> Vec<Option<Triangulated>> {
        let motion = RigidMotion::new(*rotation, *dir);
        pairs
            .pairs()
            .iter()
            .map(|p| triangulate(&p.f, &p.f_prime, &motion).ok())
            .collect()
    };
    let positive_fraction = |tri: &[Option<Triangulated>]| -> f64 {
        if tri.is_empty() {
            return 0.0;
        }
        tri.iter()
            .filter(|t| t.is_some_and(|t| t.depth_a > 0.0 && t.depth_b > 0.0))
            .count() as f64
            / tri.len() as f64
    };

    let tri_pos = triangulate_all(direction);
    let tri_neg = triangulate_all(&-direction);
    let frac_pos = positive_fraction(&tri_pos);
    let frac_neg = positive_fraction(&tri_neg);
    let (signed_direction, triangulated, cheirality_fraction) = if frac_pos >= frac_neg {
        (*direction, tri_pos, frac_pos)
    } else {
        (-direction, tri_neg, frac_neg)
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (tri, lifted) in triangulated.iter().zip(depth_lifted) {
        if let (Some(t), Some(y)) = (tri, lifted) {
            if t.depth_a > 0.0 && t.depth_b > 0.0 {
                xs.push(t.point);
                ys.push(*y);
            }
        }
    }

    let (scale, delta) = match ransac_scale(&xs, &ys, cfg) {
        Ok(pair) => pair,
        Err(ScaleError::InsufficientPoints(_)) => {
            // Not enough survivors: fall back, reporting the vote.
            return Ok(ScaleResult {
                scale: f64::NAN,
                delta: f64::INFINITY,
                cheirality_fraction,
                accepted: false,
                scaled_translation: None,
            });
        }
        Err(e) => return Err(e),
    };

    Ok(scale_decision(
        scale,
        delta,
        cheirality_fraction,
        1.0,
        &signed_direction,
        cfg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triangulate_exact_stereo() {
        // Camera b one unit to the right, point straight ahead at z = 5.
        let point = Vector3::new(0.0, 0.0, 5.0);
        let motion = RigidMotion::new(Rotation::identity(), Vector3::new(1.0, 0.0, 0.0));
        let f = point.normalize();
        let f_prime = (point - motion.translation).normalize();
        let tri = triangulate(&f, &f_prime, &motion).unwrap();
        assert_relative_eq!(tri.point.z, 5.0, epsilon = 1e-9);
        assert_relative_eq!(tri.point.x, 0.0, epsilon = 1e-9);
        assert_relative_eq!(tri.depth_a, 5.0, epsilon = 1e-9);
        assert!(tri.depth_b > 0.0);
    }

    #[test]
    fn triangulate_point_behind_first_camera() {
        // Camera b sits behind camera a; the point lies between them, so the
        // forward-pointing bearing of camera a meets it at a negative
        // parameter while camera b sees it in front.
        let point = Vector3::new(0.2, 0.0, -0.5);
        let motion = RigidMotion::new(Rotation::identity(), Vector3::new(0.0, 0.0, -2.0));
        let f = -point.normalize();
        let f_prime = (point - motion.translation).normalize();
        assert!(f.z > 0.0 && f_prime.z > 0.0);
        let tri = triangulate(&f, &f_prime, &motion).unwrap();
        assert!(tri.depth_a < 0.0);
        assert!(tri.depth_b > 0.0);
    }

    #[test]
    fn triangulate_rejects_parallel_rays() {
        let motion = RigidMotion::new(Rotation::identity(), Vector3::new(1.0, 0.0, 0.0));
        let f = Vector3::new(1.0, 0.0, 0.0);
        let err = triangulate(&f, &f, &motion).unwrap_err();
        assert!(matches!(err, ScaleError::DegenerateRays(_)));
    }

    #[test]
    fn triangulate_rejects_zero_baseline() {
        let motion = RigidMotion::identity();
        let err = triangulate(&Vector3::z(), &Vector3::x(), &motion).unwrap_err();
        assert!(matches!(err, ScaleError::ZeroBaseline));
    }

    #[test]
    fn cheirality_all_in_front() {
        let tris: Vec<Triangulated> = (0..10)
            .map(|i| Triangulated {
                point: Vector3::new(0.0, 0.0, i as f64 + 1.0),
                depth_a: 1.0,
                depth_b: 2.0,
            })
            .collect();
        let (kept, fraction) = cheirality_filter(&tris);
        assert_eq!(kept.len(), 10);
        assert_eq!(fraction, 1.0);
    }

    #[test]
    fn cheirality_empty_input() {
        let (kept, fraction) = cheirality_filter(&[]);
        assert!(kept.is_empty());
        assert_eq!(fraction, 0.0);
    }

    #[test]
    fn ransac_exact_ratios() {
        let xs: Vec<Vector3<f64>> = (0..20)
            .map(|i| Vector3::new(i as f64 + 1.0, (i % 3) as f64, 2.0))
            .collect();
        let ys2: Vec<Vector3<f64>> = xs.iter().map(|x| x * 2.0).collect();
        let cfg = ScaleAlignConfig::default();
        let (s, delta) = ransac_scale(&xs, &ys2, &cfg).unwrap();
        assert_relative_eq!(s, 2.0, epsilon = 1e-12);
        assert_relative_eq!(delta, 1.0, epsilon = 1e-12);

        let (s, delta) = ransac_scale(&xs, &xs, &cfg).unwrap();
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        assert!(delta.abs() < 1e-12);
    }

    #[test]
    fn ransac_rejects_outliers() {
        let mut rng = DetRng::new(123);
        let true_scale = 1.4;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..100 {
            let x = Vector3::new(rng.range(-2.0, 2.0), rng.range(-2.0, 2.0), rng.range(1.0, 8.0));
            xs.push(x);
            // 20% corrupted at 10x scale.
            if i % 5 == 0 {
                ys.push(x * (10.0 * true_scale));
            } else {
                ys.push(x * true_scale);
            }
        }
        let cfg = ScaleAlignConfig::default();
        let (s, _) = ransac_scale(&xs, &ys, &cfg).unwrap();
        assert_relative_eq!(s, true_scale, max_relative = 1e-3);
    }

    #[test]
    fn ransac_needs_three_points() {
        let xs = vec![Vector3::z(), Vector3::x()];
        let cfg = ScaleAlignConfig::default();
        assert!(matches!(
            ransac_scale(&xs, &xs, &cfg),
            Err(ScaleError::InsufficientPoints(2))
        ));
    }

    #[test]
    fn ransac_is_deterministic() {
        let mut rng = DetRng::new(9);
        let xs: Vec<Vector3<f64>> = (0..50).map(|_| rng.unit_vector() * rng.range(1.0, 5.0)).collect();
        let ys: Vec<Vector3<f64>> = xs.iter().map(|x| x * 0.7).collect();
        let cfg = ScaleAlignConfig {
            seed: 42,
            ..Default::default()
        };
        let a = ransac_scale(&xs, &ys, &cfg).unwrap();
        let b = ransac_scale(&xs, &ys, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ransac_scale_equivariance() {
        let mut rng = DetRng::new(31);
        let xs: Vec<Vector3<f64>> = (0..40).map(|_| rng.unit_vector() * rng.range(1.0, 9.0)).collect();
        let ys: Vec<Vector3<f64>> = xs.iter().map(|x| x * 1.3).collect();
        let cfg = ScaleAlignConfig::default();
        let (s1, _) = ransac_scale(&xs, &ys, &cfg).unwrap();
        let ys_scaled: Vec<Vector3<f64>> = ys.iter().map(|y| y * 3.0).collect();
        let (s3, _) = ransac_scale(&xs, &ys_scaled, &cfg).unwrap();
        assert_relative_eq!(s3, 3.0 * s1, epsilon = 1e-9);
    }

    #[test]
    fn decision_gates() {
        let cfg = ScaleAlignConfig::default();
        let dir = Vector3::z();
        let ok = scale_decision(1.1, 0.1, 0.9, 1.0, &dir, &cfg);
        assert!(ok.accepted);
        assert_relative_eq!(
            ok.scaled_translation.unwrap(),
            Vector3::new(0.0, 0.0, 1.1),
            epsilon = 1e-12
        );

        let bad_cheirality = scale_decision(1.1, 0.1, 0.4, 1.0, &dir, &cfg);
        assert!(!bad_cheirality.accepted);
        assert!(bad_cheirality.scaled_translation.is_none());

        let bad_delta = scale_decision(1.6, 0.6, 0.9, 1.0, &dir, &cfg);
        assert!(!bad_delta.accepted);
    }
}
