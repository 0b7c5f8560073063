//! Trajectory accumulation, similarity alignment and the odometry metric
//! suite (t_err, r_err, ATE, RPE).

use crate::se3::{so3_log, RigidMotion, Rotation};
use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Segment lengths (meters) used by the drift metrics, following the KITTI
/// odometry benchmark convention.
pub const KITTI_SEGMENT_LENGTHS: [f64; 8] =
    [100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("frame indices must be strictly increasing")]
    NonMonotonicIndices,
    #[error("trajectories differ: {0} vs {1} poses")]
    LengthMismatch(usize, usize),
    #[error("frame indices of the two trajectories do not match")]
    IndexMismatch,
    #[error("need at least {needed} poses, got {got}")]
    TooShort { got: usize, needed: usize },
    #[error("estimate positions have zero variance; alignment is undefined")]
    ZeroVariance,
    #[error("aligned scale collapsed to {0}; trajectories are uncorrelated")]
    DegenerateScale(f64),
    #[error("rpe step must be positive")]
    ZeroStep,
}

/// Ordered sequence of absolute camera-to-world poses.
#[derive(Debug, Clone)]
pub struct Trajectory {
    entries: Vec<(usize, RigidMotion)>,
}

impl Trajectory {
    pub fn new(entries: Vec<(usize, RigidMotion)>) -> Result<Self, EvalError> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(EvalError::NonMonotonicIndices);
        }
        Ok(Trajectory { entries })
    }

    /// Poses indexed 0..n.
    pub fn from_poses(poses: Vec<RigidMotion>) -> Self {
        Trajectory {
            entries: poses.into_iter().enumerate().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, RigidMotion)] {
        &self.entries
    }

    pub fn pose(&self, i: usize) -> &RigidMotion {
        &self.entries[i].1
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.entries.iter().map(|(_, p)| p.translation).collect()
    }

    /// Relative motions between consecutive poses: rel_k = pose_k^-1 pose_{k+1}.
    pub fn relatives(&self) -> Vec<RigidMotion> {
        self.entries
            .windows(2)
            .map(|w| w[0].1.inverse().compose(&w[1].1))
            .collect()
    }
}

/// Accumulates relative motions into an absolute trajectory starting at the
/// identity: pose_{k+1} = pose_k * rel_k.
pub fn accumulate(relatives: &[RigidMotion]) -> Trajectory {
    let mut poses = Vec::with_capacity(relatives.len() + 1);
    let mut current = RigidMotion::identity();
    poses.push(current);
    for rel in relatives {
        current = current.compose(rel);
        poses.push(current);
    }
    Trajectory::from_poses(poses)
}

/// Similarity transform p -> s R p + t.
#[derive(Debug, Clone, Copy)]
pub struct Sim3 {
    pub scale: f64,
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl Sim3 {
    pub fn identity() -> Self {
        Sim3 {
            scale: 1.0,
            rotation: Rotation::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) * self.scale + self.translation
    }
}

fn check_matching(est: &Trajectory, gt: &Trajectory, min_len: usize) -> Result<(), EvalError> {
    if est.len() != gt.len() {
        return Err(EvalError::LengthMismatch(est.len(), gt.len()));
    }
    if est.len() < min_len {
        return Err(EvalError::TooShort {
            got: est.len(),
            needed: min_len,
        });
    }
    if est
        .entries()
        .iter()
        .zip(gt.entries())
        .any(|(a, b)| a.0 != b.0)
    {
        return Err(EvalError::IndexMismatch);
    }
    Ok(())
}

/// Closed-form least-squares similarity (Umeyama) aligning the estimated
/// positions to the ground-truth positions. With `with_scale` false the
/// scale is fixed to 1 (6DoF alignment).
///
/// The optimal proper rotation is extracted through the quaternion
/// eigenproblem rather than an SVD: both give the global optimum (including
/// the rank-deficient configurations the SVD route covers with its
/// sign-correction matrix), but the symmetric 4x4 eigen solve keeps full
/// precision when the position covariance is nearly singular, e.g. on
/// straight-line trajectories. Zero variance of the estimate is an error.
pub fn umeyama_align(est: &Trajectory, gt: &Trajectory, with_scale: bool) -> Result<Sim3, EvalError> {
    check_matching(est, gt, 3)?;
    let n = est.len() as f64;
    let xs = est.positions();
    let ys = gt.positions();

    let mean_x: Vector3<f64> = xs.iter().sum::<Vector3<f64>>() / n;
    let mean_y: Vector3<f64> = ys.iter().sum::<Vector3<f64>>() / n;

    let mut cov = Matrix3::<f64>::zeros();
    let mut var_x = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dy * dx.transpose();
        var_x += dx.norm_squared();
    }
    cov /= n;
    var_x /= n;
    if var_x < 1e-24 {
        return Err(EvalError::ZeroVariance);
    }

    let rotation = procrustes_rotation(&cov);
    let scale = if with_scale {
        // trace(D S) equals sum_i <dy_i, R dx_i> / n at the optimum.
        let mut aligned_dot = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            aligned_dot += (y - mean_y).dot(&rotation.rotate(&(x - mean_x)));
        }
        let s = aligned_dot / n / var_x;
        let positive = s.is_finite() && s > 0.0;
        if !positive {
            return Err(EvalError::DegenerateScale(s));
        }
        s
    } else {
        1.0
    };
    let translation = mean_y - rotation.rotate(&mean_x) * scale;
    Ok(Sim3 {
        scale,
        rotation,
        translation,
    })
}

/// Proper rotation maximizing sum_i <dy_i, R dx_i> given the cross
/// covariance cov = sum dy dx^T: the largest eigenvector of the quaternion
/// form of the objective.
fn procrustes_rotation(cov: &Matrix3<f64>) -> Rotation {
    let c = cov;
    let horn = [
        [
            c[(0, 0)] + c[(1, 1)] + c[(2, 2)],
            c[(2, 1)] - c[(1, 2)],
            c[(0, 2)] - c[(2, 0)],
            c[(1, 0)] - c[(0, 1)],
        ],
        [
            c[(2, 1)] - c[(1, 2)],
            c[(0, 0)] - c[(1, 1)] - c[(2, 2)],
            c[(1, 0)] + c[(0, 1)],
            c[(0, 2)] + c[(2, 0)],
        ],
        [
            c[(0, 2)] - c[(2, 0)],
            c[(1, 0)] + c[(0, 1)],
            c[(1, 1)] - c[(0, 0)] - c[(2, 2)],
            c[(2, 1)] + c[(1, 2)],
        ],
        [
            c[(1, 0)] - c[(0, 1)],
            c[(0, 2)] + c[(2, 0)],
            c[(2, 1)] + c[(1, 2)],
            c[(2, 2)] - c[(0, 0)] - c[(1, 1)],
        ],
    ];
    let (_, q) = crate::eigen::sym_eigen4_max(&horn);
    let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let (w, x, y, z) = (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm);
    let m = Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    );
    Rotation::from_matrix(m).expect("unit quaternion yields a rotation")
}

/// Absolute trajectory error: RMSE of position differences after applying
/// the alignment to the estimate.
pub fn ate(est: &Trajectory, gt: &Trajectory, alignment: &Sim3) -> Result<f64, EvalError> {
    check_matching(est, gt, 1)?;
    let sum: f64 = est
        .positions()
        .iter()
        .zip(gt.positions())
        .map(|(e, g)| (alignment.apply(e) - g).norm_squared())
        .sum();
    Ok((sum / est.len() as f64).sqrt())
}

/// Relative pose error over the given frame step: mean translation norm
/// (meters) and mean geodesic rotation angle (degrees) of the per-step error
/// motions E_i = (gt_i^-1 gt_{i+step})^-1 (est_i^-1 est_{i+step}).
pub fn rpe(est: &Trajectory, gt: &Trajectory, step: usize) -> Result<(f64, f64), EvalError> {
    if step == 0 {
        return Err(EvalError::ZeroStep);
    }
    check_matching(est, gt, step + 1)?;
    let n = est.len() - step;
    let mut trans_sum = 0.0;
    let mut rot_sum = 0.0;
    for i in 0..n {
        let rel_gt = gt.pose(i).inverse().compose(gt.pose(i + step));
        let rel_est = est.pose(i).inverse().compose(est.pose(i + step));
        let error = rel_gt.inverse().compose(&rel_est);
        trans_sum += error.translation.norm();
        rot_sum += so3_log(&error.rotation).angle();
    }
    Ok((trans_sum / n as f64, (rot_sum / n as f64).to_degrees()))
}

/// KITTI-style segment drift: for every start frame and every segment length
/// (located by cumulative ground-truth path length), compare the estimated
/// and ground-truth relative motions over the segment. Returns
/// (t_err percent, r_err degrees per 100 m) averaged over all segments, or
/// `None` when the trajectory is shorter than the smallest segment.
pub fn kitti_segment_errors(
    est: &Trajectory,
    gt: &Trajectory,
    lengths: &[f64],
) -> Result<Option<(f64, f64)>, EvalError> {
    check_matching(est, gt, 2)?;
    let positions = gt.positions();
    let mut dist = Vec::with_capacity(positions.len());
    let mut acc = 0.0;
    dist.push(0.0);
    for w in positions.windows(2) {
        acc += (w[1] - w[0]).norm();
        dist.push(acc);
    }

    let mut t_sum = 0.0;
    let mut r_sum = 0.0;
    let mut count = 0usize;
    for first in 0..est.len() {
        for &len in lengths {
            let target = dist[first] + len;
            let last = match dist[first..].iter().position(|&d| d >= target) {
                Some(offset) => first + offset,
                None => continue,
            };
            let rel_gt = gt.pose(first).inverse().compose(gt.pose(last));
            let rel_est = est.pose(first).inverse().compose(est.pose(last));
            let error = rel_gt.inverse().compose(&rel_est);
            t_sum += error.translation.norm() / len * 100.0;
            r_sum += so3_log(&error.rotation).angle().to_degrees() / len * 100.0;
            count += 1;
        }
    }
    if count == 0 {
        return Ok(None);
    }
    Ok(Some((t_sum / count as f64, r_sum / count as f64)))
}

/// Which component of the relative motions to replace with ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstituteMode {
    Rotation,
    Translation,
}

/// Replaces the selected component of each estimated relative motion by the
/// ground-truth one, leaving the other untouched.
pub fn substitute_component(
    est_rel: &[RigidMotion],
    gt_rel: &[RigidMotion],
    mode: SubstituteMode,
) -> Result<Vec<RigidMotion>, EvalError> {
    if est_rel.len() != gt_rel.len() {
        return Err(EvalError::LengthMismatch(est_rel.len(), gt_rel.len()));
    }
    Ok(est_rel
        .iter()
        .zip(gt_rel)
        .map(|(e, g)| match mode {
            SubstituteMode::Rotation => RigidMotion::new(g.rotation, e.translation),
            SubstituteMode::Translation => RigidMotion::new(e.rotation, g.translation),
        })
        .collect())
}

/// All five metrics for one sequence. The segment metrics are `None` when
/// the trajectory is shorter than the smallest segment length.
#[derive(Debug, Clone, Copy)]
pub struct MetricsReport {
    pub t_err_percent: Option<f64>,
    pub r_err_deg_per_100m: Option<f64>,
    pub ate_m: f64,
    pub rpe_m: f64,
    pub rpe_deg: f64,
}

/// Convenience wrapper computing the full metric suite with the given
/// alignment mode (`with_scale` selects 7DoF over 6DoF).
pub fn evaluate(
    est: &Trajectory,
    gt: &Trajectory,
    with_scale: bool,
) -> Result<(MetricsReport, Sim3), EvalError> {
    let alignment = umeyama_align(est, gt, with_scale)?;
    let ate_m = ate(est, gt, &alignment)?;
    let (rpe_m, rpe_deg) = rpe(est, gt, 1)?;
    let segment = kitti_segment_errors(est, gt, &KITTI_SEGMENT_LENGTHS)?;
    Ok((
        MetricsReport {
            t_err_percent: segment.map(|(t, _)| t),
            r_err_deg_per_100m: segment.map(|(_, r)| r),
            ate_m,
            rpe_m,
            rpe_deg,
        },
        alignment,
    ))
}
