//! Rotation and rigid-motion algebra plus the pinhole camera model.
//!
//! Rotations are stored as orthonormal matrices and parameterized by
//! axis-angle vectors (the so(3) logarithm) everywhere an increment or a
//! distance is needed. The camera frame convention is x-right, y-down,
//! z-forward.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Angle below which `so3_exp` / `so3_log` switch to their Taylor branches.
const SMALL_ANGLE: f64 = 1e-8;

/// Distance from pi below which `so3_log` extracts the axis from the
/// symmetric part of the matrix instead of the skew part.
const NEAR_PI: f64 = 1e-6;

/// Errors raised by rotation and camera-model constructors and operations.
#[derive(Debug, Error)]
pub enum GeomError {
    /// A matrix failed the orthonormality / determinant check.
    #[error("matrix is not a rotation: orthonormality error {ortho_err:.3e}, det {det:.6}")]
    NotARotation { ortho_err: f64, det: f64 },
    /// An axis-angle vector exceeded the canonical bound of pi.
    #[error("axis-angle norm {0} exceeds pi")]
    NotCanonical(f64),
    /// Lifting a pixel requires a strictly positive depth.
    #[error("depth must be positive, got {0}")]
    NonPositiveDepth(f64),
    /// Projecting a point requires it to lie in front of the camera.
    #[error("point is behind the camera (z = {0})")]
    BehindCamera(f64),
    /// Camera intrinsics violated their invariants.
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
}

/// A 3D rotation stored as an orthonormal matrix with determinant +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Wraps a matrix after checking orthonormality and determinant
    /// within 1e-6 per entry.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, GeomError> {
        let ortho_err = orthonormality_error(&m);
        let det = m.determinant();
        if ortho_err > 1e-6 || (det - 1.0).abs() > 1e-6 {
            return Err(GeomError::NotARotation { ortho_err, det });
        }
        Ok(Rotation(m))
    }

    /// Projects an arbitrary matrix onto the nearest rotation (Frobenius
    /// norm) via SVD with sign correction.
    pub fn nearest(m: &Matrix3<f64>) -> Self {
        let svd = m.svd(true, true);
        let u = svd.u.expect("3x3 svd always yields u");
        let v_t = svd.v_t.expect("3x3 svd always yields v_t");
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * v_t;
        }
        Rotation(r)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Geodesic distance to another rotation: the angle of self^T * other.
    /// Computed as atan2(sin, cos) from the skew part and the trace, which
    /// stays accurate for tiny angles where acos saturates.
    pub fn geodesic_angle_to(&self, other: &Rotation) -> f64 {
        let rel = self.0.transpose() * other.0;
        let sin = skew_part(&rel).norm() / 2.0;
        let cos = (rel.trace() - 1.0) / 2.0;
        sin.atan2(cos)
    }
}

/// Maximum per-entry deviation of R^T R from the identity.
pub fn orthonormality_error(m: &Matrix3<f64>) -> f64 {
    let gram = m.transpose() * m;
    let mut err: f64 = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            let target = if r == c { 1.0 } else { 0.0 };
            err = err.max((gram[(r, c)] - target).abs());
        }
    }
    err
}

/// Canonical axis-angle vector: omega = theta * u with theta in [0, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle(Vector3<f64>);

impl AxisAngle {
    /// Wraps a vector after checking the canonical bound ||omega|| <= pi.
    pub fn new(omega: Vector3<f64>) -> Result<Self, GeomError> {
        let norm = omega.norm();
        if !norm.is_finite() || norm > std::f64::consts::PI + 1e-12 {
            return Err(GeomError::NotCanonical(norm));
        }
        Ok(AxisAngle(omega))
    }

    pub fn zero() -> Self {
        AxisAngle(Vector3::zeros())
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    /// The rotation angle theta = ||omega||.
    pub fn angle(&self) -> f64 {
        self.0.norm()
    }

    /// The unit rotation axis, or `None` for the zero rotation.
    pub fn axis(&self) -> Option<Vector3<f64>> {
        let theta = self.angle();
        if theta > 0.0 {
            Some(self.0 / theta)
        } else {
            None
        }
    }
}

/// The skew-symmetric cross-product matrix of `v`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// vee(R - R^T): extracts 2 sin(theta) u from a rotation matrix.
fn skew_part(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    )
}

/// Rodrigues' formula on a raw so(3) vector. No canonicality requirement;
/// used for solver increments as well as `so3_exp`.
pub(crate) fn exp_vec(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = omega.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SMALL_ANGLE {
        // sin(t)/t and (1-cos(t))/t^2 to second order
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let k = skew(omega);
    Matrix3::identity() + k * a + k * k * b
}

/// Exponential map so(3) -> SO(3).
pub fn so3_exp(omega: &AxisAngle) -> Rotation {
    Rotation(exp_vec(&omega.vector()))
}

/// Logarithm map SO(3) -> so(3), returning the canonical representative
/// with theta in [0, pi].
///
/// Near theta = 0 a Taylor expansion of theta / (2 sin theta) avoids the
/// 0/0; near theta = pi the axis is recovered from the diagonal of the
/// symmetric part (R + R^T)/2, where the skew part vanishes.
pub fn so3_log(r: &Rotation) -> AxisAngle {
    let m = r.matrix();
    let cos_theta = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let sin_theta = skew_part(m).norm() / 2.0;
    let theta = sin_theta.atan2(cos_theta);

    if theta < SMALL_ANGLE {
        let factor = 0.5 * (1.0 + theta * theta / 6.0);
        return AxisAngle(skew_part(m) * factor);
    }

    if std::f64::consts::PI - theta < NEAR_PI {
        // R = I + sin(t) K + (1 - cos(t)) K^2 with K = [u]x, so
        // (R + R^T)/2 - cos(t) I = (1 - cos(t)) u u^T.
        let sym = (m + m.transpose()) * 0.5;
        let one_minus_cos = 1.0 - cos_theta;
        let diag = Vector3::new(
            (sym[(0, 0)] - cos_theta) / one_minus_cos,
            (sym[(1, 1)] - cos_theta) / one_minus_cos,
            (sym[(2, 2)] - cos_theta) / one_minus_cos,
        );
        let k = diag.imax();
        let mut u = Vector3::zeros();
        u[k] = diag[k].max(0.0).sqrt();
        for j in 0..3 {
            if j != k {
                u[j] = sym[(k, j)] / (one_minus_cos * u[k]);
            }
        }
        u.normalize_mut();
        // The skew part still fixes the sign when theta < pi exactly; at
        // theta = pi both signs are canonical.
        if skew_part(m).dot(&u) < 0.0 {
            u = -u;
        }
        return AxisAngle(u * theta);
    }

    AxisAngle(skew_part(m) * (theta / (2.0 * sin_theta)))
}

/// A rigid transform y = R x + t. The frame convention (point transform or
/// relative pose) is documented at each call site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion {
            rotation: Rotation::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Self {
        RigidMotion {
            rotation,
            translation,
        }
    }

    /// Composition: (self * other)(x) = self(other(x)).
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        RigidMotion {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.rotate(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        let rt = self.rotation.transpose();
        RigidMotion {
            rotation: rt,
            translation: -rt.rotate(&self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }
}

/// Real-valued pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pixel {
    pub u: f64,
    pub v: f64,
}

impl Pixel {
    pub fn new(u: f64, v: f64) -> Self {
        Pixel { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Pinhole camera intrinsics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
    ) -> Result<Self, GeomError> {
        let focals_valid = fx.is_finite() && fx > 0.0 && fy.is_finite() && fy > 0.0;
        if !focals_valid {
            return Err(GeomError::InvalidIntrinsics(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if !(0.0..(width as f64)).contains(&cx) || !(0.0..(height as f64)).contains(&cy) {
            return Err(GeomError::InvalidIntrinsics(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(CameraIntrinsics {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Back-projects a pixel at the given depth into the camera frame.
    pub fn lift(&self, p: &Pixel, depth: f64) -> Result<Vector3<f64>, GeomError> {
        let depth_valid = depth.is_finite() && depth > 0.0;
        if !depth_valid {
            return Err(GeomError::NonPositiveDepth(depth));
        }
        Ok(Vector3::new(
            (p.u - self.cx) * depth / self.fx,
            (p.v - self.cy) * depth / self.fy,
            depth,
        ))
    }

    /// Projects a camera-frame point onto the image plane.
    pub fn project(&self, x: &Vector3<f64>) -> Result<Pixel, GeomError> {
        let in_front = x.z.is_finite() && x.z > 0.0;
        if !in_front {
            return Err(GeomError::BehindCamera(x.z));
        }
        Ok(Pixel {
            u: self.fx * x.x / x.z + self.cx,
            v: self.fy * x.y / x.z + self.cy,
        })
    }

    /// Unit bearing vector through a pixel: normalize(K^-1 [u, v, 1]).
    pub fn bearing(&self, p: &Pixel) -> Vector3<f64> {
        Vector3::new((p.u - self.cx) / self.fx, (p.v - self.cy) / self.fy, 1.0).normalize()
    }

    pub fn contains(&self, p: &Pixel) -> bool {
        p.u >= 0.0 && p.v >= 0.0 && p.u < self.width as f64 && p.v < self.height as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Brute-force matrix exponential by scaled squaring of the series,
    /// independent of the Rodrigues path.
    fn expm_series(m: &Matrix3<f64>) -> Matrix3<f64> {
        let squarings = 4;
        let scaled = m / 2f64.powi(squarings);
        let mut term = Matrix3::identity();
        let mut sum = Matrix3::identity();
        for k in 1..30 {
            term = term * scaled / k as f64;
            sum += term;
        }
        let mut out = sum;
        for _ in 0..squarings {
            out = out * out;
        }
        out
    }

    fn random_axis_angle(rng: &mut DetRng, max_angle: f64) -> AxisAngle {
        let axis = rng.unit_vector();
        let angle = rng.range(0.0, max_angle);
        AxisAngle::new(axis * angle).unwrap()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let r = so3_exp(&AxisAngle::zero());
        assert_eq!(r.matrix(), &Matrix3::identity());
    }

    #[test]
    fn exp_quarter_turn_about_z_maps_x_to_y() {
        let omega = AxisAngle::new(Vector3::new(0.0, 0.0, PI / 2.0)).unwrap();
        let r = so3_exp(&omega);
        let y = r.rotate(&Vector3::x());
        assert_relative_eq!(y, Vector3::y(), epsilon = 1e-15);
    }

    #[test]
    fn exp_matches_series_exponential() {
        let mut rng = DetRng::new(11);
        for _ in 0..200 {
            let omega = random_axis_angle(&mut rng, PI - 1e-3);
            let r = so3_exp(&omega);
            let reference = expm_series(&skew(&omega.vector()));
            assert_relative_eq!(r.matrix(), &reference, epsilon = 1e-12);
        }
    }

    #[test]
    fn exp_log_round_trip_named_case() {
        let omega = AxisAngle::new(Vector3::new(0.3, -0.2, 0.1)).unwrap();
        let back = so3_log(&so3_exp(&omega));
        assert_relative_eq!(back.vector(), omega.vector(), epsilon = 1e-12);
    }

    #[test]
    fn log_of_identity_is_zero() {
        assert_eq!(so3_log(&Rotation::identity()).vector(), Vector3::zeros());
    }

    #[test]
    fn log_half_turn_about_x() {
        let r = Rotation::from_matrix(Matrix3::new(
            1.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, //
            0.0, 0.0, -1.0,
        ))
        .unwrap();
        let omega = so3_log(&r);
        assert_relative_eq!(omega.angle(), PI, epsilon = 1e-12);
        let axis = omega.axis().unwrap();
        assert_relative_eq!(axis.x.abs(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(axis.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(axis.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn log_near_pi_uses_symmetric_branch() {
        let mut rng = DetRng::new(23);
        for _ in 0..500 {
            let axis = rng.unit_vector();
            let angle = PI - rng.range(0.0, 5e-7);
            let omega = AxisAngle::new(axis * angle).unwrap();
            let back = so3_log(&so3_exp(&omega));
            // Compare as rotations: near pi the axis sign may flip.
            let err = so3_exp(&back).geodesic_angle_to(&so3_exp(&omega));
            assert!(err < 1e-9, "round-trip error {err} at angle {angle}");
        }
    }

    #[test]
    fn exp_log_round_trip_ten_thousand_seeds() {
        let mut rng = DetRng::new(7);
        for _ in 0..10_000 {
            let omega = random_axis_angle(&mut rng, PI - 1e-6);
            let back = so3_log(&so3_exp(&omega));
            let err = (back.vector() - omega.vector()).norm();
            assert!(err < 1e-9, "round-trip error {err}");
        }
    }

    #[test]
    fn tiny_angle_round_trip() {
        let omega = AxisAngle::new(Vector3::new(1e-10, -2e-10, 5e-11)).unwrap();
        let back = so3_log(&so3_exp(&omega));
        assert_relative_eq!(back.vector(), omega.vector(), epsilon = 1e-20);
    }

    #[test]
    fn composition_preserves_orthonormality() {
        let mut rng = DetRng::new(3);
        let mut r = Rotation::identity();
        for _ in 0..100 {
            r = r.compose(&so3_exp(&random_axis_angle(&mut rng, PI - 1e-3)));
        }
        assert!(orthonormality_error(r.matrix()) < 1e-7);
        assert!((r.matrix().determinant() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn geodesic_distance_symmetric_and_triangle() {
        let mut rng = DetRng::new(5);
        for _ in 0..200 {
            let a = so3_exp(&random_axis_angle(&mut rng, PI - 1e-2));
            let b = so3_exp(&random_axis_angle(&mut rng, PI - 1e-2));
            let c = so3_exp(&random_axis_angle(&mut rng, PI - 1e-2));
            let ab = a.geodesic_angle_to(&b);
            let ba = b.geodesic_angle_to(&a);
            assert_relative_eq!(ab, ba, epsilon = 1e-9);
            let ac = a.geodesic_angle_to(&c);
            let cb = c.geodesic_angle_to(&b);
            assert!(ab <= ac + cb + 1e-9);
        }
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let motion = RigidMotion::new(
            so3_exp(&AxisAngle::new(Vector3::new(0.1, 0.2, -0.3)).unwrap()),
            Vector3::new(1.0, -2.0, 0.5),
        );
        let id = RigidMotion::identity();
        assert_relative_eq!(
            motion.compose(&id).translation,
            motion.translation,
            epsilon = 1e-15
        );
        let round = motion.compose(&motion.inverse());
        assert!(orthonormality_error(round.rotation.matrix()) < 1e-9);
        assert!(round.rotation.geodesic_angle_to(&Rotation::identity()) < 1e-9);
        assert!(round.translation.norm() < 1e-9);
    }

    #[test]
    fn axis_aligned_translations_sum() {
        let a = RigidMotion::new(Rotation::identity(), Vector3::new(1.0, 0.0, 0.0));
        let b = RigidMotion::new(Rotation::identity(), Vector3::new(0.0, 2.0, 0.0));
        let ab = a.compose(&b);
        assert_eq!(ab.translation, Vector3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn lift_principal_point_and_unit_offset() {
        let k = CameraIntrinsics::new(500.0, 480.0, 320.0, 240.0, 640, 480).unwrap();
        let center = k.lift(&Pixel::new(320.0, 240.0), 2.5).unwrap();
        assert_relative_eq!(center, Vector3::new(0.0, 0.0, 2.5), epsilon = 1e-15);
        let offset = k.lift(&Pixel::new(320.0 + 500.0, 240.0), 1.0).unwrap();
        assert_relative_eq!(offset, Vector3::new(1.0, 0.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn lift_rejects_non_positive_depth() {
        let k = CameraIntrinsics::new(500.0, 480.0, 320.0, 240.0, 640, 480).unwrap();
        assert!(matches!(
            k.lift(&Pixel::new(10.0, 10.0), 0.0),
            Err(GeomError::NonPositiveDepth(_))
        ));
        assert!(matches!(
            k.lift(&Pixel::new(10.0, 10.0), -1.0),
            Err(GeomError::NonPositiveDepth(_))
        ));
    }

    #[test]
    fn project_named_points() {
        let k = CameraIntrinsics::new(500.0, 480.0, 320.0, 240.0, 640, 480).unwrap();
        let p = k.project(&Vector3::new(0.0, 0.0, 5.0)).unwrap();
        assert_relative_eq!(p.u, 320.0, epsilon = 1e-12);
        assert_relative_eq!(p.v, 240.0, epsilon = 1e-12);
        let q = k.project(&Vector3::new(1.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(q.u, 320.0 + 500.0, epsilon = 1e-12);
    }

    #[test]
    fn project_rejects_points_behind_camera() {
        let k = CameraIntrinsics::new(500.0, 480.0, 320.0, 240.0, 640, 480).unwrap();
        assert!(matches!(
            k.project(&Vector3::new(0.0, 0.0, -1.0)),
            Err(GeomError::BehindCamera(_))
        ));
    }

    #[test]
    fn lift_project_round_trip() {
        let k = CameraIntrinsics::new(525.0, 510.0, 319.5, 239.5, 640, 480).unwrap();
        let mut rng = DetRng::new(17);
        for _ in 0..1000 {
            let p = Pixel::new(rng.range(0.0, 639.0), rng.range(0.0, 479.0));
            let depth = rng.range(0.1, 50.0);
            let x = k.lift(&p, depth).unwrap();
            let q = k.project(&x).unwrap();
            assert_relative_eq!(q.u, p.u, epsilon = 1e-9);
            assert_relative_eq!(q.v, p.v, epsilon = 1e-9);
        }
    }

    #[test]
    fn bearing_named_directions() {
        let k = CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0, 640, 480).unwrap();
        let axis = k.bearing(&Pixel::new(320.0, 240.0));
        assert_relative_eq!(axis, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
        let diag = k.bearing(&Pixel::new(820.0, 240.0));
        let expected = Vector3::new(1.0, 0.0, 1.0) / 2.0f64.sqrt();
        assert_relative_eq!(diag, expected, epsilon = 1e-12);
        assert_relative_eq!(diag.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bearing_of_projected_point_is_parallel() {
        let k = CameraIntrinsics::new(470.0, 505.0, 315.0, 250.0, 640, 480).unwrap();
        let mut rng = DetRng::new(29);
        for _ in 0..500 {
            let x = Vector3::new(rng.range(-3.0, 3.0), rng.range(-2.0, 2.0), rng.range(0.5, 20.0));
            let p = k.project(&x).unwrap();
            let f = k.bearing(&p);
            let cos = f.dot(&x.normalize());
            assert!(cos > 1.0 - 1e-12, "bearing not parallel: cos = {cos}");
        }
    }

    #[test]
    fn intrinsics_validation() {
        assert!(CameraIntrinsics::new(0.0, 1.0, 0.0, 0.0, 10, 10).is_err());
        assert!(CameraIntrinsics::new(1.0, 1.0, 10.0, 0.0, 10, 10).is_err());
        assert!(CameraIntrinsics::new(1.0, 1.0, 5.0, 5.0, 10, 10).is_ok());
    }

    #[test]
    fn from_matrix_rejects_non_rotation() {
        let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Rotation::from_matrix(m).is_err());
    }

    #[test]
    fn nearest_recovers_noisy_rotation() {
        let mut rng = DetRng::new(31);
        let r = so3_exp(&random_axis_angle(&mut rng, 2.0));
        let mut noisy = *r.matrix();
        for i in 0..3 {
            for j in 0..3 {
                noisy[(i, j)] += rng.range(-1e-4, 1e-4);
            }
        }
        let projected = Rotation::nearest(&noisy);
        assert!(orthonormality_error(projected.matrix()) < 1e-12);
        assert!(projected.geodesic_angle_to(&r) < 1e-3);
    }

    #[test]
    fn axis_angle_rejects_non_canonical() {
        assert!(AxisAngle::new(Vector3::new(4.0, 0.0, 0.0)).is_err());
        assert!(AxisAngle::new(Vector3::new(f64::NAN, 0.0, 0.0)).is_err());
    }
}
