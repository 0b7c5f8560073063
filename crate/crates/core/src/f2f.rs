//! Frame-to-frame rotation solver based on the coplanarity of epipolar-plane
//! normals.
//!
//! For matched unit bearings (f, f') the vectors n_i = f_i x R f'_i are the
//! normals of the epipolar planes. At the true rotation they are coplanar, so
//! the covariance M = N N^T drops to rank 2 and its smallest eigenvalue
//! vanishes. The solver minimizes lambda_min(M(R)) over rotations with a
//! Levenberg-Marquardt iteration on left-multiplied so(3) increments; the
//! eigenvector of the smallest eigenvalue at the solution is the translation
//! direction (up to sign). One deterministic optimization over all filtered
//! matches; no sampling.
//!
//! Each iteration takes the gradient and Hessian of the scalar objective by
//! central finite differences along the so(3) axes and applies the damped
//! (Levenberg) update (H + mu I) delta = -g, accepting steps only when the
//! objective decreases, so lambda_min is non-increasing across accepted
//! steps. The rank-one Gauss-Newton model of the scalar residual is not used:
//! because lambda_min vanishes quadratically at the optimum on clean data,
//! that model systematically half-steps and converges too slowly to reach
//! the accuracy budget within the iteration cap.

use crate::eigen::{sym_eigen3, sym_eigenvalues3};
use crate::se3::{exp_vec, CameraIntrinsics, Pixel, RigidMotion, Rotation};
use crate::so3_log;
use nalgebra::{Matrix3, Matrix3xX, Vector3};
use thiserror::Error;

/// Minimum number of (filtered) matches the solver accepts.
pub const MIN_MATCHES: usize = 5;

#[derive(Debug, Error)]
pub enum F2fError {
    #[error("need at least {needed} matches after confidence filtering, got {got}")]
    InsufficientMatches { got: usize, needed: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("bearing vector has near-zero norm")]
    DegenerateBearing,
    #[error("confidence {0} outside [0, 1]")]
    InvalidConfidence(f64),
}

/// One matched pair of unit bearing vectors with an optional match
/// confidence.
#[derive(Debug, Clone, Copy)]
pub struct BearingPair {
    pub f: Vector3<f64>,
    pub f_prime: Vector3<f64>,
    pub confidence: Option<f64>,
}

/// Matched unit bearings for one frame pair.
#[derive(Debug, Clone)]
pub struct BearingPairSet {
    frames: (usize, usize),
    pairs: Vec<BearingPair>,
}

impl BearingPairSet {
    /// Builds a set from raw direction vectors, normalizing each to unit
    /// length. Near-zero vectors and out-of-range confidences are rejected.
    pub fn new(frames: (usize, usize), pairs: Vec<BearingPair>) -> Result<Self, F2fError> {
        let mut normalized = Vec::with_capacity(pairs.len());
        for pair in pairs {
            let nf = pair.f.norm();
            let nfp = pair.f_prime.norm();
            if nf < 1e-9 || nfp < 1e-9 {
                return Err(F2fError::DegenerateBearing);
            }
            if let Some(c) = pair.confidence {
                if !(0.0..=1.0).contains(&c) {
                    return Err(F2fError::InvalidConfidence(c));
                }
            }
            normalized.push(BearingPair {
                f: pair.f / nf,
                f_prime: pair.f_prime / nfp,
                confidence: pair.confidence,
            });
        }
        Ok(BearingPairSet {
            frames,
            pairs: normalized,
        })
    }

    /// Converts pixel matches to bearings through the camera model.
    pub fn from_pixel_matches(
        k: &CameraIntrinsics,
        frames: (usize, usize),
        matches: &[(Pixel, Pixel, Option<f64>)],
    ) -> Result<Self, F2fError> {
        let pairs = matches
            .iter()
            .map(|(p, p_prime, conf)| BearingPair {
                f: k.bearing(p),
                f_prime: k.bearing(p_prime),
                confidence: *conf,
            })
            .collect();
        BearingPairSet::new(frames, pairs)
    }

    pub fn frames(&self) -> (usize, usize) {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[BearingPair] {
        &self.pairs
    }

    /// Pairs whose confidence passes the threshold. Pairs without a
    /// confidence are always kept.
    pub fn filtered(&self, min_confidence: f64) -> Vec<BearingPair> {
        self.pairs
            .iter()
            .filter(|p| p.confidence.is_none_or(|c| c >= min_confidence))
            .copied()
            .collect()
    }
}

/// Levenberg-Marquardt settings for the rotation solve.
#[derive(Debug, Clone, Copy)]
pub struct F2fConfig {
    pub max_iterations: usize,
    /// Stop when the proposed so(3) step falls below this norm.
    pub param_tol: f64,
    /// Stop when an accepted step decreases the objective by less than this
    /// fraction of its value.
    pub objective_tol: f64,
    pub damping_init: f64,
    pub damping_up: f64,
    pub damping_down: f64,
    /// Central-difference step for the objective's gradient and Hessian.
    pub fd_step: f64,
    /// Matches below this confidence are dropped before solving.
    pub confidence_threshold: f64,
}

impl Default for F2fConfig {
    fn default() -> Self {
        F2fConfig {
            max_iterations: 100,
            param_tol: 1e-10,
            objective_tol: 1e-12,
            damping_init: 1e-3,
            damping_up: 10.0,
            damping_down: 0.1,
            fd_step: 1e-7,
            confidence_threshold: 0.9,
        }
    }
}

impl F2fConfig {
    pub fn validate(&self) -> Result<(), F2fError> {
        let fields = [
            ("max_iterations", self.max_iterations as f64),
            ("param_tol", self.param_tol),
            ("objective_tol", self.objective_tol),
            ("damping_init", self.damping_init),
            ("damping_up", self.damping_up),
            ("damping_down", self.damping_down),
            ("fd_step", self.fd_step),
            ("confidence_threshold", self.confidence_threshold),
        ];
        for (name, value) in fields {
            let positive = value.is_finite() && value > 0.0;
            if !positive {
                return Err(F2fError::NumericalFailure(format!(
                    "config field {name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Initialization of the rotation iterate.
#[derive(Debug, Clone, Copy)]
pub enum InitMode {
    Identity,
    /// Previous frame pair's solved relative rotation.
    ConstantMotion(Rotation),
    /// External prior, e.g. a pose-network prediction.
    Prior(Rotation),
}

impl InitMode {
    fn rotation(&self) -> Rotation {
        match self {
            InitMode::Identity => Rotation::identity(),
            InitMode::ConstantMotion(r) | InitMode::Prior(r) => *r,
        }
    }
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct F2fSolution {
    pub rotation: Rotation,
    /// Unit eigenvector of the smallest eigenvalue; sign-ambiguous, and
    /// meaningless under pure rotation (see `translation_reliability`).
    pub translation_direction: Vector3<f64>,
    pub lambda_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Epipolar-plane normals n_i = f_i x (R f'_i), one column per match.
/// Columns may be zero where f_i is parallel to R f'_i.
pub fn epipolar_normals(pairs: &BearingPairSet, r: &Rotation) -> Matrix3xX<f64> {
    let mut n = Matrix3xX::zeros(pairs.len());
    for (i, pair) in pairs.pairs().iter().enumerate() {
        let ni = pair.f.cross(&r.rotate(&pair.f_prime));
        n.set_column(i, &ni);
    }
    n
}

/// Smallest eigenvalue of M = N N^T and its unit eigenvector. With repeated
/// eigenvalues the returned vector is an arbitrary member of the eigenspace.
///
/// The eigenvalue is reported as the cancellation-free quadratic form
/// sum_i (n_i . v)^2, which stays accurate down to machine zero where the
/// characteristic-polynomial root is floored at eps * ||M||.
pub fn covariance_min_eig(n: &Matrix3xX<f64>) -> (f64, Vector3<f64>) {
    let m = n * n.transpose();
    let e = sym_eigen3(&m);
    let v = e.vectors[0];
    let lambda = (0..n.ncols())
        .map(|i| Vector3::from(n.column(i)).dot(&v).powi(2))
        .sum();
    (lambda, v)
}

fn covariance(pairs: &[BearingPair], r: &Matrix3<f64>) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for pair in pairs {
        let n = pair.f.cross(&(r * pair.f_prime));
        m += n * n.transpose();
    }
    m
}

/// Minimal eigenvector of the covariance at `r` with lambda_min evaluated as
/// sum_i (n_i . v)^2.
fn min_eig_state(
    pairs: &[BearingPair],
    r: &Matrix3<f64>,
) -> Result<(f64, Vector3<f64>), F2fError> {
    let m = covariance(pairs, r);
    if !m.iter().all(|x| x.is_finite()) {
        return Err(F2fError::NumericalFailure("covariance not finite".into()));
    }
    let eig = sym_eigen3(&m);
    let v = eig.vectors[0];
    let lambda = pairs
        .iter()
        .map(|p| p.f.cross(&(r * p.f_prime)).dot(&v).powi(2))
        .sum::<f64>();
    Ok((lambda, v))
}

/// Per-match objective floor at which the coplanarity constraint counts as
/// satisfied to machine precision; iterating further only walks rounding
/// noise.
const LAMBDA_MACHINE_FLOOR_PER_MATCH: f64 = 1e-17;

struct LmRun {
    r: Matrix3<f64>,
    lambda: f64,
    iterations: usize,
    converged: bool,
}

/// One damped-Newton descent on lambda_min from `init`. An iteration
/// evaluates the central-difference gradient and Hessian of the objective
/// once, then adjusts the damping until a step is accepted or the proposed
/// step drops below the parameter tolerance. Quadratic local convergence
/// keeps iteration counts small, so a better initialization shows up
/// directly as fewer iterations.
fn lm_descent(
    filtered: &[BearingPair],
    init: &Matrix3<f64>,
    cfg: &F2fConfig,
) -> Result<LmRun, F2fError> {
    let n = filtered.len();
    let floor = LAMBDA_MACHINE_FLOOR_PER_MATCH * n as f64;
    let mut r = *init;
    let (mut value, _) = min_eig_state(filtered, &r)?;
    if value <= floor {
        return Ok(LmRun {
            r,
            lambda: value,
            iterations: 0,
            converged: true,
        });
    }

    let objective = |m: &Matrix3<f64>| -> Result<f64, F2fError> {
        min_eig_state(filtered, m).map(|(lambda, _)| lambda)
    };
    let h = cfg.fd_step;

    let mut mu = cfg.damping_init;
    let mut iterations = 0;
    let mut converged = false;

    'outer: while iterations < cfg.max_iterations {
        iterations += 1;

        let mut axis_step = [Vector3::zeros(); 3];
        for (k, step) in axis_step.iter_mut().enumerate() {
            step[k] = h;
        }
        let mut gradient = Vector3::zeros();
        let mut hessian = Matrix3::zeros();
        for k in 0..3 {
            let plus = objective(&(exp_vec(&axis_step[k]) * r))?;
            let minus = objective(&(exp_vec(&-axis_step[k]) * r))?;
            gradient[k] = (plus - minus) / (2.0 * h);
            hessian[(k, k)] = (plus - 2.0 * value + minus) / (h * h);
        }
        for (k, l) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let pp = objective(&(exp_vec(&(axis_step[k] + axis_step[l])) * r))?;
            let pm = objective(&(exp_vec(&(axis_step[k] - axis_step[l])) * r))?;
            let mp = objective(&(exp_vec(&(axis_step[l] - axis_step[k])) * r))?;
            let mm = objective(&(exp_vec(&(-axis_step[k] - axis_step[l])) * r))?;
            let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
            hessian[(k, l)] = mixed;
            hessian[(l, k)] = mixed;
        }
        if !gradient.iter().all(|x| x.is_finite()) || !hessian.iter().all(|x| x.is_finite()) {
            return Err(F2fError::NumericalFailure("derivatives not finite".into()));
        }

        loop {
            let damped = hessian + Matrix3::identity() * mu;
            let Some(delta) = damped.cholesky().map(|c| c.solve(&-gradient)) else {
                // Indefinite away from the optimum: raise the damping until
                // the model is positive definite.
                mu *= cfg.damping_up;
                if !mu.is_finite() {
                    return Err(F2fError::NumericalFailure("damping diverged".into()));
                }
                continue;
            };
            if delta.norm() < cfg.param_tol {
                converged = true;
                break 'outer;
            }

            let candidate = exp_vec(&delta) * r;
            let candidate_value = objective(&candidate)?;
            if candidate_value < value {
                let decrease = value - candidate_value;
                let previous = value;
                r = candidate;
                value = candidate_value;
                mu *= cfg.damping_down;
                if value <= floor || decrease < cfg.objective_tol * previous.abs() {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            mu *= cfg.damping_up;
            if !mu.is_finite() {
                return Err(F2fError::NumericalFailure("damping diverged".into()));
            }
        }
    }

    Ok(LmRun {
        r,
        lambda: value,
        iterations,
        converged,
    })
}

/// Relative floor under which lambda_min counts as an exact coplanarity
/// solution and no restart is attempted.
const RETRY_LAMBDA_FLOOR_PER_MATCH: f64 = 1e-14;
/// Eigen-gap ratio above which a converged solution looks like a spurious
/// basin rather than a rank-2 covariance.
const RETRY_GAP_RATIO: f64 = 0.05;
/// Magnitudes of the deterministic restart lattice around the initialization.
const RETRY_ANGLES: [f64; 2] = [0.35, 0.7];

/// Minimizes lambda_min(M(R)) over rotations.
///
/// Damped Newton (Levenberg-Marquardt style) iteration with derivatives by
/// central finite differences, iterate updates R <- exp(delta) R.
///
/// Two globalization safeguards keep the descent on the physical solution,
/// both deterministic; the reported iteration count sums all descents.
/// First, the landscape has spurious local basins: when the converged
/// lambda_min is above the machine floor and not well separated from the
/// middle eigenvalue, the descent re-runs from a fixed lattice of axis
/// rotations composed with the initialization and the best objective wins.
/// Second, the twisted-pair counterpart (a half turn about the translation
/// direction composed with the solution) zeroes the coplanarity residuals
/// exactly as well, since \[t\]x (2 t t^T - I) = -\[t\]x; the objective cannot
/// tell the two apart, so the solver polishes the twisted candidate and
/// keeps whichever triangulates more matches in front of both cameras.
pub fn solve_f2f(
    pairs: &BearingPairSet,
    init: &InitMode,
    cfg: &F2fConfig,
) -> Result<F2fSolution, F2fError> {
    cfg.validate()?;
    let filtered = pairs.filtered(cfg.confidence_threshold);
    if filtered.len() < MIN_MATCHES {
        return Err(F2fError::InsufficientMatches {
            got: filtered.len(),
            needed: MIN_MATCHES,
        });
    }

    let init_matrix = *init.rotation().matrix();
    let mut best = lm_descent(&filtered, &init_matrix, cfg)?;
    let mut iterations = best.iterations;

    if needs_restart(&filtered, &best) {
        for angle in RETRY_ANGLES {
            for axis in 0..3 {
                for sign in [1.0, -1.0] {
                    let mut omega = Vector3::zeros();
                    omega[axis] = sign * angle;
                    let start = exp_vec(&omega) * init_matrix;
                    let run = lm_descent(&filtered, &start, cfg)?;
                    iterations += run.iterations;
                    if run.lambda < best.lambda {
                        best = run;
                    }
                }
            }
        }
    }

    // Twisted-pair disambiguation by cheirality vote. The twist is an
    // involution, so if the descent landed on the spurious branch this
    // recovers the physical one.
    let (_, v_best) = min_eig_state(&filtered, &best.r)?;
    let twist = Matrix3::from(v_best * v_best.transpose() * 2.0) - Matrix3::identity();
    let twisted = lm_descent(&filtered, &(twist * best.r), cfg)?;
    iterations += twisted.iterations;
    let (_, v_twisted) = min_eig_state(&filtered, &twisted.r)?;
    if cheirality_votes(&filtered, &twisted.r, &v_twisted)
        > cheirality_votes(&filtered, &best.r, &v_best)
    {
        best = twisted;
    }

    let rotation = Rotation::nearest(&best.r);
    let (lambda, direction) = min_eig_state(&filtered, rotation.matrix())?;
    Ok(F2fSolution {
        rotation,
        translation_direction: direction,
        lambda_min: lambda,
        iterations,
        converged: best.converged,
    })
}

/// Number of matches triangulating in front of both cameras under rotation
/// `r` and a unit baseline along the better sign of `direction`.
fn cheirality_votes(pairs: &[BearingPair], r: &Matrix3<f64>, direction: &Vector3<f64>) -> usize {
    let count_for = |t: Vector3<f64>| -> usize {
        pairs
            .iter()
            .filter(|pair| {
                // Midpoint ray parameters for rays (origin, f) and (t, R f').
                let d2 = r * pair.f_prime;
                let a = pair.f.dot(&d2);
                let denom = 1.0 - a * a;
                if denom < 1e-12 {
                    return false;
                }
                let b1 = pair.f.dot(&t);
                let b2 = d2.dot(&t);
                let s = (b1 - a * b2) / denom;
                let u = (a * b1 - b2) / denom;
                s > 0.0 && u > 0.0
            })
            .count()
    };
    count_for(*direction).max(count_for(-direction))
}

fn needs_restart(filtered: &[BearingPair], run: &LmRun) -> bool {
    if run.lambda <= RETRY_LAMBDA_FLOOR_PER_MATCH * filtered.len() as f64 {
        return false;
    }
    let eig = sym_eigenvalues3(&covariance(filtered, &run.r));
    run.lambda > RETRY_GAP_RATIO * eig[1].max(f64::MIN_POSITIVE)
}

/// Relative eigen-gap (lambda_mid - lambda_min) / max(lambda_mid, eps) of
/// M = N N^T in [0, 1]. Values near zero mean the null direction of M is not
/// isolated, so the translation direction is unreliable (pure rotation, or
/// too few matches). The floor eps scales with the number of matches since
/// trace(M) is at most n for unit bearings.
pub fn translation_reliability(_solution: &F2fSolution, n: &Matrix3xX<f64>) -> f64 {
    let m = n * n.transpose();
    let values = sym_eigenvalues3(&m);
    let eps = 1e-9 * n.ncols().max(1) as f64;
    let gap = (values[1] - values[0]).max(0.0);
    (gap / values[1].max(eps)).clamp(0.0, 1.0)
}

/// Keeps the predicted translation and replaces the rotation with the
/// solver's.
pub fn adjust_pose(predicted: &RigidMotion, f2f: &F2fSolution) -> RigidMotion {
    RigidMotion::new(f2f.rotation, predicted.translation)
}

/// Residual rotation loss: the L1 norm of the difference of the canonical
/// axis-angle vectors.
pub fn rotation_residual(r_pn: &Rotation, r_f2f: &Rotation) -> f64 {
    let w_pn = so3_log(r_pn).vector();
    let w_f2f = so3_log(r_f2f).vector();
    (w_f2f - w_pn).abs().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;
    use crate::se3::{so3_exp, AxisAngle};
    use approx::assert_relative_eq;

    fn make_pairs(pairs: Vec<(Vector3<f64>, Vector3<f64>)>) -> BearingPairSet {
        BearingPairSet::new(
            (0, 1),
            pairs
                .into_iter()
                .map(|(f, f_prime)| BearingPair {
                    f,
                    f_prime,
                    confidence: None,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn normals_of_parallel_bearings_are_zero() {
        let set = make_pairs(vec![(Vector3::z(), Vector3::z())]);
        let n = epipolar_normals(&set, &Rotation::identity());
        assert_eq!(n.column(0).norm(), 0.0);
    }

    #[test]
    fn normals_follow_cross_product() {
        let set = make_pairs(vec![(Vector3::x(), Vector3::y())]);
        let n = epipolar_normals(&set, &Rotation::identity());
        assert_relative_eq!(
            Vector3::from(n.column(0)),
            Vector3::z(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn covariance_min_eig_rank_one() {
        let mut n = Matrix3xX::zeros(4);
        for i in 0..4 {
            n.set_column(i, &Vector3::z());
        }
        let (lambda, v) = covariance_min_eig(&n);
        assert!(lambda.abs() < 1e-12);
        assert!(v.z.abs() < 1e-9, "eigenvector should lie in the xy-plane");
    }

    #[test]
    fn covariance_min_eig_diagonal() {
        // Columns chosen so N N^T = diag(3, 2, 1).
        let mut n = Matrix3xX::zeros(3);
        n.set_column(0, &(Vector3::x() * 3.0f64.sqrt()));
        n.set_column(1, &(Vector3::y() * 2.0f64.sqrt()));
        n.set_column(2, &Vector3::z());
        let (lambda, v) = covariance_min_eig(&n);
        assert_relative_eq!(lambda, 1.0, epsilon = 1e-12);
        assert_relative_eq!(v.z.abs(), 1.0, epsilon = 1e-9);
    }

    /// Independent Jacobi sweep used as the oracle for the eigen wrapper.
    fn jacobi_min_eig(m: &nalgebra::Matrix3<f64>) -> f64 {
        let mut a = *m;
        for _ in 0..100 {
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let phi = 0.5 * (2.0 * a[(p, q)]).atan2(a[(q, q)] - a[(p, p)]);
                let (s, c) = phi.sin_cos();
                let mut g = nalgebra::Matrix3::identity();
                g[(p, p)] = c;
                g[(q, q)] = c;
                g[(p, q)] = s;
                g[(q, p)] = -s;
                a = g.transpose() * a * g;
            }
        }
        a[(0, 0)].min(a[(1, 1)]).min(a[(2, 2)])
    }

    #[test]
    fn covariance_min_eig_matches_jacobi_oracle() {
        let mut rng = DetRng::new(91);
        for _ in 0..200 {
            let cols = 3 + rng.index(40);
            let mut n = Matrix3xX::zeros(cols);
            for i in 0..cols {
                n.set_column(i, &(rng.unit_vector() * rng.range(0.0, 0.5)));
            }
            let (lambda, v) = covariance_min_eig(&n);
            let m = &n * n.transpose();
            let oracle = jacobi_min_eig(&m.into());
            assert!(
                (lambda - oracle).abs() < 1e-9,
                "lambda {lambda} vs jacobi {oracle}"
            );
            assert!((v.norm() - 1.0).abs() < 1e-9);
            assert!(lambda >= -1e-12);
        }
    }

    #[test]
    fn confidence_filter_keeps_unscored_pairs() {
        let set = BearingPairSet::new(
            (3, 4),
            vec![
                BearingPair {
                    f: Vector3::z(),
                    f_prime: Vector3::z(),
                    confidence: Some(0.95),
                },
                BearingPair {
                    f: Vector3::x(),
                    f_prime: Vector3::x(),
                    confidence: Some(0.5),
                },
                BearingPair {
                    f: Vector3::y(),
                    f_prime: Vector3::y(),
                    confidence: None,
                },
            ],
        )
        .unwrap();
        let kept = set.filtered(0.9);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert!(matches!(
            BearingPairSet::new(
                (0, 1),
                vec![BearingPair {
                    f: Vector3::zeros(),
                    f_prime: Vector3::z(),
                    confidence: None,
                }],
            ),
            Err(F2fError::DegenerateBearing)
        ));
        assert!(matches!(
            BearingPairSet::new(
                (0, 1),
                vec![BearingPair {
                    f: Vector3::z(),
                    f_prime: Vector3::z(),
                    confidence: Some(1.5),
                }],
            ),
            Err(F2fError::InvalidConfidence(_))
        ));
    }

    #[test]
    fn constructor_normalizes_bearings() {
        let set = make_pairs(vec![(Vector3::new(0.0, 0.0, 7.0), Vector3::new(3.0, 0.0, 4.0))]);
        for pair in set.pairs() {
            assert_relative_eq!(pair.f.norm(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(pair.f_prime.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_rejects_insufficient_matches() {
        let set = make_pairs(vec![
            (Vector3::z(), Vector3::z()),
            (Vector3::x(), Vector3::x()),
        ]);
        let err = solve_f2f(&set, &InitMode::Identity, &F2fConfig::default()).unwrap_err();
        assert!(matches!(err, F2fError::InsufficientMatches { got: 2, .. }));
    }

    #[test]
    fn adjust_pose_keeps_translation() {
        let predicted = RigidMotion::new(
            so3_exp(&AxisAngle::new(Vector3::new(0.0, 0.2, 0.0)).unwrap()),
            Vector3::new(1.0, 2.0, 3.0),
        );
        let solution = F2fSolution {
            rotation: so3_exp(&AxisAngle::new(Vector3::new(0.1, 0.0, 0.0)).unwrap()),
            translation_direction: Vector3::z(),
            lambda_min: 0.0,
            iterations: 1,
            converged: true,
        };
        let adjusted = adjust_pose(&predicted, &solution);
        assert_eq!(adjusted.translation, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(adjusted.rotation, solution.rotation);

        let same = F2fSolution {
            rotation: predicted.rotation,
            ..solution
        };
        let unchanged = adjust_pose(&predicted, &same);
        assert_eq!(unchanged.rotation, predicted.rotation);
        assert_eq!(unchanged.translation, predicted.translation);
    }

    #[test]
    fn rotation_residual_named_values() {
        let id = Rotation::identity();
        assert_eq!(rotation_residual(&id, &id), 0.0);
        let r = so3_exp(&AxisAngle::new(Vector3::new(0.1, 0.0, 0.0)).unwrap());
        assert_relative_eq!(rotation_residual(&r, &id), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn rotation_residual_is_symmetric() {
        let mut rng = DetRng::new(13);
        for _ in 0..200 {
            let a = so3_exp(&AxisAngle::new(rng.unit_vector() * rng.range(0.0, 3.0)).unwrap());
            let b = so3_exp(&AxisAngle::new(rng.unit_vector() * rng.range(0.0, 3.0)).unwrap());
            assert_relative_eq!(
                rotation_residual(&a, &b),
                rotation_residual(&b, &a),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn reliability_of_single_pair_is_zero() {
        let set = make_pairs(vec![(Vector3::x(), Vector3::y())]);
        let n = epipolar_normals(&set, &Rotation::identity());
        let solution = F2fSolution {
            rotation: Rotation::identity(),
            translation_direction: Vector3::z(),
            lambda_min: 0.0,
            iterations: 0,
            converged: true,
        };
        assert_eq!(translation_reliability(&solution, &n), 0.0);
    }

    #[test]
    fn config_validation_rejects_zero_fields() {
        let cfg = F2fConfig {
            fd_step: 0.0,
            ..F2fConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
