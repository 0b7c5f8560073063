//! Closed-form eigen decomposition of symmetric 3x3 matrices.
//!
//! Eigenvalues come from the trigonometric solution of the characteristic
//! polynomial; eigenvectors from cross products of the rows of A - lambda I.
//! When the extraction is ill-conditioned (nearly repeated eigenvalues) the
//! solver falls back to cyclic Jacobi iteration.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SymEigen3 {
    pub values: [f64; 3],
    pub vectors: [Vector3<f64>; 3],
}

/// Eigenvalues only, ascending. Cheaper than the full decomposition; used
/// in inner optimization loops.
pub fn sym_eigenvalues3(a: &Matrix3<f64>) -> [f64; 3] {
    let scale = max_abs(a);
    if scale == 0.0 {
        return [0.0; 3];
    }
    let b = a / scale;
    let [l0, l1, l2] = scaled_eigenvalues(&b);
    [l0 * scale, l1 * scale, l2 * scale]
}

/// Full symmetric eigen decomposition.
pub fn sym_eigen3(a: &Matrix3<f64>) -> SymEigen3 {
    let scale = max_abs(a);
    if scale == 0.0 {
        return SymEigen3 {
            values: [0.0; 3],
            vectors: [Vector3::x(), Vector3::y(), Vector3::z()],
        };
    }
    let b = a / scale;
    let values = scaled_eigenvalues(&b);
    let spread = (values[2] - values[0]).max(f64::EPSILON);

    // Pick the extreme eigenvalue with the larger gap first: its eigenvector
    // is the best conditioned.
    let gap_bottom = values[1] - values[0];
    let gap_top = values[2] - values[1];
    let (first, second) = if gap_bottom >= gap_top { (0, 2) } else { (2, 0) };

    let v_first = match null_vector(&(b - Matrix3::identity() * values[first]), spread) {
        Some(v) => v,
        None => return jacobi_fallback(&b, scale),
    };
    let v_second = match null_vector(&(b - Matrix3::identity() * values[second]), spread) {
        Some(v) => {
            // Re-orthogonalize against the well-conditioned vector.
            let w = v - v_first * v_first.dot(&v);
            let n = w.norm();
            if n < 1e-6 {
                return jacobi_fallback(&b, scale);
            }
            w / n
        }
        // Repeated eigenvalue: any direction orthogonal to v_first works.
        None => orthogonal_to(&v_first),
    };
    let v_mid = match (first, second) {
        (0, 2) => v_first.cross(&v_second),
        _ => v_second.cross(&v_first),
    };
    let (v0, v2) = if first == 0 {
        (v_first, v_second)
    } else {
        (v_second, v_first)
    };

    let result = SymEigen3 {
        values: [values[0] * scale, values[1] * scale, values[2] * scale],
        vectors: [v0, v_mid, v2],
    };
    if residual(a, &result) > 1e-10 * scale {
        return jacobi_fallback(&b, scale);
    }
    result
}

fn max_abs(a: &Matrix3<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Trigonometric eigenvalues of a symmetric matrix with entries of order 1,
/// ascending.
fn scaled_eigenvalues(b: &Matrix3<f64>) -> [f64; 3] {
    let p1 = b[(0, 1)].powi(2) + b[(0, 2)].powi(2) + b[(1, 2)].powi(2);
    let q = b.trace() / 3.0;
    if p1 < 1e-30 {
        let mut d = [b[(0, 0)], b[(1, 1)], b[(2, 2)]];
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return d;
    }
    let p2 = (b[(0, 0)] - q).powi(2) + (b[(1, 1)] - q).powi(2) + (b[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let m = (b - Matrix3::identity() * q) / p;
    let r = (m.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [smallest, middle, largest]
}

/// Unit null vector of a (nearly) rank-2 symmetric matrix via the largest
/// cross product of its rows. `None` when the null space is not
/// one-dimensional at working precision.
fn null_vector(c: &Matrix3<f64>, spread: f64) -> Option<Vector3<f64>> {
    let r0: Vector3<f64> = c.row(0).transpose();
    let r1: Vector3<f64> = c.row(1).transpose();
    let r2: Vector3<f64> = c.row(2).transpose();
    let candidates = [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)];
    let mut best = candidates[0];
    let mut best_norm = best.norm_squared();
    for cand in &candidates[1..] {
        let n = cand.norm_squared();
        if n > best_norm {
            best = *cand;
            best_norm = n;
        }
    }
    let threshold = (1e-8 * spread * spread).powi(2);
    if best_norm <= threshold {
        return None;
    }
    Some(best / best_norm.sqrt())
}

fn orthogonal_to(v: &Vector3<f64>) -> Vector3<f64> {
    let trial = if v.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let w = trial - v * v.dot(&trial);
    w.normalize()
}

fn residual(a: &Matrix3<f64>, e: &SymEigen3) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        worst = worst.max((a * e.vectors[k] - e.vectors[k] * e.values[k]).norm());
    }
    worst
}

fn jacobi_fallback(b: &Matrix3<f64>, scale: f64) -> SymEigen3 {
    let mut a = *b;
    let mut v = Matrix3::identity();
    for _ in 0..64 {
        // Largest off-diagonal element.
        let (mut p, mut q, mut max) = (0, 1, a[(0, 1)].abs());
        if a[(0, 2)].abs() > max {
            p = 0;
            q = 2;
            max = a[(0, 2)].abs();
        }
        if a[(1, 2)].abs() > max {
            p = 1;
            q = 2;
            max = a[(1, 2)].abs();
        }
        if max < 1e-15 {
            break;
        }
        let app = a[(p, p)];
        let aqq = a[(q, q)];
        let apq = a[(p, q)];
        let theta = 0.5 * (aqq - app) / apq;
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let mut rot = Matrix3::identity();
        rot[(p, p)] = c;
        rot[(q, q)] = c;
        rot[(p, q)] = s;
        rot[(q, p)] = -s;
        a = rot.transpose() * a * rot;
        v *= rot;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    SymEigen3 {
        values: [
            a[(order[0], order[0])] * scale,
            a[(order[1], order[1])] * scale,
            a[(order[2], order[2])] * scale,
        ],
        vectors: [
            v.column(order[0]).into(),
            v.column(order[1]).into(),
            v.column(order[2]).into(),
        ],
    }
}

/// Largest eigenvalue and eigenvector of a symmetric 4x4 matrix by cyclic
/// Jacobi sweeps. Uniformly accurate for symmetric input, unlike a general
/// SVD whose singular-vector pairing degrades with the condition number.
pub(crate) fn sym_eigen4_max(m: &[[f64; 4]; 4]) -> (f64, [f64; 4]) {
    let mut a = *m;
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let mut off = 0.0f64;
        for (p, row) in a.iter().enumerate() {
            for &entry in row.iter().skip(p + 1) {
                off = off.max(entry.abs());
            }
        }
        if off < 1e-16 * scale {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let phi = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = phi.sin_cos();
                for row in a.iter_mut() {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (row_p, row_q) = (a[p], a[q]);
                for (dst, (&op, &oq)) in a[p].iter_mut().zip(row_p.iter().zip(&row_q)) {
                    *dst = c * op - s * oq;
                }
                for (dst, (&op, &oq)) in a[q].iter_mut().zip(row_p.iter().zip(&row_q)) {
                    *dst = s * op + c * oq;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut best = 0;
    for k in 1..4 {
        if a[k][k] > a[best][best] {
            best = k;
        }
    }
    (
        a[best][best],
        [v[0][best], v[1][best], v[2][best], v[3][best]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;
    use approx::assert_relative_eq;

    /// Textbook cyclic Jacobi sweep, written independently of the library
    /// fallback, as the brute-force oracle.
    fn jacobi_oracle(m: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
        let mut a = *m;
        let mut vecs = Matrix3::<f64>::identity();
        for _ in 0..100 {
            let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
            if off < 1e-32 * m.norm_squared().max(1e-300) {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let phi = 0.5 * (2.0 * a[(p, q)]).atan2(a[(q, q)] - a[(p, p)]);
                let (s, c) = phi.sin_cos();
                let mut g = Matrix3::identity();
                g[(p, p)] = c;
                g[(q, q)] = c;
                g[(p, q)] = s;
                g[(q, p)] = -s;
                a = g.transpose() * a * g;
                vecs *= g;
            }
        }
        let mut vals = [(a[(0, 0)], 0usize), (a[(1, 1)], 1), (a[(2, 2)], 2)];
        vals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let cols: Vec<Vector3<f64>> = vals.iter().map(|&(_, i)| vecs.column(i).into()).collect();
        ([vals[0].0, vals[1].0, vals[2].0], Matrix3::from_columns(&cols))
    }

    fn random_symmetric(rng: &mut DetRng, scale: f64) -> Matrix3<f64> {
        let a = Matrix3::from_fn(|_, _| rng.range(-scale, scale));
        (a + a.transpose()) * 0.5
    }

    fn check_decomposition(a: &Matrix3<f64>, e: &SymEigen3, tol: f64) {
        assert!(e.values[0] <= e.values[1] + tol);
        assert!(e.values[1] <= e.values[2] + tol);
        for k in 0..3 {
            let res = (a * e.vectors[k] - e.vectors[k] * e.values[k]).norm();
            assert!(res < tol, "residual {res} for eigenvalue {}", e.values[k]);
            assert_relative_eq!(e.vectors[k].norm(), 1.0, epsilon = 1e-12);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!(e.vectors[i].dot(&e.vectors[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn diagonal_matrix() {
        let a = Matrix3::from_diagonal(&Vector3::new(3.0, 2.0, 1.0));
        let e = sym_eigen3(&a);
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[2], 3.0, epsilon = 1e-14);
        assert_relative_eq!(e.vectors[0].z.abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rank_one_matrix() {
        // All columns along z: M = n * z z^T.
        let z = Vector3::new(0.0, 0.0, 1.0);
        let a = z * z.transpose() * 4.0;
        let e = sym_eigen3(&a);
        assert!(e.values[0].abs() < 1e-12);
        assert!(e.values[1].abs() < 1e-12);
        assert_relative_eq!(e.values[2], 4.0, epsilon = 1e-12);
        // Min eigenvector lies in the xy-plane.
        assert!(e.vectors[0].z.abs() < 1e-9);
        check_decomposition(&a, &e, 1e-10);
    }

    #[test]
    fn matches_jacobi_oracle_on_random_matrices() {
        let mut rng = DetRng::new(101);
        for _ in 0..2000 {
            let a = random_symmetric(&mut rng, 5.0);
            let e = sym_eigen3(&a);
            let (vals, _) = jacobi_oracle(&a);
            for k in 0..3 {
                assert_relative_eq!(e.values[k], vals[k], epsilon = 1e-9, max_relative = 1e-9);
            }
            check_decomposition(&a, &e, 1e-9);
        }
    }

    #[test]
    fn matches_oracle_on_psd_covariances() {
        let mut rng = DetRng::new(55);
        for _ in 0..500 {
            // Covariance of random bearings: the F2F shape of input.
            let mut m = Matrix3::zeros();
            for _ in 0..40 {
                let n = rng.unit_vector() * rng.range(0.0, 0.3);
                m += n * n.transpose();
            }
            let e = sym_eigen3(&m);
            let (vals, _) = jacobi_oracle(&m);
            for k in 0..3 {
                assert_relative_eq!(e.values[k], vals[k], epsilon = 1e-9, max_relative = 1e-9);
            }
            assert!(e.values[0] >= -1e-12);
            check_decomposition(&m, &e, 1e-9);
        }
    }

    #[test]
    fn repeated_eigenvalues_return_valid_basis() {
        // lambda = (1, 1, 5): degenerate pair.
        let v = Vector3::new(1.0, 2.0, 2.0).normalize();
        let a = Matrix3::identity() + v * v.transpose() * 4.0;
        let e = sym_eigen3(&a);
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(e.values[2], 5.0, epsilon = 1e-10);
        check_decomposition(&a, &e, 1e-9);
    }

    #[test]
    fn isotropic_matrix() {
        let a = Matrix3::identity() * 2.5;
        let e = sym_eigen3(&a);
        for k in 0..3 {
            assert_relative_eq!(e.values[k], 2.5, epsilon = 1e-12);
        }
        check_decomposition(&a, &e, 1e-10);
    }

    #[test]
    fn zero_matrix() {
        let e = sym_eigen3(&Matrix3::zeros());
        assert_eq!(e.values, [0.0; 3]);
    }

    #[test]
    fn eigenvalues_only_agrees_with_full() {
        let mut rng = DetRng::new(77);
        for _ in 0..500 {
            let a = random_symmetric(&mut rng, 2.0);
            let vals = sym_eigenvalues3(&a);
            let e = sym_eigen3(&a);
            for k in 0..3 {
                assert_relative_eq!(vals[k], e.values[k], epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn tiny_scale_matrices_keep_relative_accuracy() {
        let mut rng = DetRng::new(88);
        for _ in 0..200 {
            let a = random_symmetric(&mut rng, 1e-12);
            let e = sym_eigen3(&a);
            let (vals, _) = jacobi_oracle(&a);
            for k in 0..3 {
                assert!((e.values[k] - vals[k]).abs() < 1e-21);
            }
        }
    }
}
