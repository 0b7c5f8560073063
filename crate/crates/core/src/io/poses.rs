//! KITTI odometry pose files: one line per frame with the 12 row-major
//! entries of the upper 3x4 of the camera-to-world matrix.

use super::{fmt_f64, parse_f64, FormatError};
use crate::se3::{orthonormality_error, RigidMotion, Rotation};
use nalgebra::{Matrix3, Vector3};

/// Parsed poses plus the indices of lines whose rotation block violated
/// orthonormality by more than 1e-6 and was projected back onto SO(3).
#[derive(Debug, Clone)]
pub struct PoseLoad {
    pub poses: Vec<RigidMotion>,
    pub reorthonormalized: Vec<usize>,
}

pub fn parse_pose_file(text: &str) -> Result<PoseLoad, FormatError> {
    let mut poses = Vec::new();
    let mut reorthonormalized = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 12 {
            return Err(FormatError::at(
                line_no,
                format!("expected 12 values per pose line, got {}", tokens.len()),
            ));
        }
        let mut values = [0.0f64; 12];
        for (k, token) in tokens.iter().enumerate() {
            values[k] = parse_f64(token, line_no, "pose entry")?;
            if !values[k].is_finite() {
                return Err(FormatError::at(line_no, "pose entry is not finite"));
            }
        }
        let m = Matrix3::new(
            values[0], values[1], values[2], //
            values[4], values[5], values[6], //
            values[8], values[9], values[10],
        );
        let translation = Vector3::new(values[3], values[7], values[11]);
        let rotation = match Rotation::from_matrix(m) {
            Ok(r) => r,
            Err(_) => {
                let err = orthonormality_error(&m);
                let det = m.determinant();
                if err > 0.5 || det < 0.0 {
                    return Err(FormatError::at(
                        line_no,
                        format!("rotation block too far from SO(3): orthonormality {err:.3e}, det {det:.3}"),
                    ));
                }
                reorthonormalized.push(poses.len());
                Rotation::nearest(&m)
            }
        };
        poses.push(RigidMotion::new(rotation, translation));
    }
    if poses.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(PoseLoad {
        poses,
        reorthonormalized,
    })
}

pub fn write_pose_file(poses: &[RigidMotion]) -> String {
    let mut out = String::new();
    for pose in poses {
        let r = pose.rotation.matrix();
        let t = pose.translation;
        let row = [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t.x,
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t.y,
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t.z,
        ];
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
