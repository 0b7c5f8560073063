//! File formats: 2D match lists, KITTI-style pose files, binary depth maps,
//! PGM/PPM images and the TOML configs.
//!
//! Text formats write floats with 17 significant digits, which round-trips
//! f64 exactly; the depth format stores raw little-endian f32.

mod config;
mod depth;
mod matches;
mod pnm;
mod poses;

pub use config::{parse_run_config, parse_scene_config, InitChoice, RunConfig, SceneFileConfig};
pub use depth::{parse_depth_file, write_depth_file, DEPTH_MAGIC};
pub use matches::{parse_match_file, write_match_file, MatchPairBlock, MatchRecord};
pub use pnm::{parse_pnm, write_pgm, write_ppm};
pub use poses::{parse_pose_file, write_pose_file, PoseLoad};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty file")]
    Empty,
    #[error("bad magic: expected {expected}")]
    BadMagic { expected: &'static str },
    #[error("truncated file: expected {expected} bytes of payload, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

impl FormatError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Formats a float with 17 significant digits (exact f64 round-trip).
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn parse_f64(token: &str, line: usize, what: &str) -> Result<f64, FormatError> {
    token
        .parse::<f64>()
        .map_err(|_| FormatError::at(line, format!("invalid {what}: {token:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips_exactly() {
        let values = [
            0.0,
            -0.0,
            1.0,
            std::f64::consts::PI,
            1e-300,
            -3.141592653589793e59,
            f64::MIN_POSITIVE,
            0.1 + 0.2,
        ];
        for &v in &values {
            let text = fmt_f64(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "value {v} via {text}");
        }
    }
}
