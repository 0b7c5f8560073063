//! Shared helpers: error-to-exit-code mapping, intrinsics parsing, file IO.

use std::fmt;
use std::path::Path;
use vo_core::io::FormatError;
use vo_core::se3::CameraIntrinsics;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input (exit 2).
    Input(String),
    /// Numerical failure (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn input(context: &str, detail: impl fmt::Display) -> Self {
        CliError::Input(format!("{context}: {detail}"))
    }

    pub fn numerical(context: &str, detail: impl fmt::Display) -> Self {
        CliError::Numerical(format!("{context}: {detail}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(&path.display().to_string(), e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::input(&path.display().to_string(), e))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::input(&path.display().to_string(), e))
}

pub fn format_error(path: &Path, err: FormatError) -> CliError {
    CliError::input(&path.display().to_string(), err)
}

/// Parses `fx,fy,cx,cy,width,height`.
pub fn parse_intrinsics(spec: &str) -> Result<CameraIntrinsics, CliError> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(CliError::Input(format!(
            "intrinsics must be fx,fy,cx,cy,width,height, got {spec:?}"
        )));
    }
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse::<f64>()
            .map_err(|_| CliError::Input(format!("invalid intrinsics value {s:?}")))
    };
    let dim = |s: &str| -> Result<usize, CliError> {
        s.parse::<usize>()
            .map_err(|_| CliError::Input(format!("invalid intrinsics dimension {s:?}")))
    };
    CameraIntrinsics::new(
        num(parts[0])?,
        num(parts[1])?,
        num(parts[2])?,
        num(parts[3])?,
        dim(parts[4])?,
        dim(parts[5])?,
    )
    .map_err(|e| CliError::input("intrinsics", e))
}

/// 17-significant-digit float for deterministic, lossless text output.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn warn_reorthonormalized(path: &Path, indices: &[usize]) {
    if !indices.is_empty() {
        eprintln!(
            "warning: {}: {} pose line(s) re-orthonormalized (first at line {})",
            path.display(),
            indices.len(),
            indices[0] + 1
        );
    }
}
