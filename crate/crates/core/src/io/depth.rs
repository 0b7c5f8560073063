//! Binary depth-map format:
//! magic `DPF1`, width and height as little-endian u32, then width*height
//! little-endian f32 values in row-major order. Non-positive or non-finite
//! values mark invalid pixels.

use super::FormatError;
use crate::image::DepthMap;

pub const DEPTH_MAGIC: &[u8; 4] = b"DPF1";

pub fn parse_depth_file(bytes: &[u8]) -> Result<DepthMap, FormatError> {
    if bytes.len() < 12 {
        return Err(FormatError::Truncated {
            expected: 12,
            got: bytes.len(),
        });
    }
    if &bytes[0..4] != DEPTH_MAGIC {
        return Err(FormatError::BadMagic { expected: "DPF1" });
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if width == 0 || height == 0 {
        return Err(FormatError::Invalid(format!(
            "zero-sized depth map {width}x{height}"
        )));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| FormatError::Invalid("dimension overflow".into()))?;
    let expected = count
        .checked_mul(4)
        .ok_or_else(|| FormatError::Invalid("dimension overflow".into()))?;
    let payload = &bytes[12..];
    if payload.len() != expected {
        return Err(FormatError::Truncated {
            expected,
            got: payload.len(),
        });
    }
    let mut data = Vec::with_capacity(count);
    let mut valid = Vec::with_capacity(count);
    for chunk in payload.chunks_exact(4) {
        let v = f32::from_le_bytes(chunk.try_into().unwrap()) as f64;
        valid.push(v.is_finite() && v > 0.0);
        data.push(v);
    }
    DepthMap::new(width, height, data, valid).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_depth_file(depth: &DepthMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + depth.data().len() * 4);
    out.extend_from_slice(DEPTH_MAGIC);
    out.extend_from_slice(&(depth.width() as u32).to_le_bytes());
    out.extend_from_slice(&(depth.height() as u32).to_le_bytes());
    for (&value, &ok) in depth.data().iter().zip(depth.validity()) {
        let stored = if ok { value as f32 } else { (-1.0f64).min(value) as f32 };
        out.extend_from_slice(&stored.to_le_bytes());
    }
    out
}
