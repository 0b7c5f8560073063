//! PGM/PPM image parsing and writing.
//!
//! Accepts binary (P5/P6) and ASCII (P2/P3) variants with 8-bit or 16-bit
//! samples (16-bit binary samples big-endian per the netpbm convention).
//! Intensities are normalized to [0, 1] by the declared maxval.

use super::FormatError;
use crate::image::Image;

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        HeaderReader { bytes, pos: 0 }
    }

    /// Next whitespace-separated token, skipping `#` comments.
    fn token(&mut self) -> Result<&'a str, FormatError> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return Err(FormatError::Invalid("unexpected end of header".into()));
            }
            if self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            let start = self.pos;
            while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            return std::str::from_utf8(&self.bytes[start..self.pos])
                .map_err(|_| FormatError::Invalid("non-ascii header token".into()));
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, FormatError> {
        let token = self.token()?;
        token
            .parse::<usize>()
            .map_err(|_| FormatError::Invalid(format!("invalid {what}: {token:?}")))
    }

    /// Position just past the single whitespace byte that terminates the
    /// header (binary variants).
    fn binary_payload_start(&mut self) -> Result<usize, FormatError> {
        if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_whitespace() {
            return Err(FormatError::Invalid(
                "missing whitespace after maxval".into(),
            ));
        }
        Ok(self.pos + 1)
    }
}

pub fn parse_pnm(bytes: &[u8]) -> Result<Image, FormatError> {
    if bytes.len() < 2 {
        return Err(FormatError::Truncated {
            expected: 2,
            got: bytes.len(),
        });
    }
    let mut header = HeaderReader::new(bytes);
    let magic = header.token()?;
    let (channels, binary) = match magic {
        "P5" => (1usize, true),
        "P6" => (3usize, true),
        "P2" => (1usize, false),
        "P3" => (3usize, false),
        _ => return Err(FormatError::BadMagic { expected: "P2/P3/P5/P6" }),
    };
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(FormatError::Invalid("zero-sized image".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(FormatError::Invalid(format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| FormatError::Invalid("dimension overflow".into()))?;

    let mut data = Vec::with_capacity(count);
    if binary {
        let start = header.binary_payload_start()?;
        let payload = &bytes[start..];
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let expected = count
            .checked_mul(bytes_per)
            .ok_or_else(|| FormatError::Invalid("dimension overflow".into()))?;
        if payload.len() < expected {
            return Err(FormatError::Truncated {
                expected,
                got: payload.len(),
            });
        }
        for i in 0..count {
            let raw = if bytes_per == 2 {
                u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as usize
            } else {
                payload[i] as usize
            };
            if raw > maxval {
                return Err(FormatError::Invalid(format!(
                    "sample {raw} exceeds maxval {maxval}"
                )));
            }
            data.push(raw as f64 / maxval as f64);
        }
    } else {
        for _ in 0..count {
            let raw = header.number("sample")?;
            if raw > maxval {
                return Err(FormatError::Invalid(format!(
                    "sample {raw} exceeds maxval {maxval}"
                )));
            }
            data.push(raw as f64 / maxval as f64);
        }
    }
    Image::new(width, height, channels, data).map_err(|e| FormatError::Invalid(e.to_string()))
}

fn quantize(image: &Image, maxval: usize) -> Vec<usize> {
    image
        .data()
        .iter()
        .map(|&v| (v * maxval as f64).round() as usize)
        .collect()
}

/// Writes a grayscale image as binary PGM (P5). `maxval` must be in
/// 1..=65535; values above 255 use 16-bit big-endian samples.
pub fn write_pgm(image: &Image, maxval: usize) -> Result<Vec<u8>, FormatError> {
    if image.channels() != 1 {
        return Err(FormatError::Invalid(format!(
            "PGM requires 1 channel, image has {}",
            image.channels()
        )));
    }
    write_binary(image, maxval, "P5")
}

/// Writes an RGB image as binary PPM (P6).
pub fn write_ppm(image: &Image, maxval: usize) -> Result<Vec<u8>, FormatError> {
    if image.channels() != 3 {
        return Err(FormatError::Invalid(format!(
            "PPM requires 3 channels, image has {}",
            image.channels()
        )));
    }
    write_binary(image, maxval, "P6")
}

fn write_binary(image: &Image, maxval: usize, magic: &str) -> Result<Vec<u8>, FormatError> {
    if maxval == 0 || maxval > 65535 {
        return Err(FormatError::Invalid(format!("maxval {maxval} outside 1..=65535")));
    }
    let mut out = Vec::new();
    out.extend_from_slice(format!("{magic}\n{} {}\n{}\n", image.width(), image.height(), maxval).as_bytes());
    for q in quantize(image, maxval) {
        if maxval > 255 {
            out.extend_from_slice(&(q as u16).to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    Ok(out)
}
