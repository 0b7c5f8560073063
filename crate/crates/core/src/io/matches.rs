//! Text format for 2D keypoint matches.
//!
//! Per frame pair: a header `pair <t> <t+1>`, then one row per match with
//! five whitespace-separated decimals `u1 v1 u2 v2 conf` (pixels, pixels,
//! pixels, pixels, confidence in [0, 1]).

use super::{fmt_f64, parse_f64, FormatError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchRecord {
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchPairBlock {
    pub frame_a: usize,
    pub frame_b: usize,
    pub matches: Vec<MatchRecord>,
}

pub fn parse_match_file(text: &str) -> Result<Vec<MatchPairBlock>, FormatError> {
    let mut blocks: Vec<MatchPairBlock> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "pair" {
            if tokens.len() != 3 {
                return Err(FormatError::at(line_no, "pair header needs two frame indices"));
            }
            let frame_a: usize = tokens[1]
                .parse()
                .map_err(|_| FormatError::at(line_no, format!("invalid frame index {:?}", tokens[1])))?;
            let frame_b: usize = tokens[2]
                .parse()
                .map_err(|_| FormatError::at(line_no, format!("invalid frame index {:?}", tokens[2])))?;
            blocks.push(MatchPairBlock {
                frame_a,
                frame_b,
                matches: Vec::new(),
            });
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            return Err(FormatError::at(line_no, "match row before any pair header"));
        };
        if tokens.len() != 5 {
            return Err(FormatError::at(
                line_no,
                format!("expected 5 values per match row, got {}", tokens.len()),
            ));
        }
        let u1 = parse_f64(tokens[0], line_no, "u1")?;
        let v1 = parse_f64(tokens[1], line_no, "v1")?;
        let u2 = parse_f64(tokens[2], line_no, "u2")?;
        let v2 = parse_f64(tokens[3], line_no, "v2")?;
        let confidence = parse_f64(tokens[4], line_no, "confidence")?;
        for (name, v) in [("u1", u1), ("v1", v1), ("u2", u2), ("v2", v2)] {
            if !v.is_finite() {
                return Err(FormatError::at(line_no, format!("{name} is not finite")));
            }
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(FormatError::at(
                line_no,
                format!("confidence {confidence} outside [0, 1]"),
            ));
        }
        block.matches.push(MatchRecord {
            u1,
            v1,
            u2,
            v2,
            confidence,
        });
    }
    if blocks.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(blocks)
}

pub fn write_match_file(blocks: &[MatchPairBlock]) -> String {
    let mut out = String::new();
    for block in blocks {
        out.push_str(&format!("pair {} {}\n", block.frame_a, block.frame_b));
        for m in &block.matches {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                fmt_f64(m.u1),
                fmt_f64(m.v1),
                fmt_f64(m.u2),
                fmt_f64(m.v2),
                fmt_f64(m.confidence)
            ));
        }
    }
    out
}
