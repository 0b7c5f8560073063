//! View-synthesis warp and the training losses (photometric, smoothness,
//! depth consistency) as deterministic numerical operators.
//!
//! A note on framing: the synthesized image is built by sampling the *source*
//! frame at coordinates obtained by lifting the *target* frame's depth and
//! transforming with the relative motion. The photometric loss conventionally
//! compares that synthesis against the target frame; comparing against the
//! source frame instead (the literal resampling reading) is left to the
//! caller, which has both images in hand.
//!
//! All reductions run in a fixed sequential order, so results do not depend
//! on any partitioning of the grids.

use crate::image::{DepthMap, DisparityMap, Image, Mask, ScalarGrid};
use crate::se3::{CameraIntrinsics, Pixel, RigidMotion};
use thiserror::Error;

pub const SSIM_WINDOW: usize = 3;
pub const SSIM_C1: f64 = 1e-4;
pub const SSIM_C2: f64 = 9e-4;
pub const ALPHA_SSIM: f64 = 0.85;
pub const ALPHA_L1: f64 = 0.15;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no valid pixels; mean is undefined")]
    EmptyMask,
    #[error("SSIM window must be odd and >= 3, got {0}")]
    InvalidWindow(usize),
}

/// Per-pixel loss values with their validity mask.
#[derive(Debug, Clone)]
pub struct LossMap {
    pub values: ScalarGrid,
    pub valid: Mask,
}

impl LossMap {
    /// Mean over valid pixels.
    pub fn mean(&self) -> Result<f64, LossError> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (v, &ok) in self.values.data().iter().zip(self.valid.data()) {
            if ok {
                sum += v;
                count += 1;
            }
        }
        if count == 0 {
            return Err(LossError::EmptyMask);
        }
        Ok(sum / count as f64)
    }
}

/// Aggregated loss values for one frame pair.
#[derive(Debug, Clone, Copy)]
pub struct LossReport {
    pub photometric: f64,
    pub smoothness: f64,
    pub depth_consistency: f64,
    pub valid_pixels: usize,
}

/// Loss weighting used when combining the terms into a single objective.
#[derive(Debug, Clone, Copy)]
pub struct LossWeights {
    pub smoothness: f64,
    pub depth_consistency: f64,
    pub rotation: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            smoothness: 1e-3,
            depth_consistency: 0.5,
            rotation: 1.0,
        }
    }
}

/// Grid of real-valued sampling coordinates, one per output pixel.
#[derive(Debug, Clone)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    points: Vec<Pixel>,
}

impl PixelGrid {
    pub fn new(width: usize, height: usize, points: Vec<Pixel>) -> Result<Self, LossError> {
        if points.len() != width * height {
            return Err(LossError::ShapeMismatch(format!(
                "{} points for a {width}x{height} grid",
                points.len()
            )));
        }
        Ok(PixelGrid {
            width,
            height,
            points,
        })
    }

    /// The identity grid: every output pixel samples its own coordinates.
    pub fn identity(width: usize, height: usize) -> Self {
        let mut points = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                points.push(Pixel::new(x as f64, y as f64));
            }
        }
        PixelGrid {
            width,
            height,
            points,
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Pixel {
        self.points[y * self.width + x]
    }
}

/// Converts normalized disparity to depth by mapping it linearly into the
/// inverse-depth interval [1/depth_max, 1/depth_min] and inverting.
pub fn disparity_to_depth(disp: &DisparityMap) -> DepthMap {
    let inv_max = 1.0 / disp.depth_max;
    let inv_min = 1.0 / disp.depth_min;
    let data = disp
        .data()
        .iter()
        .map(|&d| 1.0 / (inv_max + d * (inv_min - inv_max)))
        .collect();
    DepthMap::from_values(disp.width(), disp.height(), data)
        .expect("disparity in (0,1] maps to positive depth")
}

/// Four-neighbor bilinear lookup. `None` when the neighborhood is not fully
/// inside the image.
#[inline]
fn sample_channel(img: &Image, u: f64, v: f64, c: usize) -> Option<f64> {
    if !u.is_finite() || !v.is_finite() {
        return None;
    }
    let x0 = u.floor();
    let y0 = v.floor();
    if x0 < 0.0 || y0 < 0.0 {
        return None;
    }
    let (x0, y0) = (x0 as usize, y0 as usize);
    if x0 + 1 >= img.width() || y0 + 1 >= img.height() {
        return None;
    }
    let fu = u - x0 as f64;
    let fv = v - y0 as f64;
    let v00 = img.at(x0, y0, c);
    let v10 = img.at(x0 + 1, y0, c);
    let v01 = img.at(x0, y0 + 1, c);
    let v11 = img.at(x0 + 1, y0 + 1, c);
    Some(
        v00 * (1.0 - fu) * (1.0 - fv)
            + v10 * fu * (1.0 - fv)
            + v01 * (1.0 - fu) * fv
            + v11 * fu * fv,
    )
}

/// Bilinear depth lookup requiring all four neighbors valid and in bounds.
#[inline]
fn sample_depth(depth: &DepthMap, u: f64, v: f64) -> Option<f64> {
    if !u.is_finite() || !v.is_finite() {
        return None;
    }
    let x0 = u.floor();
    let y0 = v.floor();
    if x0 < 0.0 || y0 < 0.0 {
        return None;
    }
    let (x0, y0) = (x0 as usize, y0 as usize);
    if x0 + 1 >= depth.width() || y0 + 1 >= depth.height() {
        return None;
    }
    if !depth.is_valid(x0, y0)
        || !depth.is_valid(x0 + 1, y0)
        || !depth.is_valid(x0, y0 + 1)
        || !depth.is_valid(x0 + 1, y0 + 1)
    {
        return None;
    }
    let fu = u - x0 as f64;
    let fv = v - y0 as f64;
    Some(
        depth.at(x0, y0) * (1.0 - fu) * (1.0 - fv)
            + depth.at(x0 + 1, y0) * fu * (1.0 - fv)
            + depth.at(x0, y0 + 1) * (1.0 - fu) * fv
            + depth.at(x0 + 1, y0 + 1) * fu * fv,
    )
}

/// Samples `src` at the given grid of coordinates. Out-of-bounds samples
/// return 0 with a false mask.
pub fn bilinear_sample(src: &Image, grid: &PixelGrid) -> (Image, Mask) {
    let (w, h, ch) = (grid.width, grid.height, src.channels());
    let mut data = vec![0.0; w * h * ch];
    let mut mask = Mask::filled(w, h, false);
    for y in 0..h {
        for x in 0..w {
            let p = grid.at(x, y);
            let mut ok = true;
            for c in 0..ch {
                match sample_channel(src, p.u, p.v, c) {
                    Some(value) => data[(y * w + x) * ch + c] = value,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                for c in 0..ch {
                    data[(y * w + x) * ch + c] = 0.0;
                }
            }
            mask.set(x, y, ok);
        }
    }
    let image = Image::new(w, h, ch, data).expect("bilinear samples stay in [0,1]");
    (image, mask)
}

/// Synthesizes the target frame by sampling `src`: each target pixel is
/// lifted with `depth_tgt`, transformed by `motion` (a point transform from
/// the target frame into the source frame) and projected into `src`.
///
/// The mask is false where the depth is invalid, the transformed point falls
/// behind the camera, or the sample leaves the source bounds.
pub fn warp(
    src: &Image,
    depth_tgt: &DepthMap,
    motion: &RigidMotion,
    k: &CameraIntrinsics,
) -> Result<(Image, Mask), LossError> {
    if src.width() != depth_tgt.width() || src.height() != depth_tgt.height() {
        return Err(LossError::ShapeMismatch(format!(
            "image {}x{} vs depth {}x{}",
            src.width(),
            src.height(),
            depth_tgt.width(),
            depth_tgt.height()
        )));
    }
    if k.width != depth_tgt.width() || k.height != depth_tgt.height() {
        return Err(LossError::ShapeMismatch(format!(
            "intrinsics raster {}x{} vs depth {}x{}",
            k.width,
            k.height,
            depth_tgt.width(),
            depth_tgt.height()
        )));
    }
    let (w, h, ch) = (src.width(), src.height(), src.channels());
    let mut data = vec![0.0; w * h * ch];
    let mut mask = Mask::filled(w, h, false);
    for y in 0..h {
        for x in 0..w {
            if !depth_tgt.is_valid(x, y) {
                continue;
            }
            let p = Pixel::new(x as f64, y as f64);
            let lifted = match k.lift(&p, depth_tgt.at(x, y)) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let moved = motion.transform_point(&lifted);
            let projected = match k.project(&moved) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let mut ok = true;
            for c in 0..ch {
                match sample_channel(src, projected.u, projected.v, c) {
                    Some(value) => data[(y * w + x) * ch + c] = value,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                for c in 0..ch {
                    data[(y * w + x) * ch + c] = 0.0;
                }
            }
            mask.set(x, y, ok);
        }
    }
    let image = Image::new(w, h, ch, data).expect("warped samples stay in [0,1]");
    Ok((image, mask))
}

/// Integral image over one channel: sums[(y, x)] = sum of the rectangle
/// [0, y) x [0, x).
fn integral(values: impl Fn(usize, usize) -> f64, w: usize, h: usize) -> Vec<f64> {
    let stride = w + 1;
    let mut sums = vec![0.0; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += values(x, y);
            sums[(y + 1) * stride + (x + 1)] = sums[y * stride + (x + 1)] + row;
        }
    }
    sums
}

#[inline]
fn rect_sum(sums: &[f64], stride: usize, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
    sums[(y1 + 1) * stride + (x1 + 1)] - sums[y0 * stride + (x1 + 1)] - sums[(y1 + 1) * stride + x0]
        + sums[y0 * stride + x0]
}

/// Per-pixel SSIM with uniform box windows, truncated at the image border.
/// Channels are scored independently and averaged.
pub fn ssim(
    a: &Image,
    b: &Image,
    window: usize,
    c1: f64,
    c2: f64,
) -> Result<ScalarGrid, LossError> {
    if !a.same_shape(b) {
        return Err(LossError::ShapeMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    if window < 3 || window.is_multiple_of(2) {
        return Err(LossError::InvalidWindow(window));
    }
    let (w, h, ch) = (a.width(), a.height(), a.channels());
    let r = window / 2;
    let stride = w + 1;
    let mut out = ScalarGrid::zeros(w, h);
    for c in 0..ch {
        let sa = integral(|x, y| a.at(x, y, c), w, h);
        let sb = integral(|x, y| b.at(x, y, c), w, h);
        let saa = integral(|x, y| a.at(x, y, c) * a.at(x, y, c), w, h);
        let sbb = integral(|x, y| b.at(x, y, c) * b.at(x, y, c), w, h);
        let sab = integral(|x, y| a.at(x, y, c) * b.at(x, y, c), w, h);
        for y in 0..h {
            let y0 = y.saturating_sub(r);
            let y1 = (y + r).min(h - 1);
            for x in 0..w {
                let x0 = x.saturating_sub(r);
                let x1 = (x + r).min(w - 1);
                let count = ((x1 - x0 + 1) * (y1 - y0 + 1)) as f64;
                let mu_a = rect_sum(&sa, stride, x0, y0, x1, y1) / count;
                let mu_b = rect_sum(&sb, stride, x0, y0, x1, y1) / count;
                let var_a = rect_sum(&saa, stride, x0, y0, x1, y1) / count - mu_a * mu_a;
                let var_b = rect_sum(&sbb, stride, x0, y0, x1, y1) / count - mu_b * mu_b;
                let cov = rect_sum(&sab, stride, x0, y0, x1, y1) / count - mu_a * mu_b;
                let score = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                    / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                out.set(x, y, out.at(x, y) + score / ch as f64);
            }
        }
    }
    Ok(out)
}

/// Photometric loss: 0.85 (1 - SSIM)/2 + 0.15 L1, per pixel over the mask,
/// plus its mean over valid pixels. SSIM uses the default 3x3 box window.
pub fn photometric_loss(
    target: &Image,
    synthesized: &Image,
    mask: &Mask,
) -> Result<(LossMap, f64), LossError> {
    if !target.same_shape(synthesized) {
        return Err(LossError::ShapeMismatch("image shapes differ".into()));
    }
    if mask.width() != target.width() || mask.height() != target.height() {
        return Err(LossError::ShapeMismatch("mask shape differs".into()));
    }
    let ssim_map = ssim(target, synthesized, SSIM_WINDOW, SSIM_C1, SSIM_C2)?;
    let (w, h, ch) = (target.width(), target.height(), target.channels());
    let mut values = ScalarGrid::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut l1 = 0.0;
            for c in 0..ch {
                l1 += (target.at(x, y, c) - synthesized.at(x, y, c)).abs();
            }
            l1 /= ch as f64;
            let value = ALPHA_SSIM * (1.0 - ssim_map.at(x, y)) / 2.0 + ALPHA_L1 * l1;
            values.set(x, y, value);
        }
    }
    let map = LossMap {
        values,
        valid: mask.clone(),
    };
    let mean = map.mean()?;
    Ok((map, mean))
}

/// Replaces invalid pixels of a synthesized image with the target's values.
/// Out-of-view warp samples hold zeros; window statistics (SSIM) computed at
/// valid pixels near the mask border would otherwise see those zeros as
/// signal.
pub fn fill_invalid_from(
    synthesized: &Image,
    target: &Image,
    mask: &Mask,
) -> Result<Image, LossError> {
    if !synthesized.same_shape(target)
        || mask.width() != target.width()
        || mask.height() != target.height()
    {
        return Err(LossError::ShapeMismatch("infill shapes differ".into()));
    }
    let (w, h, ch) = (target.width(), target.height(), target.channels());
    Image::from_fn(w, h, ch, |x, y, c| {
        if mask.at(x, y) {
            synthesized.at(x, y, c)
        } else {
            target.at(x, y, c)
        }
    })
    .map_err(|e| LossError::ShapeMismatch(e.to_string()))
}

/// Per-pixel minimum of two loss maps: the smaller value where both are
/// valid, the valid one where exactly one is, invalid otherwise.
pub fn min_reprojection(prev: &LossMap, next: &LossMap) -> Result<LossMap, LossError> {
    let (w, h) = (prev.values.width(), prev.values.height());
    if next.values.width() != w || next.values.height() != h {
        return Err(LossError::ShapeMismatch("loss map shapes differ".into()));
    }
    let mut values = ScalarGrid::zeros(w, h);
    let mut valid = Mask::filled(w, h, false);
    for y in 0..h {
        for x in 0..w {
            match (prev.valid.at(x, y), next.valid.at(x, y)) {
                (true, true) => {
                    values.set(x, y, prev.values.at(x, y).min(next.values.at(x, y)));
                    valid.set(x, y, true);
                }
                (true, false) => {
                    values.set(x, y, prev.values.at(x, y));
                    valid.set(x, y, true);
                }
                (false, true) => {
                    values.set(x, y, next.values.at(x, y));
                    valid.set(x, y, true);
                }
                (false, false) => {}
            }
        }
    }
    Ok(LossMap { values, valid })
}

/// Gradient order for the smoothness term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientOrder {
    First,
    Second,
}

/// Edge-aware smoothness of the mean-normalized disparity: forward
/// differences weighted by exp(-|dI|), image gradients averaged over
/// channels, averaged over interior pixels.
pub fn smoothness_loss(disp: &DisparityMap, img: &Image) -> Result<f64, LossError> {
    smoothness_loss_with(disp, img, GradientOrder::First)
}

/// Smoothness with selectable gradient order; `Second` penalizes second
/// differences of the normalized disparity with the same edge weights.
pub fn smoothness_loss_with(
    disp: &DisparityMap,
    img: &Image,
    order: GradientOrder,
) -> Result<f64, LossError> {
    if disp.width() != img.width() || disp.height() != img.height() {
        return Err(LossError::ShapeMismatch(format!(
            "disparity {}x{} vs image {}x{}",
            disp.width(),
            disp.height(),
            img.width(),
            img.height()
        )));
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mean = disp.data().iter().sum::<f64>() / disp.data().len() as f64;
    let norm = |x: usize, y: usize| disp.at(x, y) / mean;

    let grad_x = |x: usize, y: usize| -> f64 {
        (0..ch)
            .map(|c| (img.at(x + 1, y, c) - img.at(x, y, c)).abs())
            .sum::<f64>()
            / ch as f64
    };
    let grad_y = |x: usize, y: usize| -> f64 {
        (0..ch)
            .map(|c| (img.at(x, y + 1, c) - img.at(x, y, c)).abs())
            .sum::<f64>()
            / ch as f64
    };

    let mut sum = 0.0;
    let mut count = 0usize;
    match order {
        GradientOrder::First => {
            for y in 0..h - 1 {
                for x in 0..w - 1 {
                    let dx = (norm(x + 1, y) - norm(x, y)).abs();
                    let dy = (norm(x, y + 1) - norm(x, y)).abs();
                    sum += dx * (-grad_x(x, y)).exp() + dy * (-grad_y(x, y)).exp();
                    count += 1;
                }
            }
        }
        GradientOrder::Second => {
            for y in 1..h - 1 {
                for x in 1..w - 1 {
                    let dxx = (norm(x + 1, y) - 2.0 * norm(x, y) + norm(x - 1, y)).abs();
                    let dyy = (norm(x, y + 1) - 2.0 * norm(x, y) + norm(x, y - 1)).abs();
                    sum += dxx * (-grad_x(x, y)).exp() + dyy * (-grad_y(x, y)).exp();
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(LossError::EmptyMask);
    }
    Ok(sum / count as f64)
}

/// Depth consistency between two frames: each valid pixel of `depth_a` is
/// lifted, moved into frame b by `motion_a_to_b` (a point transform), and its
/// z is compared against the bilinearly sampled `depth_b` with the symmetric
/// ratio |z' - d| / (z' + d), averaged over the valid set.
pub fn depth_consistency_loss(
    depth_a: &DepthMap,
    depth_b: &DepthMap,
    motion_a_to_b: &RigidMotion,
    k: &CameraIntrinsics,
) -> Result<f64, LossError> {
    if !depth_a.same_shape(depth_b) {
        return Err(LossError::ShapeMismatch("depth shapes differ".into()));
    }
    if k.width != depth_a.width() || k.height != depth_a.height() {
        return Err(LossError::ShapeMismatch(
            "intrinsics raster differs from depth shape".into(),
        ));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 0..depth_a.height() {
        for x in 0..depth_a.width() {
            if !depth_a.is_valid(x, y) {
                continue;
            }
            let lifted = match k.lift(&Pixel::new(x as f64, y as f64), depth_a.at(x, y)) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let moved = motion_a_to_b.transform_point(&lifted);
            if moved.z <= 0.0 {
                continue;
            }
            let projected = match k.project(&moved) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let Some(sampled) = sample_depth(depth_b, projected.u, projected.v) else {
                continue;
            };
            sum += (moved.z - sampled).abs() / (moved.z + sampled);
            count += 1;
        }
    }
    if count == 0 {
        return Err(LossError::EmptyMask);
    }
    Ok(sum / count as f64)
}
