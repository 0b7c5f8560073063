//! Dense grid types: intensity images, depth maps, disparity maps and masks.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("data length {got} does not match {width}x{height}x{channels}")]
    SizeMismatch {
        width: usize,
        height: usize,
        channels: usize,
        got: usize,
    },
    #[error("channels must be 1 or 3, got {0}")]
    BadChannels(usize),
    #[error("intensity {value} at index {index} outside [0, 1]")]
    IntensityRange { index: usize, value: f64 },
    #[error("valid depth at index {index} must be positive and finite, got {value}")]
    BadDepth { index: usize, value: f64 },
    #[error("disparity {value} at index {index} outside (0, 1]")]
    DisparityRange { index: usize, value: f64 },
    #[error("depth limits must satisfy 0 < min < max, got ({min}, {max})")]
    BadLimits { min: f64, max: f64 },
    #[error("zero-sized grid")]
    Empty,
}

/// Intensity image, row-major, interleaved channels, values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Empty);
        }
        if channels != 1 && channels != 3 {
            return Err(GridError::BadChannels(channels));
        }
        if data.len() != width * height * channels {
            return Err(GridError::SizeMismatch {
                width,
                height,
                channels,
                got: data.len(),
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(GridError::IntensityRange { index, value });
            }
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self, GridError> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Image::new(width, height, channels, data)
    }

    pub fn constant(width: usize, height: usize, channels: usize, value: f64) -> Self {
        Image::new(width, height, channels, vec![value; width * height * channels])
            .expect("constant image in range")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }
}

/// Per-pixel depth in arbitrary but consistent length units, with a validity
/// mask. Invalid pixels keep whatever raw value they were constructed with;
/// only masked-valid entries are constrained to be positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
    valid: Vec<bool>,
}

impl DepthMap {
    pub fn new(
        width: usize,
        height: usize,
        data: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Empty);
        }
        if data.len() != width * height || valid.len() != width * height {
            return Err(GridError::SizeMismatch {
                width,
                height,
                channels: 1,
                got: data.len(),
            });
        }
        for (index, (&value, &ok)) in data.iter().zip(&valid).enumerate() {
            if ok && (!value.is_finite() || value <= 0.0) {
                return Err(GridError::BadDepth { index, value });
            }
        }
        Ok(DepthMap {
            width,
            height,
            data,
            valid,
        })
    }

    /// Marks entries valid where they are positive and finite.
    pub fn from_values(width: usize, height: usize, data: Vec<f64>) -> Result<Self, GridError> {
        let valid = data.iter().map(|&v| v.is_finite() && v > 0.0).collect();
        DepthMap::new(width, height, data, valid)
    }

    pub fn constant(width: usize, height: usize, depth: f64) -> Self {
        DepthMap::from_values(width, height, vec![depth; width * height])
            .expect("constant positive depth")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }

    pub fn same_shape(&self, other: &DepthMap) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Normalized disparity (inverse depth) in (0, 1] with the depth limits used
/// to map it back to metric depth.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
    pub depth_min: f64,
    pub depth_max: f64,
}

impl DisparityMap {
    pub fn new(
        width: usize,
        height: usize,
        data: Vec<f64>,
        depth_min: f64,
        depth_max: f64,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Empty);
        }
        if data.len() != width * height {
            return Err(GridError::SizeMismatch {
                width,
                height,
                channels: 1,
                got: data.len(),
            });
        }
        let limits_valid = depth_min.is_finite() && depth_min > 0.0 && depth_max > depth_min;
        if !limits_valid {
            return Err(GridError::BadLimits {
                min: depth_min,
                max: depth_max,
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 || value > 1.0 {
                return Err(GridError::DisparityRange { index, value });
            }
        }
        Ok(DisparityMap {
            width,
            height,
            data,
            depth_min,
            depth_max,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Boolean per-pixel mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), width * height);
        Mask {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Mask::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Scalar per-pixel grid (loss maps, SSIM maps).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        ScalarGrid {
            width,
            height,
            data,
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        ScalarGrid::new(width, height, vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }
}
