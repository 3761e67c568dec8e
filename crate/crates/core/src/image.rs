//! Pixel containers, boundary handling and regions of interest.

use std::fmt;

use thiserror::Error;

/// Errors raised when constructing images or regions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("image extents must be positive, got {width}x{height}")]
    EmptyExtent { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values but {width}x{height} needs {expected}")]
    LengthMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("region {roi} does not fit inside a {width}x{height} image")]
    RoiOutOfBounds { roi: Roi, width: usize, height: usize },
}

/// A dense row-major 2-D grid of pixels with top-left origin.
///
/// `Image<u8>` is the grayscale image used for all file I/O. Kernel graphs
/// carry their streams as `Image<u64>` so that intermediate values such as
/// census vectors fit in a single element.
#[derive(Clone, PartialEq, Eq)]
pub struct Image<P = u8> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

impl<P: Copy> Image<P> {
    pub fn from_vec(width: usize, height: usize, pixels: Vec<P>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyExtent { width, height });
        }
        let expected = width * height;
        if pixels.len() != expected {
            return Err(ImageError::LengthMismatch {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: P) -> Result<Self, ImageError> {
        Self::from_vec(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Result<Self, ImageError> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::from_vec(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<P> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[P] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Reads a pixel at a signed coordinate, resolving out-of-range
    /// coordinates through `mode`.
    #[inline]
    pub fn sample(&self, x: i64, y: i64, mode: BoundaryMode) -> P {
        let sx = mode.resolve(x, self.width);
        let sy = mode.resolve(y, self.height);
        self.pixels[sy * self.width + sx]
    }

    pub fn map<Q: Copy>(&self, f: impl FnMut(P) -> Q) -> Image<Q> {
        Image {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().copied().map(f).collect(),
        }
    }

    /// Copies the pixels covered by `roi` into a new image.
    pub fn crop(&self, roi: Roi) -> Result<Self, ImageError> {
        roi.check_within(self.width, self.height)?;
        let mut pixels = Vec::with_capacity(roi.width * roi.height);
        for y in roi.y0..roi.y0 + roi.height {
            pixels.extend_from_slice(&self.row(y)[roi.x0..roi.x0 + roi.width]);
        }
        Self::from_vec(roi.width, roi.height, pixels)
    }
}

impl Image<u8> {
    /// Widens every pixel into the 64-bit stream element type.
    pub fn to_stream(&self) -> Image<u64> {
        self.map(u64::from)
    }
}

impl Image<u64> {
    /// Narrows a stream back to 8-bit gray. Returns `None` if any value
    /// exceeds 255.
    pub fn to_gray(&self) -> Option<Image<u8>> {
        let pixels = self
            .pixels
            .iter()
            .map(|&v| u8::try_from(v).ok())
            .collect::<Option<Vec<_>>>()?;
        Some(Image {
            width: self.width,
            height: self.height,
            pixels,
        })
    }
}

impl<P: fmt::Debug> fmt::Debug for Image<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("pixels", &format_args!("[{} values]", self.pixels.len()))
            .finish()
    }
}

/// How reads outside the image are mapped back inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryMode {
    /// Coordinates saturate at the nearest edge.
    #[default]
    Clamp,
    /// Symmetric reflection with the edge pixel duplicated: -1 -> 0, -2 -> 1.
    Mirror,
    /// Coordinates wrap modulo the extent: -1 -> extent-1.
    Repeat,
}

impl BoundaryMode {
    /// Maps a signed coordinate onto `[0, extent)`.
    ///
    /// Mirror uses a period of `2 * extent`, so it stays total for overruns
    /// of any size.
    #[inline]
    pub fn resolve(self, coord: i64, extent: usize) -> usize {
        debug_assert!(extent > 0);
        let n = extent as i64;
        if (0..n).contains(&coord) {
            return coord as usize;
        }
        let idx = match self {
            BoundaryMode::Clamp => coord.clamp(0, n - 1),
            BoundaryMode::Repeat => coord.rem_euclid(n),
            BoundaryMode::Mirror => {
                let m = coord.rem_euclid(2 * n);
                if m < n {
                    m
                } else {
                    2 * n - 1 - m
                }
            }
        };
        idx as usize
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "clamp" => Ok(BoundaryMode::Clamp),
            "mirror" => Ok(BoundaryMode::Mirror),
            "repeat" => Ok(BoundaryMode::Repeat),
            other => Err(format!("unknown boundary mode '{other}'")),
        }
    }
}

/// Rectangular region of interest inside a parent image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roi {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Roi {
    pub fn new(x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self { x0, y0, width, height }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, width, height)
    }

    pub fn check_within(&self, width: usize, height: usize) -> Result<(), ImageError> {
        let fits =
            self.width > 0 && self.height > 0 && self.x0 + self.width <= width && self.y0 + self.height <= height;
        if fits {
            Ok(())
        } else {
            Err(ImageError::RoiOutOfBounds {
                roi: *self,
                width,
                height,
            })
        }
    }
}

impl fmt::Display for Roi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}+{}+{}", self.width, self.height, self.x0, self.y0)
    }
}
