//! Normalized grayscale rasters and the box-filter resolution pyramid.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};

/// Default number of pyramid levels used by the vectorizer.
pub const DEFAULT_LEVELS: usize = 5;

/// Row-major grayscale intensity field with every sample in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    intensity: Vec<f32>,
    source_depth: u8,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, intensity: Vec<f32>, source_depth: u8) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Format(format!("zero-dimension image {width}x{height}")));
        }
        if intensity.len() != width * height {
            return Err(Error::Format(format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height,
                intensity.len()
            )));
        }
        if let Some(bad) = intensity.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Format(format!("intensity {bad} outside [0, 1]")));
        }
        Ok(Self { width, height, intensity, source_depth })
    }

    /// Builds an image by sampling `f(x, y)`, clamping into `[0, 1]`.
    /// Mostly useful for synthetic inputs.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f32) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self::new(width, height, data, 32)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Bits per sample of the file this image was decoded from (32 for float).
    pub fn source_depth(&self) -> u8 {
        self.source_depth
    }

    pub fn intensity(&self) -> &[f32] {
        &self.intensity
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.intensity[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.intensity.iter().map(|&v| v as f64).sum::<f64>() / self.intensity.len() as f64
    }
}

/// Dynamic range `max - min` of the image. Detection thresholds are
/// expressed as a fraction of this value.
pub fn overall_luminosity(img: &RasterImage) -> f64 {
    let (lo, hi) = img
        .intensity
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    (hi as f64) - (lo as f64)
}

/// Octave pyramid: level 0 is native, level `k` is `ceil(w / 2^k)` wide.
#[derive(Debug, Clone)]
pub struct ResolutionStack {
    levels: Vec<RasterImage>,
}

impl ResolutionStack {
    pub fn levels(&self) -> &[RasterImage] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn native(&self) -> &RasterImage {
        &self.levels[0]
    }

    /// Number of native pixels covered by pixel `(x, y)` of level `k`.
    pub fn coverage(&self, k: usize, x: usize, y: usize) -> usize {
        let n = self.native();
        span(n.width, k, x) * span(n.height, k, y)
    }

    /// Coverage-weighted mean of level `k`. Equals the native mean up to
    /// rounding, since each coarse pixel is the mean of its native block.
    pub fn level_mean(&self, k: usize) -> f64 {
        let img = &self.levels[k];
        let n = self.native();
        let mut acc = 0.0;
        for y in 0..img.height {
            let sy = span(n.height, k, y) as f64;
            let mut row = 0.0;
            for x in 0..img.width {
                row += img.get(x, y) as f64 * span(n.width, k, x) as f64;
            }
            acc += row * sy;
        }
        acc / (n.width * n.height) as f64
    }
}

/// Native pixels covered by index `i` at level `k` along an axis of `len`.
fn span(len: usize, k: usize, i: usize) -> usize {
    let start = i << k;
    let end = ((i + 1) << k).min(len);
    end.saturating_sub(start)
}

/// Largest level count for which no level drops below 1x1 before the last.
pub fn max_levels(width: usize, height: usize) -> usize {
    let mut n = width.max(height);
    let mut levels = 1;
    while n > 1 {
        n = n.div_ceil(2);
        levels += 1;
    }
    levels
}

/// Builds `levels` octaves by 2x2 box filtering.
///
/// Edge pixels average over the children that exist; children are weighted
/// by the native area they cover so each coarse pixel stays the exact mean
/// of its native block.
pub fn build_pyramid(img: &RasterImage, levels: usize) -> Result<ResolutionStack> {
    if levels == 0 {
        return Err(param("pyramid needs at least one level"));
    }
    let limit = max_levels(img.width, img.height);
    if levels > limit {
        return Err(param(format!(
            "{levels} levels requested but a {}x{} image reaches 1x1 after {limit}",
            img.width, img.height
        )));
    }
    let (nw, nh) = (img.width, img.height);
    let mut out = Vec::with_capacity(levels);
    out.push(img.clone());
    for k in 0..levels - 1 {
        let prev = &out[k];
        let w = prev.width.div_ceil(2);
        let h = prev.height.div_ceil(2);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0f64;
                let mut weight = 0.0f64;
                for cy in (2 * y)..(2 * y + 2).min(prev.height) {
                    let wy = span(nh, k, cy) as f64;
                    for cx in (2 * x)..(2 * x + 2).min(prev.width) {
                        let wx = span(nw, k, cx) as f64;
                        acc += prev.get(cx, cy) as f64 * wx * wy;
                        weight += wx * wy;
                    }
                }
                data.push(((acc / weight) as f32).clamp(0.0, 1.0));
            }
        }
        out.push(RasterImage { width: w, height: h, intensity: data, source_depth: img.source_depth });
    }
    Ok(ResolutionStack { levels: out })
}
