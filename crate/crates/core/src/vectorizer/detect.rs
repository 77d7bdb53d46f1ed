//! Oriented line filter bank.
//!
//! Each orientation uses a digital line of `strip_length` pixels as the
//! center strip and two copies shifted by `flank_offset` pixels across the
//! minor axis as flanks. The strip is split at the pixel into two one-sided
//! halves (each holding the center pixel) and each half answers
//!
//! ```text
//! R_half = (w * sum(flank+) + w * sum(flank-) - sum(center)) / half_length
//! ```
//!
//! with flank weight `w = 0.5`. The pixel's response is the smaller half, so
//! a dark line of contrast `c` through the pixel answers exactly `c` while an
//! isolated blob or a line ending next to the pixel only lights one half.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::math;
use crate::raster::{overall_luminosity, RasterImage, ResolutionStack, DEFAULT_LEVELS};

/// Standard deviation of one half response per unit pixel noise,
/// `sqrt((1 + 2 w^2) / n)` for a half strip of `n` taps.
fn response_noise_scale(strip_length: usize, flank_weight: f64) -> f64 {
    let half = (strip_length / 2 + 1) as f64;
    math::sqrt((1.0 + 2.0 * flank_weight * flank_weight) / half)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorParams {
    /// Pyramid depth.
    pub levels: usize,
    /// Number of orientation bins over `[0, pi)`.
    pub orientations: usize,
    /// Center strip length in pixels (odd).
    pub strip_length: usize,
    /// Flank distance from the center strip in pixels.
    pub flank_offset: usize,
    /// Weight of each flank strip.
    pub flank_weight: f64,
    /// Detection threshold as a fraction of the luminosity range.
    pub threshold_fraction: f64,
    /// Multiple of the estimated response noise used as a floor under the
    /// threshold. Zero disables the floor.
    pub noise_factor: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            levels: DEFAULT_LEVELS,
            orientations: 16,
            strip_length: 21,
            flank_offset: 2,
            flank_weight: 0.5,
            threshold_fraction: 5e-4,
            noise_factor: 5.0,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        if self.orientations < 4 || self.orientations > 255 {
            return Err(param("orientations must be in [4, 255]"));
        }
        if !(self.threshold_fraction > 0.0) || !self.threshold_fraction.is_finite() {
            return Err(param("threshold_fraction must be positive"));
        }
        if self.strip_length < 3 || self.strip_length % 2 == 0 {
            return Err(param("strip_length must be odd and at least 3"));
        }
        if self.flank_offset == 0 {
            return Err(param("flank_offset must be positive"));
        }
        if !(self.flank_weight > 0.0) || !(self.noise_factor >= 0.0) {
            return Err(param("flank_weight must be positive and noise_factor non-negative"));
        }
        if self.levels == 0 {
            return Err(param("levels must be at least 1"));
        }
        Ok(())
    }

    /// Center angle of orientation bin `b`.
    pub fn bin_angle(&self, b: usize) -> f64 {
        b as f64 * core::f64::consts::PI / self.orientations as f64
    }
}

/// Best filter answer of every pixel of one pyramid level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResponse {
    pub width: usize,
    pub height: usize,
    /// Best response as a fraction of the luminosity range; zero where the
    /// pixel does not contain linearity at this level.
    pub gain: Vec<f32>,
    /// Orientation bin of the best response.
    pub bin: Vec<u8>,
    /// Single-pixel contrast across the best orientation, as a fraction of
    /// the luminosity range.
    pub contrast: Vec<f32>,
    /// Gain a pixel had to exceed at this level.
    pub threshold: f64,
}

impl LevelResponse {
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }
}

/// Per-level responses over one pyramid.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearityResponses {
    pub levels: Vec<LevelResponse>,
    pub luminosity_range: f64,
    pub orientations: usize,
}

impl LinearityResponses {
    pub fn bin_angle(&self, bin: u8) -> f64 {
        bin as f64 * core::f64::consts::PI / self.orientations as f64
    }
}

/// Evaluates the filter bank independently on every level of `stack`.
pub fn detect_linearity(stack: &ResolutionStack, params: &DetectorParams) -> Result<LinearityResponses> {
    params.validate()?;
    let range = overall_luminosity(stack.native());
    let kernels: Vec<Kernel> = (0..params.orientations).map(|b| Kernel::new(params, b)).collect();
    let levels = stack
        .levels()
        .iter()
        .map(|img| detect_level(img, params, &kernels, range))
        .collect();
    Ok(LinearityResponses { levels, luminosity_range: range, orientations: params.orientations })
}

/// Integer tap offsets for one orientation bin, ordered along the line;
/// the middle tap is the pixel itself.
struct Kernel {
    taps: Vec<(isize, isize)>,
    flank: (isize, isize),
}

impl Kernel {
    fn new(params: &DetectorParams, bin: usize) -> Self {
        let theta = params.bin_angle(bin);
        let (c, s) = (math::cos(theta), math::sin(theta));
        let half = (params.strip_length / 2) as isize;
        let f = params.flank_offset as isize;
        if math::abs(c) >= math::abs(s) - 1e-12 {
            let slope = s / c;
            let taps = (-half..=half).map(|t| (t, math::round(t as f64 * slope) as isize)).collect();
            Self { taps, flank: (0, f) }
        } else {
            let slope = c / s;
            let taps = (-half..=half).map(|t| (math::round(t as f64 * slope) as isize, t)).collect();
            Self { taps, flank: (f, 0) }
        }
    }

    fn reach(&self) -> isize {
        self.taps.iter().map(|&(dx, dy)| dx.abs().max(dy.abs())).max().unwrap_or(0)
    }
}

/// Robust pixel-noise estimate from the median absolute horizontal difference.
fn estimate_noise(img: &RasterImage) -> f64 {
    if img.width() < 2 {
        return 0.0;
    }
    let mut diffs: Vec<f32> = Vec::with_capacity((img.width() - 1) * img.height());
    for y in 0..img.height() {
        for x in 0..img.width() - 1 {
            diffs.push((img.get(x + 1, y) - img.get(x, y)).abs());
        }
    }
    let mid = diffs.len() / 2;
    let (_, median, _) = diffs.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    1.4826 * (*median as f64) / core::f64::consts::SQRT_2
}

fn detect_level(img: &RasterImage, params: &DetectorParams, kernels: &[Kernel], range: f64) -> LevelResponse {
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let noise = estimate_noise(img);
    let floor = params.noise_factor * response_noise_scale(params.strip_length, params.flank_weight) * noise;
    let threshold_abs = (params.threshold_fraction * range).max(floor);

    let mut gain = vec![0.0f32; n];
    let mut bin = vec![0u8; n];
    let mut contrast = vec![0.0f32; n];
    if range <= 0.0 {
        return LevelResponse { width: w, height: h, gain, bin, contrast, threshold: threshold_abs };
    }

    let fo = params.flank_offset as isize;
    let reach = kernels.iter().map(Kernel::reach).max().unwrap_or(0);
    let pad = (reach + fo + 1) as usize;
    let pw = w + 2 * pad;
    let ph = h + 2 * pad;
    let mut padded = vec![0.0f64; pw * ph];
    for py in 0..ph {
        let sy = (py as isize - pad as isize).clamp(0, h as isize - 1) as usize;
        for px in 0..pw {
            let sx = (px as isize - pad as isize).clamp(0, w as isize - 1) as usize;
            padded[py * pw + px] = img.get(sx, sy) as f64;
        }
    }

    let half = params.strip_length / 2;
    let inv_len = 1.0 / (half + 1) as f64;
    let fw = params.flank_weight;
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut sum_a = vec![0.0f64; pw * ph];
    let mut sum_b = vec![0.0f64; pw * ph];
    // Line sums are needed on the image plus a flank-wide margin.
    let lo = pad - params.flank_offset;
    let (hi_x, hi_y) = (pad + w + params.flank_offset, pad + h + params.flank_offset);
    for (b, kernel) in kernels.iter().enumerate() {
        let offsets: Vec<isize> = kernel.taps.iter().map(|&(dx, dy)| dy * pw as isize + dx).collect();
        let (before, after) = (&offsets[..=half], &offsets[half..]);
        for py in lo..hi_y {
            let row = py * pw;
            for px in lo..hi_x {
                let i = row + px;
                let mut a = 0.0;
                for &o in before {
                    a += padded[(i as isize + o) as usize];
                }
                let mut c = 0.0;
                for &o in after {
                    c += padded[(i as isize + o) as usize];
                }
                sum_a[i] = a;
                sum_b[i] = c;
            }
        }
        let foff = kernel.flank.1 * pw as isize + kernel.flank.0;
        for y in 0..h {
            let row = (y + pad) * pw + pad;
            for x in 0..w {
                let i = row + x;
                let plus = (i as isize + foff) as usize;
                let minus = (i as isize - foff) as usize;
                let ra = fw * (sum_a[plus] + sum_a[minus]) - sum_a[i];
                let rb = fw * (sum_b[plus] + sum_b[minus]) - sum_b[i];
                let r = ra.min(rb) * inv_len;
                let j = y * w + x;
                if r > best[j] {
                    best[j] = r;
                    bin[j] = b as u8;
                    let pc = fw * (padded[plus] + padded[minus]) - padded[i];
                    contrast[j] = (pc / range) as f32;
                }
            }
        }
    }
    for j in 0..n {
        if best[j] > threshold_abs {
            gain[j] = (best[j] / range) as f32;
        }
    }
    LevelResponse { width: w, height: h, gain, bin, contrast, threshold: threshold_abs / range }
}
