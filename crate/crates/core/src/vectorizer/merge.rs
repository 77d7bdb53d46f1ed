//! Cross-resolution fusion of the per-level filter answers.
//!
//! A native pixel takes part when its level-0 response passes the
//! threshold. Every level that also passes at the pixel's location then
//! contributes with weight proportional to its gain. Orientations are
//! averaged on doubled angles so that `0` and `pi` coincide and
//! perpendicular answers cancel.

use alloc::vec;
use alloc::vec::Vec;

use super::detect::{LevelResponse, LinearityResponses};
use crate::math;

/// Merged detection result of one native pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeResponse {
    pub x: usize,
    pub y: usize,
    /// Radians in `[0, pi)`.
    pub orientation: f64,
    /// Fraction of the luminosity range.
    pub gain: f64,
    /// Contribution of each level; sums to one when `gain > 0`.
    pub level_weights: Vec<f64>,
}

/// Merged field at native resolution.
#[derive(Debug, Clone)]
pub struct LinearityField {
    pub width: usize,
    pub height: usize,
    pub luminosity_range: f64,
    /// Merged gain a pixel must exceed to count as linear.
    pub threshold: f64,
    /// Merged gain, zero for non-linear pixels.
    pub gain: Vec<f32>,
    pub orientation: Vec<f32>,
    /// Native single-pixel contrast across the detected orientation.
    pub contrast: Vec<f32>,
    levels: Vec<LevelResponse>,
    orientations: usize,
}

struct Contribution {
    gain: f64,
    theta: f64,
    bin: u8,
}

impl LinearityField {
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn is_linear(&self, x: usize, y: usize) -> bool {
        self.gain[self.index(x, y)] > 0.0
    }

    pub fn linear_count(&self) -> usize {
        self.gain.iter().filter(|&&g| g > 0.0).count()
    }

    /// Full merged record of a pixel, `None` when it is not linear.
    pub fn node(&self, x: usize, y: usize) -> Option<NodeResponse> {
        if x >= self.width || y >= self.height {
            return None;
        }
        let (gain, orientation, level_weights) = merge_pixel(&self.levels, self.orientations, x, y)?;
        if gain <= self.threshold {
            return None;
        }
        Some(NodeResponse { x, y, orientation, gain, level_weights })
    }

    /// Linear pixels in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeResponse> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).filter_map(move |x| self.node(x, y)))
    }
}

fn contributions(levels: &[LevelResponse], orientations: usize, x: usize, y: usize) -> Vec<Option<Contribution>> {
    levels
        .iter()
        .enumerate()
        .map(|(k, level)| {
            let (lx, ly) = ((x >> k).min(level.width - 1), (y >> k).min(level.height - 1));
            let i = level.index(lx, ly);
            let g = level.gain[i] as f64;
            (g > 0.0).then(|| Contribution {
                gain: g,
                theta: level.bin[i] as f64 * core::f64::consts::PI / orientations as f64,
                bin: level.bin[i],
            })
        })
        .collect()
}

/// Returns `(gain, orientation, weights)` for a pixel whose level-0
/// response passed, `None` otherwise.
fn merge_pixel(levels: &[LevelResponse], orientations: usize, x: usize, y: usize) -> Option<(f64, f64, Vec<f64>)> {
    let base = &levels[0];
    if base.gain[base.index(x, y)] <= 0.0 {
        return None;
    }
    let contribs = contributions(levels, orientations, x, y);
    let total: f64 = contribs.iter().flatten().map(|c| c.gain).sum();
    let weights: Vec<f64> = contribs
        .iter()
        .map(|c| c.as_ref().map_or(0.0, |c| c.gain / total))
        .collect();
    let (mut vx, mut vy) = (0.0, 0.0);
    for (c, w) in contribs.iter().zip(&weights) {
        if let Some(c) = c {
            vx += w * c.gain * math::cos(2.0 * c.theta);
            vy += w * c.gain * math::sin(2.0 * c.theta);
        }
    }
    let gain = math::hypot(vx, vy);
    let mut present = contribs.iter().flatten();
    let first = present.next()?;
    let orientation = if present.all(|c| c.bin == first.bin) {
        first.theta
    } else {
        math::normalize_line_angle(0.5 * math::atan2(vy, vx))
    };
    Some((gain, orientation, weights))
}

/// Fuses the per-level responses into a native-resolution field.
pub fn merge_resolutions(responses: LinearityResponses) -> LinearityField {
    let LinearityResponses { levels, luminosity_range, orientations } = responses;
    let (w, h) = (levels[0].width, levels[0].height);
    let threshold = levels[0].threshold;
    let mut gain = vec![0.0f32; w * h];
    let mut orientation = vec![0.0f32; w * h];
    let contrast = levels[0].contrast.clone();
    for y in 0..h {
        for x in 0..w {
            if let Some((g, theta, _)) = merge_pixel(&levels, orientations, x, y) {
                if g > threshold {
                    gain[y * w + x] = g as f32;
                    orientation[y * w + x] = theta as f32;
                }
            }
        }
    }
    LinearityField { width: w, height: h, luminosity_range, threshold, gain, orientation, contrast, levels, orientations }
}
