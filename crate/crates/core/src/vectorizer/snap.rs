use alloc::vec::Vec;

use super::{LineSegment, VectorScene};
use crate::error::{param, Result};
use crate::geom::Point;
use crate::math;

/// Rotates segments lying within `tol_deg` of horizontal or vertical onto the
/// axis, keeping midpoint and length. Other segments pass through untouched.
pub fn snap_orthogonal(scene: &VectorScene, tol_deg: f64) -> Result<VectorScene> {
    if !(0.0..45.0).contains(&tol_deg) {
        return Err(param("snap tolerance must lie in [0, 45) degrees"));
    }
    let tol = tol_deg.to_radians();
    let half_pi = core::f64::consts::FRAC_PI_2;
    let segments: Vec<LineSegment> = scene
        .segments
        .iter()
        .map(|seg| {
            let theta = seg.orientation();
            let (mid, half) = (seg.midpoint(), 0.5 * seg.length());
            let axis = if math::line_angle_diff(theta, 0.0) <= tol {
                Some(Point::new(half, 0.0))
            } else if math::line_angle_diff(theta, half_pi) <= tol {
                Some(Point::new(0.0, half))
            } else {
                None
            };
            match axis {
                Some(h) => {
                    // Keep p0 on the same side it started.
                    let h = if (seg.p1 - seg.p0).dot(h) < 0.0 { -h } else { h };
                    LineSegment { p0: mid - h, p1: mid + h, ..seg.clone() }
                }
                None => seg.clone(),
            }
        })
        .collect();
    let mut out = scene.with_segments(segments);
    out.provenance.snap_tol_deg = Some(tol_deg);
    Ok(out)
}
