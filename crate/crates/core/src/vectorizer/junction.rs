//! Post-passes over traced segments: joining collinear pieces split at a
//! crossing and closing the short gaps traced walls leave at junctions.

use alloc::vec::Vec;

use super::LineSegment;
use crate::geom::Point;
use crate::math;

/// Joins nearly collinear segments whose facing ends are at most `gap`
/// apart along their common line. Repeats until nothing changes.
pub(crate) fn join_collinear(mut segs: Vec<LineSegment>, angle_tol: f64, offset_tol: f64, gap: f64) -> Vec<LineSegment> {
    'outer: loop {
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (long, short) = if segs[i].length() >= segs[j].length() { (i, j) } else { (j, i) };
                let (l, s) = (&segs[long], &segs[short]);
                let Some(d) = l.direction() else { continue };
                if math::line_angle_diff(l.orientation(), s.orientation()) > angle_tol {
                    continue;
                }
                let off = |p: Point| math::abs((p - l.p0).cross(d));
                if off(s.p0) > offset_tol || off(s.p1) > offset_tol {
                    continue;
                }
                let (a0, a1) = (0.0, l.length());
                let (t0, t1) = ((s.p0 - l.p0).dot(d), (s.p1 - l.p0).dot(d));
                let (b0, b1) = (t0.min(t1), t0.max(t1));
                if b0 - a1 > gap || a0 - b1 > gap {
                    continue;
                }
                let (lo, hi) = (a0.min(b0), a1.max(b1));
                let (wl, ws) = (l.length(), s.length());
                let merged = LineSegment {
                    p0: l.p0 + d * lo,
                    p1: l.p0 + d * hi,
                    gain: (l.gain * wl + s.gain * ws) / (wl + ws),
                    width_estimate: (l.width_estimate * wl + s.width_estimate * ws) / (wl + ws),
                };
                segs[i] = merged;
                segs.remove(j);
                continue 'outer;
            }
        }
        return segs;
    }
}

/// Moves each endpoint onto the nearest crossing line of another segment
/// when that line passes within `reach` ahead of it (or 2 px behind it)
/// and meets that segment within `reach` of its extent. Lines closer than
/// 30 degrees to parallel are ignored. All moves are computed from the
/// input geometry, so the result does not depend on segment order.
pub(crate) fn close_junctions(segs: &mut [LineSegment], reach: f64) {
    let min_angle = core::f64::consts::FRAC_PI_6;
    let snapshot: Vec<LineSegment> = segs.to_vec();
    for (i, seg) in segs.iter_mut().enumerate() {
        let me = &snapshot[i];
        for end in 0..2 {
            let (e, other) = if end == 0 { (me.p0, me.p1) } else { (me.p1, me.p0) };
            let Some(d) = (e - other).normalized() else { continue };
            let mut best: Option<(f64, Point)> = None;
            for (j, t) in snapshot.iter().enumerate() {
                if j == i {
                    continue;
                }
                let Some(u) = t.direction() else { continue };
                if math::line_angle_diff(me.orientation(), t.orientation()) < min_angle {
                    continue;
                }
                let denom = d.cross(u);
                let q = t.p0 - e;
                let along = q.cross(u) / denom;
                if !(-2.0..=reach).contains(&along) {
                    continue;
                }
                let x = e + d * along;
                let s = (x - t.p0).dot(u);
                if s < -reach || s > t.length() + reach {
                    continue;
                }
                if best.is_none_or(|(b, _)| math::abs(along) < b) {
                    best = Some((math::abs(along), x));
                }
            }
            if let Some((_, x)) = best {
                if end == 0 {
                    seg.p0 = x;
                } else {
                    seg.p1 = x;
                }
            }
        }
    }
}
