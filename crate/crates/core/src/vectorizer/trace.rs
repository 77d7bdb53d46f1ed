//! Greedy segment growing over the merged linearity field.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::detect::DetectorParams;
use super::junction::{close_junctions, join_collinear};
use super::merge::LinearityField;
use super::{LineSegment, Provenance, VectorScene};
use crate::geom::Point;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct TracerParams {
    /// Largest orientation difference for a pixel to join, radians.
    pub angle_tol: f64,
    /// Largest perpendicular offset from the current line, pixels.
    pub offset_tol: f64,
    /// Segments shorter than this are dropped.
    pub min_length: f64,
    /// Empty steps tolerated before a walk stops.
    pub max_gap: usize,
    /// End steps whose single-pixel contrast falls below this fraction of
    /// the segment's median contrast are trimmed.
    pub trim_ratio: f64,
    /// Collinear pieces whose facing ends are this close are joined.
    pub join_gap: f64,
    /// Endpoints this close to a crossing line are moved onto it.
    pub junction_reach: f64,
}

impl Default for TracerParams {
    fn default() -> Self {
        Self {
            angle_tol: 10f64.to_radians(),
            offset_tol: 1.5,
            min_length: 8.0,
            max_gap: 4,
            trim_ratio: 0.5,
            join_gap: 8.0,
            junction_reach: 8.0,
        }
    }
}

/// Weighted first and second moments of member pixels.
#[derive(Default, Clone, Copy)]
struct Moments {
    w: f64,
    x: f64,
    y: f64,
    xx: f64,
    xy: f64,
    yy: f64,
}

impl Moments {
    fn add(&mut self, p: Point, w: f64) {
        self.w += w;
        self.x += w * p.x;
        self.y += w * p.y;
        self.xx += w * p.x * p.x;
        self.xy += w * p.x * p.y;
        self.yy += w * p.y * p.y;
    }

    fn centroid(&self) -> Point {
        Point::new(self.x / self.w, self.y / self.w)
    }

    /// Principal direction, oriented to agree with `hint`.
    fn direction(&self, hint: Point) -> Point {
        let c = self.centroid();
        let sxx = self.xx / self.w - c.x * c.x;
        let syy = self.yy / self.w - c.y * c.y;
        let sxy = self.xy / self.w - c.x * c.y;
        let theta = 0.5 * math::atan2(2.0 * sxy, sxx - syy);
        let d = Point::new(math::cos(theta), math::sin(theta));
        if d.dot(hint) < 0.0 {
            -d
        } else {
            d
        }
    }
}

struct Step {
    members: Vec<usize>,
}

struct Walker<'a> {
    field: &'a LinearityField,
    params: &'a TracerParams,
    consumed: Vec<bool>,
}

impl Walker<'_> {
    fn pos(&self, i: usize) -> Point {
        Point::new((i % self.field.width) as f64, (i / self.field.width) as f64)
    }

    /// Unconsumed compatible pixels whose projection falls in the unit band
    /// centered on `head`.
    fn collect(&self, head: Point, anchor: Point, dir: Point) -> Vec<usize> {
        let f = self.field;
        let r = math::floor(self.params.offset_tol) as isize + 2;
        let (cx, cy) = (math::round(head.x) as isize, math::round(head.y) as isize);
        let head_along = (head - anchor).dot(dir);
        let line_theta = dir.orientation();
        let mut out = Vec::new();
        for y in (cy - r)..=(cy + r) {
            if y < 0 || y >= f.height as isize {
                continue;
            }
            for x in (cx - r)..=(cx + r) {
                if x < 0 || x >= f.width as isize {
                    continue;
                }
                let i = f.index(x as usize, y as usize);
                if self.consumed[i] || f.gain[i] <= 0.0 {
                    continue;
                }
                let rel = Point::new(x as f64, y as f64) - anchor;
                let along = rel.dot(dir) - head_along;
                if !(along > -0.5 && along <= 0.5) {
                    continue;
                }
                if math::abs(rel.cross(dir)) >= self.params.offset_tol {
                    continue;
                }
                if math::line_angle_diff(f.orientation[i] as f64, line_theta) >= self.params.angle_tol {
                    continue;
                }
                out.push(i);
            }
        }
        out
    }

    fn grow(&mut self, seed: usize) -> Option<LineSegment> {
        let f = self.field;
        let theta = f.orientation[seed] as f64;
        let mut dir = Point::new(math::cos(theta), math::sin(theta));
        let seed_pos = self.pos(seed);
        let mut anchor = seed_pos;
        let mut moments = Moments::default();

        let first = self.collect(seed_pos, anchor, dir);
        let mut first_members = vec![seed];
        first_members.extend(first.into_iter().filter(|&i| i != seed));
        for &i in &first_members {
            self.consumed[i] = true;
            moments.add(self.pos(i), f.gain[i] as f64);
        }
        let mut forward: Vec<Step> = Vec::new();
        let mut backward: Vec<Step> = Vec::new();
        let min_fit_steps = 2 * (math::floor(self.params.offset_tol) as usize) + 3;

        for sign in [1.0, -1.0] {
            let mut head = seed_pos;
            let mut gap = 0;
            loop {
                let next = head + dir * sign;
                let found = self.collect(next, anchor, dir);
                head = next;
                if found.is_empty() {
                    gap += 1;
                    if gap > self.params.max_gap {
                        break;
                    }
                    continue;
                }
                gap = 0;
                for &i in &found {
                    self.consumed[i] = true;
                    moments.add(self.pos(i), f.gain[i] as f64);
                }
                let steps = if sign > 0.0 { &mut forward } else { &mut backward };
                steps.push(Step { members: found });
                if forward.len() + backward.len() + 1 >= min_fit_steps {
                    dir = moments.direction(dir);
                    anchor = moments.centroid();
                    head = anchor + dir * (head - anchor).dot(dir);
                }
            }
        }

        let mut steps: Vec<Step> = backward.into_iter().rev().collect();
        steps.push(Step { members: first_members });
        steps.extend(forward);
        self.trim(&mut steps);
        self.finish(&steps, dir)
    }

    fn step_contrast(&self, step: &Step) -> f32 {
        step.members.iter().map(|&i| self.field.contrast[i]).fold(f32::NEG_INFINITY, f32::max)
    }

    /// Drops end steps that lie past the drawn stroke: the filter's long
    /// strip keeps answering there, the single-pixel contrast does not.
    fn trim(&self, steps: &mut Vec<Step>) {
        if steps.is_empty() {
            return;
        }
        let mut contrasts: Vec<f32> = steps.iter().map(|s| self.step_contrast(s)).collect();
        let mut sorted = contrasts.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = sorted[sorted.len() / 2];
        if !(median > 0.0) {
            steps.clear();
            return;
        }
        let cut = (self.params.trim_ratio as f32) * median;
        let start = contrasts.iter().position(|&c| c >= cut).unwrap_or(contrasts.len());
        let end = contrasts.iter().rposition(|&c| c >= cut).map_or(start, |e| e + 1);
        steps.truncate(end);
        steps.drain(..start);
        contrasts.clear();
    }

    fn finish(&self, steps: &[Step], hint: Point) -> Option<LineSegment> {
        let f = self.field;
        let mut moments = Moments::default();
        let mut count = 0usize;
        let mut gain_sum = 0.0;
        for step in steps {
            for &i in &step.members {
                moments.add(self.pos(i), f.gain[i] as f64);
                gain_sum += f.gain[i] as f64;
                count += 1;
            }
        }
        if count < 2 {
            return None;
        }
        let centroid = moments.centroid();
        let dir = moments.direction(hint);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for step in steps {
            for &i in &step.members {
                let t = (self.pos(i) - centroid).dot(dir);
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        if hi - lo < self.params.min_length {
            return None;
        }
        let p0 = clamp_to_image(centroid + dir * lo, f.width, f.height);
        let p1 = clamp_to_image(centroid + dir * hi, f.width, f.height);
        let occupied = steps.iter().filter(|s| !s.members.is_empty()).count().max(1);
        Some(LineSegment {
            p0,
            p1,
            gain: gain_sum / count as f64,
            width_estimate: count as f64 / occupied as f64,
        })
    }
}

fn clamp_to_image(p: Point, w: usize, h: usize) -> Point {
    Point::new(p.x.clamp(-1.0, w as f64), p.y.clamp(-1.0, h as f64))
}

/// Walks the merged field into line segments.
///
/// Seeds are pixels whose gain is a maximum of their 8-neighborhood,
/// visited by descending gain with ties in row-major order. Each pixel
/// joins at most one segment.
pub fn trace_segments(field: &LinearityField, params: &TracerParams) -> VectorScene {
    let (w, h) = (field.width, field.height);
    let mut seeds: Vec<usize> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let g = field.gain[y * w + x];
            if g <= 0.0 {
                continue;
            }
            let mut is_max = true;
            'nb: for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    if field.gain[ny as usize * w + nx as usize] > g {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                seeds.push(y * w + x);
            }
        }
    }
    seeds.sort_by(|&a, &b| field.gain[b].total_cmp(&field.gain[a]).then(a.cmp(&b)));

    let mut walker = Walker { field, params, consumed: vec![false; w * h] };
    let mut segments = Vec::new();
    for seed in seeds {
        if walker.consumed[seed] {
            continue;
        }
        if let Some(seg) = walker.grow(seed) {
            segments.push(seg);
        }
    }
    let mut segments = join_collinear(segments, params.angle_tol / 2.0, params.offset_tol, params.join_gap);
    close_junctions(&mut segments, params.junction_reach);
    for s in &mut segments {
        s.p0 = clamp_to_image(s.p0, w, h);
        s.p1 = clamp_to_image(s.p1, w, h);
    }
    segments.retain(|s| s.length() >= params.min_length);
    VectorScene {
        segments,
        width: w,
        height: h,
        luminosity_range: field.luminosity_range,
        provenance: Provenance {
            source: String::new(),
            detector: DetectorParams::default(),
            tracer: params.clone(),
            snap_tol_deg: None,
        },
    }
}
