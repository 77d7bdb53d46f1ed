//! Synthetic orthogonal floorplan sketches with known ground truth.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use sketchopt_core::raster::RasterImage;
use sketchopt_core::Point;

/// A ground-truth wall centerline with its stroke width in pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    pub p0: Point,
    pub p1: Point,
    pub width: u32,
}

impl Wall {
    fn horizontal(&self) -> bool {
        self.p0.y == self.p1.y
    }
}

/// An I-mark: stem of `length` centered at `center`, caps of `cap` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Mark {
    pub center: Point,
    pub horizontal_stem: bool,
    pub length: f64,
    pub cap: f64,
}

impl Mark {
    pub fn strokes(&self) -> [Wall; 3] {
        let (c, h, k) = (self.center, self.length / 2.0, self.cap / 2.0);
        if self.horizontal_stem {
            [
                Wall { p0: Point::new(c.x - h, c.y), p1: Point::new(c.x + h, c.y), width: 1 },
                Wall { p0: Point::new(c.x - h, c.y - k), p1: Point::new(c.x - h, c.y + k), width: 1 },
                Wall { p0: Point::new(c.x + h, c.y - k), p1: Point::new(c.x + h, c.y + k), width: 1 },
            ]
        } else {
            [
                Wall { p0: Point::new(c.x, c.y - h), p1: Point::new(c.x, c.y + h), width: 1 },
                Wall { p0: Point::new(c.x - k, c.y - h), p1: Point::new(c.x + k, c.y - h), width: 1 },
                Wall { p0: Point::new(c.x - k, c.y + h), p1: Point::new(c.x + k, c.y + h), width: 1 },
            ]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub width: usize,
    pub height: usize,
    pub walls: Vec<Wall>,
    pub marks: Vec<Mark>,
}

fn centerline(top: i64, width: u32) -> f64 {
    top as f64 + (width as f64 - 1.0) / 2.0
}

/// Random guillotine plan: an outer rectangle whose rooms are split
/// recursively by walls running wall to wall, `n_walls` walls in total
/// (at least 4). Parallel walls keep `gap` pixels apart everywhere, so no
/// two T-junctions line up into a crossing.
pub fn random_plan<R: Rng>(rng: &mut R, size: usize, n_walls: usize, gap: f64) -> Plan {
    let margin = (size as f64 * 0.06).round();
    let (lo, hi) = (margin, size as f64 - 1.0 - margin);
    let mut width = || rng.random_range(1..=3u32);
    let mut walls = Vec::new();
    let (wt, wb, wl, wr) = (width(), width(), width(), width());
    let top = centerline(lo as i64, wt);
    let bottom = centerline(hi as i64, wb);
    let left = centerline(lo as i64, wl);
    let right = centerline(hi as i64, wr);
    walls.push(Wall { p0: Point::new(left, top), p1: Point::new(right, top), width: wt });
    walls.push(Wall { p0: Point::new(left, bottom), p1: Point::new(right, bottom), width: wb });
    walls.push(Wall { p0: Point::new(left, top), p1: Point::new(left, bottom), width: wl });
    walls.push(Wall { p0: Point::new(right, top), p1: Point::new(right, bottom), width: wr });
    let mut rooms = vec![(left, top, right, bottom)];
    let mut xs = vec![left, right];
    let mut ys = vec![top, bottom];
    let mut tries = 0;
    while walls.len() < n_walls && tries < 1000 {
        tries += 1;
        let i = rng.random_range(0..rooms.len());
        let (x0, y0, x1, y1) = rooms[i];
        let vertical = if (x1 - x0) > 1.5 * (y1 - y0) {
            true
        } else if (y1 - y0) > 1.5 * (x1 - x0) {
            false
        } else {
            rng.random_bool(0.5)
        };
        let (a, b) = if vertical { (x0, x1) } else { (y0, y1) };
        if b - a < 3.0 * gap {
            continue;
        }
        let w = rng.random_range(1..=3u32);
        let c = centerline(rng.random_range((a + gap) as i64..(b - gap) as i64), w);
        let used = if vertical { &mut xs } else { &mut ys };
        if used.iter().any(|u| (u - c).abs() < gap) {
            continue;
        }
        used.push(c);
        rooms.swap_remove(i);
        if vertical {
            walls.push(Wall { p0: Point::new(c, y0), p1: Point::new(c, y1), width: w });
            rooms.push((x0, y0, c, y1));
            rooms.push((c, y0, x1, y1));
        } else {
            walls.push(Wall { p0: Point::new(x0, c), p1: Point::new(x1, c), width: w });
            rooms.push((x0, y0, x1, c));
            rooms.push((x0, c, x1, y1));
        }
    }
    Plan { width: size, height: size, walls, marks: Vec::new() }
}

/// Adds up to `n` I-marks, each across a distinct interior wall, away from
/// every other stroke. Returns how many were placed.
pub fn add_marks<R: Rng>(rng: &mut R, plan: &mut Plan, n: usize) -> usize {
    let mut candidates: Vec<usize> = (4..plan.walls.len()).collect();
    let mut placed = 0;
    while placed < n && !candidates.is_empty() {
        let k = candidates.swap_remove(rng.random_range(0..candidates.len()));
        let wall = plan.walls[k].clone();
        // Caps stay at least twice the tracer's 8 px minimum length.
        let length = rng.random_range(40.0..80.0f64).round();
        let cap = (length * 0.4).round();
        for _ in 0..20 {
            let t = rng.random_range(0.2..0.8);
            let on = wall.p0 + (wall.p1 - wall.p0) * t;
            let center = Point::new(on.x.round(), on.y.round());
            let mark = Mark { center, horizontal_stem: !wall.horizontal(), length, cap };
            if mark_is_clear(plan, &mark, k) {
                plan.marks.push(mark);
                placed += 1;
                break;
            }
        }
    }
    placed
}

fn mark_is_clear(plan: &Plan, mark: &Mark, target: usize) -> bool {
    let strokes = mark.strokes();
    let reach = mark.length / 2.0 + 12.0;
    for (i, w) in plan.walls.iter().enumerate() {
        if i == target {
            continue;
        }
        let d = sketchopt_core::geom::point_segment_distance(mark.center, w.p0, w.p1);
        if d < reach {
            return false;
        }
    }
    plan.marks.iter().all(|m| {
        let other = m.strokes();
        strokes.iter().all(|s| {
            other.iter().all(|o| {
                s.p0.distance(o.p0) > reach && (s.p0.midpoint(s.p1)).distance(o.p0.midpoint(o.p1)) > reach
            })
        })
    })
}

/// Rasterization settings: ink and background intensities and the
/// additive Gaussian noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ink {
    pub background: f32,
    pub wall: f32,
    pub mark: f32,
    pub noise_sigma: f32,
}

impl Default for Ink {
    fn default() -> Self {
        Self { background: 1.0, wall: 0.1, mark: 0.35, noise_sigma: 0.0 }
    }
}

/// Draws every wall and mark as an axis-aligned bar `width` pixels thick,
/// extended by one pixel past each end so corners close.
pub fn render<R: Rng>(plan: &Plan, ink: Ink, rng: &mut R) -> RasterImage {
    let (w, h) = (plan.width, plan.height);
    let mut px = vec![ink.background; w * h];
    let mut draw = |s: &Wall, value: f32| {
        let half = (s.width as f64 - 1.0) / 2.0;
        let (x0, x1) = (s.p0.x.min(s.p1.x), s.p0.x.max(s.p1.x));
        let (y0, y1) = (s.p0.y.min(s.p1.y), s.p0.y.max(s.p1.y));
        let ext = if s.width > 1 { 1.0 } else { 0.0 };
        let (ax, bx, ay, by) = if s.p0.y == s.p1.y {
            (x0 - ext, x1 + ext, y0 - half, y1 + half)
        } else {
            (x0 - half, x1 + half, y0 - ext, y1 + ext)
        };
        let clampi = |v: f64, n: usize| (v.round().max(0.0) as usize).min(n - 1);
        for y in clampi(ay, h)..=clampi(by, h) {
            for x in clampi(ax, w)..=clampi(bx, w) {
                let p = &mut px[y * w + x];
                *p = p.min(value);
            }
        }
    };
    for wall in &plan.walls {
        draw(wall, ink.wall);
    }
    for m in &plan.marks {
        for s in m.strokes() {
            draw(&s, ink.mark);
        }
    }
    if ink.noise_sigma > 0.0 {
        let normal = Normal::new(0.0f32, ink.noise_sigma).expect("finite sigma");
        for p in &mut px {
            *p = (*p + normal.sample(rng)).clamp(0.0, 1.0);
        }
    }
    RasterImage::new(w, h, px, 32).expect("valid synthetic raster")
}

/// Drawn positions of the case-study walls: two full-height vertical walls
/// and one full-width horizontal wall inside a 600 x 400 shell.
pub const CASE_STUDY_WALLS: (f64, f64, f64) = (215.0, 420.0, 215.0);

/// The bundled three-variable case study: a 700 x 500 sketch with three
/// I-marks, one across each interior wall, each 80 px long.
pub fn case_study() -> Plan {
    let (a, b, c) = CASE_STUDY_WALLS;
    let wall = |x0, y0, x1, y1| Wall { p0: Point::new(x0, y0), p1: Point::new(x1, y1), width: 3 };
    let walls = vec![
        wall(50.0, 50.0, 650.0, 50.0),
        wall(50.0, 450.0, 650.0, 450.0),
        wall(50.0, 50.0, 50.0, 450.0),
        wall(650.0, 50.0, 650.0, 450.0),
        wall(a, 50.0, a, 450.0),
        wall(b, 50.0, b, 450.0),
        wall(50.0, c, 650.0, c),
    ];
    let mark = |x, y, horizontal_stem| Mark { center: Point::new(x, y), horizontal_stem, length: 80.0, cap: 20.0 };
    let marks = vec![mark(a, 340.0, true), mark(b, 130.0, true), mark(540.0, c, false)];
    Plan { width: 700, height: 500, walls, marks }
}
