//! Small 2D geometry kernel shared by the pipeline stages.
//!
//! Coordinates are sketch pixels at native resolution with the y axis
//! pointing down, pixel `(i, j)` centered on `(i, j)`.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Unit vector, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(Self::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    pub fn midpoint(self, other: Self) -> Self {
        Self::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Flips a direction so its leading nonzero component is positive.
    pub fn canonical_direction(self) -> Self {
        if self.x < 0.0 || (self.x == 0.0 && self.y < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Quarter turn that maps `(0, 1)` to `(1, 0)`. On a y-down canvas this
    /// is a counter-clockwise turn as seen on screen.
    pub fn quarter_turn(self) -> Self {
        Self::new(self.y, -self.x)
    }

    /// Line orientation in `[0, pi)`.
    pub fn orientation(self) -> f64 {
        math::normalize_line_angle(math::atan2(self.y, self.x))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Parameter of the orthogonal projection of `p` onto the line `a + t (b - a)`.
pub fn project_param(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        0.0
    } else {
        (p - a).dot(d) / len2
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let t = project_param(p, a, b).clamp(0.0, 1.0);
    p.distance(a + (b - a) * t)
}

/// Intersection of two segments as `(t, u, point)` with `t` along `[a0, a1]`
/// and `u` along `[b0, b1]`. Parallel segments never intersect here.
pub fn segment_intersection(
    a0: Point,
    a1: Point,
    b0: Point,
    b1: Point,
) -> Option<(f64, f64, Point)> {
    let r = a1 - a0;
    let s = b1 - b0;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = b0 - a0;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u, a0 + r * t))
    } else {
        None
    }
}

/// Area of the convex hull of `points` (Andrew's monotone chain).
pub fn convex_hull_area(points: &[Point]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: &mut dyn Iterator<Item = &Point> = if pass == 0 {
            &mut pts.iter()
        } else {
            &mut pts.iter().rev()
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut area = 0.0;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        area += a.cross(b);
    }
    math::abs(area) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turn_maps_down_to_right() {
        assert_eq!(Point::new(0.0, 1.0).quarter_turn(), Point::new(1.0, 0.0));
        assert_eq!(Point::new(1.0, 0.0).quarter_turn(), Point::new(0.0, -1.0));
    }

    #[test]
    fn canonical_direction_flips_negative_leading_component() {
        assert_eq!(Point::new(-1.0, 2.0).canonical_direction(), Point::new(1.0, -2.0));
        assert_eq!(Point::new(0.0, -1.0).canonical_direction(), Point::new(0.0, 1.0));
        assert_eq!(Point::new(0.0, 1.0).canonical_direction(), Point::new(0.0, 1.0));
    }

    #[test]
    fn crossing_segments_intersect_at_center() {
        let (t, u, p) = segment_intersection(
            Point::new(0.0, 5.0),
            Point::new(10.0, 5.0),
            Point::new(5.0, 0.0),
            Point::new(5.0, 10.0),
        )
        .unwrap();
        assert_eq!((t, u), (0.5, 0.5));
        assert_eq!(p, Point::new(5.0, 5.0));
    }

    #[test]
    fn hull_area_of_square_with_interior_point() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
            Point::new(5.0, 5.0),
            Point::new(5.0, 0.0),
        ];
        assert_eq!(convex_hull_area(&pts), 100.0);
    }

    #[test]
    fn point_segment_distance_clamps_to_ends() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(10.0, 0.0);
        assert_eq!(point_segment_distance(Point::new(5.0, 3.0), a, b), 3.0);
        assert_eq!(point_segment_distance(Point::new(13.0, 4.0), a, b), 5.0);
    }
}
