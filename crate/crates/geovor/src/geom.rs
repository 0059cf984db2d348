//! Planar and lifted geometric primitives shared across the crate.
//!
//! Coordinates are `f64`. All *combinatorial* decisions (point in triangle,
//! segment crossing, winding) go through the exact-sign orientation predicate
//! so that topology never flips on rounding; lengths and areas are plain
//! floating point.

use serde::{Deserialize, Serialize};

/// Point in the unit-square domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// Point on the lifted terrain surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Closed planar segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn project(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Euclidean distance in the (x, y) plane.
pub fn euclid_dist(p: Point2, q: Point2) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Euclidean distance between lifted points.
pub fn dist3(p: Point3, q: Point3) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Sign of the orientation of the triple (a, b, c), computed exactly.
///
/// `1` if counter-clockwise, `-1` if clockwise, `0` if collinear.
pub fn orient(a: Point2, b: Point2, c: Point2) -> i8 {
    let v = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    // robust::orient2d is positive for counter-clockwise triples.
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Signed (floating point) twice-area of the triangle (a, b, c).
pub fn cross2(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Whether `p` lies in the closed triangle (a, b, c), by exact signs.
pub fn point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    let o1 = orient(a, b, p);
    let o2 = orient(b, c, p);
    let o3 = orient(c, a, p);
    (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0)
}

impl Segment2 {
    pub fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        euclid_dist(self.a, self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        Point2::new(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))
    }

    /// Distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let vx = self.b.x - self.a.x;
        let vy = self.b.y - self.a.y;
        let wx = p.x - self.a.x;
        let wy = p.y - self.a.y;
        let len2 = vx * vx + vy * vy;
        if len2 == 0.0 {
            return euclid_dist(p, self.a);
        }
        let t = ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0);
        euclid_dist(p, Point2::new(self.a.x + t * vx, self.a.y + t * vy))
    }

    /// Whether the segment intersects the closed disk of radius `r` at `c`.
    pub fn intersects_disk(&self, c: Point2, r: f64) -> bool {
        self.distance_to(c) <= r
    }
}

/// Circumcenter of (a, b, c), or `None` for a collinear triple.
pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Option<Point2> {
    let d = 2.0 * cross2(a, b, c);
    if d == 0.0 {
        return None;
    }
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    Some(Point2::new(ux, uy))
}
