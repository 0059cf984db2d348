//! Convex polygon machinery: half-plane clipping, smallest enclosing circle,
//! and the Chebyshev center (largest inscribed disk) of a half-plane
//! intersection.

use crate::geom::{cross2, euclid_dist, Point2};

/// The closed half-plane `n . x <= b` with `|n| = 1`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub nx: f64,
    pub ny: f64,
    pub b: f64,
}

impl HalfPlane {
    pub fn new(nx: f64, ny: f64, b: f64) -> Self {
        let len = nx.hypot(ny);
        Self { nx: nx / len, ny: ny / len, b: b / len }
    }

    /// Perpendicular bisector half-plane containing `p` (against `q`).
    pub fn bisector(p: Point2, q: Point2) -> Self {
        let nx = q.x - p.x;
        let ny = q.y - p.y;
        let mx = 0.5 * (p.x + q.x);
        let my = 0.5 * (p.y + q.y);
        Self::new(nx, ny, nx * mx + ny * my)
    }

    pub fn signed_excess(&self, p: Point2) -> f64 {
        self.nx * p.x + self.ny * p.y - self.b
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.signed_excess(p) <= 0.0
    }

    /// The same half-plane shrunk inward by `r`.
    pub fn shrunk(&self, r: f64) -> Self {
        Self { nx: self.nx, ny: self.ny, b: self.b - r }
    }
}

/// Sutherland-Hodgman clip of a convex polygon by one half-plane.
pub fn clip_polygon(poly: &[Point2], hp: &HalfPlane) -> Vec<Point2> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let dc = hp.signed_excess(cur);
        let dn = hp.signed_excess(nxt);
        if dc <= 0.0 {
            out.push(cur);
        }
        if (dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0) {
            let t = dc / (dc - dn);
            out.push(Point2::new(cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)));
        }
    }
    out
}

/// Signed area of a polygon (positive for counter-clockwise).
pub fn polygon_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Maximum pairwise vertex distance.
pub fn polygon_diameter(poly: &[Point2]) -> f64 {
    let mut best = 0.0f64;
    for (i, &p) in poly.iter().enumerate() {
        for &q in poly.iter().skip(i + 1) {
            best = best.max(euclid_dist(p, q));
        }
    }
    best
}

/// Outward edge half-planes of a counter-clockwise convex polygon.
pub fn edge_halfplanes(poly: &[Point2]) -> Vec<HalfPlane> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        // Outward normal of a CCW edge is the right-hand normal.
        let nx = b.y - a.y;
        let ny = a.x - b.x;
        out.push(HalfPlane::new(nx, ny, nx * a.x + ny * a.y));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

fn circle_from2(a: Point2, b: Point2) -> Circle {
    let c = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    Circle { center: c, radius: euclid_dist(a, b) / 2.0 }
}

fn circle_from3(a: Point2, b: Point2, c: Point2) -> Option<Circle> {
    crate::geom::circumcenter(a, b, c).map(|center| Circle {
        center,
        radius: euclid_dist(center, a),
    })
}

fn circle_contains(c: &Circle, p: Point2) -> bool {
    euclid_dist(c.center, p) <= c.radius * (1.0 + 1e-12) + 1e-300
}

/// Smallest enclosing circle, Welzl move-to-front. Deterministic (no
/// shuffle); inputs here are polygon vertex lists of a few dozen points.
pub fn smallest_enclosing_circle(points: &[Point2]) -> Circle {
    let mut c = Circle { center: Point2::new(0.0, 0.0), radius: -1.0 };
    for (i, &p) in points.iter().enumerate() {
        if c.radius < 0.0 || !circle_contains(&c, p) {
            c = sec_one(&points[..=i], p);
        }
    }
    c
}

fn sec_one(points: &[Point2], p: Point2) -> Circle {
    let mut c = Circle { center: p, radius: 0.0 };
    for (i, &q) in points.iter().enumerate() {
        if !circle_contains(&c, q) {
            c = if c.radius == 0.0 { circle_from2(p, q) } else { sec_two(&points[..=i], p, q) };
        }
    }
    c
}

fn sec_two(points: &[Point2], p: Point2, q: Point2) -> Circle {
    let circ = circle_from2(p, q);
    let mut left: Option<Circle> = None;
    let mut right: Option<Circle> = None;
    for &r in points {
        if circle_contains(&circ, r) {
            continue;
        }
        let cross = cross2(p, q, r);
        if let Some(c) = circle_from3(p, q, r) {
            let cc = cross2(p, q, c.center);
            if cross > 0.0 && (left.is_none() || cc > cross2(p, q, left.unwrap().center)) {
                left = Some(c);
            } else if cross < 0.0 && (right.is_none() || cc < cross2(p, q, right.unwrap().center)) {
                right = Some(c);
            }
        }
    }
    match (left, right) {
        (None, None) => circ,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

/// Chebyshev center of a bounded half-plane intersection: the center and
/// radius of the largest inscribed disk.
///
/// Bisection on the radius: `rho` is feasible iff the polygon shrunk by
/// `rho` on every side is nonempty. Runs until the radius bracket is below
/// `tol` (1e-9 in all callers).
pub fn chebyshev_center(halfplanes: &[HalfPlane], tol: f64) -> (Point2, f64) {
    // A generous initial box; callers intersect with their own bounds first.
    let seed = |rho: f64| -> Vec<Point2> {
        let mut poly = vec![
            Point2::new(-8.0, -8.0),
            Point2::new(8.0, -8.0),
            Point2::new(8.0, 8.0),
            Point2::new(-8.0, 8.0),
        ];
        for hp in halfplanes {
            poly = clip_polygon(&poly, &hp.shrunk(rho));
            if poly.is_empty() {
                break;
            }
        }
        poly
    };

    let base = seed(0.0);
    if base.is_empty() {
        return (Point2::new(f64::NAN, f64::NAN), 0.0);
    }
    let mut lo = 0.0f64;
    let mut hi = polygon_diameter(&base).max(tol);
    let mut center = base[0];
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let poly = seed(mid);
        if poly.is_empty() {
            hi = mid;
        } else {
            lo = mid;
            center = poly[0];
        }
    }
    (center, lo)
}
