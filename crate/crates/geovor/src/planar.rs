//! Exact planar Voronoi oracle for flat-terrain cross-checks.
//!
//! Works directly with Euclidean distances and closed forms, independent of
//! the Steiner graph, so it can serve as the reference side of the
//! flat-terrain equivalence tests. Intended for small site sets (it scans
//! site triples).

use crate::geom::{circumcenter, euclid_dist, Point2, Segment2};

/// Number of Voronoi vertices of `sites` strictly inside the open unit
/// square: circumcenters of site triples that no other site invades.
pub fn planar_vertex_count(sites: &[Point2]) -> u64 {
    let m = sites.len();
    let mut found: Vec<Point2> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let Some(c) = circumcenter(sites[i], sites[j], sites[k]) else {
                    continue;
                };
                if !(c.x > 0.0 && c.x < 1.0 && c.y > 0.0 && c.y < 1.0) {
                    continue;
                }
                let r = euclid_dist(c, sites[i]);
                let invaded = sites
                    .iter()
                    .enumerate()
                    .any(|(t, &s)| t != i && t != j && t != k && euclid_dist(c, s) < r - 1e-12);
                if invaded {
                    continue;
                }
                if !found.iter().any(|&p| euclid_dist(p, c) < 1e-9) {
                    found.push(c);
                }
            }
        }
    }
    found.len() as u64
}

/// Number of times the Voronoi diagram of `sites` crosses the segment:
/// parameters where some pair's bisector meets the segment while both sites
/// of the pair are jointly nearest there.
pub fn planar_segment_crossings(sites: &[Point2], seg: &Segment2) -> u64 {
    let m = sites.len();
    let dir = Point2::new(seg.b.x - seg.a.x, seg.b.y - seg.a.y);
    let mut ts: Vec<f64> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            // |x - s_i|^2 = |x - s_j|^2 along x = a + t*dir is linear in t.
            let si = sites[i];
            let sj = sites[j];
            let gx = sj.x - si.x;
            let gy = sj.y - si.y;
            let mid_x = 0.5 * (si.x + sj.x);
            let mid_y = 0.5 * (si.y + sj.y);
            let denom = gx * dir.x + gy * dir.y;
            if denom == 0.0 {
                continue;
            }
            let t = (gx * (mid_x - seg.a.x) + gy * (mid_y - seg.a.y)) / denom;
            if !(0.0..=1.0).contains(&t) {
                continue;
            }
            let p = Point2::new(seg.a.x + t * dir.x, seg.a.y + t * dir.y);
            let d = euclid_dist(p, si);
            let nearer = sites
                .iter()
                .enumerate()
                .any(|(u, &s)| u != i && u != j && euclid_dist(p, s) < d - 1e-12);
            if !nearer {
                ts.push(t);
            }
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ts.len() as u64
}

/// Exact nearest-site label, lowest index on ties.
pub fn nearest_site(sites: &[Point2], p: Point2) -> u32 {
    let mut best = (f64::INFINITY, 0u32);
    for (i, &s) in sites.iter().enumerate() {
        let d = euclid_dist(p, s);
        if d < best.0 {
            best = (d, i as u32);
        }
    }
    best.1
}
