//! Random planar Voronoi cells on the unit torus.
//!
//! Samples live in `[0,1)^2` with opposite edges identified. Cells are
//! computed in the covering plane by clipping against the bisectors of the
//! replicated sites (3x3 copies; 5x5 for very small samples), which is valid
//! while the resulting cell has diameter below 1/2 — the constructor checks
//! that and refuses otherwise.

use crate::convex::{
    chebyshev_center, clip_polygon, edge_halfplanes, polygon_area, polygon_diameter,
    smallest_enclosing_circle, HalfPlane,
};
use crate::geom::{euclid_dist, Point2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FatnessError {
    #[error("cell of site {index} has diameter {diameter:.4} >= 1/2; torus replication is insufficient")]
    CellTooLarge { index: usize, diameter: f64 },
    #[error("need at least two distinct sites")]
    TooFewSites,
}

/// Voronoi cell of one site of a torus sample, as a convex polygon in the
/// covering plane around the central copy of the site.
#[derive(Debug, Clone)]
pub struct TorusVoronoiCell {
    pub site: Point2,
    pub polygon: Vec<Point2>,
    pub m: usize,
}

/// Enclosing/inscribed disk summary of a cell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FatnessRecord {
    pub diameter: f64,
    pub enclosing_radius: f64,
    pub inscribed_radius: f64,
    pub fatness: f64,
}

/// Offsets of the replicated copies: 3x3 for m > 4, 5x5 otherwise.
fn offsets(m: usize) -> Vec<(f64, f64)> {
    let span: i32 = if m <= 4 { 2 } else { 1 };
    let mut out = Vec::new();
    for dy in -span..=span {
        for dx in -span..=span {
            out.push((dx as f64, dy as f64));
        }
    }
    out
}

/// Computes the torus Voronoi cell of `sample[index]`.
///
/// Bisectors are applied nearest-first and clipping stops once every
/// remaining replica is more than twice as far as the farthest cell vertex,
/// since such a bisector cannot cut the polygon.
pub fn torus_cell(sample: &[Point2], index: usize) -> Result<TorusVoronoiCell, FatnessError> {
    if sample.len() < 2 {
        return Err(FatnessError::TooFewSites);
    }
    let site = sample[index];
    let offs = offsets(sample.len());
    let mut replicas: Vec<(f64, Point2)> = Vec::with_capacity(sample.len() * offs.len());
    for (j, &q) in sample.iter().enumerate() {
        for &(dx, dy) in &offs {
            if j == index && dx == 0.0 && dy == 0.0 {
                continue;
            }
            let r = Point2::new(q.x + dx, q.y + dy);
            replicas.push((euclid_dist(site, r), r));
        }
    }
    replicas.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut poly = vec![
        Point2::new(site.x - 1.5, site.y - 1.5),
        Point2::new(site.x + 1.5, site.y - 1.5),
        Point2::new(site.x + 1.5, site.y + 1.5),
        Point2::new(site.x - 1.5, site.y + 1.5),
    ];
    for &(d, q) in &replicas {
        let reach = poly
            .iter()
            .map(|&v| euclid_dist(site, v))
            .fold(0.0f64, f64::max);
        if d > 2.0 * reach {
            break;
        }
        poly = clip_polygon(&poly, &HalfPlane::bisector(site, q));
        if poly.is_empty() {
            break;
        }
    }

    let diameter = polygon_diameter(&poly);
    if !(diameter < 0.5) || poly.len() < 3 {
        return Err(FatnessError::CellTooLarge { index, diameter });
    }
    Ok(TorusVoronoiCell { site, polygon: poly, m: sample.len() })
}

/// Fatness of a convex polygon: smallest enclosing disk radius over largest
/// inscribed disk radius (Chebyshev center of the edge half-planes, solved
/// by bisection to 1e-9).
pub fn polygon_fatness(polygon: &[Point2]) -> FatnessRecord {
    let enclosing = smallest_enclosing_circle(polygon);
    let (_, inscribed) = chebyshev_center(&edge_halfplanes(polygon), 1e-9);
    FatnessRecord {
        diameter: polygon_diameter(polygon),
        enclosing_radius: enclosing.radius,
        inscribed_radius: inscribed,
        fatness: enclosing.radius / inscribed,
    }
}

pub fn cell_fatness(cell: &TorusVoronoiCell) -> FatnessRecord {
    polygon_fatness(&cell.polygon)
}

/// Torus distance between two points of the fundamental square.
pub fn torus_dist(p: Point2, q: Point2) -> f64 {
    let dx = (p.x - q.x).abs();
    let dy = (p.y - q.y).abs();
    let dx = dx.min(1.0 - dx);
    let dy = dy.min(1.0 - dy);
    dx.hypot(dy)
}

/// Nearest replica of `q` (over 3x3 offsets) to `p`, with its distance.
fn nearest_replica(p: Point2, q: Point2) -> (f64, Point2) {
    let mut best = (f64::INFINITY, q);
    for dy in -1..=1 {
        for dx in -1..=1 {
            let r = Point2::new(q.x + dx as f64, q.y + dy as f64);
            let d = euclid_dist(p, r);
            if d < best.0 {
                best = (d, r);
            }
        }
    }
    best
}

/// Distances and replica positions of the two nearest sample points to
/// `sample[index]`, in torus metric.
pub fn two_nearest(sample: &[Point2], index: usize) -> ((f64, Point2), (f64, Point2)) {
    let p = sample[index];
    let mut first = (f64::INFINITY, p);
    let mut second = (f64::INFINITY, p);
    for (j, &q) in sample.iter().enumerate() {
        if j == index {
            continue;
        }
        let cand = nearest_replica(p, q);
        if cand.0 < first.0 {
            second = first;
            first = cand;
        } else if cand.0 < second.0 {
            second = cand;
        }
    }
    (first, second)
}

pub fn sample_torus(m: usize, rng: &mut impl Rng) -> Vec<Point2> {
    (0..m).map(|_| Point2::new(rng.random(), rng.random())).collect()
}

/// Diameter bound of the tail lemma: `R_j = 4 * 3^(-1/4) * sqrt(j/(m-1))`.
pub fn diameter_bound(m: usize, j: u32) -> f64 {
    4.0 * 3f64.powf(-0.25) * (j as f64 / (m as f64 - 1.0)).sqrt()
}

/// Tail probability bound `6 e^(1-j)`.
pub fn diameter_tail_bound(j: u32) -> f64 {
    6.0 * (1.0 - j as f64).exp()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailCheck {
    pub j: u32,
    pub r_j: f64,
    pub bound: f64,
    pub empirical: f64,
    pub trials: usize,
}

/// Empirical probability that the first cell's diameter exceeds `R_j`,
/// versus the `6 e^(1-j)` bound. Cells too large for replication count as
/// exceeding.
pub fn diameter_tail_check(m: usize, trials: usize, j: u32, seed: u64) -> TailCheck {
    let r_j = diameter_bound(m, j);
    let mut exceed = 0usize;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let sample = sample_torus(m, &mut rng);
        match torus_cell(&sample, 0) {
            Ok(cell) => {
                if polygon_diameter(&cell.polygon) > r_j {
                    exceed += 1;
                }
            }
            Err(_) => exceed += 1,
        }
    }
    TailCheck { j, r_j, bound: diameter_tail_bound(j), empirical: exceed as f64 / trials as f64, trials }
}

/// Band radii of the second-neighbor lemma: `r_i = sqrt(1/(i (m-1) pi))`.
pub fn band_radius(m: usize, i: u32) -> f64 {
    (1.0 / (i as f64 * (m as f64 - 1.0) * std::f64::consts::PI)).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandCheck {
    pub i: u32,
    pub r_i: f64,
    pub bound: f64,
    pub empirical: f64,
    pub trials: usize,
}

/// Empirical frequency of the second-nearest-neighbor distance falling in
/// each band `[r_{i+1}, r_i]`, versus the `1/i^2` bound, for `i = 4..=10`.
pub fn second_nn_check(m: usize, trials: usize, seed: u64) -> Vec<BandCheck> {
    let mut counts = [0usize; 11];
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let sample = sample_torus(m, &mut rng);
        let (_, (x, _)) = two_nearest(&sample, 0);
        for i in 4..=10u32 {
            if x >= band_radius(m, i + 1) && x <= band_radius(m, i) {
                counts[i as usize] += 1;
            }
        }
    }
    (4..=10u32)
        .map(|i| BandCheck {
            i,
            r_i: band_radius(m, i),
            bound: 1.0 / (i as f64 * i as f64),
            empirical: counts[i as usize] as f64 / trials as f64,
            trials,
        })
        .collect()
}

/// Witness disk of the inscribed-disk lemma: with the second-neighbor
/// distance in band `i`, a disk of radius `r_{i+1}/4` placed on the line
/// through the site and its nearest neighbor, on the far side, must lie in
/// the cell. Returns whether it does.
pub fn inscribed_witness_check(sample: &[Point2], index: usize) -> Result<bool, FatnessError> {
    let cell = torus_cell(sample, index)?;
    let p = sample[index];
    let ((_, q), (x, _)) = two_nearest(sample, index);
    // Smallest band index with r_{i+1} <= X; using a band below X only
    // shrinks the witness radius.
    let m = sample.len();
    let mut i = 1u32;
    while band_radius(m, i + 1) > x {
        i += 1;
        if i > 10_000 {
            return Ok(false); // degenerate duplicate points
        }
    }
    let rad = band_radius(m, i + 1) / 4.0;
    let ux = p.x - q.x;
    let uy = p.y - q.y;
    let norm = ux.hypot(uy);
    let center = Point2::new(p.x + rad * ux / norm, p.y + rad * uy / norm);
    let ok = edge_halfplanes(&cell.polygon)
        .iter()
        .all(|hp| hp.signed_excess(center) <= -rad + 1e-12);
    Ok(ok)
}

/// Positive test distributions for the Markov helper bound.
#[derive(Debug, Clone, Copy)]
pub enum PositiveDist {
    Constant(f64),
    /// Uniform on (0, 2*mean).
    Uniform { mean: f64 },
    Exponential { mean: f64 },
}

impl PositiveDist {
    pub fn mean(&self) -> f64 {
        match *self {
            PositiveDist::Constant(mu) => mu,
            PositiveDist::Uniform { mean } | PositiveDist::Exponential { mean } => mean,
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            PositiveDist::Constant(mu) => mu,
            PositiveDist::Uniform { mean } => rng.random::<f64>() * 2.0 * mean,
            PositiveDist::Exponential { mean } => {
                let u: f64 = rng.random();
                -mean * (1.0 - u).ln()
            }
        }
    }
}

/// Monte Carlo check of `E[exp(-X)] >= exp(-2 mu)/2` for a positive X.
/// Returns `(lhs_estimate, rhs_bound)`.
pub fn markov_exp_check(dist: PositiveDist, trials: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..trials {
        acc += (-dist.draw(&mut rng)).exp();
    }
    (acc / trials as f64, (-2.0 * dist.mean()).exp() / 2.0)
}

/// Sum of all torus cell areas of a sample (should tile the unit square).
pub fn total_cell_area(sample: &[Point2]) -> Result<f64, FatnessError> {
    let mut total = 0.0;
    for i in 0..sample.len() {
        total += polygon_area(&torus_cell(sample, i)?.polygon);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(k: usize) -> Vec<Point2> {
        let mut v = Vec::new();
        for j in 0..k {
            for i in 0..k {
                v.push(Point2::new(
                    (i as f64 + 0.5) / k as f64,
                    (j as f64 + 0.5) / k as f64,
                ));
            }
        }
        v
    }

    #[test]
    fn lattice_cells_are_squares() {
        let sample = lattice(4);
        let cell = torus_cell(&sample, 5).unwrap();
        let rec = cell_fatness(&cell);
        assert!((polygon_area(&cell.polygon) - 1.0 / 16.0).abs() < 1e-9);
        assert!((rec.fatness - 2f64.sqrt()).abs() < 1e-6);
        assert!((rec.enclosing_radius - 2f64.sqrt() / 8.0).abs() < 1e-9);
        assert!((rec.inscribed_radius - 1.0 / 8.0).abs() < 1e-7);
    }

    #[test]
    fn antipodal_pair_is_too_large() {
        let sample = vec![Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)];
        assert!(matches!(
            torus_cell(&sample, 0),
            Err(FatnessError::CellTooLarge { .. })
        ));
    }

    #[test]
    fn cells_tile_the_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..5 {
            rng.set_stream(trial);
            let sample = sample_torus(60, &mut rng);
            let total = total_cell_area(&sample).unwrap();
            assert!((total - 1.0).abs() < 1e-6, "area sum {total}");
        }
    }

    #[test]
    fn unit_square_fatness() {
        let square = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let rec = polygon_fatness(&square);
        assert!((rec.enclosing_radius - 2f64.sqrt() / 2.0).abs() < 1e-9);
        assert!((rec.inscribed_radius - 0.5).abs() < 1e-8);
        assert!((rec.fatness - 2f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn equilateral_fatness_is_two() {
        let tri = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 3f64.sqrt() / 2.0),
        ];
        let rec = polygon_fatness(&tri);
        assert!((rec.fatness - 2.0).abs() < 1e-6);
    }

    #[test]
    fn right_triangle_fatness_vs_grid_oracle() {
        // 30-60-90 triangle; brute-force grid search for the inscribed disk.
        let tri = vec![
            Point2::new(0.0, 0.0),
            Point2::new(3f64.sqrt() / 2.0, 0.0),
            Point2::new(0.0, 0.5),
        ];
        let rec = polygon_fatness(&tri);

        let hps = edge_halfplanes(&tri);
        let mut r_grid = 0.0f64;
        let n = 700;
        for iy in 0..n {
            for ix in 0..n {
                let p = Point2::new(ix as f64 / n as f64, 0.5 * iy as f64 / n as f64);
                let d = hps
                    .iter()
                    .map(|h| -h.signed_excess(p))
                    .fold(f64::INFINITY, f64::min);
                r_grid = r_grid.max(d);
            }
        }
        assert!((rec.inscribed_radius - r_grid).abs() < 1e-3);
        // Enclosing radius of a right triangle is half the hypotenuse.
        let hyp = (0.75f64 + 0.25).sqrt();
        assert!((rec.enclosing_radius - hyp / 2.0).abs() < 1e-9);
        assert!((rec.fatness - rec.enclosing_radius / r_grid).abs() < 1e-2);
    }

    #[test]
    fn witness_disk_in_lattice_cells() {
        let sample = lattice(5);
        for idx in [0usize, 7, 12, 24] {
            assert!(inscribed_witness_check(&sample, idx).unwrap());
        }
    }

    #[test]
    fn witness_disk_near_collinear_triple() {
        let sample = vec![
            Point2::new(0.30, 0.50),
            Point2::new(0.35, 0.5001),
            Point2::new(0.40, 0.4999),
            Point2::new(0.80, 0.20),
            Point2::new(0.60, 0.80),
            Point2::new(0.15, 0.25),
            Point2::new(0.12, 0.75),
            Point2::new(0.55, 0.30),
            Point2::new(0.85, 0.55),
            Point2::new(0.45, 0.75),
        ];
        for idx in 0..3 {
            assert!(inscribed_witness_check(&sample, idx).unwrap());
        }
    }

    #[test]
    fn markov_closed_forms() {
        // X ~ Uniform(0,2): E[e^-X] = (1 - e^-2)/2; X ~ Exp(1): 1/2.
        let (lhs, rhs) = markov_exp_check(PositiveDist::Uniform { mean: 1.0 }, 200_000, 3);
        assert!((lhs - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 2e-3);
        assert!(lhs >= rhs);
        let (lhs, rhs) = markov_exp_check(PositiveDist::Exponential { mean: 1.0 }, 200_000, 4);
        assert!((lhs - 0.5).abs() < 2e-3);
        assert!(lhs >= rhs);
        let (lhs, rhs) = markov_exp_check(PositiveDist::Constant(0.7), 10, 5);
        assert!(lhs >= rhs);
    }

    #[test]
    fn fatness_at_least_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..40 {
            rng.set_stream(trial);
            let sample = sample_torus(128, &mut rng);
            let rec = cell_fatness(&torus_cell(&sample, 0).unwrap());
            assert!(rec.fatness >= 1.0 - 1e-9);
            assert!(rec.diameter <= 2.0 * rec.enclosing_radius + 1e-12);
            assert!(rec.inscribed_radius > 0.0);
        }
    }
}
