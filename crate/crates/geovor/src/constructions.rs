//! Worst-case construction scenes: a planar grid overlay, the farming
//! layout, and the industrial-farming layout, together with their analytic
//! geodesic metric and the dominating-point elimination simulator.
//!
//! The plateau height and the folded ridge rectangles are never realized
//! numerically. Roads and farms are flat plateaus whose only reachable
//! connections are farm -> entrance -> road -> exit -> along the first
//! ridge, so the metric is encoded directly: distance to an exit is the
//! in-farm Euclidean distance to the entrance, plus the road length, plus
//! the separation of exits along the first ridge. The ridge block
//! contributes a geodesic width of `1/(c 2^n)` (treated as zero) and `2n`
//! edge crossings per traversing cell.

use crate::geom::{euclid_dist, Point2};
use crate::terrain::TriangulatedTerrain;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("m = {m} exceeds the m = O(n) guard ({guard} * n = {limit}) for n = {n}")]
    TooManySitesForRidgeWidth { m: usize, n: usize, guard: f64, limit: f64 },
    #[error("ridge block of length n = {n} is too wide for the farm spacing at m = {m}")]
    RidgeTooWide { n: usize, m: usize },
    #[error("road segment (c) of farm column {i} is negative (i too large for m = {m})")]
    NegativeSegment { i: usize, m: usize },
    #[error("point ({x}, {y}) lies in a forbidden (height-zero) region")]
    OffPlateau { x: f64, y: f64 },
    #[error("{0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    PlanarGrid,
    Farming,
    Industrial,
}

/// A sample-catching square plateau with its road to the first ridge.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Farm {
    /// North-west corner.
    pub origin: Point2,
    pub side: f64,
    /// South-east corner, where the road attaches.
    pub entrance: Point2,
    /// Road endpoint on the first ridge.
    pub exit: Point2,
    pub road_length: f64,
    pub row: u32,
    pub col: u32,
}

impl Farm {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.origin.x
            && p.x <= self.origin.x + self.side
            && p.y <= self.origin.y
            && p.y >= self.origin.y - self.side
    }
}

/// The folded strip of `2n` alternating +-45 degree rectangles.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RidgeBlock {
    /// West edge of the first ridge.
    pub x_position: f64,
    pub rectangle_count: u32,
    /// Geodesic width is `1/(c * 2^n)`, stored by exponent; distances treat
    /// it as zero.
    pub width_log2_denominator: u32,
    pub width_c: f64,
    /// Chord/edge crossings charged per traversing Voronoi cell.
    pub crossing_cost: u32,
}

impl RidgeBlock {
    pub fn geodesic_width(&self) -> f64 {
        (2.0f64).powi(-(self.width_log2_denominator as i32)) / self.width_c
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionScene {
    pub kind: SceneKind,
    pub m: usize,
    pub n: usize,
    /// Farming spacing constant (farm side `1/(c sqrt(m))`).
    pub c: f64,
    /// West wall to first ridge.
    pub w: f64,
    pub farms: Vec<Farm>,
    pub ridge: RidgeBlock,
    /// Recorded `m = O(n)` guard used at generation.
    pub m_over_n_guard: f64,
}

/// Road direction segments of one industrial farm, from the construction's
/// (a)-(d) list.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RoadGeometry {
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub alpha_c: f64,
    pub alpha_d: f64,
    pub exit_x: f64,
    pub length: f64,
}

/// Road of the `i`-th farm of a row: south `i/m`, west `(x_i + i/m)/2`,
/// south `1/sqrt(m) - 2i/m`, then east to the ridge at `x = w`. Every road
/// comes out with length exactly `1/sqrt(m) + w` and exit abscissa `w`.
pub fn road_geometry(i: usize, m: usize, w: f64) -> Result<RoadGeometry, ConstructionError> {
    let sqrt_m = (m as f64).sqrt();
    let x_i = (2 * i + 1) as f64 / sqrt_m;
    let alpha_a = i as f64 / m as f64;
    let alpha_b = (x_i + alpha_a) / 2.0;
    let alpha_c = 1.0 / sqrt_m - 2.0 * alpha_a;
    let alpha_d = w - (x_i - alpha_b);
    if alpha_c < 0.0 || alpha_d < 0.0 {
        return Err(ConstructionError::NegativeSegment { i, m });
    }
    Ok(RoadGeometry {
        alpha_a,
        alpha_b,
        alpha_c,
        alpha_d,
        exit_x: x_i - alpha_b + alpha_d,
        length: alpha_a + alpha_b + alpha_c + alpha_d,
    })
}

fn ridge_block(n: usize, c: f64, w: f64) -> RidgeBlock {
    RidgeBlock {
        x_position: w,
        rectangle_count: 2 * n as u32,
        width_log2_denominator: n as u32,
        width_c: c,
        crossing_cost: 2 * n as u32,
    }
}

fn check_guard(kind: &str, m: usize, n: usize, guard: f64) -> Result<(), ConstructionError> {
    let limit = guard * n as f64;
    if m as f64 > limit {
        return Err(ConstructionError::TooManySitesForRidgeWidth { m, n, guard, limit });
    }
    let _ = kind;
    Ok(())
}

/// Farming scene: `floor(c sqrt(m) / 3)` farms of side `1/(c sqrt(m))` along
/// the west wall with gaps `2/(c sqrt(m))`, each roaded due east to the
/// first ridge.
pub fn gen_farming(
    n: usize,
    m: usize,
    c: f64,
    guard: f64,
    w: f64,
) -> Result<ConstructionScene, ConstructionError> {
    if c < 2.0 {
        return Err(ConstructionError::BadParams(format!("c = {c} must be >= 2")));
    }
    if n == 0 || m == 0 {
        return Err(ConstructionError::BadParams("n and m must be positive".into()));
    }
    check_guard("farming", m, n, guard)?;
    let sqrt_m = (m as f64).sqrt();
    let side = 1.0 / (c * sqrt_m);
    let pitch = 3.0 * side; // side + 2/(c sqrt m) gap
    let count = (c * sqrt_m / 3.0).floor() as usize;
    if count == 0 {
        return Err(ConstructionError::BadParams(format!("no farm fits for m = {m}, c = {c}")));
    }
    // Non-interference needs the ridge-block geodesic width 1/(c 2^n) to be
    // at most the spacing slack (2 - sqrt(2))/(c sqrt(m)).
    if (2.0f64).powi(-(n as i32)) > (2.0 - 2.0f64.sqrt()) / sqrt_m {
        return Err(ConstructionError::RidgeTooWide { n, m });
    }
    let mut farms = Vec::with_capacity(count);
    for f in 0..count {
        let origin = Point2::new(0.0, 1.0 - f as f64 * pitch);
        let entrance = Point2::new(side, origin.y - side);
        let exit = Point2::new(w, entrance.y);
        farms.push(Farm {
            origin,
            side,
            entrance,
            exit,
            road_length: w - side,
            row: f as u32,
            col: 0,
        });
    }
    Ok(ConstructionScene {
        kind: SceneKind::Farming,
        m,
        n,
        c,
        w,
        farms,
        ridge: ridge_block(n, c, w),
        m_over_n_guard: guard,
    })
}

/// Industrial scene: an `M x M` grid of farms of side `1/sqrt(m)`,
/// `M = floor(sqrt(m)/4)`, column spacing `1/sqrt(m)`, row spacing
/// `2/sqrt(m)`, starting at the north-west corner; roads per
/// [`road_geometry`].
pub fn gen_industrial(
    n: usize,
    m: usize,
    guard: f64,
    w: f64,
) -> Result<ConstructionScene, ConstructionError> {
    if n == 0 || m == 0 {
        return Err(ConstructionError::BadParams("n and m must be positive".into()));
    }
    check_guard("industrial", m, n, guard)?;
    let sqrt_m = (m as f64).sqrt();
    let big_m = (sqrt_m / 4.0).floor() as usize;
    if big_m == 0 {
        return Err(ConstructionError::BadParams(format!("m = {m} too small for a farm grid")));
    }
    let a = 1.0 / sqrt_m;
    let mut farms = Vec::with_capacity(big_m * big_m);
    for row in 0..big_m {
        let top = 1.0 - row as f64 * 3.0 * a;
        for col in 0..big_m {
            let geom = road_geometry(col, m, w)?;
            let origin = Point2::new(2.0 * col as f64 * a, top);
            let entrance = Point2::new(origin.x + a, top - a);
            // South by alpha_a + alpha_c below the entrance.
            let exit = Point2::new(geom.exit_x, entrance.y - (geom.alpha_a + geom.alpha_c));
            farms.push(Farm {
                origin,
                side: a,
                entrance,
                exit,
                road_length: geom.length,
                row: row as u32,
                col: col as u32,
            });
        }
    }
    Ok(ConstructionScene {
        kind: SceneKind::Industrial,
        m,
        n,
        c: 1.0,
        w,
        farms,
        ridge: ridge_block(n, 1.0, w),
        m_over_n_guard: guard,
    })
}

impl ConstructionScene {
    /// Farm index containing `p`, by direct arithmetic on the layout.
    pub fn farm_of(&self, p: Point2) -> Option<usize> {
        match self.kind {
            SceneKind::Farming => {
                let side = self.farms[0].side;
                let pitch = 3.0 * side;
                if p.x < 0.0 || p.x > side {
                    return None;
                }
                let depth = 1.0 - p.y;
                if depth < 0.0 {
                    return None;
                }
                let f = (depth / pitch).floor() as usize;
                (f < self.farms.len() && depth - f as f64 * pitch <= side).then_some(f)
            }
            SceneKind::Industrial => {
                let a = self.farms[0].side;
                let big_m = (self.farms.len() as f64).sqrt().round() as usize;
                let depth = 1.0 - p.y;
                if p.x < 0.0 || depth < 0.0 {
                    return None;
                }
                // Closed farm extents: columns repeat with pitch 2a, rows 3a.
                let col = (p.x / (2.0 * a)).floor() as usize;
                let row = (depth / (3.0 * a)).floor() as usize;
                let in_col = p.x - 2.0 * a * col as f64 <= a;
                let in_row = depth - 3.0 * a * row as f64 <= a;
                (in_col && in_row && col < big_m && row < big_m).then(|| row * big_m + col)
            }
            SceneKind::PlanarGrid => None,
        }
    }

    /// Analytic geodesic distance from `p` (inside some farm) to the exit of
    /// `target_farm`: in-farm distance to the entrance, the road, then the
    /// exit separation along the first ridge.
    pub fn construction_geodesic(
        &self,
        p: Point2,
        target_farm: usize,
    ) -> Result<f64, ConstructionError> {
        let f = self
            .farm_of(p)
            .ok_or(ConstructionError::OffPlateau { x: p.x, y: p.y })?;
        let farm = &self.farms[f];
        let d = euclid_dist(p, farm.entrance) + farm.road_length;
        Ok(d + (farm.exit.y - self.farms[target_farm].exit.y).abs())
    }
}

/// Dominating point of one occupied farm.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DominationRecord {
    pub farm: usize,
    pub point: Point2,
    /// In-farm Euclidean distance to the entrance.
    pub entrance_dist: f64,
    /// Geodesic distance from the dominating point to the farm's exit.
    pub r: f64,
    pub alive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EliminationOutcome {
    pub records: Vec<DominationRecord>,
    /// Sample points that landed outside every farm (forbidden regions,
    /// roads and ridges have measure zero or are forbidden by height).
    pub discarded: usize,
}

/// Runs the elimination process of a sample over the scene's farms.
///
/// Per farm the dominating point minimizes the distance to the entrance; a
/// dominating point p dies if any other farm's dominating point q satisfies
/// `d(q, e_q) + |e_q e_p| < d(p, e_p)` (the strict inequality of the
/// elimination rule; since the best eliminator of a farm is its own
/// dominating point, only those need checking).
pub fn simulate_elimination(scene: &ConstructionScene, sample: &[Point2]) -> EliminationOutcome {
    let mut best: Vec<Option<(f64, Point2)>> = vec![None; scene.farms.len()];
    let mut discarded = 0usize;
    for &p in sample {
        match scene.farm_of(p) {
            Some(f) => {
                let d = euclid_dist(p, scene.farms[f].entrance);
                if best[f].map_or(true, |(bd, _)| d < bd) {
                    best[f] = Some((d, p));
                }
            }
            None => discarded += 1,
        }
    }

    // Occupied farms sorted by exit position along the first ridge.
    let mut occ: Vec<(f64, usize, f64, Point2)> = best
        .iter()
        .enumerate()
        .filter_map(|(f, b)| b.map(|(d, p)| (scene.farms[f].exit.y, f, d, p)))
        .collect();
    occ.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let side = scene.farms.first().map_or(0.0, |f| f.side);
    let max_infarm = 2f64.sqrt() * side;
    let mut records = Vec::with_capacity(occ.len());
    for (idx, &(ey, f, d, p)) in occ.iter().enumerate() {
        let r_exit = d + scene.farms[f].road_length;
        let mut alive = true;
        // Roads all have equal length, so q eliminates p iff
        // d_q + |e_q - e_p| < d_p; only exits within max in-farm distance
        // can matter.
        for dir in [-1i64, 1] {
            let mut j = idx as i64 + dir;
            while j >= 0 && (j as usize) < occ.len() {
                let (qey, qf, qd, _) = occ[j as usize];
                let gap = (qey - ey).abs();
                if gap >= max_infarm {
                    break;
                }
                if qf != f && qd + gap < d {
                    alive = false;
                    break;
                }
                j += dir;
            }
            if !alive {
                break;
            }
        }
        records.push(DominationRecord { farm: f, point: p, entrance_dist: d, r: r_exit, alive });
    }
    records.sort_by_key(|r| r.farm);
    EliminationOutcome { records, discarded }
}

/// Complexity charged to the alive cells: each spans the ridge block (`2n`
/// crossings) and counts once as a cell.
pub fn estimated_complexity(records: &[DominationRecord], n: usize) -> u64 {
    let alive = records.iter().filter(|r| r.alive).count() as u64;
    alive * 2 * n as u64 + alive
}

/// Planar grid scene: m sites in a column near the west wall with spacing
/// `1/m`, n vertical lines near the east wall.
#[derive(Debug, Clone, Serialize)]
pub struct PlanarGridScene {
    pub n: usize,
    pub m: usize,
    pub sites: Vec<Point2>,
    pub line_xs: Vec<f64>,
    /// Exact overlay complexity `(m - 1) * n`: every one of the `m - 1`
    /// horizontal cell boundaries crosses every line.
    pub overlay_crossings: u64,
}

pub fn gen_planar_grid(n: usize, m: usize) -> PlanarGridScene {
    let sites: Vec<Point2> = (0..m)
        .map(|j| Point2::new(0.02, (j as f64 + 0.5) / m as f64))
        .collect();
    let line_xs: Vec<f64> = if n == 1 {
        vec![0.9]
    } else {
        (0..n).map(|i| 0.8 + 0.18 * i as f64 / (n - 1) as f64).collect()
    };
    PlanarGridScene { n, m, sites, line_xs, overlay_crossings: (m as u64 - 1) * n as u64 }
}

/// Meshed realization of the planar grid scene: a flat terrain whose edge
/// set contains the n vertical lines, returned together with those
/// designated line edges (vertex index pairs).
///
/// The mesh is mirror-symmetric about every site bisector `y = j/m`: each
/// horizontal strip between consecutive site heights is cut at the bisector
/// and the two half-strips carry mirrored diagonals. Symmetric structure
/// makes the discrete label boundary land inside the correct Steiner
/// interval of every line even far from the sites, where a bisector of two
/// close sites is extremely sensitive to distance errors.
pub fn mesh_planar_grid(scene: &PlanarGridScene) -> (TriangulatedTerrain, Vec<(u32, u32)>) {
    let m = scene.m;
    let mut ys: Vec<f64> = Vec::with_capacity(2 * m + 1);
    ys.push(0.0);
    ys.push(0.5 / m as f64);
    for j in 1..m {
        ys.push(j as f64 / m as f64);
        ys.push((j as f64 + 0.5) / m as f64);
    }
    ys.push(1.0);

    let mut xs: Vec<f64> = Vec::with_capacity(scene.line_xs.len() + 2);
    xs.push(0.0);
    xs.extend_from_slice(&scene.line_xs);
    xs.push(1.0);

    let nx = xs.len();
    let ny = ys.len();
    let vid = |ix: usize, iy: usize| (iy * nx + ix) as u32;
    let mut vertices = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            vertices.push(Point2::new(xs[ix], ys[iy]));
        }
    }

    // Band `iy` spans [ys[iy], ys[iy+1]]. Bands [s_{j-1}, b_j] (even iy >= 2
    // is upper half, odd is lower... derive from the y values directly: a
    // band whose top is a bisector (integer multiple of 1/m) is a lower
    // half-band, mirrored diagonal orientation otherwise.
    let is_bisector = |y: f64| {
        let t = y * m as f64;
        (t - t.round()).abs() < 1e-12 && t.round() >= 1.0 && (t.round() as usize) < m
    };
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for iy in 0..ny - 1 {
        let ne_diag = is_bisector(ys[iy + 1]) || !is_bisector(ys[iy]);
        for ix in 0..nx - 1 {
            let bl = vid(ix, iy);
            let br = vid(ix + 1, iy);
            let tr = vid(ix + 1, iy + 1);
            let tl = vid(ix, iy + 1);
            if ne_diag {
                triangles.push([bl, br, tr]);
                triangles.push([bl, tr, tl]);
            } else {
                triangles.push([bl, br, tl]);
                triangles.push([br, tr, tl]);
            }
        }
    }

    let n_vertices = vertices.len();
    let terrain = TriangulatedTerrain::build(vertices, vec![0.0; n_vertices], triangles)
        .expect("planar grid mesh is a valid terrain");

    let mut designated = Vec::with_capacity(scene.line_xs.len() * (ny - 1));
    for (li, _) in scene.line_xs.iter().enumerate() {
        let ix = li + 1;
        for iy in 0..ny - 1 {
            designated.push((vid(ix, iy), vid(ix, iy + 1)));
        }
    }
    (terrain, designated)
}

/// Closed forms from the probability analysis of the industrial scene.
pub mod kernels {
    /// CDF of the entrance distance of a uniform point in a farm of side
    /// `1/sqrt(m)`: exactly `m s^2 pi / 4` for `s <= 1/sqrt(m)` (a quarter
    /// disk fits in the farm), clipped at 1 beyond.
    pub fn entrance_cdf(m: usize, s: f64) -> f64 {
        (m as f64 * s * s * std::f64::consts::PI / 4.0).min(1.0)
    }

    /// Lower bound on the probability that none of the `x_i` points of a
    /// farm `i` exits away eliminates a dominating point at exit distance
    /// `r`: `exp(-m (r - i/m)^2 pi x_i / 2)`; 1 when the farm is out of
    /// reach.
    pub fn alpha_lower_bound(m: usize, r: f64, i: usize, x_i: u64) -> f64 {
        let reach = r - i as f64 / m as f64;
        if reach <= 0.0 || x_i == 0 {
            return 1.0;
        }
        (-(m as f64) * reach * reach * std::f64::consts::PI * x_i as f64 / 2.0).exp()
    }

    /// Conditional survival bound given the per-farm counts on both sides:
    /// the product of the per-farm alpha bounds.
    pub fn conditional_survival(m: usize, r: f64, xs: &[u64], ys: &[u64]) -> f64 {
        let mut exponent = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let reach = r - (i + 1) as f64 / m as f64;
            if reach > 0.0 {
                exponent += m as f64 * reach * reach * std::f64::consts::PI * x as f64 / 2.0;
            }
        }
        for (i, &y) in ys.iter().enumerate() {
            let reach = r - (i + 1) as f64 / m as f64;
            if reach > 0.0 {
                exponent += m as f64 * reach * reach * std::f64::consts::PI * y as f64 / 2.0;
            }
        }
        (-exponent).exp()
    }

    /// Unconditional survival bound `exp(-2 r^3 m^2) / 2`.
    pub fn alive_lower_bound(r: f64, m: usize) -> f64 {
        0.5 * (-2.0 * r * r * r * (m as f64) * (m as f64)).exp()
    }

    /// Per-farm alive probability bound `pi / (8 e^2 m^(1/3))`.
    pub fn per_farm_alive_bound(m: usize) -> f64 {
        std::f64::consts::PI / (8.0 * std::f64::consts::E.powi(2) * (m as f64).cbrt())
    }

    /// Markov helper bound `exp(-2 mu) / 2` for `E[exp(-X)]`.
    pub fn markov_exp_bound(mu: f64) -> f64 {
        0.5 * (-2.0 * mu).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_sample(m: usize, rng: &mut ChaCha8Rng) -> Vec<Point2> {
        (0..m).map(|_| Point2::new(rng.random(), rng.random())).collect()
    }

    #[test]
    fn road_geometry_identities() {
        // i=0, m=16, w=0.5: length = 1/4 + 1/2.
        let g = road_geometry(0, 16, 0.5).unwrap();
        assert_eq!(g.alpha_a, 0.0);
        assert!((g.alpha_b - 1.0 / 8.0).abs() < 1e-15); // x_0/2 = (1/4)/2
        assert!((g.alpha_c - 0.25).abs() < 1e-15);
        assert!((g.length - 0.75).abs() < 1e-12);
        assert!((g.exit_x - 0.5).abs() < 1e-12);
        // Exit separation of adjacent farms is 1/m (m = 64 gives a 2x2 grid).
        let scene = gen_industrial(8, 64, 64.0, 0.5).unwrap();
        let dy = scene.farms[1].exit.y - scene.farms[0].exit.y;
        assert!((dy - 1.0 / 64.0).abs() < 1e-12);
        for f in &scene.farms {
            assert!((f.exit.x - 0.5).abs() < 1e-12);
            assert!((f.road_length - (1.0 / 8.0 + 0.5)).abs() < 1e-12);
        }
        // Exits of farms 3 columns apart differ by 3/m in road arithmetic.
        let g0 = road_geometry(0, 100, 0.8).unwrap();
        let g3 = road_geometry(3, 100, 0.8).unwrap();
        let sep = (g0.alpha_a + g0.alpha_c) - (g3.alpha_a + g3.alpha_c);
        assert!((sep - 0.03).abs() < 1e-12);
    }

    #[test]
    fn negative_segment_detected() {
        // i > sqrt(m)/2 makes alpha_c negative.
        assert!(matches!(
            road_geometry(3, 16, 0.5),
            Err(ConstructionError::NegativeSegment { .. })
        ));
    }

    #[test]
    fn farming_dimensions() {
        // m=9, c=3: side 1/9, spacing 2/9, 3 farms.
        let scene = gen_farming(16, 9, 3.0, 4.0, 0.8).unwrap();
        assert_eq!(scene.farms.len(), 3);
        let side = scene.farms[0].side;
        assert!((side - 1.0 / 9.0).abs() < 1e-15);
        let gap = (scene.farms[0].entrance.y - scene.farms[1].origin.y).abs();
        assert!((gap - 2.0 / 9.0).abs() < 1e-12);
        // Farm diameter sqrt(2)/(c sqrt m).
        let diam = euclid_dist(scene.farms[0].origin, scene.farms[0].entrance);
        assert!((diam - 2f64.sqrt() / 9.0).abs() < 1e-12);
        // All roads run from entrance x to the ridge.
        for f in &scene.farms {
            assert!((f.road_length - (0.8 - side)).abs() < 1e-12);
            assert_eq!(f.exit.y, f.entrance.y);
        }
    }

    #[test]
    fn guard_and_ridge_width_errors() {
        assert!(matches!(
            gen_farming(16, 1024, 2.0, 4.0, 0.8),
            Err(ConstructionError::TooManySitesForRidgeWidth { .. })
        ));
        // Tiny n: ridge block geodesically wider than the spacing slack.
        assert!(matches!(
            gen_farming(2, 900, 2.0, 1000.0, 0.8),
            Err(ConstructionError::RidgeTooWide { .. })
        ));
    }

    #[test]
    fn exits_monotone_with_row_gaps() {
        let scene = gen_industrial(8, 1024, 128.0, 0.8).unwrap();
        let big_m = 8usize; // floor(32/4)
        assert_eq!(scene.farms.len(), big_m * big_m);
        let a = 1.0 / 32.0;
        for row in 0..big_m {
            for col in 1..big_m {
                let e0 = scene.farms[row * big_m + col - 1].exit.y;
                let e1 = scene.farms[row * big_m + col].exit.y;
                assert!((e1 - e0 - 1.0 / 1024.0).abs() < 1e-12);
            }
        }
        // Between consecutive rows: at least 2 farm sides apart.
        for row in 1..big_m {
            let prev_min = (0..big_m)
                .map(|c| scene.farms[(row - 1) * big_m + c].exit.y)
                .fold(f64::INFINITY, f64::min);
            let cur_max = (0..big_m)
                .map(|c| scene.farms[row * big_m + c].exit.y)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(prev_min - cur_max >= 2.0 * a);
        }
    }

    #[test]
    fn analytic_metric_examples() {
        let scene = gen_industrial(8, 1024, 128.0, 0.8).unwrap();
        let f0 = &scene.farms[0];
        // At the entrance: exactly the road length.
        let d = scene.construction_geodesic(f0.entrance, 0).unwrap();
        assert!((d - f0.road_length).abs() < 1e-12);
        // At the north-west corner: the farm diagonal on top.
        let d = scene.construction_geodesic(f0.origin, 0).unwrap();
        assert!((d - (2f64.sqrt() / 32.0 + f0.road_length)).abs() < 1e-12);
        // Exits 3 farms apart in a row: extra 3/m.
        let d0 = scene.construction_geodesic(f0.entrance, 0).unwrap();
        let d3 = scene.construction_geodesic(f0.entrance, 3).unwrap();
        assert!((d3 - d0 - 3.0 / 1024.0).abs() < 1e-12);
        // A point in the gap between farm rows is off the plateau.
        assert!(matches!(
            scene.construction_geodesic(Point2::new(0.15, 0.95), 0),
            Err(ConstructionError::OffPlateau { .. })
        ));
    }

    #[test]
    fn single_occupied_farm_is_alive() {
        let scene = gen_industrial(8, 256, 64.0, 0.8).unwrap();
        let p = Point2::new(
            scene.farms[5].origin.x + 0.01,
            scene.farms[5].origin.y - 0.01,
        );
        let out = simulate_elimination(&scene, &[p]);
        assert_eq!(out.records.len(), 1);
        assert!(out.records[0].alive);
        assert_eq!(out.records[0].farm, 5);
        assert_eq!(out.discarded, 0);
    }

    #[test]
    fn entrance_point_is_unbeatable() {
        // r = 0 at the entrance: the strict inequality cannot eliminate it.
        let scene = gen_industrial(8, 256, 64.0, 0.8).unwrap();
        let p = scene.farms[0].entrance;
        let q = scene.farms[1].entrance; // adjacent farm, also r = 0
        let out = simulate_elimination(&scene, &[p, q]);
        assert!(out.records.iter().all(|r| r.alive));
    }

    #[test]
    fn elimination_monotone_under_insertion() {
        // A dominating point that stays the dominating point can only go
        // alive -> dead as points are inserted: eliminators accumulate and
        // only improve. (A farm can still resurrect when a new point takes
        // over as a closer dominating point.)
        let scene = gen_industrial(8, 1024, 128.0, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let sample = uniform_sample(1024, &mut rng);
        let mut prev: std::collections::HashMap<usize, (Point2, bool)> =
            std::collections::HashMap::new();
        for cut in [256usize, 512, 768, 1024] {
            let out = simulate_elimination(&scene, &sample[..cut]);
            for r in &out.records {
                if let Some(&(point, was_alive)) = prev.get(&r.farm) {
                    if point == r.point && !was_alive {
                        assert!(!r.alive, "farm {} resurrected with the same point", r.farm);
                    }
                }
            }
            prev = out
                .records
                .iter()
                .map(|r| (r.farm, (r.point, r.alive)))
                .collect();
        }
    }

    #[test]
    fn estimated_complexity_arithmetic() {
        let recs: Vec<DominationRecord> = (0..12)
            .map(|f| DominationRecord {
                farm: f,
                point: Point2::new(0.0, 0.0),
                entrance_dist: 0.0,
                r: 0.0,
                alive: f < 10,
            })
            .collect();
        assert_eq!(estimated_complexity(&recs, 32), 640 + 10);
        assert_eq!(estimated_complexity(&[], 32), 0);
    }

    #[test]
    fn planar_grid_counts() {
        assert_eq!(gen_planar_grid(1, 2).overlay_crossings, 1);
        assert_eq!(gen_planar_grid(5, 4).overlay_crossings, 15);
        assert_eq!(gen_planar_grid(100, 100).overlay_crossings, 9900);
    }

    #[test]
    fn planar_grid_overlay_matches_brute_force() {
        // Count bisector/line intersections directly.
        let scene = gen_planar_grid(7, 9);
        let mut crossings = 0u64;
        for j in 1..scene.m {
            let y = j as f64 / scene.m as f64;
            for _x in &scene.line_xs {
                // Horizontal bisector at height y crosses the full-height
                // vertical line iff 0 < y < 1.
                if y > 0.0 && y < 1.0 {
                    crossings += 1;
                }
            }
        }
        assert_eq!(crossings, scene.overlay_crossings);
    }

    #[test]
    fn planar_grid_mesh_is_valid() {
        let scene = gen_planar_grid(6, 8);
        let (terrain, designated) = mesh_planar_grid(&scene);
        assert!(terrain.is_flat());
        assert_eq!(designated.len(), 6 * (2 * 8));
        // Designated pairs are honest terrain edges.
        for &(a, b) in &designated {
            assert!(terrain.edge_id(a, b).is_some());
        }
    }

    #[test]
    fn kernel_examples() {
        // CDF equality boundary: s = 1/sqrt(m) gives pi/4.
        let v = kernels::entrance_cdf(256, 1.0 / 16.0);
        assert!((v - std::f64::consts::PI / 4.0).abs() < 1e-12);
        // No competitors: alpha = 1.
        assert_eq!(kernels::alpha_lower_bound(256, 0.05, 1, 0), 1.0);
        // r <= m^{-2/3} implies alive bound >= 1/(2 e^2).
        let m = 4096usize;
        let r = (m as f64).powf(-2.0 / 3.0);
        let bound = kernels::alive_lower_bound(r, m);
        assert!(bound >= 1.0 / (2.0 * std::f64::consts::E.powi(2)) - 1e-12);
        // Survival bound with explicit counts matches the product form.
        let xs = [1u64, 2, 0];
        let ys = [0u64, 1, 1];
        let direct: f64 = (1..=3)
            .map(|i| kernels::alpha_lower_bound(m, 3.5 / m as f64, i, xs[i - 1]))
            .product::<f64>()
            * (1..=3)
                .map(|i| kernels::alpha_lower_bound(m, 3.5 / m as f64, i, ys[i - 1]))
                .product::<f64>();
        let combined = kernels::conditional_survival(m, 3.5 / m as f64, &xs, &ys);
        assert!((direct - combined).abs() < 1e-12);
    }

    #[test]
    fn survival_frequency_respects_lower_bound() {
        // m = 4096: empirical alive frequency among occupied farms must not
        // fall below pi/(8 e^2 m^{1/3}).
        let m = 4096usize;
        let scene = gen_industrial(32, m, 512.0, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut alive = 0usize;
        let mut occupied = 0usize;
        for trial in 0..20 {
            rng.set_stream(trial);
            let sample = uniform_sample(m, &mut rng);
            let out = simulate_elimination(&scene, &sample);
            occupied += out.records.len();
            alive += out.records.iter().filter(|r| r.alive).count();
        }
        let freq = alive as f64 / occupied as f64;
        assert!(freq >= kernels::per_farm_alive_bound(m), "freq {freq}");
    }
}
