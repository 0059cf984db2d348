//! Realistic-input measurements: slope bound, low-density estimate, the
//! geodesic/Euclidean distance sandwich, and geodesic disk areas.
//!
//! The true low-density parameter is a supremum over all balls; the
//! estimator here probes balls centered at edge endpoints, edge midpoints
//! and a uniform grid, over a geometric radius ladder, and is therefore a
//! lower bound of the true value.

use crate::engine::{EngineError, GeodesicGraph};
use crate::geom::{euclid_dist, Point2, Segment2};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputModelError {
    #[error("empty edge set")]
    EmptyEdgeSet,
    #[error("disk of radius {r} at ({x}, {y}) is clipped by the domain boundary")]
    DiskClipped { x: f64, y: f64, r: f64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Measured realistic-input parameters of a terrain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RealismParams {
    /// Probe-ladder low-density estimate (a lower bound of the true value).
    pub lambda_est: f64,
    /// Maximum slope over triangles.
    pub xi: f64,
    /// `sqrt(1 + xi^2)`.
    pub beta: f64,
}

/// Maximum slope and its distance-ratio constant.
pub fn slope_bound(terrain: &crate::terrain::TriangulatedTerrain) -> (f64, f64) {
    let xi = (0..terrain.n_triangles() as u32)
        .map(|t| terrain.triangle_slope(t))
        .fold(0.0f64, f64::max);
    (xi, (1.0 + xi * xi).sqrt())
}

/// Ball-probe configuration for the low-density estimator.
#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    /// Probe centers also on a `grid_dim x grid_dim` uniform grid.
    pub grid_dim: usize,
    /// Cap on the radius ladder depth (radii `2^0 .. 2^-cap`).
    pub ladder_cap: u32,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { grid_dim: 8, ladder_cap: 30 }
    }
}

/// Max over probe balls `B(c, r)` of the number of edges longer than `r`
/// intersecting the ball.
pub fn low_density_estimate(
    edges: &[Segment2],
    cfg: &ProbeConfig,
) -> Result<u32, InputModelError> {
    if edges.is_empty() {
        return Err(InputModelError::EmptyEdgeSet);
    }
    let mut centers: Vec<Point2> = Vec::with_capacity(3 * edges.len() + cfg.grid_dim * cfg.grid_dim);
    for e in edges {
        centers.push(e.a);
        centers.push(e.b);
        centers.push(e.midpoint());
    }
    for j in 0..cfg.grid_dim {
        for i in 0..cfg.grid_dim {
            centers.push(Point2::new(
                (i as f64 + 0.5) / cfg.grid_dim as f64,
                (j as f64 + 0.5) / cfg.grid_dim as f64,
            ));
        }
    }

    // Radius ladder down to just below the smallest edge length present
    // (an edge only counts against radii shorter than itself).
    let min_len = edges.iter().map(|e| e.length()).fold(f64::INFINITY, f64::min);
    let depth = if min_len > 0.0 {
        ((1.0 / min_len).log2().ceil() as i64 + 1).clamp(1, cfg.ladder_cap as i64) as u32
    } else {
        cfg.ladder_cap
    };

    // Edges sorted by length descending: each radius sees a prefix.
    let mut by_len: Vec<&Segment2> = edges.iter().collect();
    by_len.sort_by(|a, b| b.length().partial_cmp(&a.length()).unwrap());

    let mut best = 0u32;
    for k in 0..=depth {
        let r = (2.0f64).powi(-(k as i32));
        let prefix_end = by_len.partition_point(|e| e.length() > r);
        if prefix_end as u32 <= best {
            continue;
        }
        for &c in &centers {
            let mut count = 0u32;
            for e in &by_len[..prefix_end] {
                if e.intersects_disk(c, r) {
                    count += 1;
                }
            }
            best = best.max(count);
        }
    }
    Ok(best)
}

/// Terrain edges as segments.
pub fn terrain_edge_segments(terrain: &crate::terrain::TriangulatedTerrain) -> Vec<Segment2> {
    terrain
        .edges()
        .iter()
        .map(|e| {
            Segment2::new(
                terrain.vertices()[e.v[0] as usize],
                terrain.vertices()[e.v[1] as usize],
            )
        })
        .collect()
}

/// Full realism measurement of a terrain.
pub fn measure_realism(
    terrain: &crate::terrain::TriangulatedTerrain,
    cfg: &ProbeConfig,
) -> Result<RealismParams, InputModelError> {
    let (xi, beta) = slope_bound(terrain);
    let lambda = low_density_estimate(&terrain_edge_segments(terrain), cfg)?;
    Ok(RealismParams { lambda_est: lambda as f64, xi, beta })
}

/// One checked distance pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SandwichWitness {
    pub d_euclid: f64,
    pub d_geo: f64,
    /// `d_geo / d_euclid` (1 for coincident points).
    pub lower_ratio: f64,
    /// `d_geo / (beta * d_euclid)`.
    pub upper_ratio: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl SandwichWitness {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Checks `d2(p,q) <= d_geo(p,q) <= (1 + eps) * beta * d2(p,q)` with the
/// graph estimate of the geodesic distance; `eps` absorbs the engine's
/// approximation slack.
pub fn check_distance_sandwich(
    graph: &GeodesicGraph,
    p: Point2,
    q: Point2,
    beta: f64,
    eps: f64,
) -> Result<SandwichWitness, InputModelError> {
    let d2 = euclid_dist(p, q);
    let dg = graph.geodesic_distance(p, q)?;
    let lower_ok = dg >= d2 - 1e-12;
    let upper_ok = dg <= (1.0 + eps) * beta * d2 + 1e-12;
    Ok(SandwichWitness {
        d_euclid: d2,
        d_geo: dg,
        lower_ratio: if d2 > 0.0 { dg / d2 } else { 1.0 },
        upper_ratio: if d2 > 0.0 { dg / (beta * d2) } else { 1.0 },
        lower_ok,
        upper_ok,
    })
}

/// Geodesic disk area with the two analytic bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskAreaCheck {
    pub center: Point2,
    pub r: f64,
    /// Lifted area of the set of surface points within graph distance `r`.
    pub area: f64,
    /// `pi (r / beta)^2`.
    pub lower_bound: f64,
    /// `pi beta r^2`.
    pub upper_bound: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Lifted area of the geodesic disk `{p : d_geo(center, p) <= r}`, summed
/// over subdivision triangles: full area when all corners pass the distance
/// test, half when some do (an unbiased straddle rule), none otherwise.
/// Bound flags allow a relative `slack` for discretization.
pub fn geodesic_disk_area(
    graph: &GeodesicGraph,
    center: Point2,
    r: f64,
    slack: f64,
) -> Result<DiskAreaCheck, InputModelError> {
    if center.x - r < 0.0 || center.x + r > 1.0 || center.y - r < 0.0 || center.y + r > 1.0 {
        return Err(InputModelError::DiskClipped { x: center.x, y: center.y, r });
    }
    let dist = graph.single_source(center)?;
    let mut area = 0.0;
    let terrain = graph.terrain();
    for f in 0..terrain.n_triangles() as u32 {
        for tri in graph.sub_triangles(f) {
            let inside = tri
                .iter()
                .filter(|&&v| dist[v as usize] <= r)
                .count();
            if inside == 0 {
                continue;
            }
            let [a, b, c] = tri.map(|v| graph.node(v));
            let ux = b.x - a.x;
            let uy = b.y - a.y;
            let uz = b.z - a.z;
            let vx = c.x - a.x;
            let vy = c.y - a.y;
            let vz = c.z - a.z;
            let nx = uy * vz - uz * vy;
            let ny = uz * vx - ux * vz;
            let nz = ux * vy - uy * vx;
            let t_area = 0.5 * (nx * nx + ny * ny + nz * nz).sqrt();
            area += if inside == 3 { t_area } else { 0.5 * t_area };
        }
    }
    let (_, beta) = slope_bound(terrain);
    let lower = std::f64::consts::PI * (r / beta) * (r / beta);
    let upper = std::f64::consts::PI * beta * r * r;
    Ok(DiskAreaCheck {
        center,
        r,
        area,
        lower_bound: lower,
        upper_bound: upper,
        lower_ok: area >= lower * (1.0 - slack),
        upper_ok: area <= upper * (1.0 + slack),
    })
}
