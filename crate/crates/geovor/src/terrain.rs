//! Triangulated terrains over the unit-square domain.
//!
//! A terrain is a conforming triangulation of `[0,1]^2` plus one height per
//! vertex; every triangle is lifted by the affine interpolation of its corner
//! heights. Validation is edge-based: rather than testing all triangle pairs
//! for overlap, we check that every interior edge is shared by exactly two
//! consistently wound triangles, that boundary edges lie on the square, and
//! that the total projected area equals the domain area. Together these
//! certify a conforming cover of the square.

use crate::geom::{cross2, euclid_dist, orient, point_in_triangle, Point2, Point3};
use std::collections::HashMap;
use thiserror::Error;

/// Total uncovered-area tolerance for domain validation. Generated scenes use
/// coordinates that tile exactly; this only absorbs float conversion.
pub const TAU_COVER: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TerrainError {
    #[error("triangle {index} is degenerate (zero projected area or repeated vertex)")]
    DegenerateTriangle { index: usize },
    #[error("edge ({a}, {b}) borders {count} triangles (first: {triangle}); terrain is not an edge-manifold")]
    NonManifoldEdge { a: u32, b: u32, count: usize, triangle: usize },
    #[error("domain not covered: {detail}")]
    DomainNotCovered { detail: String },
    #[error("triangle {index} refers to vertex {vertex} but there are only {n_vertices} vertices")]
    IndexOutOfRange { index: usize, vertex: u32, n_vertices: usize },
    #[error("{n_heights} heights for {n_vertices} vertices")]
    HeightCountMismatch { n_heights: usize, n_vertices: usize },
    #[error("vertex {index} has non-finite coordinates or height")]
    NonFiniteVertex { index: usize },
    #[error("point ({x}, {y}) is outside the domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("terrain file parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

/// An undirected triangulation edge with its incident triangles.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    /// Endpoint vertex indices, `v[0] < v[1]`.
    pub v: [u32; 2],
    /// Incident triangle indices; interior edges have both.
    pub faces: [Option<u32>; 2],
}

/// Immutable triangulated terrain over the unit square.
#[derive(Debug, Clone)]
pub struct TriangulatedTerrain {
    vertices: Vec<Point2>,
    heights: Vec<f64>,
    triangles: Vec<[u32; 3]>,
    edges: Vec<Edge>,
    /// For each triangle, the edge ids opposite to corners 0, 1, 2.
    tri_edges: Vec<[u32; 3]>,
    /// Coarse uniform grid over the domain for point location; cells hold
    /// candidate triangle indices in ascending order.
    loc_grid: Vec<Vec<u32>>,
    loc_dim: usize,
}

/// Builds and validates a terrain.
pub fn build_terrain(
    vertices: Vec<Point2>,
    heights: Vec<f64>,
    triangles: Vec<[u32; 3]>,
) -> Result<TriangulatedTerrain, TerrainError> {
    TriangulatedTerrain::build(vertices, heights, triangles)
}

impl TriangulatedTerrain {
    pub fn build(
        vertices: Vec<Point2>,
        heights: Vec<f64>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<Self, TerrainError> {
        if heights.len() != vertices.len() {
            return Err(TerrainError::HeightCountMismatch {
                n_heights: heights.len(),
                n_vertices: vertices.len(),
            });
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() || !heights[i].is_finite() {
                return Err(TerrainError::NonFiniteVertex { index: i });
            }
        }
        let n = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v as usize >= n {
                    return Err(TerrainError::IndexOutOfRange {
                        index: t,
                        vertex: v,
                        n_vertices: n,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(TerrainError::DegenerateTriangle { index: t });
            }
            let [a, b, c] = *tri;
            if orient(vertices[a as usize], vertices[b as usize], vertices[c as usize]) == 0 {
                return Err(TerrainError::DegenerateTriangle { index: t });
            }
        }

        // Edge map keyed by sorted endpoints; track winding to detect folds.
        let mut edge_ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut tri_edges = vec![[0u32; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for corner in 0..3 {
                let a = tri[(corner + 1) % 3];
                let b = tri[(corner + 2) % 3];
                let key = (a.min(b), a.max(b));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(Edge { v: [key.0, key.1], faces: [None, None] });
                    (edges.len() - 1) as u32
                });
                let e = &mut edges[id as usize];
                if e.faces[0].is_none() {
                    e.faces[0] = Some(t as u32);
                } else if e.faces[1].is_none() {
                    e.faces[1] = Some(t as u32);
                } else {
                    return Err(TerrainError::NonManifoldEdge {
                        a: key.0,
                        b: key.1,
                        count: 3,
                        triangle: t,
                    });
                }
                tri_edges[t][corner] = id;
            }
        }

        // Interior-disjointness + coverage: consistent winding across shared
        // edges, boundary edges on the square, total area = 1.
        let mut area_sum = 0.0;
        let mut all_ccw = true;
        let mut all_cw = true;
        for tri in &triangles {
            let [a, b, c] = *tri;
            let s = cross2(vertices[a as usize], vertices[b as usize], vertices[c as usize]);
            area_sum += 0.5 * s.abs();
            if s > 0.0 {
                all_cw = false;
            } else {
                all_ccw = false;
            }
        }
        if !all_ccw && !all_cw {
            return Err(TerrainError::DomainNotCovered {
                detail: "mixed triangle winding (overlapping or folded triangles)".into(),
            });
        }
        if (area_sum - 1.0).abs() > TAU_COVER {
            return Err(TerrainError::DomainNotCovered {
                detail: format!("projected area sum {area_sum:.12} differs from 1"),
            });
        }
        // Boundary edges must tile the four walls of the square exactly.
        let mut wall_len = [0.0f64; 4]; // west, east, south, north
        for e in &edges {
            if e.faces[1].is_none() {
                let pa = vertices[e.v[0] as usize];
                let pb = vertices[e.v[1] as usize];
                let wall = if pa.x == 0.0 && pb.x == 0.0 {
                    Some(0)
                } else if pa.x == 1.0 && pb.x == 1.0 {
                    Some(1)
                } else if pa.y == 0.0 && pb.y == 0.0 {
                    Some(2)
                } else if pa.y == 1.0 && pb.y == 1.0 {
                    Some(3)
                } else {
                    None
                };
                match wall {
                    Some(w) => wall_len[w] += euclid_dist(pa, pb),
                    None => {
                        return Err(TerrainError::DomainNotCovered {
                            detail: format!(
                                "edge ({}, {}) borders one triangle but is not on the domain boundary",
                                e.v[0], e.v[1]
                            ),
                        })
                    }
                }
            }
        }
        for (w, len) in wall_len.iter().enumerate() {
            if (len - 1.0).abs() > TAU_COVER {
                let name = ["west", "east", "south", "north"][w];
                return Err(TerrainError::DomainNotCovered {
                    detail: format!("{name} wall covered by boundary edges of total length {len}"),
                });
            }
        }

        let mut terrain = Self {
            vertices,
            heights,
            triangles,
            edges,
            tri_edges,
            loc_grid: Vec::new(),
            loc_dim: 0,
        };
        terrain.build_locator();
        Ok(terrain)
    }

    fn build_locator(&mut self) {
        let dim = ((self.triangles.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let mut grid = vec![Vec::new(); dim * dim];
        let cell_of = |v: f64| -> usize { ((v * dim as f64) as usize).min(dim - 1) };
        for (t, tri) in self.triangles.iter().enumerate() {
            let ps = tri.map(|v| self.vertices[v as usize]);
            let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in ps {
                x0 = x0.min(p.x);
                x1 = x1.max(p.x);
                y0 = y0.min(p.y);
                y1 = y1.max(p.y);
            }
            for cy in cell_of(y0.max(0.0))..=cell_of(y1.min(1.0)) {
                for cx in cell_of(x0.max(0.0))..=cell_of(x1.min(1.0)) {
                    grid[cy * dim + cx].push(t as u32);
                }
            }
        }
        self.loc_grid = grid;
        self.loc_dim = dim;
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of triangle `t`, opposite to corners 0, 1, 2.
    pub fn triangle_edges(&self, t: u32) -> [u32; 3] {
        self.tri_edges[t as usize]
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<u32> {
        let key = (a.min(b), a.max(b));
        self.edges
            .iter()
            .position(|e| (e.v[0], e.v[1]) == key)
            .map(|i| i as u32)
    }

    pub fn corners(&self, t: u32) -> [Point2; 3] {
        self.triangles[t as usize].map(|v| self.vertices[v as usize])
    }

    pub fn lifted_corners(&self, t: u32) -> [Point3; 3] {
        self.triangles[t as usize].map(|v| {
            let p = self.vertices[v as usize];
            Point3::new(p.x, p.y, self.heights[v as usize])
        })
    }

    pub fn vertex3(&self, v: u32) -> Point3 {
        let p = self.vertices[v as usize];
        Point3::new(p.x, p.y, self.heights[v as usize])
    }

    /// Lowest-index triangle whose closed projection contains `p`.
    ///
    /// Points exactly on shared boundaries resolve to the lowest incident
    /// index, which keeps every downstream decision deterministic.
    pub fn locate(&self, p: Point2) -> Option<u32> {
        self.locate_all(p).into_iter().next()
    }

    /// All triangles whose closed projection contains `p`, ascending.
    pub fn locate_all(&self, p: Point2) -> Vec<u32> {
        if !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y) {
            return Vec::new();
        }
        let dim = self.loc_dim;
        let cx = ((p.x * dim as f64) as usize).min(dim - 1);
        let cy = ((p.y * dim as f64) as usize).min(dim - 1);
        let mut hits: Vec<u32> = self.loc_grid[cy * dim + cx]
            .iter()
            .copied()
            .filter(|&t| {
                let [a, b, c] = self.corners(t);
                point_in_triangle(p, a, b, c)
            })
            .collect();
        hits.sort_unstable();
        hits
    }

    /// Barycentric height of `p` on the lifted surface.
    pub fn lift(&self, p: Point2) -> Result<Point3, TerrainError> {
        let t = self
            .locate(p)
            .ok_or(TerrainError::OutsideDomain { x: p.x, y: p.y })?;
        Ok(self.lift_in(t, p))
    }

    /// Height of `p` interpolated on the plane of triangle `t`.
    pub fn lift_in(&self, t: u32, p: Point2) -> Point3 {
        let [a, b, c] = self.corners(t);
        let [ha, hb, hc] = self.triangles[t as usize].map(|v| self.heights[v as usize]);
        let denom = cross2(a, b, c);
        let wa = cross2(p, b, c) / denom;
        let wb = cross2(a, p, c) / denom;
        let wc = 1.0 - wa - wb;
        Point3::new(p.x, p.y, wa * ha + wb * hb + wc * hc)
    }

    /// Gradient of the affine height map of triangle `t`.
    pub fn gradient(&self, t: u32) -> (f64, f64) {
        let [a, b, c] = self.corners(t);
        let [ha, hb, hc] = self.triangles[t as usize].map(|v| self.heights[v as usize]);
        let det = cross2(a, b, c);
        let gx = ((hb - ha) * (c.y - a.y) - (hc - ha) * (b.y - a.y)) / det;
        let gy = ((hc - ha) * (b.x - a.x) - (hb - ha) * (c.x - a.x)) / det;
        (gx, gy)
    }

    /// Maximum slope of any segment embedded in the lifted triangle `t`,
    /// i.e. the gradient norm of its affine height map.
    pub fn triangle_slope(&self, t: u32) -> f64 {
        let (gx, gy) = self.gradient(t);
        gx.hypot(gy)
    }

    pub fn projected_area(&self, t: u32) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * cross2(a, b, c).abs()
    }

    pub fn lifted_area(&self, t: u32) -> f64 {
        let [a, b, c] = self.lifted_corners(t);
        let ux = b.x - a.x;
        let uy = b.y - a.y;
        let uz = b.z - a.z;
        let vx = c.x - a.x;
        let vy = c.y - a.y;
        let vz = c.z - a.z;
        let cx = uy * vz - uz * vy;
        let cy = uz * vx - ux * vz;
        let cz = ux * vy - uy * vx;
        0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
    }

    pub fn total_lifted_area(&self) -> f64 {
        (0..self.n_triangles() as u32).map(|t| self.lifted_area(t)).sum()
    }

    pub fn is_flat(&self) -> bool {
        self.heights.iter().all(|&h| h == self.heights[0])
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| euclid_dist(self.vertices[e.v[0] as usize], self.vertices[e.v[1] as usize]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// The canonical flat two-triangle square with the (0,0)-(1,1) diagonal.
pub fn flat_square() -> TriangulatedTerrain {
    TriangulatedTerrain::build(
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ],
        vec![0.0; 4],
        vec![[0, 1, 2], [0, 2, 3]],
    )
    .expect("flat square is valid")
}

/// Four-triangle fan around a center vertex with the given apex height.
pub fn pyramid(apex_height: f64) -> TriangulatedTerrain {
    TriangulatedTerrain::build(
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 0.5),
        ],
        vec![0.0, 0.0, 0.0, 0.0, apex_height],
        vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
    )
    .expect("pyramid is valid")
}

/// Flat square subdivided into a `g x g` grid of axis-aligned cells, each
/// split along its south-west to north-east diagonal.
pub fn flat_grid(g: usize) -> TriangulatedTerrain {
    let mut vertices = Vec::with_capacity((g + 1) * (g + 1));
    for j in 0..=g {
        for i in 0..=g {
            vertices.push(Point2::new(i as f64 / g as f64, j as f64 / g as f64));
        }
    }
    let v = |i: usize, j: usize| (j * (g + 1) + i) as u32;
    let mut triangles = Vec::with_capacity(2 * g * g);
    for j in 0..g {
        for i in 0..g {
            triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    let n = vertices.len();
    TriangulatedTerrain::build(vertices, vec![0.0; n], triangles).expect("grid is valid")
}

/// Terrain with the affine height map `z = gx*x + gy*y` over the flat square.
pub fn ramp(gx: f64, gy: f64) -> TriangulatedTerrain {
    let vertices = vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ];
    let heights = vertices.iter().map(|p| gx * p.x + gy * p.y).collect();
    TriangulatedTerrain::build(vertices, heights, vec![[0, 1, 2], [0, 2, 3]]).expect("ramp is valid")
}

/// Writes the terrain text format: a `TERRAIN` header, one `v` line per
/// vertex, one `t` line per triangle. 17 significant digits.
pub fn write_terrain(terrain: &TriangulatedTerrain) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "TERRAIN {} {}\n",
        terrain.n_vertices(),
        terrain.n_triangles()
    ));
    for (i, p) in terrain.vertices().iter().enumerate() {
        out.push_str(&format!(
            "v {:.16e} {:.16e} {:.16e}\n",
            p.x,
            p.y,
            terrain.heights()[i]
        ));
    }
    for t in terrain.triangles() {
        out.push_str(&format!("t {} {} {}\n", t[0], t[1], t[2]));
    }
    out
}

/// Parses the terrain text format; `#` starts a comment line.
pub fn read_terrain(text: &str) -> Result<TriangulatedTerrain, TerrainError> {
    let mut vertices = Vec::new();
    let mut heights = Vec::new();
    let mut triangles = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap();
        let parse_err = |detail: &str| TerrainError::Parse {
            line: lineno + 1,
            detail: detail.to_string(),
        };
        match tag {
            "TERRAIN" => {
                let nv = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err("bad vertex count"))?;
                let nt = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err("bad triangle count"))?;
                header = Some((nv, nt));
            }
            "v" => {
                let mut next = || -> Result<f64, TerrainError> {
                    it.next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err("bad vertex coordinate"))
                };
                let x = next()?;
                let y = next()?;
                let z = next()?;
                vertices.push(Point2::new(x, y));
                heights.push(z);
            }
            "t" => {
                let mut next = || -> Result<u32, TerrainError> {
                    it.next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err("bad triangle index"))
                };
                triangles.push([next()?, next()?, next()?]);
            }
            _ => return Err(parse_err(&format!("unknown record '{tag}'"))),
        }
    }
    if let Some((nv, nt)) = header {
        if nv != vertices.len() || nt != triangles.len() {
            return Err(TerrainError::Parse {
                line: 1,
                detail: format!(
                    "header says {nv} vertices / {nt} triangles, file has {} / {}",
                    vertices.len(),
                    triangles.len()
                ),
            });
        }
    }
    TriangulatedTerrain::build(vertices, heights, triangles)
}
