//! Approximate geodesic distances via a Steiner subdivision graph.
//!
//! Each triangle edge receives `k` evenly spaced Steiner points and each
//! triangle an interior barycentric lattice at resolution `k + 1`; nodes that
//! share a triangle are connected by straight surface segments. Shortest
//! paths in this graph over-estimate the exact geodesic distance by a factor
//! `1 + eps_k` that shrinks as `k` grows, and never under-run the planar
//! distance of the endpoints (every arc is at least as long as its
//! projection).
//!
//! Query points are attached temporarily: a query is connected to every node
//! of every triangle whose closed projection contains it, so points on shared
//! edges connect through both incident triangles. All of those segments lie
//! on the surface, which keeps the estimate a true surface-path length.

use crate::geom::{dist3, Point2, Point3};
#[cfg(test)]
use crate::geom::euclid_dist;
use crate::terrain::{TerrainError, TriangulatedTerrain};
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("point ({}, {}) is outside the domain", .0.x, .0.y)]
    OutsideDomain(Point2),
    #[error("no sites given")]
    NoSites,
    #[error(transparent)]
    Terrain(#[from] TerrainError),
}

/// Nearest-site assignment over the graph nodes.
///
/// `label[v]` is the index into `sites` of the closest site and `distance[v]`
/// the graph distance to it; exact ties resolve to the lowest site index.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub distance: Vec<f64>,
    pub label: Vec<u32>,
    pub sites: Vec<Point2>,
}

/// Steiner subdivision graph of a terrain.
pub struct GeodesicGraph {
    terrain: TriangulatedTerrain,
    refinement_k: u32,
    /// Lattice resolution: an original edge splits into `s` segments.
    s: u32,
    nodes: Vec<Point3>,
    csr_off: Vec<u32>,
    csr_tgt: Vec<u32>,
    csr_w: Vec<f64>,
    edge_base: u32,
    face_base: u32,
}

/// Max-heap entry ordered so that `(distance, node, site)` pops smallest
/// first. Distances are non-negative, so the IEEE bit pattern orders them.
#[derive(PartialEq, Eq)]
struct HeapEntry {
    key: (u64, u32, u32),
}

impl HeapEntry {
    fn new(dist: f64, node: u32, site: u32) -> Self {
        Self { key: (dist.to_bits(), node, site) }
    }
    fn dist(&self) -> f64 {
        f64::from_bits(self.key.0)
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.key.cmp(&self.key)
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub fn build_geodesic_graph(terrain: &TriangulatedTerrain, refinement_k: u32) -> GeodesicGraph {
    GeodesicGraph::build(terrain, refinement_k)
}

impl GeodesicGraph {
    pub fn build(terrain: &TriangulatedTerrain, refinement_k: u32) -> Self {
        let terrain = terrain.clone();
        let k = refinement_k;
        let s = k + 1;
        let nv = terrain.n_vertices() as u32;
        let ne = terrain.edges().len() as u32;
        let nt = terrain.n_triangles() as u32;
        let interior_per_face = (k * k.saturating_sub(1)) / 2;
        let edge_base = nv;
        let face_base = nv + ne * k;
        let n_nodes = (face_base + nt * interior_per_face) as usize;

        let mut nodes = vec![Point3::new(0.0, 0.0, 0.0); n_nodes];
        for v in 0..nv {
            nodes[v as usize] = terrain.vertex3(v);
        }
        for (e, edge) in terrain.edges().iter().enumerate() {
            let a = terrain.vertex3(edge.v[0]);
            let b = terrain.vertex3(edge.v[1]);
            for i in 1..=k {
                let t = i as f64 / s as f64;
                nodes[(edge_base + e as u32 * k + (i - 1)) as usize] = Point3::new(
                    a.x + t * (b.x - a.x),
                    a.y + t * (b.y - a.y),
                    a.z + t * (b.z - a.z),
                );
            }
        }
        for f in 0..nt {
            let [a, b, c] = terrain.lifted_corners(f);
            let mut local = 0;
            for i in 1..s {
                for j in 1..(s - i) {
                    let u = i as f64 / s as f64;
                    let v = j as f64 / s as f64;
                    nodes[(face_base + f * interior_per_face + local) as usize] = Point3::new(
                        a.x + u * (b.x - a.x) + v * (c.x - a.x),
                        a.y + u * (b.y - a.y) + v * (c.y - a.y),
                        a.z + u * (b.z - a.z) + v * (c.z - a.z),
                    );
                    local += 1;
                }
            }
        }

        let mut graph = Self {
            terrain,
            refinement_k: k,
            s,
            nodes,
            csr_off: Vec::new(),
            csr_tgt: Vec::new(),
            csr_w: Vec::new(),
            edge_base,
            face_base,
        };
        graph.build_arcs();
        graph
    }

    /// Node id of lattice point `(i, j)` of face `f`: `i` steps toward corner
    /// 1 and `j` toward corner 2, `i + j <= s`.
    pub fn face_node(&self, f: u32, i: u32, j: u32) -> u32 {
        let s = self.s;
        let k = self.refinement_k;
        let tri = self.terrain.triangles()[f as usize];
        debug_assert!(i + j <= s);
        if i == 0 && j == 0 {
            return tri[0];
        }
        if i == s {
            return tri[1];
        }
        if j == s {
            return tri[2];
        }
        // Triangle edge ids are stored opposite their corners.
        let tri_edges = self.terrain.triangle_edges(f);
        let edge_node = |a: u32, eid: u32, step_from_a: u32| -> u32 {
            let lo = self.terrain.edges()[eid as usize].v[0];
            let idx = if a == lo { step_from_a - 1 } else { self.refinement_k - step_from_a };
            self.edge_base + eid * k + idx
        };
        if j == 0 {
            return edge_node(tri[0], tri_edges[2], i);
        }
        if i == 0 {
            return edge_node(tri[0], tri_edges[1], j);
        }
        if i + j == s {
            return edge_node(tri[1], tri_edges[0], j);
        }
        // interior: rank within rows i = 1..s-2
        let mut rank = 0;
        for t in 1..i {
            rank += s - 1 - t;
        }
        rank += j - 1;
        self.face_base + f * (k * (k - 1) / 2) + rank
    }

    /// All lattice node ids of face `f` with their `(i, j)` coordinates.
    fn face_lattice(&self, f: u32) -> Vec<(u32, u32, u32)> {
        let s = self.s;
        let mut out = Vec::with_capacity(((s + 1) * (s + 2) / 2) as usize);
        for i in 0..=s {
            for j in 0..=(s - i) {
                out.push((self.face_node(f, i, j), i, j));
            }
        }
        out
    }

    /// The `s*s` subdivision triangles of face `f`, as corner node triples.
    pub fn sub_triangles(&self, f: u32) -> Vec<[u32; 3]> {
        let s = self.s;
        let mut out = Vec::with_capacity((s * s) as usize);
        for i in 0..s {
            for j in 0..(s - i) {
                out.push([
                    self.face_node(f, i, j),
                    self.face_node(f, i + 1, j),
                    self.face_node(f, i, j + 1),
                ]);
                if i + j < s - 1 {
                    out.push([
                        self.face_node(f, i + 1, j),
                        self.face_node(f, i + 1, j + 1),
                        self.face_node(f, i, j + 1),
                    ]);
                }
            }
        }
        out
    }

    /// Ordered node chain along original edge `e`, endpoints included.
    pub fn edge_chain(&self, e: u32) -> Vec<u32> {
        let k = self.refinement_k;
        let edge = &self.terrain.edges()[e as usize];
        let mut chain = Vec::with_capacity(k as usize + 2);
        chain.push(edge.v[0]);
        for i in 0..k {
            chain.push(self.edge_base + e * k + i);
        }
        chain.push(edge.v[1]);
        chain
    }

    fn build_arcs(&mut self) {
        let nt = self.terrain.n_triangles() as u32;
        let ne = self.terrain.edges().len() as u32;
        let n = self.nodes.len();

        // Undirected arc list assembled per face (pairs not sharing a face
        // edge) and per edge (consecutive chain links only; longer collinear
        // hops add nothing).
        let mut degree = vec![0u32; n];
        let pass = |record: &mut dyn FnMut(u32, u32)| {
            for f in 0..nt {
                let lat = self.face_lattice(f);
                let s = self.s;
                for (ai, &(u, ui, uj)) in lat.iter().enumerate() {
                    for &(v, vi, vj) in lat.iter().skip(ai + 1) {
                        let both_ab = uj == 0 && vj == 0;
                        let both_ac = ui == 0 && vi == 0;
                        let both_bc = ui + uj == s && vi + vj == s;
                        if both_ab || both_ac || both_bc {
                            continue;
                        }
                        record(u, v);
                    }
                }
            }
            for e in 0..ne {
                let chain = self.edge_chain(e);
                for w in chain.windows(2) {
                    record(w[0], w[1]);
                }
            }
        };

        pass(&mut |u, v| {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        });

        let mut off = vec![0u32; n + 1];
        for i in 0..n {
            off[i + 1] = off[i] + degree[i];
        }
        let total = off[n] as usize;
        let mut tgt = vec![0u32; total];
        let mut w = vec![0f64; total];
        let mut cursor: Vec<u32> = off[..n].to_vec();
        let nodes = &self.nodes;
        pass(&mut |a, b| {
            let len = dist3(nodes[a as usize], nodes[b as usize]);
            let ca = cursor[a as usize] as usize;
            tgt[ca] = b;
            w[ca] = len;
            cursor[a as usize] += 1;
            let cb = cursor[b as usize] as usize;
            tgt[cb] = a;
            w[cb] = len;
            cursor[b as usize] += 1;
        });

        self.csr_off = off;
        self.csr_tgt = tgt;
        self.csr_w = w;
    }

    pub fn refinement_k(&self) -> u32 {
        self.refinement_k
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.csr_tgt.len() / 2
    }

    pub fn node(&self, v: u32) -> Point3 {
        self.nodes[v as usize]
    }

    pub fn terrain(&self) -> &TriangulatedTerrain {
        &self.terrain
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let a = self.csr_off[v as usize] as usize;
        let b = self.csr_off[v as usize + 1] as usize;
        self.csr_tgt[a..b].iter().copied().zip(self.csr_w[a..b].iter().copied())
    }

    /// Temporary attachment arcs for a query point: every node of every face
    /// containing it.
    fn attach(&self, p: Point2) -> Result<(Point3, Vec<(u32, f64)>), EngineError> {
        let faces = self.terrain.locate_all(p);
        if faces.is_empty() {
            return Err(EngineError::OutsideDomain(p));
        }
        let lifted = self.terrain.lift_in(faces[0], p);
        let mut arcs: Vec<(u32, f64)> = Vec::new();
        for &f in &faces {
            for (node, _, _) in self.face_lattice(f) {
                arcs.push((node, dist3(lifted, self.nodes[node as usize])));
            }
        }
        arcs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        arcs.dedup_by_key(|a| a.0);
        Ok((lifted, arcs))
    }

    /// Graph distances from `p` to every node.
    pub fn single_source(&self, p: Point2) -> Result<Vec<f64>, EngineError> {
        let (_, seeds) = self.attach(p)?;
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut settled = vec![false; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        for (node, w) in seeds {
            if w < dist[node as usize] {
                dist[node as usize] = w;
                heap.push(HeapEntry::new(w, node, 0));
            }
        }
        while let Some(entry) = heap.pop() {
            let (_, u, _) = entry.key;
            if settled[u as usize] {
                continue;
            }
            settled[u as usize] = true;
            let du = entry.dist();
            for (v, w) in self.neighbors(u) {
                let nd = du + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(HeapEntry::new(nd, v, 0));
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path length between two query points.
    ///
    /// Returns a value at least the exact geodesic distance (up to float
    /// rounding) and at most `(1 + eps_k)` times it on bounded-slope
    /// terrains.
    pub fn geodesic_distance(&self, p: Point2, q: Point2) -> Result<f64, EngineError> {
        let (p3, p_arcs) = self.attach(p)?;
        let (q3, q_arcs) = self.attach(q)?;

        // Direct arc when both points share a face.
        let pf = self.terrain.locate_all(p);
        let qf = self.terrain.locate_all(q);
        let mut best = if pf.iter().any(|f| qf.contains(f)) {
            dist3(p3, q3)
        } else {
            f64::INFINITY
        };

        let mut exit: Vec<f64> = vec![f64::INFINITY; self.nodes.len()];
        for &(node, w) in &q_arcs {
            exit[node as usize] = w;
        }

        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut settled = vec![false; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        for (node, w) in p_arcs {
            if w < dist[node as usize] {
                dist[node as usize] = w;
                heap.push(HeapEntry::new(w, node, 0));
            }
        }
        while let Some(entry) = heap.pop() {
            let (_, u, _) = entry.key;
            if settled[u as usize] {
                continue;
            }
            settled[u as usize] = true;
            let du = entry.dist();
            if du >= best {
                break;
            }
            let e = exit[u as usize];
            if e.is_finite() {
                best = best.min(du + e);
            }
            for (v, w) in self.neighbors(u) {
                let nd = du + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(HeapEntry::new(nd, v, 0));
                }
            }
        }
        Ok(best)
    }

    /// Simultaneous relaxation from all sites; per-node nearest site.
    ///
    /// The heap is ordered by `(distance, node, site)`, so on exact distance
    /// ties the lowest site index settles first and wins everywhere.
    pub fn multi_source_field(&self, sites: &[Point2]) -> Result<DistanceField, EngineError> {
        if sites.is_empty() {
            return Err(EngineError::NoSites);
        }
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut label = vec![u32::MAX; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        for (si, &site) in sites.iter().enumerate() {
            let (_, arcs) = self.attach(site)?;
            for (node, w) in arcs {
                if w < dist[node as usize] {
                    dist[node as usize] = w;
                    heap.push(HeapEntry::new(w, node, si as u32));
                }
            }
        }
        while let Some(entry) = heap.pop() {
            let (_, u, site) = entry.key;
            if settled[u as usize] {
                continue;
            }
            settled[u as usize] = true;
            let du = entry.dist();
            dist[u as usize] = du;
            label[u as usize] = site;
            for (v, w) in self.neighbors(u) {
                let nd = du + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(HeapEntry::new(nd, v, site));
                }
            }
        }
        Ok(DistanceField { distance: dist, label, sites: sites.to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{flat_grid, flat_square, pyramid, ramp};

    #[test]
    fn node_counts_k0_k1() {
        let flat = flat_square();
        let g0 = GeodesicGraph::build(&flat, 0);
        assert_eq!(g0.node_count(), 4);
        // k=0 arcs: the 5 edges of the triangulation plus nothing else.
        assert_eq!(g0.arc_count(), 5);

        let g1 = GeodesicGraph::build(&flat, 1);
        // 4 vertices + 5 edge midpoints.
        assert_eq!(g1.node_count(), 9);
    }

    #[test]
    fn arc_weights_dominate_projections() {
        let pyr = pyramid(1.0);
        let g = GeodesicGraph::build(&pyr, 4);
        for u in 0..g.node_count() as u32 {
            for (v, w) in g.neighbors(u) {
                let planar = euclid_dist(g.node(u).project(), g.node(v).project());
                assert!(w >= planar - 1e-12);
            }
        }
    }

    #[test]
    fn graph_connected() {
        let pyr = pyramid(1.0);
        let g = GeodesicGraph::build(&pyr, 4);
        let d = g.single_source(Point2::new(0.1, 0.1)).unwrap();
        assert!(d.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn flat_distances_exact_same_face_chain() {
        let flat = flat_square();
        let g = GeodesicGraph::build(&flat, 0);
        let d = g
            .geodesic_distance(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0))
            .unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ramp_constant_slope_distance() {
        // On z = x the lifted straight segment along x has length sqrt(2).
        // k = 5 puts a Steiner node at the diagonal midpoint the path crosses.
        let r = ramp(1.0, 0.0);
        let g = GeodesicGraph::build(&r, 5);
        let d = g
            .geodesic_distance(Point2::new(0.0, 0.5), Point2::new(1.0, 0.5))
            .unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn tent_matches_unfolding_oracle() {
        // Ridge of height h across the middle; the exact geodesic between
        // opposite side midpoints unfolds to a straight line of length
        // 2 * hypot(1/2, h) scaled appropriately: unfold the two slabs about
        // the ridge into a plane. For the tent with ridge at x = 1/2, path
        // from (0, 1/2) to (1, 1/2): each half has slope 2h, slant width
        // hypot(1/2, h); unfolded the path is straight with length
        // 2 * hypot(1/2, h).
        let h = 0.3;
        let tent = crate::terrain::TriangulatedTerrain::build(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(0.5, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.5, 1.0),
                Point2::new(0.0, 1.0),
            ],
            vec![0.0, h, 0.0, 0.0, h, 0.0],
            vec![[0, 1, 4], [0, 4, 5], [1, 2, 3], [1, 3, 4]],
        )
        .unwrap();
        let g = GeodesicGraph::build(&tent, 6);
        let d = g
            .geodesic_distance(Point2::new(0.0, 0.5), Point2::new(1.0, 0.5))
            .unwrap();
        let exact = 2.0 * (0.5f64.powi(2) + h * h).sqrt();
        assert!(d >= exact - 1e-12);
        assert!(d <= exact * 1.02, "d = {d}, exact = {exact}");
    }

    #[test]
    fn multi_source_single_site() {
        let flat = flat_grid(4);
        let g = GeodesicGraph::build(&flat, 2);
        let site = Point2::new(0.31, 0.47);
        let field = g.multi_source_field(&[site]).unwrap();
        assert!(field.label.iter().all(|&l| l == 0));
        // Spot-check one node distance against the single-pair query.
        let v = 7u32;
        let d = g
            .geodesic_distance(site, g.node(v).project())
            .unwrap();
        assert!((field.distance[v as usize] - d).abs() < 1e-9);
    }

    #[test]
    fn two_sites_bisector_on_flat_grid() {
        let flat = flat_grid(8);
        let g = GeodesicGraph::build(&flat, 2);
        let sites = [Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)];
        let field = g.multi_source_field(&sites).unwrap();
        for v in 0..g.node_count() as u32 {
            let p = g.node(v).project();
            let margin = euclid_dist(p, sites[0]) - euclid_dist(p, sites[1]);
            // One refined-cell width from the true bisector x = 0.5.
            let cell = 1.0 / 8.0 / 3.0;
            if margin < -cell {
                assert_eq!(field.label[v as usize], 0, "node at ({}, {})", p.x, p.y);
            } else if margin > cell {
                assert_eq!(field.label[v as usize], 1, "node at ({}, {})", p.x, p.y);
            }
        }
    }

    #[test]
    fn flat_labels_match_exact_nearest_site() {
        let flat = flat_grid(10);
        let g = GeodesicGraph::build(&flat, 4);
        let sites: Vec<Point2> = [
            (0.12, 0.21), (0.83, 0.15), (0.52, 0.48), (0.27, 0.81),
            (0.74, 0.69), (0.41, 0.09), (0.91, 0.88), (0.08, 0.55),
        ]
        .iter()
        .map(|&(x, y)| Point2::new(x, y))
        .collect();
        let field = g.multi_source_field(&sites).unwrap();
        let mut agree = 0usize;
        for v in 0..g.node_count() {
            let p = g.node(v as u32).project();
            let exact = sites
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    euclid_dist(p, *a.1).partial_cmp(&euclid_dist(p, *b.1)).unwrap()
                })
                .unwrap()
                .0 as u32;
            if exact == field.label[v] {
                agree += 1;
            }
        }
        let frac = agree as f64 / g.node_count() as f64;
        assert!(frac >= 0.99, "label agreement {frac}");
    }

    #[test]
    fn refinement_monotone_on_nested_ladder() {
        // Node sets nest only along the doubling ladder s = 1, 2, 4, 8.
        let pyr = pyramid(0.8);
        let pairs = [
            (Point2::new(0.05, 0.1), Point2::new(0.9, 0.85)),
            (Point2::new(0.2, 0.7), Point2::new(0.8, 0.2)),
            (Point2::new(0.05, 0.5), Point2::new(0.95, 0.5)),
        ];
        let mut prev: Vec<f64> = Vec::new();
        for k in [0u32, 1, 3, 7] {
            let g = GeodesicGraph::build(&pyr, k);
            let ds: Vec<f64> = pairs
                .iter()
                .map(|&(p, q)| g.geodesic_distance(p, q).unwrap())
                .collect();
            if !prev.is_empty() {
                for (a, b) in prev.iter().zip(&ds) {
                    assert!(b <= &(a + 1e-12), "distance grew under refinement: {a} -> {b}");
                }
            }
            prev = ds;
        }
    }
}
