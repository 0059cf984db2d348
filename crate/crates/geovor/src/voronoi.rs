//! Discrete geodesic Voronoi labelings and their combinatorial complexity.
//!
//! The labeling is the multi-source distance field over the Steiner graph.
//! Complexity is counted on the refined subdivision: a Voronoi vertex is
//! witnessed by a subdivision triangle with three distinct corner labels
//! (adjacent witnesses carrying the same label triple merge into one), and
//! chord/edge crossings are label changes along the Steiner chains of the
//! original triangulation edges. Breakpoints are not detected individually;
//! the deterministic cap (one per terrain vertex) enters the report instead.

use crate::engine::{DistanceField, EngineError, GeodesicGraph};
use crate::geom::{Point2, Segment2};
use serde::Serialize;
use std::collections::HashMap;

/// Complexity estimate of one labeling.
#[derive(Debug, Clone, Serialize)]
pub struct VoronoiComplexityReport {
    pub m: usize,
    pub n: usize,
    pub voronoi_vertex_count: u64,
    pub chord_edge_crossings: u64,
    /// Deterministic breakpoint cap: the number of terrain vertices.
    pub breakpoint_bound: u64,
    /// Labels whose node sets are graph-disconnected (discretization noise;
    /// must shrink as the refinement grows).
    pub disconnected_labels: u32,
    /// Distinct labels per occupied cell of the `ceil(sqrt(m))` grid.
    pub per_cell_contributors: Vec<GridCell>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridCell {
    pub cx: u32,
    pub cy: u32,
    pub contributors: u32,
}

impl VoronoiComplexityReport {
    /// Voronoi vertices + breakpoint cap + chord crossings.
    pub fn total_complexity(&self) -> u64 {
        self.voronoi_vertex_count + self.breakpoint_bound + self.chord_edge_crossings
    }
}

/// Euler-bound audit: the vertex count against `2m - 2`.
#[derive(Debug, Clone, Serialize)]
pub struct EulerAudit {
    pub m: usize,
    pub voronoi_vertex_count: u64,
    pub bound: u64,
    pub ok: bool,
}

/// Computes the discrete Voronoi labeling of `sites` on the graph's terrain.
pub fn voronoi_labeling(
    graph: &GeodesicGraph,
    sites: &[Point2],
) -> Result<DistanceField, EngineError> {
    graph.multi_source_field(sites)
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

fn sorted_triple(a: u32, b: u32, c: u32) -> [u32; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Counts Voronoi vertices: subdivision triangles whose corner labels are
/// pairwise distinct, with nearby witnesses of the same label triple merged
/// into a single vertex.
///
/// Merging is by proximity (a few subdivision cells), not just shared
/// edges: the discrete boundary flickers around a junction, so one true
/// vertex can witness in two triangles separated by a non-witness gap. Two
/// genuinely distinct vertices of the same triple cannot be that close —
/// in the plane a triple has a single circumcenter, and on terrains the
/// duplicates sit far apart.
pub fn count_voronoi_vertices(graph: &GeodesicGraph, field: &DistanceField) -> u64 {
    // (centroid, merge radius) per witness, grouped by label triple.
    let mut groups: HashMap<[u32; 3], Vec<(Point2, f64)>> = HashMap::new();
    for f in 0..graph.terrain().n_triangles() as u32 {
        for tri in graph.sub_triangles(f) {
            let [a, b, c] = tri;
            let (la, lb, lc) = (
                field.label[a as usize],
                field.label[b as usize],
                field.label[c as usize],
            );
            if la == lb || lb == lc || la == lc {
                continue;
            }
            let pa = graph.node(a).project();
            let pb = graph.node(b).project();
            let pc = graph.node(c).project();
            let centroid = Point2::new(
                (pa.x + pb.x + pc.x) / 3.0,
                (pa.y + pb.y + pc.y) / 3.0,
            );
            let diam = crate::geom::euclid_dist(pa, pb)
                .max(crate::geom::euclid_dist(pb, pc))
                .max(crate::geom::euclid_dist(pa, pc));
            groups
                .entry(sorted_triple(la, lb, lc))
                .or_default()
                .push((centroid, 1.5 * diam));
        }
    }
    let mut count = 0u64;
    for witnesses in groups.values() {
        let n = witnesses.len();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let (ci, ri) = witnesses[i];
                let (cj, rj) = witnesses[j];
                if crate::geom::euclid_dist(ci, cj) <= ri + rj {
                    uf.union(i as u32, j as u32);
                }
            }
        }
        count += (0..n as u32).filter(|&i| uf.find(i) == i).count() as u64;
    }
    count
}

/// Label changes along the Steiner chain of one original edge.
fn chain_changes(graph: &GeodesicGraph, field: &DistanceField, e: u32) -> u64 {
    let chain = graph.edge_chain(e);
    chain
        .windows(2)
        .filter(|w| field.label[w[0] as usize] != field.label[w[1] as usize])
        .count() as u64
}

/// Total chord/triangulation-edge crossings: label changes along every
/// original edge's Steiner chain.
pub fn count_chord_edge_crossings(graph: &GeodesicGraph, field: &DistanceField) -> u64 {
    (0..graph.terrain().edges().len() as u32)
        .map(|e| chain_changes(graph, field, e))
        .sum()
}

/// Crossings restricted to the given edges (as vertex-index pairs). Used to
/// compare a meshed scene against its analytic planar-map overlay count,
/// which only involves the designated map edges.
pub fn count_crossings_on_edges(
    graph: &GeodesicGraph,
    field: &DistanceField,
    edges: &[(u32, u32)],
) -> u64 {
    edges
        .iter()
        .map(|&(a, b)| {
            let e = graph
                .terrain()
                .edge_id(a, b)
                .expect("designated edge must exist in the terrain");
            chain_changes(graph, field, e)
        })
        .sum()
}

/// Number of labels whose witness node sets are disconnected in the graph.
pub fn disconnected_label_count(graph: &GeodesicGraph, field: &DistanceField) -> u32 {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut component_of_label: HashMap<u32, u32> = HashMap::new();
    let mut bad: std::collections::HashSet<u32> = std::collections::HashSet::new();
    let mut stack = Vec::new();
    for v in 0..n {
        if seen[v] || field.label[v] == u32::MAX {
            continue;
        }
        let lab = field.label[v];
        *component_of_label.entry(lab).or_insert(0) += 1;
        stack.push(v as u32);
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for (t, _) in graph.neighbors(u) {
                if !seen[t as usize] && field.label[t as usize] == lab {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        if component_of_label[&lab] > 1 {
            bad.insert(lab);
        }
    }
    bad.len() as u32
}

/// Piecewise-linear approximation of the label boundary: for each
/// subdivision triangle, segments joining midpoints of its label-crossing
/// edges (all three joined to the centroid at a three-label corner).
pub fn boundary_segments(graph: &GeodesicGraph, field: &DistanceField) -> Vec<Segment2> {
    let mut out = Vec::new();
    for f in 0..graph.terrain().n_triangles() as u32 {
        for tri in graph.sub_triangles(f) {
            let [a, b, c] = tri;
            let pa = graph.node(a).project();
            let pb = graph.node(b).project();
            let pc = graph.node(c).project();
            let (la, lb, lc) = (
                field.label[a as usize],
                field.label[b as usize],
                field.label[c as usize],
            );
            let mid = |p: Point2, q: Point2| Point2::new(0.5 * (p.x + q.x), 0.5 * (p.y + q.y));
            let mut cuts: Vec<Point2> = Vec::new();
            if la != lb {
                cuts.push(mid(pa, pb));
            }
            if lb != lc {
                cuts.push(mid(pb, pc));
            }
            if la != lc {
                cuts.push(mid(pa, pc));
            }
            match cuts.len() {
                2 => out.push(Segment2::new(cuts[0], cuts[1])),
                3 => {
                    let cx = (pa.x + pb.x + pc.x) / 3.0;
                    let cy = (pa.y + pb.y + pc.y) / 3.0;
                    let center = Point2::new(cx, cy);
                    for cut in cuts {
                        out.push(Segment2::new(cut, center));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Distinct labels per occupied cell of a `g x g` grid over the domain.
pub fn grid_label_counts(graph: &GeodesicGraph, field: &DistanceField, g: u32) -> Vec<GridCell> {
    let mut sets: HashMap<(u32, u32), std::collections::HashSet<u32>> = HashMap::new();
    for v in 0..graph.node_count() {
        let p = graph.node(v as u32).project();
        let cx = ((p.x * g as f64) as u32).min(g - 1);
        let cy = ((p.y * g as f64) as u32).min(g - 1);
        sets.entry((cx, cy)).or_default().insert(field.label[v]);
    }
    let mut cells: Vec<GridCell> = sets
        .into_iter()
        .map(|((cx, cy), set)| GridCell { cx, cy, contributors: set.len() as u32 })
        .collect();
    cells.sort_unstable_by_key(|c| (c.cy, c.cx));
    cells
}

/// Full complexity report for one labeling.
pub fn complexity_report(graph: &GeodesicGraph, field: &DistanceField) -> VoronoiComplexityReport {
    let m = field.sites.len();
    let g = (m as f64).sqrt().ceil().max(1.0) as u32;
    VoronoiComplexityReport {
        m,
        n: graph.terrain().n_vertices(),
        voronoi_vertex_count: count_voronoi_vertices(graph, field),
        chord_edge_crossings: count_chord_edge_crossings(graph, field),
        breakpoint_bound: graph.terrain().n_vertices() as u64,
        disconnected_labels: disconnected_label_count(graph, field),
        per_cell_contributors: grid_label_counts(graph, field, g),
    }
}

pub fn euler_audit(field: &DistanceField, vertex_count: u64) -> EulerAudit {
    let m = field.sites.len();
    let bound = if m >= 3 { 2 * m as u64 - 2 } else { u64::MAX };
    EulerAudit { m, voronoi_vertex_count: vertex_count, bound, ok: vertex_count <= bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::GeodesicGraph;
    use crate::terrain::flat_grid;

    fn field_on(g: &GeodesicGraph, sites: &[Point2]) -> DistanceField {
        voronoi_labeling(g, sites).unwrap()
    }

    #[test]
    fn single_site_trivial_counts() {
        let g = GeodesicGraph::build(&flat_grid(4), 2);
        let f = field_on(&g, &[Point2::new(0.4, 0.6)]);
        assert_eq!(count_voronoi_vertices(&g, &f), 0);
        assert_eq!(count_chord_edge_crossings(&g, &f), 0);
        assert_eq!(disconnected_label_count(&g, &f), 0);
        let report = complexity_report(&g, &f);
        assert!(report.per_cell_contributors.iter().all(|c| c.contributors == 1));
    }

    #[test]
    fn two_sites_no_vertices() {
        let g = GeodesicGraph::build(&flat_grid(6), 3);
        let f = field_on(&g, &[Point2::new(0.2, 0.5), Point2::new(0.8, 0.5)]);
        assert_eq!(count_voronoi_vertices(&g, &f), 0);
        // Bisector x = 0.5 crosses the 6 interior horizontal chains plus the
        // two walls, and each diagonal row it passes through.
        assert!(count_chord_edge_crossings(&g, &f) > 0);
        let audit = euler_audit(&f, 0);
        assert!(audit.ok);
    }

    #[test]
    fn three_sites_one_vertex() {
        // Equilateral triple well inside the domain, circumcenter away from
        // any mesh line: one Voronoi vertex.
        let g = GeodesicGraph::build(&flat_grid(8), 4);
        let sites = [
            Point2::new(0.38, 0.35),
            Point2::new(0.68, 0.35),
            Point2::new(0.53, 0.35 + 0.3 * 3f64.sqrt() / 2.0),
        ];
        let f = field_on(&g, &sites);
        assert_eq!(count_voronoi_vertices(&g, &f), 1);
        assert!(euler_audit(&f, 1).ok);
    }

    #[test]
    fn two_sites_crossings_match_exact_overlay() {
        // Bisector x = 0.45 on an 8x8 grid mesh crosses the 9 horizontal
        // chains and the 8 diagonals of its cell column, and no vertical
        // chain.
        let g = GeodesicGraph::build(&flat_grid(8), 3);
        let f = field_on(&g, &[Point2::new(0.2, 0.5), Point2::new(0.7, 0.5)]);
        let crossings = count_chord_edge_crossings(&g, &f);
        assert_eq!(crossings, 17);
    }

    #[test]
    fn boundary_polyline_tracks_bisector() {
        let g = GeodesicGraph::build(&flat_grid(8), 4);
        let f = field_on(&g, &[Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)]);
        let segs = boundary_segments(&g, &f);
        assert!(!segs.is_empty());
        for s in &segs {
            assert!((s.a.x - 0.5).abs() < 0.04, "segment x {}", s.a.x);
        }
    }
}
