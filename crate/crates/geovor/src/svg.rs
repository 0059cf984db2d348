//! Minimal SVG rendering: labeled Voronoi fields over their triangulation,
//! and construction scenes.

use crate::constructions::{ConstructionScene, DominationRecord, SceneKind};
use crate::engine::{DistanceField, GeodesicGraph};

const SIZE: f64 = 800.0;

fn color(label: u32) -> String {
    // Golden-angle hue rotation keeps adjacent labels distinguishable.
    let hue = (label as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},70%,62%)")
}

struct Svg {
    body: String,
}

impl Svg {
    fn new() -> Self {
        let mut body = String::new();
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
        ));
        body.push_str(&format!(
            "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
        ));
        Self { body }
    }

    fn x(v: f64) -> f64 {
        v * SIZE
    }

    fn y(v: f64) -> f64 {
        (1.0 - v) * SIZE
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str, width: f64) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(px, py)| format!("{:.2},{:.2}", Self::x(px), Self::y(py)))
            .collect();
        self.body.push_str(&format!(
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            coords.join(" "),
            fill,
            stroke,
            width
        ));
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        self.body.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            Self::x(a.0),
            Self::y(a.1),
            Self::x(b.0),
            Self::y(b.1),
            stroke,
            width
        ));
    }

    fn circle(&mut self, c: (f64, f64), r: f64, fill: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.1}\" fill=\"{}\"/>\n",
            Self::x(c.0),
            Self::y(c.1),
            r,
            fill
        ));
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Renders the labeled field: subdivision triangles filled by their first
/// corner's label, original triangulation overlaid, sites marked.
pub fn render_field_svg(graph: &GeodesicGraph, field: &DistanceField) -> String {
    let mut svg = Svg::new();
    let terrain = graph.terrain();
    for f in 0..terrain.n_triangles() as u32 {
        for tri in graph.sub_triangles(f) {
            let label = field.label[tri[0] as usize];
            let pts: Vec<(f64, f64)> = tri
                .iter()
                .map(|&v| {
                    let p = graph.node(v).project();
                    (p.x, p.y)
                })
                .collect();
            let fill = color(label);
            svg.polygon(&pts, &fill, &fill, 0.2);
        }
    }
    for e in terrain.edges() {
        let a = terrain.vertices()[e.v[0] as usize];
        let b = terrain.vertices()[e.v[1] as usize];
        svg.line((a.x, a.y), (b.x, b.y), "black", 0.4);
    }
    for site in &field.sites {
        svg.circle((site.x, site.y), 3.0, "black");
    }
    svg.finish()
}

/// Renders a construction scene; alive dominating points (when given) are
/// highlighted.
pub fn render_scene_svg(scene: &ConstructionScene, records: Option<&[DominationRecord]>) -> String {
    let mut svg = Svg::new();
    // Ridge block band.
    let ridge_w = 0.01;
    svg.polygon(
        &[
            (scene.ridge.x_position, 0.0),
            (scene.ridge.x_position + ridge_w, 0.0),
            (scene.ridge.x_position + ridge_w, 1.0),
            (scene.ridge.x_position, 1.0),
        ],
        "#c9b458",
        "#8a7a2a",
        0.5,
    );
    for farm in &scene.farms {
        let o = farm.origin;
        svg.polygon(
            &[
                (o.x, o.y),
                (o.x + farm.side, o.y),
                (o.x + farm.side, o.y - farm.side),
                (o.x, o.y - farm.side),
            ],
            "#9fd59f",
            "#3a7a3a",
            0.6,
        );
        // Road polyline from entrance to exit.
        match scene.kind {
            SceneKind::Farming => {
                svg.line(
                    (farm.entrance.x, farm.entrance.y),
                    (farm.exit.x, farm.exit.y),
                    "#555",
                    0.8,
                );
            }
            SceneKind::Industrial => {
                let g = crate::constructions::road_geometry(farm.col as usize, scene.m, scene.w)
                    .expect("scene farms have valid roads");
                let e = farm.entrance;
                let p1 = (e.x, e.y - g.alpha_a);
                let p2 = (p1.0 - g.alpha_b, p1.1);
                let p3 = (p2.0, p2.1 - g.alpha_c);
                let p4 = (p3.0 + g.alpha_d, p3.1);
                svg.line((e.x, e.y), p1, "#555", 0.8);
                svg.line(p1, p2, "#555", 0.8);
                svg.line(p2, p3, "#555", 0.8);
                svg.line(p3, p4, "#555", 0.8);
            }
            SceneKind::PlanarGrid => {}
        }
    }
    if let Some(records) = records {
        for r in records {
            let fill = if r.alive { "#d62728" } else { "#999" };
            svg.circle((r.point.x, r.point.y), 2.5, fill);
        }
    }
    svg.finish()
}
