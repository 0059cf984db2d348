use geovor::engine::GeodesicGraph;
use geovor::experiments::*;
use geovor::geom::{euclid_dist, Point2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let terrain = random_terrain(1000, 0.0, &mut rng).unwrap();
    let sites = sample_domain_uniform(1000, &mut rng);
    let graph = GeodesicGraph::build(&terrain, 4);
    let field = graph.multi_source_field(&sites).unwrap();
    let mut worst = (0.0f64, 0usize, 0u32);
    for v in 0..graph.node_count() {
        let p = graph.node(v as u32).project();
        let mut best = (f64::INFINITY, 0u32);
        for (i, &s) in sites.iter().enumerate() {
            let d = euclid_dist(p, s);
            if d < best.0 { best = (d, i as u32); }
        }
        if field.label[v] != best.1 {
            let margin = euclid_dist(p, sites[field.label[v] as usize]) - best.0;
            if margin > worst.0 { worst = (margin, v, best.1); }
        }
    }
    let (margin, v, true_site) = worst;
    let p = graph.node(v as u32).project();
    println!("worst node {v} at ({:.4},{:.4}) margin {margin:.4}", p.x, p.y);
    println!("  assigned site {} dist_field {:.4}", field.label[v], field.distance[v]);
    println!("  euclid to assigned {:.4}", euclid_dist(p, sites[field.label[v] as usize]));
    println!("  true nearest {} euclid {:.4}", true_site, euclid_dist(p, sites[true_site as usize]));
    let dpair = graph.geodesic_distance(sites[true_site as usize], p).unwrap();
    println!("  graph dist true_site -> node: {:.4}", dpair);
    // where is the true site? which face, how many nodes in it
    let faces = graph.terrain().locate_all(sites[true_site as usize]);
    println!("  true site ({:.4},{:.4}) faces {:?}", sites[true_site as usize].x, sites[true_site as usize].y, faces);
    for f in &faces {
        let [a,b,c] = graph.terrain().corners(*f);
        println!("   face {f}: ({:.4},{:.4}) ({:.4},{:.4}) ({:.4},{:.4}) area {:.2e}",
            a.x,a.y,b.x,b.y,c.x,c.y, graph.terrain().projected_area(*f));
    }
}
