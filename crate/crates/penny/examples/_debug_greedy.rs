use penny::faces::FacePolygon;
use penny::triangulate::{triangulate_face, triangulate_face_baseline};

fn main() {
    for seed in 1..=10u64 {
        let p = penny::packing::generate_random_subset(5, 0.9, 8, seed, 64).unwrap();
        let g = penny::contact::build_contact_graph(&p).unwrap();
        let faces = penny::faces::trace_faces(&g).unwrap();
        for (_, w) in faces.bounded() {
            let poly: FacePolygon = penny::faces::face_polygon(&g, w).unwrap();
            let greedy = triangulate_face(&poly, 0).unwrap();
            let base = triangulate_face_baseline(&poly, 0).unwrap();
            let gmin = greedy.iter().map(|t| t.min_angle()).fold(f64::INFINITY, f64::min);
            let bmin = base.iter().map(|t| t.min_angle()).fold(f64::INFINITY, f64::min);
            if gmin < bmin - 1e-12 {
                println!("seed {seed} degree {} greedy {:.6} base {:.6}", w.degree(), gmin.to_degrees(), bmin.to_degrees());
                println!("  pts: {:?}", poly.points);
                if let Some(opt) = penny::triangulate::dp_optimal_min_angle(&poly).unwrap() {
                    println!("  dp optimal {:.6}", opt.to_degrees());
                }
            }
        }
    }
    println!("done");
}
