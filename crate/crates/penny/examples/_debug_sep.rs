use penny::dimension::*;
use penny::packing::{generate_lattice, LatticeKind};

fn main() {
    let t0 = std::time::Instant::now();
    let g = penny::contact::build_contact_graph(&generate_lattice(LatticeKind::Square, 40)).unwrap();
    let x0 = (0..g.len()).find(|&v| g.coords(v) == (0.0, 0.0)).unwrap();
    println!("graph built {:?}", t0.elapsed());
    for (k, m) in [(1usize, None), (2, None)] {
        let pencil = build_pencil(&g, x0, k, 16, 2.0, m, PencilMode::Discrete, &[]).unwrap();
        let eig = pencil_eigenvalues(&pencil);
        let thr = growth_threshold(2.0, k, 0.5);
        let above = eig.iter().find(|&&v| v > thr);
        println!("k={k} R=16 threshold {thr:.3}");
        println!("  eigenvalues: {:?}", eig.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
        if let Some(a) = above {
            println!("  smallest above / threshold = {:.3}", a / thr);
        }
    }
    println!("elapsed {:?}", t0.elapsed());
}
