use penny::field::ScalarField;
use penny::packing::{generate_lattice, LatticeKind};
fn main() {
    let g = penny::contact::build_contact_graph(&generate_lattice(LatticeKind::Square, 8)).unwrap();
    let q = ScalarField::from_coords(&g, |x, y| x * x + y * y);
    let sol = penny::heat::caloric_polynomial(&g, &q, 1).unwrap();
    for x in sol.validity().iter() {
        let (cx, cy) = g.coords(x);
        if cx.abs() > 6.0 || cy.abs() > 6.0 {
            println!("valid but outside: ({cx},{cy})");
        }
    }
    println!("validity size = {}", sol.validity().len());
}
