//! Constant deformations on the octahedron glued by a central 2-cocycle: the
//! class in H^2 obstructs untwisting, a coboundary does not.

use std::sync::Arc;

use deformkit::cechnerve::{cech_cohomology, CechDgla, Layer, Nerve};
use deformkit::descent::random::{central_datum, random_cocycle, rng};
use deformkit::descent::{obstruction, ObstructionOutcome, SolverOptions};
use deformkit::exactalg::ChartData;
use deformkit::params::ParamAlgebra;
use deformkit::polyvec::Polyvec;

fn main() {
    let n = Arc::new(Nerve::octahedron(&ChartData::polynomial(&["x", "y"])));
    let coh = cech_cohomology(&n, Layer::Constant).unwrap();
    println!("betti numbers of the octahedron: {:?}", coh.betti);

    let cech = Arc::new(CechDgla::<Polyvec>::new(&n, &ParamAlgebra::hbar(2)));
    let mut r = rng(1);
    for coboundary in [false, true] {
        let c = random_cocycle(&mut r, &n, coboundary);
        println!("cocycle: {}", c.render(&n));
        let d = central_datum(&mut r, &cech, &c);
        match obstruction(&d, &SolverOptions::default()).unwrap() {
            ObstructionOutcome::Obstructed(rep) => {
                println!("  obstructed at order {}: class {} (nonzero: {:?})", rep.order, rep.class, rep.class_nonzero)
            }
            ObstructionOutcome::Trivial(t) => println!("  trivialized by a transformation on {} edges", t.transformation.edge.len()),
        }
    }
}
