//! Move a star product by a gauge transformation and recover the gauge.

use deformkit::descent::random::{random_ext, random_mc, rng};
use deformkit::dgla::Ext;
use deformkit::exactalg::ChartData;
use deformkit::params::ParamAlgebra;
use deformkit::polydiff::{solve_gauge, star_gauge, PolyDiff, SolveOptions, StarProduct};

fn main() {
    let ext = Ext::new(PolyDiff::new(&ChartData::polynomial(&["x", "y"])), &ParamAlgebra::hbar(3));
    let mut r = rng(2024);
    let s = StarProduct { ext: ext.clone(), beta: random_mc(&mut r, &ext) };
    let g0 = random_ext(&mut r, &ext, 0, 1, 2, 2, 1);
    let (t, cert) = star_gauge(&g0, &s, 4).unwrap();
    println!("source:  {}", s.render());
    println!("target:  {}", t.render());
    println!("intertwiner certified on {} products", cert.checked);
    let sol = solve_gauge(&s, &t, None, &SolveOptions::default()).expect("equivalent");
    println!("recovered gauge: {}", ext.render(&sol.gamma));
    println!("original gauge:  {}", ext.render(&g0));
    // gauges are determined up to the stabilizer of the source
    let (t2, _) = star_gauge(&sol.gamma, &s, 4).unwrap();
    println!("recovered gauge reaches the target: {}", t2.beta == t.beta);
    println!("certificate: {} checks up to degree {}", sol.certificate.checked, sol.certificate.degree_bound);
}
