//! Schouten and Gerstenhaber brackets, and the Maurer-Cartan equation.

use deformkit::dgla::{mc_check, ChartCarrier, Dgla, Ext};
use deformkit::exactalg::{parse_expr, qi, ChartData};
use deformkit::params::{ParamAlgebra, ParamSeries};
use deformkit::polydiff::{moyal, PolyDiff};
use deformkit::polyvec::Polyvec;

fn main() {
    let chart = ChartData::polynomial(&["x", "y", "z"]);
    let pv = Polyvec::new(&chart);
    let f = |s: &str| parse_expr(&chart, s).unwrap();

    let pi = pv.term(&f("z"), &[0, 1]);
    let v = pv.term(&f("x*y"), &[2]);
    println!("[z dx^dy, xy dz] = {}", pv.render(&pv.bracket(&pi, &v)));
    println!("[z dx^dy, z dx^dy] = {}", pv.render(&pv.bracket(&pi, &pi)));

    // x dy^dz + y dz^dx + z dx^dy is Poisson; dx^dy - x dx^dz - y dy^dz is not
    let params = ParamAlgebra::hbar(2);
    let ext = Ext::new(pv.clone(), &params);
    let h = ParamSeries::gen(&params, 0);
    let so3 = pv.add(&pv.add(&pv.term(&f("z"), &[0, 1]), &pv.term(&f("x"), &[1, 2])), &pv.term(&f("-y"), &[0, 2]));
    let bad = pv.add(&pv.add(&pv.term(&f("1"), &[0, 1]), &pv.term(&f("-x"), &[0, 2])), &pv.term(&f("-y"), &[1, 2]));
    for (name, b) in [("so3", so3), ("dx^dy - x dx^dz - y dy^dz", bad)] {
        let rep = mc_check(&ext, &ext.tensor(&h, &b)).unwrap();
        println!("{}: MC = {}, lowest defect order {:?}", name, rep.holds, rep.lowest_order);
    }

    let pd = PolyDiff::new(&ChartData::polynomial(&["x", "y"]));
    let ext = Ext::new(pd, &params);
    let m = moyal(&ext, &[vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]);
    println!("Moyal cochain: {}", ext.render(&m));
    println!("Moyal is MC: {}", mc_check(&ext, &m).unwrap().holds);
}
