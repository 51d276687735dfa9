//! Order-two quantization of a linear Poisson structure and its star table.

use deformkit::dgla::{Dgla, Ext};
use deformkit::exactalg::{parse_expr, ChartData};
use deformkit::params::{ParamAlgebra, ParamSeries};
use deformkit::polydiff::{first_order_bracket, quantize_affine_order2};
use deformkit::polyvec::{PoissonStructure, Polyvec};

fn main() {
    let chart = ChartData::polynomial(&["x", "y", "z"]);
    let pv = Polyvec::new(&chart);
    let f = |s: &str| parse_expr(&chart, s).unwrap();
    let params = ParamAlgebra::hbar(2);
    let ext = Ext::new(pv.clone(), &params);
    let h = ParamSeries::gen(&params, 0);
    let pi = [("z", [0, 1]), ("x", [1, 2]), ("-y", [0, 2])]
        .iter()
        .fold(ext.zero(1), |acc, (c, idx)| ext.add(&acc, &ext.tensor(&h, &pv.term(&f(c), idx))));
    let s = PoissonStructure { ext, beta: pi };

    let q = quantize_affine_order2(&s, 4).expect("quantizable");
    println!("graph weights:");
    for (g, w) in &q.morphism.weights {
        println!("  {} -> {}", g.render(), w);
    }
    println!("associativity checked on {} triples", q.certificate.checked);
    for (a, b) in [("x", "y"), ("y", "x"), ("x", "x*y"), ("x^2", "y")] {
        println!("{} * {} = {}", a, b, q.star.ext.render(&q.star.star_fns(&f(a), &f(b))));
    }
    println!("first-order bracket:\n{}", first_order_bracket(&q.star).render());
}
