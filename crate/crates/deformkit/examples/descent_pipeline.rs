//! Integrate a Thom-Sullivan MC element over a three-chart nerve, exponentiate
//! the additive datum and certify it; then perturb one edge.

use std::sync::Arc;

use deformkit::cechnerve::{Nerve, TsDgla};
use deformkit::descent::random::{random_ts_mc, rng};
use deformkit::descent::{check_add, check_mdd, exp_add, int_mc, AddDatum, IntOptions};
use deformkit::dgla::{bch, twisted_d, ChartCarrier};
use deformkit::exactalg::{parse_expr, ChartData};
use deformkit::params::ParamAlgebra;
use deformkit::polydiff::PolyDiff;

fn main() {
    let chart = ChartData::polynomial(&["x", "y"]);
    let nerve = Arc::new(Nerve::full(&["U0", "U1", "U2"], &chart));
    let params = ParamAlgebra::hbar(3);
    let ts = TsDgla::<PolyDiff>::new(&nerve);
    let beta = random_ts_mc(&mut rng(7), &ts, &params);

    let add = int_mc(&ts, &params, &beta, &IntOptions::default()).expect("integrable");
    print!("{}", add.logs);
    println!("additive check: {}", check_add(&add).summary());
    let mdd = exp_add(&add, 4).unwrap();
    println!("multiplicative check: {}", check_mdd(&mdd, 4).summary());

    let mut logs = add.logs.clone();
    let e = vec![0, 1];
    let g = logs.cech.ext(&e);
    let a = g.basis_tensor(1, &g.base.function(&parse_expr(&chart, "x").unwrap()));
    let moved = bch(g, &logs.gamma(&e), &twisted_d(g, &logs.beta_on(&e), &a));
    logs.set_gamma(e, moved);
    let bad = exp_add(&AddDatum { logs }, 4).unwrap();
    println!("after perturbing (U0,U1): {}", check_mdd(&bad, 4).summary());
}
