//! Truncated parameter algebras with monomial relations.

use deformkit::params::{ParamAlgebra, ParamSeries};

fn main() {
    let alg = ParamAlgebra::parse("param-algebra { gens = [s, t]; order = 3; relations = [s^2] }").unwrap();
    println!("{}", alg.render());
    let basis: Vec<String> = (0..alg.dim()).map(|i| alg.render_basis(i)).collect();
    println!("basis: {}", basis.join(", "));
    let a = ParamSeries::parse(&alg, "1 + s + t").unwrap();
    let b = ParamSeries::parse(&alg, "1 - s + t^2").unwrap();
    println!("({}) * ({}) = {}", a, b, a.mul(&b));
    println!("(1 + s + t)^3 = {}", a.pow(3));
}
