//! Polynomial forms on simplices: integration and Stokes.

use deformkit::cechnerve::{coface, SimplexForm};
use deformkit::exactalg::Rational;
use num_traits::Zero;

fn main() {
    for q in 1..=4 {
        let vol = SimplexForm::monomial(q, &vec![0; q], &(1..=q).collect::<Vec<_>>());
        println!("volume of the {}-simplex: {}", q, vol.integrate().unwrap());
    }
    let w = SimplexForm::monomial(2, &[2, 1], &[1]);
    let lhs = w.d().integrate().unwrap();
    let mut rhs = Rational::zero();
    for i in 0..=2 {
        let v = w.pullback(&coface(2, i)).integrate().unwrap();
        rhs += if i % 2 == 0 { v } else { -v };
    }
    println!("int dw = {}, boundary sum = {}", lhs, rhs);
}
