//! Exact arithmetic: big rationals, sparse polynomials, localized chart
//! algebras, substitution homomorphisms and rational linear systems.

mod chart;
mod linsolve;
mod parse;
mod poly;

pub use chart::{Chart, ChartData, ChartHom, LocalizedPoly};
pub use linsolve::{solve_linear, LinSolution, LinSystem, SparseRow};
pub use parse::{parse_expr, parse_rational};
pub use poly::{Mono, Poly};
pub(crate) use poly::render_mono as poly_render_mono;

use num_bigint::BigInt;
use num_traits::One;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgError {
    #[error("variable sets differ: {0}")]
    VariableMismatch(String),
    #[error("denominator {0} is not invertible in the target chart")]
    UndeclaredDenominator(String),
    #[error("restriction is not a coordinate change: {0}")]
    NotEtale(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return qi(0);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}
