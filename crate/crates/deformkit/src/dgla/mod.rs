//! DG Lie algebras of quantum type, their parameter extensions, and the
//! Maurer–Cartan / gauge calculus on them.

mod carrier;
mod ext;
mod linfty;
mod ops;

pub use carrier::{ChartCarrier, Flavor};
pub use ext::{Ext, ExtElem};
pub use linfty::{linfty_apply, IdentityMorphism, LInftyMorphism, LInftyResult};
pub use ops::{
    bch, bch_twisted, bernoulli, exp_ad, gauge_act, inverse_log, mc_check, mc_expr, twisted_bracket, twisted_d,
    McReport,
};

use crate::exactalg::Rational;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DglaError {
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: i32, got: i32 },
    #[error("element must lie in the maximal ideal (adic order >= 1)")]
    NotInIdeal,
    #[error("elements belong to different carriers")]
    CarrierMismatch,
}

/// A DG Lie algebra over the rationals, presented through a context object
/// that owns whatever the elements need (chart, nerve, parameter algebra).
pub trait Dgla {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self, deg: i32) -> Self::Elem;
    fn degree(&self, x: &Self::Elem) -> i32;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn scale(&self, x: &Self::Elem, c: &Rational) -> Self::Elem;
    fn d(&self, x: &Self::Elem) -> Self::Elem;
    fn bracket(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    fn neg(&self, x: &Self::Elem) -> Self::Elem {
        self.scale(x, &-Rational::one())
    }

    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.add(x, &self.neg(y))
    }

    fn sum<'a>(&self, deg: i32, xs: impl IntoIterator<Item = &'a Self::Elem>) -> Self::Elem
    where
        Self::Elem: 'a,
    {
        let mut acc = self.zero(deg);
        for x in xs {
            acc = self.add(&acc, x);
        }
        acc
    }
}

/// A DG Lie algebra tensored with the maximal ideal of a truncated parameter
/// algebra: every element has an adic order and nested brackets terminate.
pub trait Filtered: Dgla {
    /// `None` for zero.
    fn adic_order(&self, x: &Self::Elem) -> Option<u32>;
    /// The component lying in order exactly `p`.
    fn order_part(&self, x: &Self::Elem, p: u32) -> Self::Elem;
    /// Highest order that survives truncation.
    fn top_order(&self) -> u32;

    fn truncate_below(&self, x: &Self::Elem, p: u32) -> Self::Elem {
        let mut acc = self.zero(self.degree(x));
        for k in 0..p {
            acc = self.add(&acc, &self.order_part(x, k));
        }
        acc
    }
}
