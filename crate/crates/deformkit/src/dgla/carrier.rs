use crate::exactalg::{AlgError, Chart, ChartHom, LocalizedPoly};

use super::Dgla;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Poisson,
    Associative,
}

impl Flavor {
    pub fn name(&self) -> &'static str {
        match self {
            Flavor::Poisson => "poisson",
            Flavor::Associative => "associative",
        }
    }

    pub fn parse(s: &str) -> Option<Flavor> {
        match s {
            "poisson" => Some(Flavor::Poisson),
            "associative" => Some(Flavor::Associative),
            _ => None,
        }
    }
}

/// A DG Lie algebra of quantum type built from a chart algebra: degree −1 is
/// the algebra itself, and degree-0 elements act on it by `[gamma, c]`.
pub trait ChartCarrier: Dgla + Clone + std::fmt::Debug {
    const FLAVOR: Flavor;

    fn on_chart(chart: &Chart) -> Self;
    fn chart(&self) -> &Chart;

    fn function(&self, f: &LocalizedPoly) -> Self::Elem;
    fn as_function(&self, x: &Self::Elem) -> Option<LocalizedPoly>;

    /// Transport along a chart map (source chart is `self`).
    fn restrict(&self, x: &Self::Elem, hom: &ChartHom, target: &Self) -> Result<Self::Elem, AlgError>;

    /// A spanning set of the elements of degree `deg` with polynomial
    /// coefficients of degree at most `poly_bound` and operator order at
    /// most `order_bound`.
    fn ansatz(&self, deg: i32, poly_bound: u32, order_bound: u32) -> Vec<Self::Elem>;

    /// Coefficient functions keyed by structural position; linear in `x`.
    fn coefficients(&self, x: &Self::Elem) -> Vec<(Vec<u32>, LocalizedPoly)>;

    /// Largest total degree of a numerator appearing in `x`.
    fn poly_degree(&self, x: &Self::Elem) -> u32;

    /// Largest differential order appearing in `x`.
    fn operator_order(&self, x: &Self::Elem) -> u32;

    fn render(&self, x: &Self::Elem) -> String;

    /// Build an element from `(structural key, coefficient)` pairs in the
    /// format produced by `coefficients`.
    fn from_coefficients(&self, deg: i32, entries: &[(Vec<u32>, LocalizedPoly)]) -> Self::Elem;
}
