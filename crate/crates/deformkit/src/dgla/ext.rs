use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Dgla, Filtered};
use crate::exactalg::Rational;
use crate::params::{ParamSeries, Params};

/// `R ⊗ g` for a truncated parameter algebra `R` and a DG Lie algebra `g`
/// over the rationals.
#[derive(Clone, Debug)]
pub struct Ext<G> {
    pub base: G,
    pub params: Params,
}

/// Homogeneous element `Σ_i r_i ⊗ x_i` indexed by the filtered basis of `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtElem<E> {
    pub deg: i32,
    pub comps: BTreeMap<usize, E>,
}

impl<G: Dgla> Ext<G> {
    pub fn new(base: G, params: &Params) -> Self {
        Ext { base, params: params.clone() }
    }

    /// `r ⊗ x`.
    pub fn tensor(&self, r: &ParamSeries, x: &G::Elem) -> ExtElem<G::Elem> {
        let deg = self.base.degree(x);
        let mut comps = BTreeMap::new();
        for (i, c) in r.coeffs() {
            let v = self.base.scale(x, c);
            if !self.base.is_zero(&v) {
                comps.insert(*i, v);
            }
        }
        ExtElem { deg, comps }
    }

    /// `r_i ⊗ x` for a basis index.
    pub fn basis_tensor(&self, i: usize, x: &G::Elem) -> ExtElem<G::Elem> {
        let deg = self.base.degree(x);
        let mut comps = BTreeMap::new();
        if !self.base.is_zero(x) {
            comps.insert(i, x.clone());
        }
        ExtElem { deg, comps }
    }

    /// `hbar^k ⊗ x` in a one-generator algebra, or generator-monomial `m ⊗ x`.
    pub fn mono_tensor(&self, m: &crate::exactalg::Mono, x: &G::Elem) -> ExtElem<G::Elem> {
        match self.params.basis_index(m) {
            Some(i) => self.basis_tensor(i, x),
            None => self.zero(self.base.degree(x)),
        }
    }

    pub fn component(&self, x: &ExtElem<G::Elem>, i: usize) -> G::Elem {
        x.comps.get(&i).cloned().unwrap_or_else(|| self.base.zero(x.deg))
    }

    /// Apply an R-linear map given on base elements.
    pub fn map_linear<H: Dgla>(
        &self,
        target: &Ext<H>,
        x: &ExtElem<G::Elem>,
        deg: i32,
        f: impl Fn(&G::Elem) -> H::Elem,
    ) -> ExtElem<H::Elem> {
        let mut comps = BTreeMap::new();
        for (i, v) in &x.comps {
            let w = f(v);
            if !target.base.is_zero(&w) {
                comps.insert(*i, w);
            }
        }
        ExtElem { deg, comps }
    }

    /// Multiply by a parameter series.
    pub fn mul_param(&self, r: &ParamSeries, x: &ExtElem<G::Elem>) -> ExtElem<G::Elem> {
        let mut out = self.zero(x.deg);
        for (i, c) in r.coeffs() {
            for (j, v) in &x.comps {
                if let Some(k) = self.params.mult(*i, *j) {
                    let w = self.base.scale(v, c);
                    let e = out.comps.entry(k).or_insert_with(|| self.base.zero(x.deg));
                    *e = self.base.add(e, &w);
                }
            }
        }
        out.comps.retain(|_, v| !self.base.is_zero(v));
        out
    }

    /// Extend an R-bilinear operation given on base elements.
    pub fn bilinear<H: Dgla, K: Dgla>(
        &self,
        other: &Ext<H>,
        target: &Ext<K>,
        x: &ExtElem<G::Elem>,
        y: &ExtElem<H::Elem>,
        deg: i32,
        f: impl Fn(&G::Elem, &H::Elem) -> K::Elem,
    ) -> ExtElem<K::Elem> {
        let _ = other;
        let mut comps: BTreeMap<usize, K::Elem> = BTreeMap::new();
        for (i, a) in &x.comps {
            for (j, b) in &y.comps {
                if let Some(k) = self.params.mult(*i, *j) {
                    let v = f(a, b);
                    if target.base.is_zero(&v) {
                        continue;
                    }
                    match comps.get_mut(&k) {
                        Some(e) => *e = target.base.add(e, &v),
                        None => {
                            comps.insert(k, v);
                        }
                    }
                }
            }
        }
        comps.retain(|_, v| !target.base.is_zero(v));
        ExtElem { deg, comps }
    }

    /// Reduction modulo the maximal ideal.
    pub fn constant_part(&self, x: &ExtElem<G::Elem>) -> G::Elem {
        self.component(x, 0)
    }
}

impl<C: super::ChartCarrier> Ext<C> {
    /// `basis * (element)` summands, or `0`.
    pub fn render(&self, x: &ExtElem<C::Elem>) -> String {
        if x.comps.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, v) in &x.comps {
            let r = self.params.render_basis(*i);
            let body = self.base.render(v);
            if r == "1" {
                parts.push(body);
            } else {
                parts.push(format!("{} * ({})", r, body));
            }
        }
        parts.join(" + ")
    }
}

impl<G: Dgla> Dgla for Ext<G> {
    type Elem = ExtElem<G::Elem>;

    fn zero(&self, deg: i32) -> Self::Elem {
        ExtElem { deg, comps: BTreeMap::new() }
    }

    fn degree(&self, x: &Self::Elem) -> i32 {
        x.deg
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        x.comps.is_empty()
    }

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        assert_eq!(x.deg, y.deg, "adding elements of different degrees");
        let mut comps = x.comps.clone();
        for (i, v) in &y.comps {
            match comps.get_mut(i) {
                Some(e) => {
                    let s = self.base.add(e, v);
                    if self.base.is_zero(&s) {
                        comps.remove(i);
                    } else {
                        *e = s;
                    }
                }
                None => {
                    comps.insert(*i, v.clone());
                }
            }
        }
        ExtElem { deg: x.deg, comps }
    }

    fn scale(&self, x: &Self::Elem, c: &Rational) -> Self::Elem {
        if c.is_zero() {
            return self.zero(x.deg);
        }
        ExtElem { deg: x.deg, comps: x.comps.iter().map(|(i, v)| (*i, self.base.scale(v, c))).collect() }
    }

    fn d(&self, x: &Self::Elem) -> Self::Elem {
        let mut comps = BTreeMap::new();
        for (i, v) in &x.comps {
            let w = self.base.d(v);
            if !self.base.is_zero(&w) {
                comps.insert(*i, w);
            }
        }
        ExtElem { deg: x.deg + 1, comps }
    }

    fn bracket(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.bilinear(self, self, x, y, x.deg + y.deg, |a, b| self.base.bracket(a, b))
    }
}

impl<G: Dgla> Filtered for Ext<G> {
    fn adic_order(&self, x: &Self::Elem) -> Option<u32> {
        x.comps.keys().map(|i| self.params.basis_order(*i)).min()
    }

    fn order_part(&self, x: &Self::Elem, p: u32) -> Self::Elem {
        ExtElem {
            deg: x.deg,
            comps: x.comps.iter().filter(|(i, _)| self.params.basis_order(**i) == p).map(|(i, v)| (*i, v.clone())).collect(),
        }
    }

    fn top_order(&self) -> u32 {
        self.params.top_order()
    }
}
