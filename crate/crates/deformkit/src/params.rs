//! Truncated parameter algebras `Q[params]/(monomial ideal)` with their
//! filtered monomial bases and multiplication tables.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::exactalg::{fmt_rational, parse_expr, ChartData, Mono, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("truncation order must be at least 1")]
    BadOrder,
    #[error("relation {0} is not a monomial")]
    NonMonomialRelation(String),
    #[error("relation {0} has a constant term")]
    UnitRelation(String),
    #[error("series belong to different parameter algebras")]
    AlgebraMismatch,
    #[error("image of generator {0} is not in the maximal ideal")]
    NotLocal(String),
    #[error("{0}")]
    Syntax(String),
}

#[derive(Debug)]
pub struct ParamAlgebra {
    gens: Vec<String>,
    order: u32,
    relations: Vec<Mono>,
    basis: Vec<Mono>,
    index: BTreeMap<Mono, usize>,
    // r_i r_j = r_{mult[i][j]} or 0
    mult: Vec<Vec<Option<usize>>>,
}

pub type Params = Arc<ParamAlgebra>;

impl PartialEq for ParamAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.basis == other.basis
    }
}

impl Eq for ParamAlgebra {}

impl ParamAlgebra {
    /// All monomials of order at most `order` in `gens` that are not divisible
    /// by any of `relations`.
    pub fn truncated(gens: &[&str], order: u32, relations: &[Mono]) -> Result<Params, ParamError> {
        if order < 1 {
            return Err(ParamError::BadOrder);
        }
        let n = gens.len();
        for r in relations {
            if r.degree() == 0 {
                return Err(ParamError::UnitRelation(crate::exactalg::Poly::monomial(n, r.clone(), Rational::one()).to_string()));
            }
        }
        let basis: Vec<Mono> = Mono::all_up_to(n, order)
            .into_iter()
            .filter(|m| !relations.iter().any(|r| r.divides(m)))
            .collect();
        let index: BTreeMap<Mono, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mult = basis
            .iter()
            .map(|a| basis.iter().map(|b| index.get(&a.mul(b)).cloned()).collect())
            .collect();
        Ok(Arc::new(ParamAlgebra {
            gens: gens.iter().map(|s| s.to_string()).collect(),
            order,
            relations: relations.to_vec(),
            basis,
            index,
            mult,
        }))
    }

    /// `Q[hbar]/(hbar^{order+1})`.
    pub fn hbar(order: u32) -> Params {
        Self::truncated(&["hbar"], order, &[]).expect("order >= 1")
    }

    /// Relations given as expressions in the generators; each must be a monomial.
    pub fn with_relation_exprs(gens: &[&str], order: u32, relations: &[&str]) -> Result<Params, ParamError> {
        let chart = ChartData::polynomial(gens);
        let mut monos = Vec::new();
        for r in relations {
            let p = parse_expr(&chart, r).map_err(|e| ParamError::Syntax(e.to_string()))?;
            let p = p.as_poly().cloned().ok_or_else(|| ParamError::NonMonomialRelation(r.to_string()))?;
            if p.terms().len() != 1 {
                return Err(ParamError::NonMonomialRelation(r.to_string()));
            }
            monos.push(p.terms().keys().next().unwrap().clone());
        }
        Self::truncated(gens, order, &monos)
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn relations(&self) -> &[Mono] {
        &self.relations
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mono] {
        &self.basis
    }

    pub fn basis_order(&self, i: usize) -> u32 {
        self.basis[i].degree()
    }

    pub fn basis_index(&self, m: &Mono) -> Option<usize> {
        self.index.get(m).cloned()
    }

    /// Index `k` with `r_i r_j = r_k`, or `None` when the product vanishes.
    pub fn mult(&self, i: usize, j: usize) -> Option<usize> {
        self.mult[i][j]
    }

    /// Multiplication constant `mu_{i,j;k}`.
    pub fn mult_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        if self.mult[i][j] == Some(k) {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    /// Highest order of a nonzero basis element (the nilpotency bound).
    pub fn top_order(&self) -> u32 {
        self.basis.iter().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn render_basis(&self, i: usize) -> String {
        if self.basis[i].degree() == 0 {
            "1".into()
        } else {
            crate::exactalg::poly_render_mono(&self.basis[i], &self.gens)
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("param-algebra {{ gens = [{}]; order = {}", self.gens.join(", "), self.order);
        if !self.relations.is_empty() {
            let r: Vec<String> = self.relations.iter().map(|m| crate::exactalg::poly_render_mono(m, &self.gens)).collect();
            s.push_str(&format!("; relations = [{}]", r.join(", ")));
        }
        s.push_str(" }");
        s
    }

    /// Parse `param-algebra { gens = [hbar]; order = 3 }` (relations optional).
    pub fn parse(src: &str) -> Result<Params, ParamError> {
        let bad = || ParamError::Syntax(format!("cannot parse parameter algebra: {}", src));
        let s = src.trim();
        let body = s
            .strip_prefix("param-algebra")
            .map(str::trim)
            .and_then(|b| b.strip_prefix('{'))
            .and_then(|b| b.trim_end().strip_suffix('}'))
            .ok_or_else(bad)?;
        let mut gens: Option<Vec<String>> = None;
        let mut order: Option<u32> = None;
        let mut rels: Vec<String> = Vec::new();
        for field in body.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (k, v) = field.split_once('=').ok_or_else(bad)?;
            let list = || -> Result<Vec<String>, ParamError> {
                let v = v.trim().strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(bad)?;
                Ok(v.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect())
            };
            match k.trim() {
                "gens" => gens = Some(list()?),
                "order" => order = Some(v.trim().parse().map_err(|_| bad())?),
                "relations" => rels = list()?,
                _ => return Err(bad()),
            }
        }
        let gens = gens.ok_or_else(bad)?;
        let g: Vec<&str> = gens.iter().map(String::as_str).collect();
        let r: Vec<&str> = rels.iter().map(String::as_str).collect();
        Self::with_relation_exprs(&g, order.ok_or_else(bad)?, &r)
    }
}

/// Element of a parameter algebra in the filtered basis.
#[derive(Clone, Debug)]
pub struct ParamSeries {
    alg: Params,
    coeffs: BTreeMap<usize, Rational>,
}

impl PartialEq for ParamSeries {
    fn eq(&self, other: &Self) -> bool {
        *self.alg == *other.alg && self.coeffs == other.coeffs
    }
}

impl Eq for ParamSeries {}

impl ParamSeries {
    pub fn zero(alg: &Params) -> Self {
        ParamSeries { alg: alg.clone(), coeffs: BTreeMap::new() }
    }

    pub fn constant(alg: &Params, c: Rational) -> Self {
        Self::basis_elem(alg, 0, c)
    }

    pub fn one(alg: &Params) -> Self {
        Self::constant(alg, Rational::one())
    }

    pub fn basis_elem(alg: &Params, i: usize, c: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(i, c);
        }
        ParamSeries { alg: alg.clone(), coeffs }
    }

    pub fn gen(alg: &Params, g: usize) -> Self {
        let m = Mono::var(alg.gens.len(), g);
        match alg.basis_index(&m) {
            Some(i) => Self::basis_elem(alg, i, Rational::one()),
            None => Self::zero(alg),
        }
    }

    /// The monomial `m` with coefficient `c`, zero if truncated away.
    pub fn monomial(alg: &Params, m: &Mono, c: Rational) -> Self {
        match alg.basis_index(m) {
            Some(i) => Self::basis_elem(alg, i, c),
            None => Self::zero(alg),
        }
    }

    pub fn from_coeffs(alg: &Params, it: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut s = Self::zero(alg);
        for (i, c) in it {
            assert!(i < alg.dim());
            s.add_basis(i, c);
        }
        s
    }

    pub fn algebra(&self) -> &Params {
        &self.alg
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_basis(&mut self, i: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    fn check(&self, other: &ParamSeries) -> Result<(), ParamError> {
        if Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg {
            Ok(())
        } else {
            Err(ParamError::AlgebraMismatch)
        }
    }

    pub fn try_add(&self, other: &ParamSeries) -> Result<ParamSeries, ParamError> {
        self.check(other)?;
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_basis(*i, c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &ParamSeries) -> Result<ParamSeries, ParamError> {
        self.check(other)?;
        let mut out = ParamSeries::zero(&self.alg);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if let Some(k) = self.alg.mult(*i, *j) {
                    out.add_basis(k, a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ParamSeries) -> ParamSeries {
        self.try_add(other).expect("parameter algebra mismatch")
    }

    pub fn sub(&self, other: &ParamSeries) -> ParamSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ParamSeries) -> ParamSeries {
        self.try_mul(other).expect("parameter algebra mismatch")
    }

    pub fn neg(&self) -> ParamSeries {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> ParamSeries {
        if c.is_zero() {
            return ParamSeries::zero(&self.alg);
        }
        ParamSeries { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|(i, a)| (*i, a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> ParamSeries {
        let mut out = ParamSeries::one(&self.alg);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Lowest order of a basis element with nonzero coefficient; `None` is +∞.
    pub fn adic_order(&self) -> Option<u32> {
        self.coeffs.keys().map(|i| self.alg.basis_order(*i)).min()
    }

    /// Component of order exactly `p`.
    pub fn homogeneous_part(&self, p: u32) -> ParamSeries {
        ParamSeries {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().filter(|(i, _)| self.alg.basis_order(**i) == p).map(|(i, c)| (*i, c.clone())).collect(),
        }
    }

    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (i, c)) in self.coeffs.iter().enumerate() {
            let neg = c < &Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let b = self.alg.render_basis(*i);
            if *i == 0 {
                s.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                s.push_str(&b);
            } else {
                s.push_str(&format!("{}*{}", fmt_rational(&a), b));
            }
        }
        s
    }

    /// Parse an expression in the generators, truncating.
    pub fn parse(alg: &Params, src: &str) -> Result<ParamSeries, ParamError> {
        let g: Vec<&str> = alg.gens.iter().map(String::as_str).collect();
        let chart = ChartData::polynomial(&g);
        let p = parse_expr(&chart, src).map_err(|e| ParamError::Syntax(e.to_string()))?;
        let p = p.as_poly().ok_or_else(|| ParamError::Syntax("division in a parameter expression".into()))?;
        let mut out = ParamSeries::zero(alg);
        for (m, c) in p.terms() {
            out = out.add(&ParamSeries::monomial(alg, m, c.clone()));
        }
        Ok(out)
    }
}

impl fmt::Display for ParamSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Local homomorphism of parameter algebras determined by generator images.
#[derive(Clone, Debug)]
pub struct ParamHom {
    pub source: Params,
    pub target: Params,
    images: Vec<ParamSeries>,
    basis_images: Vec<ParamSeries>,
}

impl ParamHom {
    pub fn new(source: &Params, target: &Params, images: Vec<ParamSeries>) -> Result<Self, ParamError> {
        if images.len() != source.gens.len() {
            return Err(ParamError::Syntax(format!("{} images for {} generators", images.len(), source.gens.len())));
        }
        for (g, im) in source.gens.iter().zip(&images) {
            im.check(&ParamSeries::zero(target))?;
            if im.adic_order() == Some(0) {
                return Err(ParamError::NotLocal(g.clone()));
            }
        }
        // relations of the source must map to zero in the target
        let eval = |m: &Mono| {
            let mut acc = ParamSeries::one(target);
            for (im, e) in images.iter().zip(&m.0) {
                acc = acc.mul(&im.pow(*e));
            }
            acc
        };
        for r in &source.relations {
            if !eval(r).is_zero() {
                return Err(ParamError::Syntax("a relation of the source does not map to zero".into()));
            }
        }
        // monomials just past the truncation order must vanish as well
        for m in Mono::all_up_to(source.gens.len(), source.order + 1) {
            if m.degree() == source.order + 1 && !eval(&m).is_zero() {
                return Err(ParamError::Syntax("truncation ideal does not map to zero".into()));
            }
        }
        let basis_images = source.basis.iter().map(eval).collect();
        Ok(ParamHom { source: source.clone(), target: target.clone(), images, basis_images })
    }

    pub fn identity(alg: &Params) -> Self {
        let images = (0..alg.gens.len()).map(|g| ParamSeries::gen(alg, g)).collect();
        ParamHom::new(alg, alg, images).expect("identity")
    }

    pub fn images(&self) -> &[ParamSeries] {
        &self.images
    }

    pub fn basis_image(&self, i: usize) -> &ParamSeries {
        &self.basis_images[i]
    }

    pub fn apply(&self, a: &ParamSeries) -> ParamSeries {
        assert!(*a.alg == *self.source, "series is not in the source algebra");
        let mut out = ParamSeries::zero(&self.target);
        for (i, c) in &a.coeffs {
            out = out.add(&self.basis_images[*i].scale(c));
        }
        out
    }
}

/// Apply a parameter-algebra homomorphism to a series.
pub fn base_change(a: &ParamSeries, hom: &ParamHom) -> ParamSeries {
    hom.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q, qi};
    use proptest::prelude::*;

    #[test]
    fn single_parameter_basis() {
        let r = ParamAlgebra::hbar(2);
        assert_eq!(r.dim(), 3);
        let h = ParamSeries::gen(&r, 0);
        assert!(h.mul(&h.pow(2)).is_zero());
        let r1 = ParamAlgebra::hbar(1);
        let h1 = ParamSeries::gen(&r1, 0);
        assert!(h1.mul(&h1).is_zero());
    }

    #[test]
    fn two_parameter_basis_matches_enumeration() {
        let r = ParamAlgebra::truncated(&["h1", "h2"], 2, &[]).unwrap();
        let names: Vec<String> = (0..r.dim()).map(|i| r.render_basis(i)).collect();
        // independent enumeration: exponent pairs (a,b) with a+b <= 2
        let mut expect = 0;
        for a in 0..=2 {
            for b in 0..=2 {
                if a + b <= 2 {
                    expect += 1;
                }
            }
        }
        assert_eq!(names.len(), expect);
        assert_eq!(names[0], "1");
        assert!(names.contains(&"h1*h2".to_string()));
    }

    #[test]
    fn arithmetic_examples() {
        let r = ParamAlgebra::hbar(2);
        let a = ParamSeries::parse(&r, "1 + hbar").unwrap();
        let b = ParamSeries::parse(&r, "1 - hbar").unwrap();
        assert_eq!(a.mul(&b).render(), "1 - hbar^2");
        let c = ParamSeries::parse(&r, "1 + 1/2*hbar^2").unwrap();
        assert_eq!(c.render(), "1 + 1/2*hbar^2");
    }

    #[test]
    fn adic_orders() {
        let r = ParamAlgebra::hbar(3);
        assert_eq!(ParamSeries::parse(&r, "1+hbar").unwrap().adic_order(), Some(0));
        assert_eq!(ParamSeries::parse(&r, "hbar^2").unwrap().adic_order(), Some(2));
        assert_eq!(ParamSeries::zero(&r).adic_order(), None);
    }

    #[test]
    fn base_change_examples() {
        let r3 = ParamAlgebra::hbar(2);
        let r5 = ParamAlgebra::hbar(4);
        let h2 = ParamSeries::parse(&r5, "hbar^2").unwrap();
        let f = ParamHom::new(&r3, &r5, vec![h2]).unwrap();
        let a = ParamSeries::parse(&r3, "hbar + hbar^2").unwrap();
        assert_eq!(base_change(&a, &f).render(), "hbar^2 + hbar^4");
        let id = ParamHom::identity(&r3);
        assert_eq!(base_change(&a, &id), a);

        let r2 = ParamAlgebra::truncated(&["h1", "h2"], 2, &[]).unwrap();
        let g = ParamHom::new(&r3, &r2, vec![ParamSeries::parse(&r2, "h1 + h2").unwrap()]).unwrap();
        let sq = base_change(&ParamSeries::parse(&r3, "hbar^2").unwrap(), &g);
        // binomial oracle
        let mut expect = ParamSeries::zero(&r2);
        for k in 0..=2u32 {
            let m = Mono(vec![k, 2 - k]);
            expect = expect.add(&ParamSeries::monomial(&r2, &m, crate::exactalg::binomial(2, k)));
        }
        assert_eq!(sq, expect);
    }

    #[test]
    fn non_local_image_rejected() {
        let r = ParamAlgebra::hbar(2);
        let bad = ParamSeries::parse(&r, "1 + hbar").unwrap();
        assert!(matches!(ParamHom::new(&r, &r, vec![bad]), Err(ParamError::NotLocal(_))));
    }

    #[test]
    fn relations_must_be_monomials() {
        assert!(ParamAlgebra::with_relation_exprs(&["a", "b"], 3, &["a*b"]).is_ok());
        assert!(matches!(
            ParamAlgebra::with_relation_exprs(&["a", "b"], 3, &["a + b"]),
            Err(ParamError::NonMonomialRelation(_))
        ));
    }

    #[test]
    fn text_form_round_trip() {
        let r = ParamAlgebra::parse("param-algebra { gens = [hbar]; order = 3 }").unwrap();
        assert_eq!(r.dim(), 4);
        assert_eq!(r.render(), "param-algebra { gens = [hbar]; order = 3 }");
        let r2 = ParamAlgebra::parse(&ParamAlgebra::with_relation_exprs(&["a", "b"], 2, &["a*b"]).unwrap().render()).unwrap();
        assert_eq!(r2.dim(), 5);
    }

    #[test]
    fn structural_invariants() {
        for alg in [
            ParamAlgebra::hbar(4),
            ParamAlgebra::truncated(&["a", "b"], 3, &[]).unwrap(),
            ParamAlgebra::with_relation_exprs(&["a", "b", "c"], 3, &["a^2", "b*c"]).unwrap(),
        ] {
            let n = alg.dim();
            for i in 0..n {
                assert_eq!(alg.mult(0, i), Some(i));
                assert_eq!(alg.mult(i, 0), Some(i));
                if i + 1 < n {
                    assert!(alg.basis_order(i) <= alg.basis_order(i + 1));
                }
                for j in 0..n {
                    assert_eq!(alg.mult(i, j), alg.mult(j, i));
                    for k in 0..n {
                        if alg.basis_order(i) + alg.basis_order(j) > alg.basis_order(k) {
                            assert_eq!(alg.mult_constant(i, j, k), qi(0));
                        }
                    }
                }
            }
            // maximal ideal is nilpotent of index order + 1
            let mut acc = ParamSeries::one(&alg);
            let g: ParamSeries = (0..alg.gens().len()).fold(ParamSeries::zero(&alg), |s, i| s.add(&ParamSeries::gen(&alg, i)));
            for _ in 0..=alg.order() {
                acc = acc.mul(&g);
            }
            assert!(acc.is_zero());
        }
    }

    fn series(alg: Params) -> impl Strategy<Value = ParamSeries> {
        let n = alg.dim();
        proptest::collection::vec((-5i64..=5, 1i64..=3), n).prop_map(move |cs| {
            ParamSeries::from_coeffs(&alg, cs.into_iter().enumerate().map(|(i, (a, b))| (i, q(a, b))))
        })
    }

    proptest! {
        #[test]
        fn products_associate(a in series(ParamAlgebra::truncated(&["a","b"], 3, &[]).unwrap()),
                              b in series(ParamAlgebra::truncated(&["a","b"], 3, &[]).unwrap()),
                              c in series(ParamAlgebra::truncated(&["a","b"], 3, &[]).unwrap())) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn base_change_is_multiplicative(a in series(ParamAlgebra::hbar(3)), b in series(ParamAlgebra::hbar(3))) {
            let src = ParamAlgebra::hbar(3);
            let tgt = ParamAlgebra::truncated(&["u","v"], 3, &[]).unwrap();
            let img = ParamSeries::parse(&tgt, "u + 2*v - u*v").unwrap();
            let f = ParamHom::new(&src, &tgt, vec![img]).unwrap();
            prop_assert_eq!(f.apply(&a.mul(&b)), f.apply(&a).mul(&f.apply(&b)));
            let o = a.adic_order();
            let oi = f.apply(&a).adic_order();
            if let (Some(o), Some(oi)) = (o, oi) { prop_assert!(oi >= o); }
        }
    }
}
