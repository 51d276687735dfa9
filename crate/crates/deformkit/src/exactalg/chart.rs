use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use super::{AlgError, Mono, Poly, Rational};

/// Presentation of a chart algebra: a polynomial ring localized at finitely
/// many declared elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChartData {
    pub vars: Vec<String>,
    pub denoms: Vec<Poly>,
}

pub type Chart = Arc<ChartData>;

impl ChartData {
    pub fn polynomial(vars: &[&str]) -> Chart {
        Arc::new(ChartData { vars: vars.iter().map(|s| s.to_string()).collect(), denoms: Vec::new() })
    }

    pub fn localized(vars: &[&str], denoms: Vec<Poly>) -> Chart {
        let c = ChartData { vars: vars.iter().map(|s| s.to_string()).collect(), denoms };
        for d in &c.denoms {
            assert_eq!(d.nvars(), c.vars.len());
            assert!(!d.is_constant(), "a declared denominator must be non-constant");
        }
        Arc::new(c)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denoms.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = format!("Q[{}", self.vars.join(","));
        for d in &self.denoms {
            s.push_str(&format!(",1/({})", d.render(&self.vars)));
        }
        s.push(']');
        s
    }
}

/// `numerator / prod_j denoms[j]^power[j]` over a chart.
#[derive(Clone, Debug)]
pub struct LocalizedPoly {
    chart: Chart,
    num: Poly,
    den: BTreeMap<usize, u32>,
}

impl LocalizedPoly {
    pub fn from_poly(chart: &Chart, p: Poly) -> Self {
        assert_eq!(p.nvars(), chart.nvars(), "polynomial does not live on this chart");
        LocalizedPoly { chart: chart.clone(), num: p, den: BTreeMap::new() }
    }

    pub fn new(chart: &Chart, num: Poly, den: BTreeMap<usize, u32>) -> Self {
        let mut r = LocalizedPoly { chart: chart.clone(), num, den };
        r.reduce();
        r
    }

    pub fn zero(chart: &Chart) -> Self {
        Self::from_poly(chart, Poly::zero(chart.nvars()))
    }

    pub fn one(chart: &Chart) -> Self {
        Self::from_poly(chart, Poly::one(chart.nvars()))
    }

    pub fn constant(chart: &Chart, c: Rational) -> Self {
        Self::from_poly(chart, Poly::constant(chart.nvars(), c))
    }

    pub fn var(chart: &Chart, i: usize) -> Self {
        Self::from_poly(chart, Poly::var(chart.nvars(), i))
    }

    pub fn monomial(chart: &Chart, m: &Mono) -> Self {
        Self::from_poly(chart, Poly::monomial(chart.nvars(), m.clone(), Rational::one()))
    }

    /// The inverse of the `j`-th declared denominator.
    pub fn denom_inverse(chart: &Chart, j: usize) -> Self {
        let mut den = BTreeMap::new();
        den.insert(j, 1);
        LocalizedPoly { chart: chart.clone(), num: Poly::one(chart.nvars()), den }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// The same element viewed on an equal chart presentation.
    pub fn rehome(&self, chart: &Chart) -> Self {
        assert_eq!(**chart, *self.chart, "charts differ");
        LocalizedPoly { chart: chart.clone(), num: self.num.clone(), den: self.den.clone() }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominators(&self) -> &BTreeMap<usize, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_empty() && self.num.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let keys: Vec<usize> = self.den.keys().cloned().collect();
        for j in keys {
            let s = &self.chart.denoms[j];
            loop {
                let e = self.den[&j];
                if e == 0 {
                    break;
                }
                match self.num.div_exact(s) {
                    Some(q) => {
                        self.num = q;
                        *self.den.get_mut(&j).unwrap() = e - 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
    }

    fn check(&self, other: &LocalizedPoly) {
        if !Arc::ptr_eq(&self.chart, &other.chart) && *self.chart != *other.chart {
            panic!("{}", AlgError::VariableMismatch(format!("{} vs {}", self.chart.render(), other.chart.render())));
        }
    }

    pub fn checked_add(&self, other: &LocalizedPoly) -> Result<LocalizedPoly, AlgError> {
        if *self.chart != *other.chart {
            return Err(AlgError::VariableMismatch(format!("{} vs {}", self.chart.render(), other.chart.render())));
        }
        Ok(self.add(other))
    }

    pub fn checked_mul(&self, other: &LocalizedPoly) -> Result<LocalizedPoly, AlgError> {
        if *self.chart != *other.chart {
            return Err(AlgError::VariableMismatch(format!("{} vs {}", self.chart.render(), other.chart.render())));
        }
        Ok(self.mul(other))
    }

    fn denom_power(&self, exps: &BTreeMap<usize, u32>) -> Poly {
        let mut p = Poly::one(self.chart.nvars());
        for (j, e) in exps {
            p = p.mul(&self.chart.denoms[*j].pow(*e));
        }
        p
    }

    /// Numerators of `self` and `other` over the common denominator.
    fn common(&self, other: &LocalizedPoly) -> (Poly, Poly, BTreeMap<usize, u32>) {
        let mut l = self.den.clone();
        for (j, e) in &other.den {
            let v = l.entry(*j).or_insert(0);
            *v = (*v).max(*e);
        }
        let fill = |den: &BTreeMap<usize, u32>| {
            let mut miss = BTreeMap::new();
            for (j, e) in &l {
                let have = den.get(j).cloned().unwrap_or(0);
                if *e > have {
                    miss.insert(*j, e - have);
                }
            }
            miss
        };
        let a = self.num.mul(&self.denom_power(&fill(&self.den)));
        let b = other.num.mul(&self.denom_power(&fill(&other.den)));
        (a, b, l)
    }

    pub fn add(&self, other: &LocalizedPoly) -> LocalizedPoly {
        self.check(other);
        if self.den.is_empty() && other.den.is_empty() {
            return LocalizedPoly { chart: self.chart.clone(), num: self.num.add(&other.num), den: BTreeMap::new() };
        }
        let (a, b, l) = self.common(other);
        LocalizedPoly::new(&self.chart, a.add(&b), l)
    }

    pub fn sub(&self, other: &LocalizedPoly) -> LocalizedPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LocalizedPoly {
        LocalizedPoly { chart: self.chart.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rational) -> LocalizedPoly {
        let mut r = LocalizedPoly { chart: self.chart.clone(), num: self.num.scale(c), den: self.den.clone() };
        if r.num.is_zero() {
            r.den.clear();
        }
        r
    }

    pub fn mul(&self, other: &LocalizedPoly) -> LocalizedPoly {
        self.check(other);
        let mut den = self.den.clone();
        for (j, e) in &other.den {
            *den.entry(*j).or_insert(0) += e;
        }
        if den.is_empty() {
            return LocalizedPoly { chart: self.chart.clone(), num: self.num.mul(&other.num), den };
        }
        LocalizedPoly::new(&self.chart, self.num.mul(&other.num), den)
    }

    pub fn pow(&self, e: u32) -> LocalizedPoly {
        let mut out = LocalizedPoly::one(&self.chart);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative, extended to fractions by the quotient rule.
    pub fn derivative(&self, i: usize) -> LocalizedPoly {
        let mut out = LocalizedPoly { chart: self.chart.clone(), num: self.num.derivative(i), den: self.den.clone() };
        if out.num.is_zero() {
            out.den.clear();
        }
        for (j, e) in &self.den {
            let ds = self.chart.denoms[*j].derivative(i);
            if ds.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            *den.get_mut(j).unwrap() += 1;
            let num = self.num.mul(&ds).scale(&Rational::from_integer((-(*e as i64)).into()));
            out = out.add(&LocalizedPoly::new(&self.chart, num, den));
        }
        if !out.den.is_empty() {
            out.reduce();
        }
        out
    }

    /// Multi-index derivative `d^alpha`.
    pub fn derivative_multi(&self, alpha: &[u32]) -> LocalizedPoly {
        let mut out = self.clone();
        for (i, a) in alpha.iter().enumerate() {
            for _ in 0..*a {
                if out.is_zero() {
                    return out;
                }
                out = out.derivative(i);
            }
        }
        out
    }

    /// Inverse when `self` is a unit of the chart algebra (a nonzero constant
    /// times a product of declared denominators over such a product).
    pub fn inverse(&self) -> Option<LocalizedPoly> {
        if self.num.is_zero() {
            return None;
        }
        let mut n = self.num.clone();
        let mut e: BTreeMap<usize, u32> = BTreeMap::new();
        for (j, s) in self.chart.denoms.iter().enumerate() {
            while let Some(q) = n.div_exact(s) {
                n = q;
                *e.entry(j).or_insert(0) += 1;
            }
        }
        if !n.is_constant() {
            return None;
        }
        let c = n.constant_term();
        let num = self.denom_power(&self.den).scale(&(Rational::one() / c));
        Some(LocalizedPoly::new(&self.chart, num, e))
    }

    pub fn render(&self) -> String {
        let n = self.num.render(&self.chart.vars);
        if self.den.is_empty() {
            return n;
        }
        let mut parts = Vec::new();
        for (j, e) in &self.den {
            let s = self.chart.denoms[*j].render(&self.chart.vars);
            let base = if self.chart.denoms[*j].terms().len() > 1 { format!("({})", s) } else { s };
            parts.push(if *e == 1 { base } else { format!("{}^{}", base, e) });
        }
        let wrap = if self.num.terms().len() > 1 { format!("({})", n) } else { n };
        format!("{}/{}", wrap, parts.join("/"))
    }

    /// Total degree of numerator; only meaningful for polynomial elements.
    pub fn poly_degree(&self) -> Option<u32> {
        self.num.total_degree()
    }

    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let n = self.num.eval(point);
        let d = self.denom_power(&self.den).eval(point);
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }
}

impl PartialEq for LocalizedPoly {
    fn eq(&self, other: &Self) -> bool {
        if *self.chart != *other.chart {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let (a, b, _) = self.common(other);
        a == b
    }
}

impl Eq for LocalizedPoly {}

impl fmt::Display for LocalizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Substitution homomorphism between chart algebras, given by the images of
/// the source variables.
#[derive(Clone, Debug)]
pub struct ChartHom {
    pub source: Chart,
    pub target: Chart,
    images: Vec<LocalizedPoly>,
    denom_inverses: Vec<LocalizedPoly>,
    fields: OnceLock<Result<Vec<Vec<LocalizedPoly>>, AlgError>>,
    identity: bool,
}

impl PartialEq for ChartHom {
    fn eq(&self, other: &Self) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.images == other.images
    }
}

impl ChartHom {
    pub fn new(source: &Chart, target: &Chart, images: Vec<LocalizedPoly>) -> Result<Self, AlgError> {
        if images.len() != source.nvars() {
            return Err(AlgError::VariableMismatch(format!(
                "{} images for {} variables",
                images.len(),
                source.nvars()
            )));
        }
        for im in &images {
            if **im.chart() != **target {
                return Err(AlgError::VariableMismatch("image does not live on the target chart".into()));
            }
        }
        let mut h = ChartHom {
            source: source.clone(),
            target: target.clone(),
            images,
            denom_inverses: Vec::new(),
            fields: OnceLock::new(),
            identity: false,
        };
        h.identity = *h.source == *h.target
            && h.images.iter().enumerate().all(|(i, im)| *im == LocalizedPoly::var(&h.target, i));
        for s in &source.denoms {
            let img = h.apply_poly(s);
            match img.inverse() {
                Some(inv) => h.denom_inverses.push(inv),
                None => {
                    return Err(AlgError::UndeclaredDenominator(format!(
                        "{} maps to {}",
                        s.render(&source.vars),
                        img.render()
                    )))
                }
            }
        }
        Ok(h)
    }

    pub fn identity(chart: &Chart) -> Self {
        let images = (0..chart.nvars()).map(|i| LocalizedPoly::var(chart, i)).collect();
        ChartHom::new(chart, chart, images).expect("identity is always valid")
    }

    /// Map sending each source variable to the target variable of the same name.
    pub fn by_name(source: &Chart, target: &Chart) -> Result<Self, AlgError> {
        let mut images = Vec::new();
        for v in &source.vars {
            match target.vars.iter().position(|w| w == v) {
                Some(i) => images.push(LocalizedPoly::var(target, i)),
                None => return Err(AlgError::VariableMismatch(format!("no variable {} in {}", v, target.render()))),
            }
        }
        ChartHom::new(source, target, images)
    }

    pub fn images(&self) -> &[LocalizedPoly] {
        &self.images
    }

    fn apply_poly(&self, p: &Poly) -> LocalizedPoly {
        let mut out = LocalizedPoly::zero(&self.target);
        for (m, c) in p.terms() {
            let mut t = LocalizedPoly::constant(&self.target, c.clone());
            for (img, e) in self.images.iter().zip(&m.0) {
                if *e > 0 {
                    t = t.mul(&img.pow(*e));
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn apply(&self, p: &LocalizedPoly) -> LocalizedPoly {
        assert_eq!(**p.chart(), *self.source, "element is not on the source chart");
        let mut out = self.apply_poly(p.numerator());
        for (j, e) in p.denominators() {
            out = out.mul(&self.denom_inverses[*j].pow(*e));
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChartHom) -> ChartHom {
        assert_eq!(*self.target, *other.source);
        let images = self.images.iter().map(|im| other.apply(im)).collect();
        ChartHom::new(&self.source, &other.target, images).expect("composite of valid maps")
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Target vector fields `X_i` with `X_i(image(x_k)) = delta_{ik}`: the
    /// source coordinate fields transported along an invertible coordinate change.
    pub fn coordinate_fields(&self) -> Result<&Vec<Vec<LocalizedPoly>>, AlgError> {
        self.fields.get_or_init(|| self.compute_fields()).as_ref().map_err(|e| e.clone())
    }

    fn compute_fields(&self) -> Result<Vec<Vec<LocalizedPoly>>, AlgError> {
        let n = self.source.nvars();
        let m = self.target.nvars();
        if n != m {
            return Err(AlgError::NotEtale(format!("{} source vs {} target variables", n, m)));
        }
        // jac[k][j] = d image_k / d y_j
        let jac: Vec<Vec<LocalizedPoly>> =
            self.images.iter().map(|im| (0..m).map(|j| im.derivative(j)).collect()).collect();
        let det = determinant(&jac, &self.target);
        let dinv = det
            .inverse()
            .ok_or_else(|| AlgError::NotEtale(format!("Jacobian determinant {} is not a unit", det.render())))?;
        // (J^{-1})_{ji} = cof_{ij} / det ; a_{ij} = (J^{-1})_{ji}
        let mut fields = vec![vec![LocalizedPoly::zero(&self.target); m]; n];
        for i in 0..n {
            for j in 0..m {
                let minor = minor_matrix(&jac, i, j);
                let mut c = determinant(&minor, &self.target);
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                fields[i][j] = c.mul(&dinv);
            }
        }
        Ok(fields)
    }
}

fn minor_matrix(a: &[Vec<LocalizedPoly>], row: usize, col: usize) -> Vec<Vec<LocalizedPoly>> {
    a.iter()
        .enumerate()
        .filter(|(r, _)| *r != row)
        .map(|(_, v)| v.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

fn determinant(a: &[Vec<LocalizedPoly>], chart: &Chart) -> LocalizedPoly {
    match a.len() {
        0 => LocalizedPoly::one(chart),
        1 => a[0][0].clone(),
        n => {
            let mut acc = LocalizedPoly::zero(chart);
            for j in 0..n {
                let t = a[0][j].mul(&determinant(&minor_matrix(a, 0, j), chart));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::qi;

    fn line_charts() -> (Chart, Chart) {
        let cx = ChartData::localized(&["x"], vec![Poly::var(1, 0)]);
        let cy = ChartData::localized(&["y"], vec![Poly::var(1, 0)]);
        (cx, cy)
    }

    #[test]
    fn fraction_times_denominator_reduces() {
        let (cx, _) = line_charts();
        let x = LocalizedPoly::var(&cx, 0);
        let s = LocalizedPoly::var(&cx, 0);
        let xs = x.mul(&LocalizedPoly::denom_inverse(&cx, 0));
        let back = xs.mul(&s);
        assert_eq!(back, x);
        assert!(back.denominators().is_empty());
        // cross-check by clearing denominators
        assert_eq!(back.numerator(), &Poly::var(1, 0));
    }

    #[test]
    fn inversion_substitution() {
        let (cx, cy) = line_charts();
        let inv_y = LocalizedPoly::denom_inverse(&cy, 0);
        let h = ChartHom::new(&cx, &cy, vec![inv_y.clone()]).unwrap();
        let x2 = LocalizedPoly::var(&cx, 0).pow(2);
        let img = h.apply(&x2);
        assert_eq!(img.denominators().get(&0), Some(&2));
        assert_eq!(img, inv_y.pow(2));
        // 1/x maps to y
        let img2 = h.apply(&LocalizedPoly::denom_inverse(&cx, 0));
        assert_eq!(img2, LocalizedPoly::var(&cy, 0));
    }

    #[test]
    fn identity_substitution() {
        let c = ChartData::polynomial(&["x", "y"]);
        let p = LocalizedPoly::from_poly(&c, Poly::var(2, 0).mul(&Poly::var(2, 1)).add(&Poly::one(2)));
        assert_eq!(ChartHom::identity(&c).apply(&p), p);
    }

    #[test]
    fn undeclared_denominator_rejected() {
        let cx = ChartData::localized(&["x"], vec![Poly::var(1, 0)]);
        let cy = ChartData::polynomial(&["y"]);
        let err = ChartHom::new(&cx, &cy, vec![LocalizedPoly::var(&cy, 0).add(&LocalizedPoly::one(&cy))]);
        assert!(matches!(err, Err(AlgError::UndeclaredDenominator(_))));
    }

    #[test]
    fn quotient_rule() {
        let (cx, _) = line_charts();
        let inv = LocalizedPoly::denom_inverse(&cx, 0);
        // d/dx (1/x) = -1/x^2
        assert_eq!(inv.derivative(0), inv.pow(2).scale(&qi(-1)));
    }

    #[test]
    fn coordinate_fields_of_inversion() {
        let (cx, cy) = line_charts();
        let h = ChartHom::new(&cx, &cy, vec![LocalizedPoly::denom_inverse(&cy, 0)]).unwrap();
        let f = h.coordinate_fields().unwrap();
        // d/dx = -y^2 d/dy under x = 1/y
        assert_eq!(f[0][0], LocalizedPoly::var(&cy, 0).pow(2).neg());
    }
}
