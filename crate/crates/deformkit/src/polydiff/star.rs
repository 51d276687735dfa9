use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{PdElem, PolyDiff};
use crate::dgla::{exp_ad, gauge_act, mc_check, ChartCarrier, Dgla, DglaError, Ext, ExtElem, Filtered};
use crate::exactalg::{factorial, qi, LocalizedPoly, Mono, Rational};
use crate::params::ParamSeries;
use crate::polyvec::{lift_fn, monomial_basis};
use crate::solve::{solve_columns, AffineOutcome, Residual};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StarError {
    #[error("not a Maurer-Cartan element: residue at order {0}")]
    NotMc(u32),
    #[error(transparent)]
    Dgla(#[from] DglaError),
    #[error("certificate failed on ({0})")]
    Certificate(String),
}

/// `c1 ⋆ c2 = c1 c2 + β(c1, c2)` on `R ⊗ C`.
#[derive(Clone, Debug)]
pub struct StarProduct {
    pub ext: Ext<PolyDiff>,
    pub beta: ExtElem<PdElem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarCertificate {
    pub checked: usize,
    pub degree_bound: u32,
}

/// Sum of slot orders, the order of `φ` as a multi-differential operator.
pub(crate) fn total_order(x: &PdElem) -> u32 {
    x.terms.keys().map(|k| k.iter().map(|m| m.degree()).sum::<u32>()).max().unwrap_or(0)
}

fn ext_total_order(x: &ExtElem<PdElem>) -> u32 {
    x.comps.values().map(total_order).max().unwrap_or(0)
}

impl StarProduct {
    pub fn params(&self) -> &crate::params::Params {
        &self.ext.params
    }

    /// `a ⋆ b` for degree −1 elements.
    pub fn star(&self, a: &ExtElem<PdElem>, b: &ExtElem<PdElem>) -> ExtElem<PdElem> {
        let pd = &self.ext.base;
        let fun = |u: &PdElem| pd.as_function(u).unwrap();
        let prod = self.ext.bilinear(&self.ext, &self.ext, a, b, -1, |u, v| pd.function(&fun(u).mul(&fun(v))));
        let mut acc = prod;
        for (i, bv) in &self.beta.comps {
            for (j, av) in &a.comps {
                let Some(ij) = self.ext.params.mult(*i, *j) else { continue };
                for (k, cv) in &b.comps {
                    let Some(ijk) = self.ext.params.mult(ij, *k) else { continue };
                    let v = pd.apply(bv, &[fun(av), fun(cv)]);
                    acc = self.ext.add(&acc, &self.ext.basis_tensor(ijk, &pd.function(&v)));
                }
            }
        }
        acc
    }

    pub fn lift(&self, f: &LocalizedPoly) -> ExtElem<PdElem> {
        lift_fn(&self.ext, f)
    }

    /// `c1 ⋆ c2` for chart functions.
    pub fn star_fns(&self, a: &LocalizedPoly, b: &LocalizedPoly) -> ExtElem<PdElem> {
        self.star(&self.lift(a), &self.lift(b))
    }

    /// Lowest order at which associativity fails on monomial triples of
    /// total degree at most `d`, with the number of triples examined.
    pub fn associativity_failure(&self, d: u32) -> (Option<u32>, usize) {
        let chart = self.ext.base.chart().clone();
        let monos = Mono::all_up_to(chart.nvars(), d);
        let mut lowest: Option<u32> = None;
        let mut count = 0;
        for ma in &monos {
            for mb in &monos {
                if ma.degree() + mb.degree() > d {
                    continue;
                }
                let f = |m: &Mono| self.lift(&LocalizedPoly::monomial(&chart, m));
                let ab = self.star(&f(ma), &f(mb));
                for mc in &monos {
                    if ma.degree() + mb.degree() + mc.degree() > d {
                        continue;
                    }
                    count += 1;
                    let lhs = self.star(&ab, &f(mc));
                    let rhs = self.star(&f(ma), &self.star(&f(mb), &f(mc)));
                    if let Some(o) = self.ext.adic_order(&self.ext.sub(&lhs, &rhs)) {
                        lowest = Some(lowest.map_or(o, |l| l.min(o)));
                    }
                }
            }
        }
        (lowest, count)
    }

    pub fn render(&self) -> String {
        render_ext(&self.ext, &self.beta)
    }
}

/// `Σ r_i ⊗ x_i` rendered as `r_i * (x_i) + …`.
pub(crate) fn render_ext<C: ChartCarrier>(ext: &Ext<C>, x: &ExtElem<C::Elem>) -> String {
    ext.render(x)
}

/// Effective evaluation degree: at least the requested bound and at least
/// the operator order plus two.
fn effective_degree(d: u32, x: &ExtElem<PdElem>) -> u32 {
    let ord = x.comps.values().map(|v| v.terms.keys().flat_map(|k| k.iter().map(|m| m.degree())).max().unwrap_or(0)).max();
    d.max(ord.unwrap_or(0) + 2)
}

/// Star product of an MC element, with an associativity certificate on
/// monomial triples of total degree at most `d`.
pub fn star_from_mc(
    ext: &Ext<PolyDiff>,
    beta: &ExtElem<PdElem>,
    d: u32,
) -> Result<(StarProduct, StarCertificate), StarError> {
    let rep = mc_check(ext, beta)?;
    if let Some(o) = rep.lowest_order {
        return Err(StarError::NotMc(o));
    }
    let s = StarProduct { ext: ext.clone(), beta: beta.clone() };
    let d = effective_degree(d, beta);
    let (fail, checked) = s.associativity_failure(d);
    if let Some(o) = fail {
        return Err(StarError::Certificate(format!("associativity at order {}", o)));
    }
    Ok((s, StarCertificate { checked, degree_bound: d }))
}

/// Transport along `exp(γ)` and certify that `exp(ad γ)` intertwines the two
/// products on monomial pairs and fixes 1.
pub fn star_gauge(
    gamma: &ExtElem<PdElem>,
    s: &StarProduct,
    d: u32,
) -> Result<(StarProduct, StarCertificate), StarError> {
    let ext = &s.ext;
    if gamma.deg != 0 {
        return Err(DglaError::WrongDegree { expected: 0, got: gamma.deg }.into());
    }
    if ext.adic_order(gamma) == Some(0) {
        return Err(DglaError::NotInIdeal.into());
    }
    for v in gamma.comps.values() {
        if !ext.base.is_normalized(v) {
            return Err(StarError::Certificate("gauge is not normalized".into()));
        }
    }
    let beta2 = gauge_act(ext, gamma, &s.beta);
    let t = StarProduct { ext: ext.clone(), beta: beta2 };
    let d = effective_degree(d, gamma).max(effective_degree(d, &s.beta));
    let chart = ext.base.chart().clone();
    let monos = monomial_basis(&chart, d);
    let phi = |x: &ExtElem<PdElem>| exp_ad(ext, gamma, x);
    let one = s.lift(&LocalizedPoly::one(&chart));
    if phi(&one) != one {
        return Err(StarError::Certificate("1".into()));
    }
    let images: Vec<ExtElem<PdElem>> = monos.iter().map(|f| phi(&s.lift(f))).collect();
    let mut checked = 0;
    for (i, f) in monos.iter().enumerate() {
        for (j, g) in monos.iter().enumerate() {
            if f.poly_degree().unwrap_or(0) + g.poly_degree().unwrap_or(0) > d {
                continue;
            }
            let lhs = phi(&s.star_fns(f, g));
            let rhs = t.star(&images[i], &images[j]);
            if lhs != rhs {
                return Err(StarError::Certificate(format!("{}, {}", f, g)));
            }
            checked += 1;
        }
    }
    Ok((t, StarCertificate { checked, degree_bound: d }))
}

/// Images `G(x^α)` of the monomials under an unknown gauge automorphism.
/// Reconstruction is exact when each order of `G` has differential order at
/// most `degree_bound`.
#[derive(Clone, Debug)]
pub struct GaugeTable {
    pub degree_bound: u32,
    pub images: BTreeMap<Mono, ExtElem<PdElem>>,
}

impl GaugeTable {
    /// Tabulate `exp(ad γ)` on monomials of degree at most `degree_bound`.
    pub fn from_gauge(ext: &Ext<PolyDiff>, gamma: &ExtElem<PdElem>, degree_bound: u32) -> Self {
        let chart = ext.base.chart().clone();
        let images = Mono::all_up_to(chart.nvars(), degree_bound)
            .into_iter()
            .map(|m| {
                let v = exp_ad(ext, gamma, &lift_fn(ext, &LocalizedPoly::monomial(&chart, &m)));
                (m, v)
            })
            .collect();
        GaugeTable { degree_bound, images }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Polynomial degree bound for gauge coefficients; derived from the
    /// inputs when absent.
    pub poly_bound: Option<u32>,
    /// Total operator order bound for the gauge; derived when absent.
    pub order_bound: Option<u32>,
    pub cert_degree: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { poly_bound: None, order_bound: None, cert_degree: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct GaugeSolution {
    pub gamma: ExtElem<PdElem>,
    pub certificate: StarCertificate,
}

/// Failure to connect two star products.
#[derive(Clone, Debug)]
pub struct NotEquivalent {
    /// Adic order of the first unmatched layer.
    pub order: u32,
    /// Unmatched residue at that order (per basis index of `R`).
    pub residue: ExtElem<PdElem>,
    /// Antisymmetric part of the residue; nonzero certifies that no gauge
    /// of any shape exists when `certified` is set.
    pub antisymmetric: ExtElem<PdElem>,
    /// True when the failure is at the lowest differing order and the
    /// antisymmetric part is nonzero, so the residue is not a coboundary.
    pub certified: bool,
    pub reason: String,
}

/// `½(φ(a, b) − φ(b, a))` for a 2-slot cochain.
pub fn antisymmetric_part(pd: &PolyDiff, x: &PdElem) -> PdElem {
    if x.deg != 1 {
        return pd.zero(x.deg);
    }
    let mut sw = pd.zero(1);
    for (k, c) in &x.terms {
        let key = vec![k[1].clone(), k[0].clone()];
        sw = pd.add(&sw, &PdElem { deg: 1, terms: [(key, c.clone())].into_iter().collect() });
    }
    pd.scale(&pd.sub(x, &sw), &(Rational::one() / qi(2)))
}

fn ext_coefficients(ext: &Ext<PolyDiff>, x: &ExtElem<PdElem>) -> Residual {
    let mut out = Vec::new();
    for (i, v) in &x.comps {
        for (mut k, c) in ext.base.coefficients(v) {
            k.insert(0, *i as u32);
            out.push((k, c));
        }
    }
    out
}

/// Find `γ` with `star_gauge(γ, s) = t`, either by reconstruction from a
/// table of the gauge on monomials or by solving the central layers order by
/// order.
pub fn solve_gauge(
    s: &StarProduct,
    t: &StarProduct,
    table: Option<&GaugeTable>,
    opts: &SolveOptions,
) -> Result<GaugeSolution, NotEquivalent> {
    let ext = &s.ext;
    let gamma = match table {
        Some(tab) => gauge_from_table(ext, tab).map_err(|reason| NotEquivalent {
            order: 0,
            residue: ext.zero(1),
            antisymmetric: ext.zero(1),
            certified: false,
            reason,
        })?,
        None => solve_layers(s, t, opts)?,
    };
    let beta2 = gauge_act(ext, &gamma, &s.beta);
    let diff = ext.sub(&beta2, &t.beta);
    if let Some(o) = ext.adic_order(&diff) {
        return Err(not_equivalent(ext, o, &diff, false, "gauge does not reproduce the target product".into()));
    }
    match star_gauge(&gamma, s, opts.cert_degree) {
        Ok((_, certificate)) => Ok(GaugeSolution { gamma, certificate }),
        Err(e) => Err(NotEquivalent {
            order: 0,
            residue: ext.zero(1),
            antisymmetric: ext.zero(1),
            certified: false,
            reason: e.to_string(),
        }),
    }
}

fn not_equivalent(ext: &Ext<PolyDiff>, p: u32, r: &ExtElem<PdElem>, certified: bool, reason: String) -> NotEquivalent {
    let residue = ext.order_part(r, p);
    let antisymmetric = ext.map_linear(ext, &residue, 1, |v| antisymmetric_part(&ext.base, v));
    let certified = certified && !antisymmetric.comps.is_empty();
    NotEquivalent { order: p, residue, antisymmetric, certified, reason }
}

/// Rebuild `G = Σ r_i G_i` from its values on monomials by triangular
/// inversion, then take `γ = log G`.
fn gauge_from_table(ext: &Ext<PolyDiff>, tab: &GaugeTable) -> Result<ExtElem<PdElem>, String> {
    let pd = &ext.base;
    let chart = pd.chart().clone();
    let mut monos: Vec<&Mono> = tab.images.keys().collect();
    monos.sort_by_key(|m| (m.degree(), (*m).clone()));
    // G − id, per basis index
    let mut ops: BTreeMap<usize, BTreeMap<Mono, LocalizedPoly>> = BTreeMap::new();
    for i in 0..ext.params.dim() {
        let op = ops.entry(i).or_default();
        for m in &monos {
            let f = LocalizedPoly::monomial(&chart, m);
            let val = match tab.images[*m].comps.get(&i) {
                Some(v) => pd.as_function(v).ok_or("table entries must be functions")?,
                None => LocalizedPoly::zero(&chart),
            };
            let mut c = if i == 0 { val.sub(&f) } else { val };
            for (b, g) in op.iter() {
                c = c.sub(&g.mul(&f.derivative_multi(&b.0)));
            }
            if !c.is_zero() {
                let af: Rational = m.0.iter().map(|e| factorial(*e)).product();
                op.insert((*m).clone(), c.scale(&(Rational::one() / af)));
            }
        }
    }
    let mut n = ext.zero(0);
    for (i, op) in ops {
        if op.is_empty() {
            continue;
        }
        if i == 0 {
            return Err("gauge does not reduce to the identity".into());
        }
        let mut el = pd.zero(0);
        for (m, g) in op {
            if m.degree() == 0 {
                return Err("gauge does not fix 1".into());
            }
            el = pd.add(&el, &pd.term(&g, &[m]));
        }
        n = ext.add(&n, &ext.basis_tensor(i, &el));
    }
    // log(1 + N) = Σ (−1)^{k+1} N^k / k
    let compose = |a: &ExtElem<PdElem>, b: &ExtElem<PdElem>| ext.bilinear(ext, ext, a, b, 0, |u, v| pd.compose_at(u, 0, v));
    let mut acc = ext.zero(0);
    let mut pow = n.clone();
    let mut k = 1i64;
    while !ext.is_zero(&pow) {
        let c = if k % 2 == 1 { Rational::one() } else { -Rational::one() } / qi(k);
        acc = ext.add(&acc, &ext.scale(&pow, &c));
        pow = compose(&pow, &n);
        k += 1;
    }
    Ok(acc)
}

fn solve_layers(s: &StarProduct, t: &StarProduct, opts: &SolveOptions) -> Result<ExtElem<PdElem>, NotEquivalent> {
    let ext = &s.ext;
    let pd = &ext.base;
    let params = &ext.params;
    let diff0 = ext.sub(&s.beta, &t.beta);
    let first = ext.adic_order(&diff0);
    let poly_bound = opts.poly_bound.unwrap_or_else(|| {
        [&s.beta, &t.beta].iter().flat_map(|b| b.comps.values().map(|v| pd.poly_degree(v))).max().unwrap_or(0)
    });
    let order_bound = opts
        .order_bound
        .unwrap_or_else(|| ext_total_order(&s.beta).max(ext_total_order(&t.beta)).max(1));
    let slot_ansatz: Vec<PdElem> = ansatz_total(pd, poly_bound, order_bound);
    let mut gamma = ext.zero(0);
    let mut prev_kernel: Vec<ExtElem<PdElem>> = Vec::new();
    for p in 1..=params.top_order() {
        let cur = gauge_act(ext, &gamma, &s.beta);
        let r = ext.order_part(&ext.sub(&cur, &t.beta), p);
        let dirs: Vec<ExtElem<PdElem>> = (0..params.dim())
            .filter(|i| params.basis_order(*i) == p)
            .flat_map(|i| slot_ansatz.iter().map(move |e| (i, e)))
            .map(|(i, e)| ext.basis_tensor(i, e))
            .collect();
        if ext.is_zero(&r) {
            prev_kernel = dirs.into_iter().filter(|e| ext.is_zero(&ext.d(e))).collect();
            continue;
        }
        let r0 = ext_coefficients(ext, &r);
        let mut cols: Vec<Residual> = dirs.iter().map(|e| ext_coefficients(ext, &ext.neg(&ext.d(e)))).collect();
        for k in &prev_kernel {
            let moved = gauge_act(ext, &ext.add(&gamma, k), &s.beta);
            let c = ext.order_part(&ext.sub(&moved, &cur), p);
            cols.push(ext_coefficients(ext, &c));
        }
        match solve_columns(&r0, &cols) {
            AffineOutcome::Solved(sol) => {
                let nl = dirs.len();
                for (e, c) in dirs.iter().zip(&sol.x[..nl]) {
                    if !c.is_zero() {
                        gamma = ext.add(&gamma, &ext.scale(e, c));
                    }
                }
                for (e, c) in prev_kernel.iter().zip(&sol.x[nl..]) {
                    if !c.is_zero() {
                        gamma = ext.add(&gamma, &ext.scale(e, c));
                    }
                }
                prev_kernel = sol
                    .kernel
                    .iter()
                    .filter(|v| v[nl..].iter().all(|c| c.is_zero()))
                    .map(|v| {
                        let mut acc = ext.zero(0);
                        for (e, c) in dirs.iter().zip(&v[..nl]) {
                            if !c.is_zero() {
                                acc = ext.add(&acc, &ext.scale(e, c));
                            }
                        }
                        acc
                    })
                    .collect();
            }
            AffineOutcome::Inconsistent { .. } => {
                let certified = first == Some(p);
                let full = ext.sub(&cur, &t.beta);
                return Err(not_equivalent(ext, p, &full, certified, "central layer is not a coboundary".into()));
            }
        }
    }
    Ok(gamma)
}

/// Degree-0 normalized operators `x^a ∂^α` with `|a| ≤ poly_bound` and
/// `1 ≤ |α| ≤ order_bound`.
fn ansatz_total(pd: &PolyDiff, poly_bound: u32, order_bound: u32) -> Vec<PdElem> {
    pd.ansatz(0, poly_bound, order_bound)
}

/// Moyal product for a constant antisymmetric matrix `m`, with deformation
/// parameter the first generator `h`:
/// `β = Σ_{k≥1} (h/2)^k/k! m^{a1b1}…m^{akbk} ∂_{a1…ak} ⊗ ∂_{b1…bk}`.
pub fn moyal(ext: &Ext<PolyDiff>, m: &[Vec<Rational>]) -> ExtElem<PdElem> {
    let pd = &ext.base;
    let n = pd.nvars();
    let chart = pd.chart().clone();
    let pairs: Vec<(usize, usize, Rational)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| !m[*a][*b].is_zero())
        .map(|(a, b)| (a, b, m[a][b].clone()))
        .collect();
    let h = ParamSeries::gen(&ext.params, 0);
    let mut acc = ext.zero(1);
    // k-fold products of the pair list
    let mut layer: BTreeMap<(Mono, Mono), Rational> = BTreeMap::new();
    layer.insert((Mono::one(n), Mono::one(n)), Rational::one());
    for k in 1..=ext.params.top_order() {
        let mut next: BTreeMap<(Mono, Mono), Rational> = BTreeMap::new();
        for ((l, r), c) in &layer {
            for (a, b, v) in &pairs {
                let key = (l.mul(&pd.unit(*a)), r.mul(&pd.unit(*b)));
                *next.entry(key).or_insert_with(Rational::zero) += c * v;
            }
        }
        next.retain(|_, v| !v.is_zero());
        layer = next;
        let w = Rational::one() / (factorial(k) * qi(1i64 << k));
        let mut el = pd.zero(1);
        for ((l, r), c) in &layer {
            el = pd.add(&el, &pd.term(&LocalizedPoly::constant(&chart, c * &w), &[l.clone(), r.clone()]));
        }
        acc = ext.add(&acc, &ext.tensor(&h.pow(k), &el));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_expr, q, ChartData};
    use crate::params::ParamAlgebra;

    fn plane(order: u32) -> Ext<PolyDiff> {
        let c = ChartData::polynomial(&["x", "y"]);
        Ext::new(PolyDiff::new(&c), &ParamAlgebra::hbar(order))
    }

    fn symplectic() -> Vec<Vec<Rational>> {
        vec![vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]
    }

    fn h(ext: &Ext<PolyDiff>, k: u32, c: Rational) -> ParamSeries {
        ParamSeries::gen(&ext.params, 0).pow(k).scale(&c)
    }

    #[test]
    fn moyal_values() {
        let ext = plane(3);
        let beta = moyal(&ext, &symplectic());
        let (s, _) = star_from_mc(&ext, &beta, 4).unwrap();
        let c = ext.base.chart().clone();
        let f = |e: &str| parse_expr(&c, e).unwrap();
        let lift = |r: &ParamSeries, e: &str| ext.tensor(r, &ext.base.function(&f(e)));
        let one = ParamSeries::one(&ext.params);
        let expect = ext.add(&lift(&one, "x*y"), &lift(&h(&ext, 1, q(1, 2)), "1"));
        assert_eq!(s.star_fns(&f("x"), &f("y")), expect);
        let expect = ext.sub(&lift(&one, "x*y"), &lift(&h(&ext, 1, q(1, 2)), "1"));
        assert_eq!(s.star_fns(&f("y"), &f("x")), expect);
        let expect = ext.add(
            &ext.add(&lift(&one, "x^2*y^2"), &lift(&h(&ext, 1, qi(2)), "x*y")),
            &lift(&h(&ext, 2, q(1, 2)), "1"),
        );
        assert_eq!(s.star_fns(&f("x^2"), &f("y^2")), expect);
    }

    #[test]
    fn zero_is_commutative() {
        let ext = plane(2);
        let (s, cert) = star_from_mc(&ext, &ext.zero(1), 3).unwrap();
        assert!(cert.checked > 0);
        let c = ext.base.chart().clone();
        let (a, b) = (parse_expr(&c, "x + y^2").unwrap(), parse_expr(&c, "x*y").unwrap());
        assert_eq!(s.star_fns(&a, &b), s.star_fns(&b, &a));
    }

    #[test]
    fn non_mc_rejected_at_low_order() {
        let ext = plane(3);
        let pd = &ext.base;
        let c = pd.chart().clone();
        let b1 = pd.term(&parse_expr(&c, "x").unwrap(), &[pd.unit(0), pd.unit(1)]);
        let beta = ext.tensor(&h(&ext, 1, qi(1)), &b1);
        match star_from_mc(&ext, &beta, 4) {
            Err(StarError::NotMc(o)) => assert!(o == 1 || o == 2),
            other => panic!("{:?}", other.map(|_| ())),
        }
        let s = StarProduct { ext: ext.clone(), beta };
        let (fail, _) = s.associativity_failure(4);
        assert_eq!(fail, Some(mc_check(&ext, &s.beta).unwrap().lowest_order.unwrap()));
    }

    #[test]
    fn gauge_of_moyal_and_recovery() {
        let ext = plane(3);
        let pd = &ext.base;
        let c = pd.chart().clone();
        let s = star_from_mc(&ext, &moyal(&ext, &symplectic()), 4).unwrap().0;
        let g = pd.term(&LocalizedPoly::one(&c), &[Mono(vec![2, 0])]);
        let g2 = pd.term(&parse_expr(&c, "y").unwrap(), &[Mono(vec![1, 0])]);
        let gamma = ext.add(&ext.tensor(&h(&ext, 1, qi(1)), &g), &ext.tensor(&h(&ext, 2, qi(1)), &g2));
        let (t, cert) = star_gauge(&gamma, &s, 4).unwrap();
        assert!(cert.checked > 0);
        assert!(star_from_mc(&ext, &t.beta, 4).is_ok());
        let sol = solve_gauge(&s, &t, None, &SolveOptions::default()).unwrap();
        assert_eq!(gauge_act(&ext, &sol.gamma, &s.beta), t.beta);
        let tab = GaugeTable::from_gauge(&ext, &gamma, 6);
        let sol = solve_gauge(&s, &t, Some(&tab), &SolveOptions::default()).unwrap();
        assert_eq!(sol.gamma, gamma);
    }

    #[test]
    fn identical_products_give_zero_gauge() {
        let ext = plane(2);
        let s = star_from_mc(&ext, &moyal(&ext, &symplectic()), 4).unwrap().0;
        let sol = solve_gauge(&s, &s, None, &SolveOptions::default()).unwrap();
        assert!(ext.is_zero(&sol.gamma));
    }

    #[test]
    fn moyal_not_equivalent_to_commutative() {
        let ext = plane(2);
        let s = star_from_mc(&ext, &moyal(&ext, &symplectic()), 4).unwrap().0;
        let z = StarProduct { ext: ext.clone(), beta: ext.zero(1) };
        let e = solve_gauge(&s, &z, None, &SolveOptions::default()).unwrap_err();
        assert_eq!(e.order, 1);
        assert!(e.certified);
        let pd = &ext.base;
        let one = LocalizedPoly::one(pd.chart());
        let expected = pd.scale(
            &pd.sub(&pd.term(&one, &[pd.unit(0), pd.unit(1)]), &pd.term(&one, &[pd.unit(1), pd.unit(0)])),
            &q(1, 2),
        );
        assert_eq!(e.antisymmetric, ext.basis_tensor(1, &expected));
    }
}
