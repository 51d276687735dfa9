//! Normalized polydifferential Hochschild cochains on a chart algebra with
//! the Gerstenhaber bracket and the Hochschild differential, star products,
//! the HKR map and order-two quantization on affine space.

mod diffop;
mod quantize;
mod star;

pub use diffop::{splittings, DiffOp};
pub use quantize::{
    first_order_bracket, first_order_bracket_poisson, hkr, quantize_affine_order2, AffineOrder2, BracketTable, Graph,
    HkrMorphism, QuantizeError, Quantization,
};
pub use star::{
    antisymmetric_part, moyal, solve_gauge, star_from_mc, star_gauge, GaugeSolution, GaugeTable, NotEquivalent, SolveOptions,
    StarCertificate, StarError, StarProduct,
};

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::dgla::{ChartCarrier, Dgla, Flavor};
use crate::exactalg::{AlgError, Chart, ChartHom, LocalizedPoly, Mono, Rational};
use crate::polyvec::{join_terms, wrap_coeff};

/// Cochain of degree `deg` with `deg + 1` slots; each term is a coefficient
/// times `∂^{α_0} ⊗ … ⊗ ∂^{α_deg}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PdElem {
    pub deg: i32,
    pub terms: BTreeMap<Vec<Mono>, LocalizedPoly>,
}

#[derive(Clone, Debug)]
pub struct PolyDiff {
    chart: Chart,
}

fn add_term(terms: &mut BTreeMap<Vec<Mono>, LocalizedPoly>, key: Vec<Mono>, c: LocalizedPoly) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&key) {
        Some(e) => {
            let s = e.add(&c);
            if s.is_zero() {
                terms.remove(&key);
            } else {
                *e = s;
            }
        }
        None => {
            terms.insert(key, c);
        }
    }
}

fn sign(neg: bool) -> Rational {
    if neg {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl PolyDiff {
    pub fn new(chart: &Chart) -> Self {
        PolyDiff { chart: chart.clone() }
    }

    pub fn nvars(&self) -> usize {
        self.chart.nvars()
    }

    /// `f ∂^{α_0} ⊗ … ⊗ ∂^{α_p}`.
    pub fn term(&self, f: &LocalizedPoly, slots: &[Mono]) -> PdElem {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, slots.to_vec(), f.clone());
        PdElem { deg: slots.len() as i32 - 1, terms }
    }

    /// Multi-index with a single entry.
    pub fn unit(&self, i: usize) -> Mono {
        Mono::var(self.nvars(), i)
    }

    /// The multiplication cochain `c0 ⊗ c1 ↦ c0 c1` (not normalized).
    pub fn multiplication(&self) -> PdElem {
        let z = Mono::one(self.nvars());
        self.term(&LocalizedPoly::one(&self.chart), &[z.clone(), z])
    }

    /// Partial composition `φ ∘_i ψ`: insert `ψ` into slot `i` of `φ`.
    pub fn compose_at(&self, phi: &PdElem, i: usize, psi: &PdElem) -> PdElem {
        let mut terms = BTreeMap::new();
        let k = psi.deg + 1;
        for (sa, f) in &phi.terms {
            let alpha = &sa[i];
            for (sb, g) in &psi.terms {
                for (parts, coef) in splittings(alpha, k as usize + 1) {
                    let dg = g.derivative_multi(&parts[0].0);
                    if dg.is_zero() {
                        continue;
                    }
                    let mut slots: Vec<Mono> = sa[..i].to_vec();
                    for (j, b) in sb.iter().enumerate() {
                        slots.push(diffop::mono_add(b, &parts[j + 1]));
                    }
                    slots.extend_from_slice(&sa[i + 1..]);
                    add_term(&mut terms, slots, f.mul(&dg).scale(&coef));
                }
            }
        }
        PdElem { deg: phi.deg + psi.deg, terms }
    }

    /// `φ ∘ ψ = Σ_i (−1)^{i·|ψ|} φ ∘_i ψ`.
    pub fn circ(&self, phi: &PdElem, psi: &PdElem) -> PdElem {
        let mut out = self.zero(phi.deg + psi.deg);
        if phi.deg < 0 {
            return out;
        }
        for i in 0..=(phi.deg as usize) {
            let t = self.compose_at(phi, i, psi);
            let neg = (i as i64 * psi.deg as i64) % 2 != 0;
            out = self.add(&out, &self.scale(&t, &sign(neg)));
        }
        out
    }

    fn gerstenhaber(&self, x: &PdElem, y: &PdElem) -> PdElem {
        let a = self.circ(x, y);
        let b = self.circ(y, x);
        let neg = (x.deg as i64 * y.deg as i64) % 2 == 0;
        self.add(&a, &self.scale(&b, &sign(neg)))
    }

    fn hochschild(&self, x: &PdElem) -> PdElem {
        if x.deg < 0 {
            return self.zero(x.deg + 1);
        }
        let mut r = self.gerstenhaber(&self.multiplication(), x);
        let unnormalized: Vec<Vec<Mono>> = r.terms.keys().filter(|k| k.iter().any(|m| m.degree() == 0)).cloned().collect();
        debug_assert!(unnormalized.is_empty(), "Hochschild differential left unnormalized terms");
        for k in unnormalized {
            r.terms.remove(&k);
        }
        r
    }

    /// Evaluate a cochain on `deg + 1` functions.
    pub fn apply(&self, phi: &PdElem, args: &[LocalizedPoly]) -> LocalizedPoly {
        assert_eq!(args.len() as i32, phi.deg + 1, "wrong number of arguments");
        let mut acc = LocalizedPoly::zero(&self.chart);
        for (slots, f) in &phi.terms {
            let mut t = f.clone();
            for (a, c) in slots.iter().zip(args) {
                let d = c.derivative_multi(&a.0);
                if d.is_zero() {
                    t = LocalizedPoly::zero(&self.chart);
                    break;
                }
                t = t.mul(&d);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// A degree-0 cochain as a differential operator.
    pub fn as_diffop(&self, phi: &PdElem) -> DiffOp {
        assert_eq!(phi.deg, 0);
        let mut d = DiffOp::zero(&self.chart);
        for (s, f) in &phi.terms {
            d.add_term(s[0].clone(), f.clone());
        }
        d
    }

    /// A differential operator without constant term as a degree-0 cochain.
    pub fn from_diffop(&self, d: &DiffOp) -> PdElem {
        let mut out = self.zero(0);
        for (m, f) in &d.terms {
            assert!(m.degree() > 0, "operator has a zeroth-order part");
            add_term(&mut out.terms, vec![m.clone()], f.rehome(&self.chart));
        }
        out
    }

    pub fn is_normalized(&self, x: &PdElem) -> bool {
        x.deg < 0 || x.terms.keys().all(|k| k.iter().all(|m| m.degree() > 0))
    }

    fn tuples(&self, k: usize, order_bound: u32) -> Vec<Vec<Mono>> {
        let single: Vec<Mono> = Mono::all_up_to(self.nvars(), order_bound).into_iter().filter(|m| m.degree() > 0).collect();
        let mut out: Vec<Vec<Mono>> = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for t in &out {
                for m in &single {
                    let mut u = t.clone();
                    u.push(m.clone());
                    next.push(u);
                }
            }
            out = next;
        }
        out
    }
}

impl Dgla for PolyDiff {
    type Elem = PdElem;

    fn zero(&self, deg: i32) -> PdElem {
        PdElem { deg, terms: BTreeMap::new() }
    }

    fn degree(&self, x: &PdElem) -> i32 {
        x.deg
    }

    fn is_zero(&self, x: &PdElem) -> bool {
        x.terms.is_empty()
    }

    fn add(&self, x: &PdElem, y: &PdElem) -> PdElem {
        assert_eq!(x.deg, y.deg, "adding cochains of different degrees");
        let mut terms = x.terms.clone();
        for (k, c) in &y.terms {
            add_term(&mut terms, k.clone(), c.clone());
        }
        PdElem { deg: x.deg, terms }
    }

    fn scale(&self, x: &PdElem, c: &Rational) -> PdElem {
        if c.is_zero() {
            return self.zero(x.deg);
        }
        PdElem { deg: x.deg, terms: x.terms.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect() }
    }

    fn d(&self, x: &PdElem) -> PdElem {
        self.hochschild(x)
    }

    fn bracket(&self, x: &PdElem, y: &PdElem) -> PdElem {
        self.gerstenhaber(x, y)
    }
}

impl ChartCarrier for PolyDiff {
    const FLAVOR: Flavor = Flavor::Associative;

    fn on_chart(chart: &Chart) -> Self {
        PolyDiff::new(chart)
    }

    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn function(&self, f: &LocalizedPoly) -> PdElem {
        self.term(f, &[])
    }

    fn as_function(&self, x: &PdElem) -> Option<LocalizedPoly> {
        if x.deg != -1 {
            return None;
        }
        Some(x.terms.get(&vec![]).cloned().unwrap_or_else(|| LocalizedPoly::zero(&self.chart)))
    }

    fn restrict(&self, x: &PdElem, hom: &ChartHom, target: &Self) -> Result<PdElem, AlgError> {
        if hom.is_identity() {
            return Ok(PdElem {
                deg: x.deg,
                terms: x.terms.iter().map(|(k, c)| (k.clone(), c.rehome(&target.chart))).collect(),
            });
        }
        let mut out = target.zero(x.deg);
        if x.deg == -1 {
            for (k, c) in &x.terms {
                add_term(&mut out.terms, k.clone(), hom.apply(c));
            }
            return Ok(out);
        }
        let fields = hom.coordinate_fields()?;
        let tchart = &target.chart;
        let xs: Vec<DiffOp> = fields
            .iter()
            .map(|row| {
                let mut d = DiffOp::zero(tchart);
                for (j, a) in row.iter().enumerate() {
                    d.add_term(Mono::var(tchart.nvars(), j), a.clone());
                }
                d
            })
            .collect();
        let mut cache: BTreeMap<Mono, DiffOp> = BTreeMap::new();
        let mut power = |alpha: &Mono| -> DiffOp {
            if let Some(d) = cache.get(alpha) {
                return d.clone();
            }
            let mut d = DiffOp::identity(tchart);
            for (i, e) in alpha.0.iter().enumerate() {
                for _ in 0..*e {
                    d = d.compose(&xs[i]);
                }
            }
            cache.insert(alpha.clone(), d.clone());
            d
        };
        for (slots, c) in &x.terms {
            let mut partial: Vec<(Vec<Mono>, LocalizedPoly)> = vec![(vec![], hom.apply(c))];
            for a in slots {
                let op = power(a);
                let mut next = Vec::new();
                for (s, f) in &partial {
                    for (m, g) in &op.terms {
                        let mut s2 = s.clone();
                        s2.push(m.clone());
                        next.push((s2, f.mul(g)));
                    }
                }
                partial = next;
            }
            for (s, f) in partial {
                add_term(&mut out.terms, s, f);
            }
        }
        Ok(out)
    }

    fn ansatz(&self, deg: i32, poly_bound: u32, order_bound: u32) -> Vec<PdElem> {
        if deg < -1 {
            return vec![];
        }
        let monos = Mono::all_up_to(self.nvars(), poly_bound);
        let mut out = Vec::new();
        for t in self.tuples((deg + 1) as usize, order_bound) {
            for m in &monos {
                out.push(self.term(&LocalizedPoly::monomial(&self.chart, m), &t));
            }
        }
        out
    }

    fn coefficients(&self, x: &PdElem) -> Vec<(Vec<u32>, LocalizedPoly)> {
        x.terms.iter().map(|(k, c)| (k.iter().flat_map(|m| m.0.iter().cloned()).collect(), c.clone())).collect()
    }

    fn poly_degree(&self, x: &PdElem) -> u32 {
        x.terms.values().filter_map(|c| c.poly_degree()).max().unwrap_or(0)
    }

    fn operator_order(&self, x: &PdElem) -> u32 {
        x.terms.keys().flat_map(|k| k.iter().map(|m| m.degree())).max().unwrap_or(0)
    }

    fn render(&self, x: &PdElem) -> String {
        let parts = x
            .terms
            .iter()
            .map(|(k, c)| {
                let op: Vec<String> = k
                    .iter()
                    .map(|m| format!("d[{}]", m.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                wrap_coeff(c, &op.join("⊗"))
            })
            .collect();
        join_terms(parts)
    }

    fn from_coefficients(&self, deg: i32, entries: &[(Vec<u32>, LocalizedPoly)]) -> PdElem {
        let n = self.nvars();
        let mut out = self.zero(deg);
        for (k, c) in entries {
            let slots: Vec<Mono> = if n == 0 {
                vec![Mono(vec![]); (deg + 1) as usize]
            } else {
                k.chunks(n).map(|ch| Mono(ch.to_vec())).collect()
            };
            add_term(&mut out.terms, slots, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_expr, qi, ChartData};

    fn xy() -> (Chart, PolyDiff) {
        let c = ChartData::polynomial(&["x", "y"]);
        (c.clone(), PolyDiff::new(&c))
    }

    fn f(c: &Chart, s: &str) -> LocalizedPoly {
        parse_expr(c, s).unwrap()
    }

    #[test]
    fn derivation_is_closed() {
        let (c, pd) = xy();
        let v = pd.term(&f(&c, "x*y^2"), &[pd.unit(0)]);
        assert!(pd.is_zero(&pd.d(&v)));
    }

    #[test]
    fn degree_zero_bracket_is_commutator() {
        let (c, pd) = xy();
        let dx = pd.term(&LocalizedPoly::one(&c), &[pd.unit(0)]);
        let dy = pd.term(&LocalizedPoly::one(&c), &[pd.unit(1)]);
        assert!(pd.is_zero(&pd.bracket(&dx, &dy)));
        let xdx = pd.term(&f(&c, "x"), &[pd.unit(0)]);
        assert_eq!(pd.bracket(&xdx, &dx), pd.scale(&dx, &qi(-1)));
    }

    #[test]
    fn hochschild_matches_alternating_sum() {
        let (c, pd) = xy();
        let phi = pd.term(&LocalizedPoly::one(&c), &[Mono(vec![1, 0]), Mono(vec![1, 0])]);
        let dphi = pd.d(&phi);
        let (a, b, e) = (f(&c, "x"), f(&c, "x"), f(&c, "x^2"));
        // alternating sum: a φ(b,e) − φ(ab,e) + φ(a,be) − φ(a,b) e, up to the overall sign of d
        let alt = a
            .mul(&pd.apply(&phi, &[b.clone(), e.clone()]))
            .sub(&pd.apply(&phi, &[a.mul(&b), e.clone()]))
            .add(&pd.apply(&phi, &[a.clone(), b.mul(&e)]))
            .sub(&pd.apply(&phi, &[a.clone(), b.clone()]).mul(&e));
        let val = pd.apply(&dphi, &[a, b, e]);
        assert!(val == alt || val == alt.neg());
        assert!(pd.is_normalized(&dphi));
    }

    #[test]
    fn mc_of_product_is_associator() {
        let (c, pd) = xy();
        // μ + β is associative iff dβ + ½[β,β] = 0; test on a non-associative β
        let beta = pd.term(&f(&c, "x"), &[pd.unit(0), pd.unit(1)]);
        let mc = pd.add(&pd.d(&beta), &pd.scale(&pd.bracket(&beta, &beta), &crate::exactalg::q(1, 2)));
        let star = |u: &LocalizedPoly, v: &LocalizedPoly| u.mul(v).add(&pd.apply(&beta, &[u.clone(), v.clone()]));
        let (a, b, e) = (f(&c, "x*y"), f(&c, "y^2"), f(&c, "x^2 + y"));
        let assoc = star(&star(&a, &b), &e).sub(&star(&a, &star(&b, &e)));
        let val = pd.apply(&mc, &[a, b, e]);
        assert!(val == assoc || val == assoc.neg());
    }
}
