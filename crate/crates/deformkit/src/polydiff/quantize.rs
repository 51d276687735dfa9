use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::star::{star_from_mc, StarCertificate, StarError, StarProduct};
use super::{PdElem, PolyDiff};
use crate::dgla::{linfty_apply, ChartCarrier, Dgla, DglaError, Ext, ExtElem, Filtered, LInftyMorphism};
use crate::exactalg::{factorial, q, LocalizedPoly, Mono, Rational};
use crate::polyvec::{lift_fn, PoissonStructure, Polyvec, PvElem};
use crate::solve::{solve_columns, AffineOutcome, Residual};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuantizeError {
    #[error("quantization needs a chart without denominators")]
    NotPolynomialChart,
    #[error("truncation order {top} exceeds twice the leading order {lead}")]
    OrderTooHigh { top: u32, lead: u32 },
    #[error("order-two associativity system is inconsistent")]
    Inconsistent,
    #[error(transparent)]
    Dgla(#[from] DglaError),
    #[error(transparent)]
    Star(#[from] StarError),
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // insert n−1 at position k: sign changes by the number of elements passed
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push((q, s ^ ((p.len() - k) % 2 == 1)));
        }
    }
    out
}

/// Antisymmetrization `θ_{i0}…θ_{ip} ↦ 1/(p+1)! Σ_σ sign(σ) ∂_{iσ0} ⊗ … ⊗ ∂_{iσp}`;
/// the identity on functions.
pub fn hkr(pv: &Polyvec, pd: &PolyDiff, x: &PvElem) -> PdElem {
    let mut out = pd.zero(x.deg);
    if x.deg < 0 {
        for (k, c) in &x.terms {
            out = pd.add(&out, &pd.term(&c.rehome(pd.chart()), &vec![Mono(vec![]); k.len()]));
        }
        return out;
    }
    let _ = pv;
    let k = (x.deg + 1) as usize;
    let w = Rational::one() / factorial(k as u32);
    let perms = permutations(k);
    for (idx, c) in &x.terms {
        for (p, neg) in &perms {
            let slots: Vec<Mono> = p.iter().map(|&j| pd.unit(idx[j] as usize)).collect();
            let coef = if *neg { -w.clone() } else { w.clone() };
            out = pd.add(&out, &pd.term(&c.rehome(pd.chart()).scale(&coef), &slots));
        }
    }
    out
}

/// HKR map as a strict L∞ morphism.
pub struct HkrMorphism {
    pub pv: Polyvec,
    pub pd: PolyDiff,
}

impl LInftyMorphism<Polyvec, PolyDiff> for HkrMorphism {
    fn arity_bound(&self) -> usize {
        1
    }

    fn component(&self, args: &[&PvElem]) -> PdElem {
        hkr(&self.pv, &self.pd, args[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Target {
    F,
    G,
    Other,
}

/// Two-vertex graph: edges `a, b` leave the first vertex, `c, d` the second.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Graph([Target; 4]);

impl Graph {
    fn all() -> Vec<Graph> {
        let ts = [Target::F, Target::G, Target::Other];
        let mut out = Vec::new();
        for a in ts {
            for b in ts {
                for c in ts {
                    for d in ts {
                        let g = [a, b, c, d];
                        if g.contains(&Target::F) && g.contains(&Target::G) {
                            out.push(Graph(g));
                        }
                    }
                }
            }
        }
        out
    }

    fn is_external(&self) -> bool {
        !self.0.contains(&Target::Other)
    }

    fn moyal() -> Graph {
        Graph([Target::F, Target::G, Target::F, Target::G])
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|t| match t {
                Target::F => "f",
                Target::G => "g",
                Target::Other => "v",
            })
            .collect()
    }
}

/// `P` with `π = Σ_{a<b} P^{ab} ∂a∧∂b`, extended antisymmetrically.
fn bivector_matrix(pd: &PolyDiff, x: &PvElem) -> Vec<Vec<LocalizedPoly>> {
    let n = pd.nvars();
    let chart = pd.chart();
    let mut m = vec![vec![LocalizedPoly::zero(chart); n]; n];
    for (k, c) in &x.terms {
        let (a, b) = (k[0] as usize, k[1] as usize);
        m[a][b] = c.rehome(chart);
        m[b][a] = c.rehome(chart).neg();
    }
    m
}

/// Bidifferential operator of a graph with the two vertices decorated by
/// `p1`, `p2`.
fn graph_operator(pd: &PolyDiff, g: &Graph, p1: &[Vec<LocalizedPoly>], p2: &[Vec<LocalizedPoly>]) -> PdElem {
    let n = pd.nvars();
    let mut out = pd.zero(1);
    let t = &g.0;
    for a in 0..n {
        for b in 0..n {
            if p1[a][b].is_zero() {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    if p2[c][d].is_zero() {
                        continue;
                    }
                    let idx = [a, b, c, d];
                    let mut into1 = vec![0u32; n];
                    let mut into2 = vec![0u32; n];
                    let mut fs = vec![0u32; n];
                    let mut gs = vec![0u32; n];
                    for e in 0..4 {
                        let slot = match t[e] {
                            Target::F => &mut fs,
                            Target::G => &mut gs,
                            Target::Other if e < 2 => &mut into2,
                            Target::Other => &mut into1,
                        };
                        slot[idx[e]] += 1;
                    }
                    let c1 = p1[a][b].derivative_multi(&into1);
                    if c1.is_zero() {
                        continue;
                    }
                    let c2 = p2[c][d].derivative_multi(&into2);
                    if c2.is_zero() {
                        continue;
                    }
                    out = pd.add(&out, &pd.term(&c1.mul(&c2), &[Mono(fs), Mono(gs)]));
                }
            }
        }
    }
    out
}

/// L∞ morphism with components `Ψ1 = hkr` and
/// `Ψ2(π1, π2) = Σ_Γ w_Γ (B_Γ(π1, π2) + B_Γ(π2, π1))` over two-vertex graphs.
#[derive(Clone, Debug)]
pub struct AffineOrder2 {
    pub pv: Polyvec,
    pub pd: PolyDiff,
    pub weights: Vec<(Graph, Rational)>,
}

impl AffineOrder2 {
    fn psi2(&self, x: &PvElem, y: &PvElem) -> PdElem {
        let (px, py) = (bivector_matrix(&self.pd, x), bivector_matrix(&self.pd, y));
        let mut out = self.pd.zero(1);
        for (g, w) in &self.weights {
            let b = self.pd.add(&graph_operator(&self.pd, g, &px, &py), &graph_operator(&self.pd, g, &py, &px));
            out = self.pd.add(&out, &self.pd.scale(&b, w));
        }
        out
    }
}

impl LInftyMorphism<Polyvec, PolyDiff> for AffineOrder2 {
    fn arity_bound(&self) -> usize {
        2
    }

    fn component(&self, args: &[&PvElem]) -> PdElem {
        match args.len() {
            1 => hkr(&self.pv, &self.pd, args[0]),
            2 => self.psi2(args[0], args[1]),
            _ => self.pd.zero(1),
        }
    }
}

pub struct Quantization {
    pub star: StarProduct,
    pub certificate: StarCertificate,
    pub morphism: AffineOrder2,
}

fn ext_residual(ext: &Ext<PolyDiff>, x: &ExtElem<PdElem>) -> Residual {
    let mut out = Vec::new();
    for (i, v) in &x.comps {
        for (mut k, c) in ext.base.coefficients(v) {
            k.insert(0, *i as u32);
            out.push((k, c));
        }
    }
    out
}

/// Star product quantizing a Poisson structure through the second order of
/// its leading term. The exponential (Moyal) graph carries weight 1/8; the
/// remaining graph weights solve the order-two associativity system, with
/// free weights set to zero.
pub fn quantize_affine_order2(s: &PoissonStructure, cert_degree: u32) -> Result<Quantization, QuantizeError> {
    let pv = s.ext.base.clone();
    let chart = pv.chart().clone();
    if !chart.is_polynomial() {
        return Err(QuantizeError::NotPolynomialChart);
    }
    let pd = PolyDiff::new(&chart);
    let target = Ext::new(pd.clone(), &s.ext.params);
    let top = s.ext.params.top_order();
    let moyal = (Graph::moyal(), q(1, 8));
    let Some(lead) = s.ext.adic_order(&s.beta) else {
        let (star, certificate) = star_from_mc(&target, &target.zero(1), cert_degree)?;
        return Ok(Quantization { star, certificate, morphism: AffineOrder2 { pv, pd, weights: vec![moyal] } });
    };
    if top > 2 * lead {
        return Err(QuantizeError::OrderTooHigh { top, lead });
    }
    let base = AffineOrder2 { pv: pv.clone(), pd: pd.clone(), weights: vec![moyal.clone()] };
    let beta0 = linfty_apply(&base, &s.ext, &target, &s.beta)?.image;
    let graphs: Vec<Graph> = Graph::all().into_iter().filter(|g| !g.is_external()).collect();
    let hk = linfty_apply(&HkrMorphism { pv: pv.clone(), pd: pd.clone() }, &s.ext, &target, &s.beta)?.image;
    let mut dirs = Vec::new();
    let mut cols = Vec::new();
    for g in graphs {
        let single = AffineOrder2 { pv: pv.clone(), pd: pd.clone(), weights: vec![(g.clone(), Rational::one())] };
        // contribution of weight 1 on this graph: the arity-two part only
        let full = linfty_apply(&single, &s.ext, &target, &s.beta)?.image;
        let x = target.sub(&full, &hk);
        if target.is_zero(&x) {
            continue;
        }
        let col = target.add(&target.d(&x), &target.bracket(&beta0, &x));
        dirs.push((g, x));
        cols.push(ext_residual(&target, &col));
    }
    let r0 = ext_residual(&target, &crate::dgla::mc_expr(&target, &beta0));
    let sol = match solve_columns(&r0, &cols) {
        AffineOutcome::Solved(sol) => sol,
        AffineOutcome::Inconsistent { .. } => return Err(QuantizeError::Inconsistent),
    };
    let mut weights = vec![moyal];
    for ((g, _), w) in dirs.iter().zip(&sol.x) {
        if !w.is_zero() {
            weights.push((g.clone(), w.clone()));
        }
    }
    let morphism = AffineOrder2 { pv, pd, weights };
    let res = linfty_apply(&morphism, &s.ext, &target, &s.beta)?;
    if !res.report.holds {
        return Err(QuantizeError::Inconsistent);
    }
    let (star, certificate) = star_from_mc(&target, &res.image, cert_degree)?;
    Ok(Quantization { star, certificate, morphism })
}

/// First-order bracket on the coordinate generators: the order-one part of
/// `½(x_i ⋆ x_j − x_j ⋆ x_i)` (or of `{x_i, x_j}`), per order-one basis
/// element of the parameter algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable {
    pub vars: Vec<String>,
    pub basis: Vec<String>,
    pub entries: BTreeMap<(usize, usize), BTreeMap<usize, LocalizedPoly>>,
}

impl BracketTable {
    pub fn render(&self) -> String {
        let mut lines = Vec::new();
        for ((i, j), e) in &self.entries {
            let rhs: Vec<String> = e.iter().map(|(k, c)| format!("{} * ({})", self.basis[*k], c)).collect();
            lines.push(format!("{{{}, {}}} = {}", self.vars[*i], self.vars[*j], rhs.join(" + ")));
        }
        lines.join("\n")
    }
}

fn table_from<C: ChartCarrier>(ext: &Ext<C>, br: impl Fn(usize, usize) -> ExtElem<C::Elem>) -> BracketTable {
    let chart = ext.base.chart().clone();
    let n = chart.nvars();
    let params = &ext.params;
    let mut entries = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = br(i, j);
            let mut e = BTreeMap::new();
            for (k, x) in &v.comps {
                if params.basis_order(*k) == 1 {
                    e.insert(*k, ext.base.as_function(x).unwrap());
                }
            }
            if !e.is_empty() {
                entries.insert((i, j), e);
            }
        }
    }
    BracketTable {
        vars: chart.vars.clone(),
        basis: (0..params.dim()).map(|k| params.render_basis(k)).collect(),
        entries,
    }
}

pub fn first_order_bracket(s: &StarProduct) -> BracketTable {
    let chart = s.ext.base.chart().clone();
    table_from(&s.ext, |i, j| {
        let (x, y) = (LocalizedPoly::var(&chart, i), LocalizedPoly::var(&chart, j));
        let c = s.ext.sub(&s.star_fns(&x, &y), &s.star_fns(&y, &x));
        s.ext.scale(&c, &q(1, 2))
    })
}

pub fn first_order_bracket_poisson(s: &PoissonStructure) -> BracketTable {
    let chart = s.ext.base.chart().clone();
    table_from(&s.ext, |i, j| {
        s.bracket(&lift_fn(&s.ext, &LocalizedPoly::var(&chart, i)), &lift_fn(&s.ext, &LocalizedPoly::var(&chart, j)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_expr, qi, ChartData};
    use crate::params::{ParamAlgebra, ParamSeries};
    use crate::polydiff::moyal;
    use crate::polyvec::poisson_from_mc;

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().filter(|(_, s)| *s).count(), 3);
        let id = p.iter().find(|(v, _)| v == &vec![0, 1, 2]).unwrap();
        assert!(!id.1);
        let sw = p.iter().find(|(v, _)| v == &vec![1, 0, 2]).unwrap();
        assert!(sw.1);
    }

    #[test]
    fn hkr_values_and_cocycle() {
        let c = ChartData::polynomial(&["x", "y", "z"]);
        let (pv, pd) = (Polyvec::new(&c), PolyDiff::new(&c));
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let pi = pv.term(&LocalizedPoly::one(&c), &[0, 1]);
        let h = hkr(&pv, &pd, &pi);
        let (a, b) = (f("x^2*y"), f("x*y^3"));
        let expect = a.derivative(0).mul(&b.derivative(1)).sub(&a.derivative(1).mul(&b.derivative(0))).scale(&q(1, 2));
        assert_eq!(pd.apply(&h, &[a, b]), expect);
        assert_eq!(pd.as_function(&hkr(&pv, &pd, &pv.function(&f("x*z")))).unwrap(), f("x*z"));
        let tri = pv.term(&f("x*y + z^2"), &[0, 1, 2]);
        assert!(pd.is_zero(&pd.d(&hkr(&pv, &pd, &tri))));
        let pi2 = pv.term(&f("z^2*x"), &[1, 2]);
        assert!(pd.is_zero(&pd.d(&hkr(&pv, &pd, &pi2))));
    }

    #[test]
    fn constant_bivector_gives_moyal() {
        let c = ChartData::polynomial(&["x", "y"]);
        let params = ParamAlgebra::hbar(2);
        let ext = Ext::new(Polyvec::new(&c), &params);
        let pi = ext.tensor(&ParamSeries::gen(&params, 0), &ext.base.term(&LocalizedPoly::one(&c), &[0, 1]));
        let s = poisson_from_mc(&ext, &pi).unwrap();
        let qz = quantize_affine_order2(&s, 4).unwrap();
        let pext = &qz.star.ext;
        let m = moyal(pext, &[vec![qi(0), qi(1)], vec![qi(-1), qi(0)]]);
        assert_eq!(qz.star.beta, m);
        assert_eq!(first_order_bracket(&qz.star), first_order_bracket_poisson(&s));
    }

    #[test]
    fn so3_quantizes() {
        let c = ChartData::polynomial(&["x", "y", "z"]);
        let params = ParamAlgebra::hbar(2);
        let ext = Ext::new(Polyvec::new(&c), &params);
        let pv = &ext.base;
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let pi = pv.add(&pv.add(&pv.term(&f("z"), &[0, 1]), &pv.term(&f("x"), &[1, 2])), &pv.term(&f("y"), &[2, 0]));
        let beta = ext.tensor(&ParamSeries::gen(&params, 0), &pi);
        let s = poisson_from_mc(&ext, &beta).unwrap();
        let qz = quantize_affine_order2(&s, 4).unwrap();
        assert_eq!(qz.star.associativity_failure(4).0, None);
        assert_eq!(first_order_bracket(&qz.star), first_order_bracket_poisson(&s));
    }

    #[test]
    fn zero_bivector_is_commutative() {
        let c = ChartData::polynomial(&["x", "y"]);
        let params = ParamAlgebra::hbar(2);
        let ext = Ext::new(Polyvec::new(&c), &params);
        let s = poisson_from_mc(&ext, &ext.zero(1)).unwrap();
        let qz = quantize_affine_order2(&s, 3).unwrap();
        assert!(qz.star.beta.comps.is_empty());
        assert!(first_order_bracket(&qz.star).entries.is_empty());
    }
}
