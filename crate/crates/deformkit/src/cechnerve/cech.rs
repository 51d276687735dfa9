use std::collections::BTreeMap;

use super::{Face, NerveRef, Refinement};
use crate::dgla::{ChartCarrier, Dgla, Ext, ExtElem, Filtered};
use crate::exactalg::{AlgError, Rational};
use crate::params::Params;

/// Element of one level of the Čech cosimplicial DG Lie algebra: one
/// component per nondegenerate face of that level. Components on
/// degenerate tuples are zero (normalized cochains) and never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Sections<E> {
    pub level: usize,
    pub deg: i32,
    pub comps: BTreeMap<Face, E>,
}

/// The chart DG Lie algebra on every face of a nerve, with and without
/// parameters.
#[derive(Clone, Debug)]
pub struct CechDgla<C: ChartCarrier> {
    pub nerve: NerveRef,
    pub params: Params,
    carriers: BTreeMap<Face, C>,
    exts: BTreeMap<Face, Ext<C>>,
}

impl<C: ChartCarrier> CechDgla<C> {
    pub fn new(nerve: &NerveRef, params: &Params) -> Self {
        let mut carriers = BTreeMap::new();
        let mut exts = BTreeMap::new();
        for f in nerve.all_faces() {
            let c = C::on_chart(nerve.chart(f));
            exts.insert(f.clone(), Ext::new(c.clone(), params));
            carriers.insert(f.clone(), c);
        }
        CechDgla { nerve: nerve.clone(), params: params.clone(), carriers, exts }
    }

    pub fn carrier(&self, f: &[usize]) -> &C {
        &self.carriers[f]
    }

    pub fn ext(&self, f: &[usize]) -> &Ext<C> {
        &self.exts[f]
    }

    /// Restrict a face element to a larger face.
    pub fn restrict(&self, x: &C::Elem, sub: &[usize], face: &[usize]) -> Result<C::Elem, AlgError> {
        if sub == face {
            return Ok(x.clone());
        }
        self.carriers[sub].restrict(x, &self.nerve.restriction(sub, face), &self.carriers[face])
    }

    /// Restriction with parameters; panics only if the nerve was built with
    /// restrictions that do not transport the carrier, which `Nerve::new`
    /// rules out for chart carriers.
    pub fn restrict_ext(&self, x: &ExtElem<C::Elem>, sub: &[usize], face: &[usize]) -> ExtElem<C::Elem> {
        if sub == face {
            return x.clone();
        }
        let hom = self.nerve.restriction(sub, face);
        let (src, dst) = (&self.carriers[sub], &self.carriers[face]);
        self.exts[sub].map_linear(&self.exts[face], x, x.deg, |v| src.restrict(v, &hom, dst).expect("restriction along a nerve map"))
    }

    pub fn level(&self, p: usize) -> CechLevel<'_, C> {
        CechLevel { nerve: &self.nerve, algs: &self.carriers, p }
    }

    pub fn ext_level(&self, p: usize) -> CechLevel<'_, Ext<C>> {
        CechLevel { nerve: &self.nerve, algs: &self.exts, p }
    }

    /// Coface `∂^i` from level `p` to level `p + 1`.
    pub fn coface(&self, i: usize, s: &Sections<C::Elem>) -> Sections<C::Elem> {
        let mut comps = BTreeMap::new();
        for f in self.nerve.faces(s.level + 1) {
            let sub = super::delete(f, i);
            if let Some(x) = s.comps.get(&sub) {
                let y = self.restrict(x, &sub, f).expect("restriction along a nerve map");
                if !self.carriers[f].is_zero(&y) {
                    comps.insert(f.clone(), y);
                }
            }
        }
        Sections { level: s.level + 1, deg: s.deg, comps }
    }

    pub fn coface_ext(&self, i: usize, s: &Sections<ExtElem<C::Elem>>) -> Sections<ExtElem<C::Elem>> {
        let mut comps = BTreeMap::new();
        for f in self.nerve.faces(s.level + 1) {
            let sub = super::delete(f, i);
            if let Some(x) = s.comps.get(&sub) {
                let y = self.restrict_ext(x, &sub, f);
                if !self.exts[f].is_zero(&y) {
                    comps.insert(f.clone(), y);
                }
            }
        }
        Sections { level: s.level + 1, deg: s.deg, comps }
    }

    /// Lift a single-chart element to every vertex, assuming all charts
    /// are presented by the same variables.
    pub fn constant_sections(&self, x: &ExtElem<C::Elem>, level: usize) -> Sections<ExtElem<C::Elem>> {
        Sections { level, deg: x.deg, comps: self.nerve.faces(level).iter().map(|f| (f.clone(), x.clone())).collect() }
    }
}

/// Level `p` of a Čech cosimplicial DG Lie algebra built from per-face
/// algebras of type `G`.
pub struct CechLevel<'a, G> {
    nerve: &'a NerveRef,
    algs: &'a BTreeMap<Face, G>,
    p: usize,
}

impl<G: Dgla> CechLevel<'_, G> {
    fn zip(&self, x: &Sections<G::Elem>, y: &Sections<G::Elem>, deg: i32, op: impl Fn(&G, &G::Elem, &G::Elem) -> G::Elem) -> Sections<G::Elem> {
        let mut comps = BTreeMap::new();
        for f in self.nerve.faces(self.p) {
            let g = &self.algs[f];
            let a = x.comps.get(f).cloned().unwrap_or_else(|| g.zero(x.deg));
            let b = y.comps.get(f).cloned().unwrap_or_else(|| g.zero(y.deg));
            let v = op(g, &a, &b);
            if !g.is_zero(&v) {
                comps.insert(f.clone(), v);
            }
        }
        Sections { level: self.p, deg, comps }
    }

    fn map(&self, x: &Sections<G::Elem>, deg: i32, op: impl Fn(&G, &G::Elem) -> G::Elem) -> Sections<G::Elem> {
        let mut comps = BTreeMap::new();
        for (f, a) in &x.comps {
            let g = &self.algs[f];
            let v = op(g, a);
            if !g.is_zero(&v) {
                comps.insert(f.clone(), v);
            }
        }
        Sections { level: self.p, deg, comps }
    }
}

impl<G: Dgla> Dgla for CechLevel<'_, G> {
    type Elem = Sections<G::Elem>;

    fn zero(&self, deg: i32) -> Self::Elem {
        Sections { level: self.p, deg, comps: BTreeMap::new() }
    }

    fn degree(&self, x: &Self::Elem) -> i32 {
        x.deg
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        x.comps.iter().all(|(f, v)| self.algs[f].is_zero(v))
    }

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.zip(x, y, x.deg, |g, a, b| g.add(a, b))
    }

    fn scale(&self, x: &Self::Elem, c: &Rational) -> Self::Elem {
        self.map(x, x.deg, |g, a| g.scale(a, c))
    }

    fn d(&self, x: &Self::Elem) -> Self::Elem {
        self.map(x, x.deg + 1, |g, a| g.d(a))
    }

    fn bracket(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.zip(x, y, x.deg + y.deg, |g, a, b| g.bracket(a, b))
    }
}

impl<G: Filtered> Filtered for CechLevel<'_, G> {
    fn adic_order(&self, x: &Self::Elem) -> Option<u32> {
        x.comps.iter().filter_map(|(f, v)| self.algs[f].adic_order(v)).min()
    }

    fn order_part(&self, x: &Self::Elem, p: u32) -> Self::Elem {
        self.map(x, x.deg, |g, a| g.order_part(a, p))
    }

    fn top_order(&self) -> u32 {
        self.algs.values().map(|g| g.top_order()).max().unwrap_or(0)
    }
}

/// Pull sections back along a refinement `ρ: K′ → K`. Fine faces whose
/// image is degenerate get zero.
pub fn refine<C: ChartCarrier>(
    r: &Refinement,
    coarse: &CechDgla<C>,
    fine: &CechDgla<C>,
    s: &Sections<C::Elem>,
) -> Result<Sections<C::Elem>, AlgError> {
    let mut comps = BTreeMap::new();
    for f in fine.nerve.faces(s.level) {
        let img = r.image(f);
        if img.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        if let Some(x) = s.comps.get(&img) {
            let y = coarse.carrier(&img).restrict(x, &r.homs[f], fine.carrier(f))?;
            if !fine.carrier(f).is_zero(&y) {
                comps.insert(f.clone(), y);
            }
        }
    }
    Ok(Sections { level: s.level, deg: s.deg, comps })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cechnerve::Nerve;
    use crate::exactalg::{parse_expr, ChartData, ChartHom, LocalizedPoly};
    use crate::params::ParamAlgebra;
    use crate::polyvec::Polyvec;

    pub(crate) fn line_nerve() -> NerveRef {
        let u0 = ChartData::polynomial(&["x"]);
        let u1 = ChartData::polynomial(&["y"]);
        let y = parse_expr(&u1, "y").unwrap();
        let u01 = ChartData::localized(&["y"], vec![y.numerator().clone()]);
        let h0 = ChartHom::new(&u0, &u01, vec![parse_expr(&u01, "1/y").unwrap()]).unwrap();
        Arc::new(
            Nerve::new(
                vec!["U0".into(), "U1".into()],
                vec![(vec![0], u0), (vec![1], u1), (vec![0, 1], u01)],
                vec![(vec![0], vec![0, 1], h0)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn euler_field_restricts_to_its_negative() {
        let n = line_nerve();
        let cech: CechDgla<Polyvec> = CechDgla::new(&n, &ParamAlgebra::hbar(1));
        let pv0 = cech.carrier(&[0]);
        let x = parse_expr(pv0.chart(), "x").unwrap();
        let field = pv0.term(&x, &[0]);
        let got = cech.restrict(&field, &[0], &[0, 1]).unwrap();
        let pv01 = cech.carrier(&[0, 1]);
        let y = parse_expr(pv01.chart(), "y").unwrap();
        assert_eq!(got, pv01.term(&y.neg(), &[0]));
    }

    #[test]
    fn one_chart_levels_are_the_chart_algebra() {
        let c = ChartData::polynomial(&["x", "y"]);
        let n = Arc::new(Nerve::full(&["U"], &c));
        let cech: CechDgla<Polyvec> = CechDgla::new(&n, &ParamAlgebra::hbar(1));
        assert_eq!(n.faces(1).len(), 0);
        let pv = cech.carrier(&[0]);
        let v = pv.term(&LocalizedPoly::var(&c, 1), &[0]);
        let w = pv.term(&LocalizedPoly::var(&c, 0), &[1]);
        let s = Sections { level: 0, deg: 0, comps: BTreeMap::from([(vec![0], v.clone())]) };
        let t = Sections { level: 0, deg: 0, comps: BTreeMap::from([(vec![0], w.clone())]) };
        let lvl = cech.level(0);
        assert!(!pv.is_zero(&pv.bracket(&v, &w)));
        assert_eq!(lvl.bracket(&s, &t).comps[&vec![0]], pv.bracket(&v, &w));
        assert!(cech.coface(0, &s).comps.is_empty());
    }

    #[test]
    fn cosimplicial_identities() {
        let c = ChartData::polynomial(&["x"]);
        let n = Arc::new(Nerve::full(&["A", "B", "C"], &c));
        let cech: CechDgla<Polyvec> = CechDgla::new(&n, &ParamAlgebra::hbar(1));
        let pv = cech.carrier(&[0]);
        let comps = (0..3).map(|k| (vec![k], pv.term(&LocalizedPoly::var(&c, 0).pow(k as u32 + 1), &[0]))).collect();
        let s = Sections { level: 0, deg: 0, comps };
        // ∂^j ∂^i = ∂^i ∂^{j−1} for i < j
        let lhs = cech.coface(1, &cech.coface(0, &s));
        let rhs = cech.coface(0, &cech.coface(0, &s));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn refinement_functoriality_and_doubling() {
        let c = ChartData::polynomial(&["x"]);
        let coarse_n = Arc::new(Nerve::full(&["A", "B"], &c));
        let fine_n = Arc::new(Nerve::full(&["A1", "A2", "B1"], &c));
        let mid_n = Arc::new(Nerve::full(&["A", "A'", "B"], &c));
        let coarse: CechDgla<Polyvec> = CechDgla::new(&coarse_n, &ParamAlgebra::hbar(1));
        let mid: CechDgla<Polyvec> = CechDgla::new(&mid_n, &ParamAlgebra::hbar(1));
        let fine: CechDgla<Polyvec> = CechDgla::new(&fine_n, &ParamAlgebra::hbar(1));
        let pv = coarse.carrier(&[0]);
        let f = |k: u32| pv.term(&LocalizedPoly::var(&c, 0).pow(k), &[0]);
        let s0 = Sections { level: 0, deg: 0, comps: BTreeMap::from([(vec![0], f(1)), (vec![1], f(2))]) };
        let s1 = Sections { level: 1, deg: 0, comps: BTreeMap::from([(vec![0, 1], f(3))]) };

        let id = Refinement::identity(&coarse_n);
        assert_eq!(refine(&id, &coarse, &coarse, &s0).unwrap(), s0);

        // doubling A: components duplicated on vertices, degenerate edge dropped
        let r1 = Refinement::new(&mid_n, &coarse_n, vec![0, 0, 1], BTreeMap::new()).unwrap();
        let d0 = refine(&r1, &coarse, &mid, &s0).unwrap();
        assert_eq!(d0.comps[&vec![0]], d0.comps[&vec![1]]);
        let d1 = refine(&r1, &coarse, &mid, &s1).unwrap();
        assert!(!d1.comps.contains_key(&vec![0, 1]));
        assert_eq!(d1.comps[&vec![0, 2]], f(3));

        let r2 = Refinement::new(&fine_n, &mid_n, vec![0, 1, 2], BTreeMap::new()).unwrap();
        let composed = r2.then(&r1);
        for s in [&s0, &s1] {
            let a = refine(&composed, &coarse, &fine, s).unwrap();
            let b = refine(&r2, &mid, &fine, &refine(&r1, &coarse, &mid, s).unwrap()).unwrap();
            assert_eq!(a, b);
        }
        assert!(Refinement::new(&mid_n, &coarse_n, vec![1, 0, 1], BTreeMap::new()).is_err());
    }

    #[test]
    fn concatenation_refinements_commute_with_restriction() {
        // K = {A,B}, K' = {C}; both include into K ⊔ K' = {A,B,C}
        let c = ChartData::polynomial(&["x"]);
        let k = Arc::new(Nerve::full(&["A", "B"], &c));
        let k2 = Arc::new(Nerve::full(&["C"], &c));
        let cat = Arc::new(Nerve::full(&["A", "B", "C"], &c));
        let p = ParamAlgebra::hbar(1);
        let (ck, ck2, ccat): (CechDgla<Polyvec>, CechDgla<Polyvec>, CechDgla<Polyvec>) =
            (CechDgla::new(&k, &p), CechDgla::new(&k2, &p), CechDgla::new(&cat, &p));
        let incl = Refinement::new(&k, &cat, vec![0, 1], BTreeMap::new()).unwrap();
        let incl2 = Refinement::new(&k2, &cat, vec![2], BTreeMap::new()).unwrap();
        let pv = ccat.carrier(&[0]);
        let x = LocalizedPoly::var(&c, 0);
        let s = Sections { level: 0, deg: 0, comps: (0..3).map(|i| (vec![i], pv.term(&x.pow(i as u32), &[0]))).collect() };
        let e = Sections { level: 1, deg: 0, comps: ccat.coface(0, &s).comps };
        // refining commutes with the coface maps
        let a = refine(&incl, &ccat, &ck, &e).unwrap();
        let b = ck.coface(0, &refine(&incl, &ccat, &ck, &s).unwrap());
        assert_eq!(a, b);
        let a2 = refine(&incl2, &ccat, &ck2, &s).unwrap();
        assert_eq!(a2.comps[&vec![0]], s.comps[&vec![2]]);
    }
}
