use std::collections::BTreeMap;

use num_traits::Zero;

use super::forms::{coface, wedge_sets, SimplexForm};
use super::{dedup, delete, Face, NerveRef};
use crate::dgla::{ChartCarrier, Dgla, Ext, ExtElem};
use crate::exactalg::{factorial, Mono, Rational};

/// `(t-exponents over t_1..t_l, increasing 0-based dt indices)`.
pub type FormKey = (Vec<u32>, Vec<u8>);

/// Thom–Sullivan cochain: on every nondegenerate face of dimension `l`, a
/// polynomial form on `Δ^l` with values in the face algebra. `deg` is the
/// total degree (form degree plus internal degree).
#[derive(Clone, Debug, PartialEq)]
pub struct TsElem<E> {
    pub deg: i32,
    pub faces: BTreeMap<Face, BTreeMap<FormKey, E>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TsError {
    #[error("compatibility fails for the coface d^{coface} into ({tuple})")]
    Incompatible { tuple: String, coface: usize },
    #[error("component on ({face}) has a form of degree above the face dimension")]
    FormDegree { face: String },
}

/// Thom–Sullivan normalization of the Čech cosimplicial DG Lie algebra of
/// a chart carrier. The total differential is `D(ω⊗x) = −dω⊗x + (−1)^{|ω|} ω⊗dx`
/// and the bracket `[ω⊗x, η⊗y] = (−1)^{|x||η|} ωη⊗[x,y]`.
#[derive(Clone, Debug)]
pub struct TsDgla<C: ChartCarrier> {
    pub nerve: NerveRef,
    carriers: BTreeMap<Face, C>,
}

/// Position map of a weakly increasing tuple onto its distinct entries.
pub fn surjection_to(t: &[usize]) -> Vec<usize> {
    let f = dedup(t);
    t.iter().map(|v| f.iter().position(|w| w == v).unwrap()).collect()
}

fn weakly_increasing(face: &[usize], len: usize) -> Vec<Vec<usize>> {
    // tuples of length `len` using every entry of `face`
    let s = face.len();
    let mut out = Vec::new();
    if len < s {
        return out;
    }
    fn rec(face: &[usize], len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            if cur.last() == face.last() && dedup(cur).len() == face.len() {
                out.push(cur.clone());
            }
            return;
        }
        let last_pos = cur.last().map(|v| face.iter().position(|w| w == v).unwrap()).unwrap_or(0);
        for p in last_pos..face.len().min(last_pos + 2) {
            if cur.is_empty() && p != 0 {
                break;
            }
            cur.push(face[p]);
            rec(face, len, cur, out);
            cur.pop();
        }
    }
    rec(face, len, &mut Vec::new(), &mut out);
    out
}

impl<C: ChartCarrier> TsDgla<C> {
    pub fn new(nerve: &NerveRef) -> Self {
        let carriers = nerve.all_faces().map(|f| (f.clone(), C::on_chart(nerve.chart(f)))).collect();
        TsDgla { nerve: nerve.clone(), carriers }
    }

    pub fn carrier(&self, f: &[usize]) -> &C {
        &self.carriers[f]
    }

    fn push(&self, face: &[usize], m: &mut BTreeMap<FormKey, C::Elem>, k: FormKey, v: C::Elem) {
        let g = &self.carriers[face];
        if g.is_zero(&v) {
            return;
        }
        let merged = match m.remove(&k) {
            Some(old) => g.add(&old, &v),
            None => v,
        };
        if !g.is_zero(&merged) {
            m.insert(k, merged);
        }
    }

    /// The element whose component on every face is the given internal
    /// element, constant in `t`. All charts must share one presentation.
    pub fn constant(&self, x: &C::Elem) -> TsElem<C::Elem> {
        let g0 = self.carriers.values().next().unwrap();
        let mut faces = BTreeMap::new();
        for f in self.nerve.all_faces() {
            let l = f.len() - 1;
            if !g0.is_zero(x) {
                faces.insert(f.clone(), BTreeMap::from([((vec![0; l], vec![]), x.clone())]));
            }
        }
        TsElem { deg: g0.degree(x), faces }
    }

    /// Pull a form on `Δ^{|K|−1}` back to every face along the vertex
    /// inclusion. All charts must share one presentation.
    pub fn from_global(&self, deg: i32, global: &BTreeMap<FormKey, C::Elem>) -> TsElem<C::Elem> {
        let q = self.nerve.len() - 1;
        let g0 = self.carriers.values().next().unwrap();
        let mut faces = BTreeMap::new();
        for f in self.nerve.all_faces() {
            let comp = self.pullback_with(g0, global, q, f);
            let comp: BTreeMap<FormKey, C::Elem> = comp.into_iter().filter(|(_, v)| !g0.is_zero(v)).collect();
            if !comp.is_empty() {
                faces.insert(f.clone(), comp);
            }
        }
        TsElem { deg, faces }
    }

    fn pullback_with(&self, g: &C, comp: &BTreeMap<FormKey, C::Elem>, l: usize, alpha: &[usize]) -> BTreeMap<FormKey, C::Elem> {
        let m = alpha.len() - 1;
        let mut out: BTreeMap<FormKey, C::Elem> = BTreeMap::new();
        for ((a, dts), x) in comp {
            let dts1: Vec<usize> = dts.iter().map(|i| *i as usize + 1).collect();
            let w = SimplexForm::monomial(l, a, &dts1).pullback(alpha);
            for (k, p) in &w.terms {
                for (mono, c) in p.terms() {
                    let key = (mono.0.clone(), k.clone());
                    let v = g.scale(x, c);
                    let merged = match out.remove(&key) {
                        Some(old) => g.add(&old, &v),
                        None => v,
                    };
                    if !g.is_zero(&merged) {
                        out.insert(key, merged);
                    }
                }
            }
        }
        debug_assert!(out.keys().all(|(a, _)| a.len() == m));
        out
    }

    /// Pull the component on `face` back along `α: [m] → [dim face]`.
    pub fn pullback(&self, face: &[usize], comp: &BTreeMap<FormKey, C::Elem>, alpha: &[usize]) -> BTreeMap<FormKey, C::Elem> {
        self.pullback_with(&self.carriers[face], comp, face.len() - 1, alpha)
    }

    fn restrict_comp(&self, comp: &BTreeMap<FormKey, C::Elem>, sub: &[usize], face: &[usize]) -> BTreeMap<FormKey, C::Elem> {
        if sub == face {
            return comp.clone();
        }
        let hom = self.nerve.restriction(sub, face);
        let (src, dst) = (&self.carriers[sub], &self.carriers[face]);
        comp.iter()
            .map(|(k, v)| (k.clone(), src.restrict(v, &hom, dst).expect("restriction along a nerve map")))
            .filter(|(_, v)| !dst.is_zero(v))
            .collect()
    }

    /// Component at a weakly increasing tuple, as a form on `Δ^{len−1}`
    /// over the chart of its distinct entries.
    pub fn component_at(&self, x: &TsElem<C::Elem>, t: &[usize]) -> BTreeMap<FormKey, C::Elem> {
        let f = dedup(t);
        match x.faces.get(&f) {
            Some(comp) => self.pullback(&f, comp, &surjection_to(t)),
            None => BTreeMap::new(),
        }
    }

    /// Check every coface compatibility between stored faces, and between
    /// the propagated degenerate components one level above the top.
    pub fn check_compatible(&self, x: &TsElem<C::Elem>) -> Result<(), TsError> {
        for (f, comp) in &x.faces {
            if comp.keys().any(|(_, dts)| dts.len() > f.len() - 1) {
                return Err(TsError::FormDegree { face: self.nerve.render_face(f) });
            }
        }
        let top = self.nerve.dim() + 2;
        for f in self.nerve.all_faces() {
            for len in f.len().max(2)..=top {
                for t in weakly_increasing(f, len) {
                    let here = self.component_at(x, &t);
                    for i in 0..len {
                        let lhs = self.pullback_with(&self.carriers[f], &here, len - 1, &coface(len - 1, i));
                        let s = delete(&t, i);
                        let sf = dedup(&s);
                        let rhs = self.restrict_comp(&self.component_at(x, &s), &sf, f);
                        if lhs != rhs {
                            return Err(TsError::Incompatible { tuple: self.nerve.render_face(&t), coface: i });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_compatible_ext(&self, x: &ExtElem<TsElem<C::Elem>>) -> Result<(), TsError> {
        for v in x.comps.values() {
            self.check_compatible(v)?;
        }
        Ok(())
    }

    /// Fibre integral of the form-degree-`dim` part over the face simplex.
    pub fn integrate(&self, face: &[usize], comp: &BTreeMap<FormKey, C::Elem>, deg: i32) -> C::Elem {
        let g = &self.carriers[face];
        let l = face.len() - 1;
        let full: Vec<u8> = (0..l as u8).collect();
        let mut acc = g.zero(deg);
        for ((a, dts), x) in comp {
            if *dts != full {
                continue;
            }
            let num: Rational = a.iter().map(|e| factorial(*e)).product();
            let total: u32 = a.iter().sum();
            acc = g.add(&acc, &g.scale(x, &(num / factorial(l as u32 + total))));
        }
        acc
    }

    /// The part of a face component with a given dt-set, as a polynomial in
    /// `t` with coefficients in the face algebra.
    pub fn part(&self, x: &TsElem<C::Elem>, face: &[usize], dts: &[u8]) -> BTreeMap<Vec<u32>, C::Elem> {
        x.faces.get(face).map(|c| c.iter().filter(|((_, d), _)| d == dts).map(|((a, _), v)| (a.clone(), v.clone())).collect()).unwrap_or_default()
    }

    /// Reorganize a parameter-extended element into per-face parameter
    /// series for a given dt-set and t-exponent.
    pub fn coefficient_ext(
        &self,
        ext_face: &Ext<C>,
        x: &ExtElem<TsElem<C::Elem>>,
        face: &[usize],
        key: &FormKey,
        deg: i32,
    ) -> ExtElem<C::Elem> {
        let mut comps = BTreeMap::new();
        for (i, v) in &x.comps {
            if let Some(e) = v.faces.get(face).and_then(|c| c.get(key)) {
                if !ext_face.base.is_zero(e) {
                    comps.insert(*i, e.clone());
                }
            }
        }
        ExtElem { deg, comps }
    }

    /// Evaluate the 0-form part of a face component at a point of the simplex
    /// given in coordinates `t_1..t_l`.
    pub fn eval_functions(&self, face: &[usize], comp: &BTreeMap<FormKey, C::Elem>, point: &[Rational], deg: i32) -> C::Elem {
        let g = &self.carriers[face];
        let mut acc = g.zero(deg);
        for ((a, dts), x) in comp {
            if !dts.is_empty() {
                continue;
            }
            let c = Mono(a.clone());
            let v: Rational = c.0.iter().zip(point).map(|(e, p)| num_traits::pow(p.clone(), *e as usize)).product();
            if !v.is_zero() {
                acc = g.add(&acc, &g.scale(x, &v));
            }
        }
        acc
    }
}

impl<C: ChartCarrier> Dgla for TsDgla<C> {
    type Elem = TsElem<C::Elem>;

    fn zero(&self, deg: i32) -> Self::Elem {
        TsElem { deg, faces: BTreeMap::new() }
    }

    fn degree(&self, x: &Self::Elem) -> i32 {
        x.deg
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        x.faces.iter().all(|(f, c)| c.values().all(|v| self.carriers[f].is_zero(v)))
    }

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let mut faces = x.faces.clone();
        for (f, c) in &y.faces {
            let mut m = faces.remove(f).unwrap_or_default();
            for (k, v) in c {
                self.push(f, &mut m, k.clone(), v.clone());
            }
            if !m.is_empty() {
                faces.insert(f.clone(), m);
            }
        }
        TsElem { deg: x.deg, faces }
    }

    fn scale(&self, x: &Self::Elem, c: &Rational) -> Self::Elem {
        if c.is_zero() {
            return self.zero(x.deg);
        }
        let faces = x
            .faces
            .iter()
            .map(|(f, m)| (f.clone(), m.iter().map(|(k, v)| (k.clone(), self.carriers[f].scale(v, c))).collect()))
            .collect();
        TsElem { deg: x.deg, faces }
    }

    fn d(&self, x: &Self::Elem) -> Self::Elem {
        let mut faces = BTreeMap::new();
        for (f, comp) in &x.faces {
            let g = &self.carriers[f];
            let mut m = BTreeMap::new();
            for ((a, dts), v) in comp {
                // −d(t^a dt_I) ⊗ v
                for j in 0..a.len() {
                    if a[j] == 0 {
                        continue;
                    }
                    if let Some((neg, k)) = wedge_sets(&[j as u8], dts) {
                        let mut b = a.clone();
                        b[j] -= 1;
                        let c = Rational::from_integer(a[j].into());
                        let c = if neg { c } else { -c };
                        self.push(f, &mut m, (b, k), g.scale(v, &c));
                    }
                }
                // (−1)^{|I|} t^a dt_I ⊗ dv
                let dv = g.d(v);
                let dv = if dts.len() % 2 == 1 { g.neg(&dv) } else { dv };
                self.push(f, &mut m, (a.clone(), dts.clone()), dv);
            }
            if !m.is_empty() {
                faces.insert(f.clone(), m);
            }
        }
        TsElem { deg: x.deg + 1, faces }
    }

    fn bracket(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let mut faces = BTreeMap::new();
        for (f, cx) in &x.faces {
            let Some(cy) = y.faces.get(f) else { continue };
            let g = &self.carriers[f];
            let mut m = BTreeMap::new();
            for ((a, i), u) in cx {
                let du = x.deg - i.len() as i32;
                for ((b, j), v) in cy {
                    let Some((neg, k)) = wedge_sets(i, j) else { continue };
                    let koszul = (du.rem_euclid(2) as usize) * (j.len() % 2) == 1;
                    let e: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                    let w = g.bracket(u, v);
                    let w = if neg ^ koszul { g.neg(&w) } else { w };
                    self.push(f, &mut m, (e, k), w);
                }
            }
            if !m.is_empty() {
                faces.insert(f.clone(), m);
            }
        }
        TsElem { deg: x.deg + y.deg, faces }
    }
}

impl<E> TsElem<E> {
    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cechnerve::Nerve;
    use crate::dgla::{mc_check, Filtered};
    use crate::exactalg::{parse_expr, ChartData, LocalizedPoly};
    use crate::params::ParamAlgebra;
    use crate::polyvec::Polyvec;

    fn setup() -> (NerveRef, TsDgla<Polyvec>) {
        let c = ChartData::polynomial(&["x", "y"]);
        let n = Arc::new(Nerve::full(&["A", "B", "C"], &c));
        let ts = TsDgla::new(&n);
        (n, ts)
    }

    #[test]
    fn constant_element_is_valid_with_level_differential() {
        let (_, ts) = setup();
        let pv = ts.carrier(&[0]).clone();
        let c = pv.chart().clone();
        let v = pv.term(&parse_expr(&c, "x*y").unwrap(), &[0]);
        let x = ts.constant(&v);
        ts.check_compatible(&x).unwrap();
        assert_eq!(ts.d(&x), ts.constant(&pv.d(&v)));
    }

    #[test]
    fn mismatched_vertex_values_rejected() {
        let (_, ts) = setup();
        let pv = ts.carrier(&[0]).clone();
        let c = pv.chart().clone();
        let f = pv.function(&LocalizedPoly::var(&c, 0));
        let mut x = ts.constant(&pv.function(&LocalizedPoly::var(&c, 1)));
        // give the edge (A,B) an extra dt-component and break vertex B
        x.faces.get_mut(&vec![0, 1]).unwrap().insert((vec![0], vec![0]), f.clone());
        x.faces.insert(vec![1], BTreeMap::from([((vec![], vec![]), f)]));
        x.deg = -1;
        let err = ts.check_compatible(&x).unwrap_err();
        assert!(matches!(err, TsError::Incompatible { .. }));
    }

    #[test]
    fn global_forms_are_compatible_and_d_squares_to_zero() {
        let (_, ts) = setup();
        let pv = ts.carrier(&[0]).clone();
        let c = pv.chart().clone();
        let v = pv.term(&parse_expr(&c, "x").unwrap(), &[1]);
        let w = pv.term(&parse_expr(&c, "y^2").unwrap(), &[]);
        let global = BTreeMap::from([((vec![1, 0], vec![]), v.clone()), ((vec![0, 2], vec![0]), w.clone())]);
        let x = ts.from_global(0, &global);
        ts.check_compatible(&x).unwrap();
        assert!(!ts.is_zero(&x));
        assert!(ts.is_zero(&ts.d(&ts.d(&x))));
        let dx = ts.d(&x);
        ts.check_compatible(&dx).unwrap();
        let b = ts.bracket(&x, &dx);
        ts.check_compatible(&b).unwrap();
        // derivation
        let lhs = ts.d(&ts.bracket(&x, &x));
        let rhs = ts.add(&ts.bracket(&dx, &x), &ts.bracket(&x, &dx));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauge_of_constant_mc_is_mc() {
        let (_, ts) = setup();
        let pv = ts.carrier(&[0]).clone();
        let c = pv.chart().clone();
        let params = ParamAlgebra::hbar(2);
        let ext = Ext::new(ts.clone(), &params);
        let one = LocalizedPoly::one(&c);
        let beta0 = ts.constant(&pv.term(&one, &[0, 1]));
        let beta = ext.basis_tensor(1, &beta0);
        assert!(mc_check(&ext, &beta).unwrap().holds);
        let gamma_g = BTreeMap::from([
            ((vec![1, 0], vec![]), pv.term(&parse_expr(&c, "x^2").unwrap(), &[1])),
            ((vec![0, 1], vec![1]), pv.function(&parse_expr(&c, "y").unwrap())),
        ]);
        let gamma = ext.basis_tensor(1, &ts.from_global(0, &gamma_g));
        let moved = crate::dgla::gauge_act(&ext, &gamma, &beta);
        assert!(mc_check(&ext, &moved).unwrap().holds);
        ts.check_compatible_ext(&moved).unwrap();
        assert_eq!(ext.adic_order(&moved), Some(1));
    }

    #[test]
    fn integration_of_face_parts() {
        let (_, ts) = setup();
        let pv = ts.carrier(&[0]).clone();
        let c = pv.chart().clone();
        let one = pv.function(&LocalizedPoly::one(&c));
        let comp = BTreeMap::from([((vec![1, 0], vec![0, 1]), one.clone())]);
        assert_eq!(ts.integrate(&[0, 1, 2], &comp, -1), pv.scale(&one, &crate::exactalg::q(1, 6)));
    }
}
