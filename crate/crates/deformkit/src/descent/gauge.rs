use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AddDatum, DescentCarrier, DescentError, DescentLogs, MddDatum};
use crate::cechnerve::{CechDgla, Face};
use crate::dgla::{bch, bch_twisted, exp_ad, gauge_act, twisted_d, ChartCarrier, Dgla, ExtElem, Filtered};

/// Twisted gauge transformation: vertex gauge logarithms `ε⁰_k` (degree 0)
/// and edge inner gauge logarithms `ε¹_{k0k1}` (degree −1).
#[derive(Clone, Debug)]
pub struct Transformation<C: ChartCarrier> {
    pub cech: Arc<CechDgla<C>>,
    pub vertex: BTreeMap<Face, ExtElem<C::Elem>>,
    pub edge: BTreeMap<Face, ExtElem<C::Elem>>,
}

impl<C: ChartCarrier> Transformation<C> {
    pub fn identity(cech: &Arc<CechDgla<C>>) -> Self {
        Transformation { cech: cech.clone(), vertex: BTreeMap::new(), edge: BTreeMap::new() }
    }

    pub fn eps0(&self, k: usize) -> ExtElem<C::Elem> {
        self.vertex.get(&vec![k]).cloned().unwrap_or_else(|| self.cech.ext(&[k]).zero(0))
    }

    pub fn eps1(&self, e: &[usize]) -> ExtElem<C::Elem> {
        self.edge.get(e).cloned().unwrap_or_else(|| self.cech.ext(e).zero(-1))
    }

    pub fn is_identity(&self) -> bool {
        self.vertex.iter().all(|(f, x)| self.cech.ext(f).is_zero(x)) && self.edge.iter().all(|(f, x)| self.cech.ext(f).is_zero(x))
    }

    pub fn validate(&self) -> Result<(), DescentError> {
        let n = &self.cech.nerve;
        for (map, deg) in [(&self.vertex, 0), (&self.edge, -1)] {
            for (f, x) in map {
                if !n.contains(f) {
                    return Err(DescentError::UnknownFace(format!("{:?}", f)));
                }
                if x.deg != deg {
                    return Err(DescentError::WrongDegree { face: n.render_face(f), expected: deg, got: x.deg });
                }
                if self.cech.ext(f).adic_order(x) == Some(0) {
                    return Err(DescentError::NotInIdeal { face: n.render_face(f) });
                }
            }
        }
        Ok(())
    }
}

/// Apply a twisted gauge transformation to descent logarithms:
/// `β′_k = exp(ε⁰_k)·β_k`,
/// `γ′_{01} = ε⁰_1 · γ_{01} · d_{β0}(ε¹_{01}) · (−ε⁰_0)` (BCH products),
/// `α′_{012} = exp(ad ε⁰_0)(ε¹_{01} · e^{−ad γ01}(ε¹_{12}) · α_{012} · (−ε¹_{02}))`
/// with the triangle product taken in the group twisted by `β0`.
pub fn transform_logs<C: ChartCarrier>(t: &Transformation<C>, d: &DescentLogs<C>) -> Result<DescentLogs<C>, DescentError> {
    if !Arc::ptr_eq(&t.cech, &d.cech) && (t.cech.nerve.indices() != d.cech.nerve.indices() || t.cech.params != d.cech.params) {
        return Err(DescentError::Mismatch);
    }
    t.validate()?;
    d.validate()?;
    let n = d.nerve().clone();
    let cech = &d.cech;
    let mut out = DescentLogs::on(cech);
    for f in n.faces(0) {
        let g = cech.ext(f);
        out.set_beta(f[0], gauge_act(g, &t.eps0(f[0]), &d.beta(f[0])));
    }
    for e in n.faces(1) {
        let g = cech.ext(e);
        let h0 = cech.restrict_ext(&t.eps0(e[0]), &[e[0]], e);
        let h1 = cech.restrict_ext(&t.eps0(e[1]), &[e[1]], e);
        let inner = twisted_d(g, &d.beta_on(e), &t.eps1(e));
        let x = bch(g, &bch(g, &bch(g, &h1, &d.gamma(e)), &inner), &g.neg(&h0));
        out.set_gamma(e.clone(), x);
    }
    for tri in n.faces(2) {
        let g = cech.ext(tri);
        let b = d.beta_on(tri);
        let (e01, e12, e02) = (vec![tri[0], tri[1]], vec![tri[1], tri[2]], vec![tri[0], tri[2]]);
        let eps = |e: &Face| cech.restrict_ext(&t.eps1(e), e, tri);
        let moved12 = exp_ad(g, &g.neg(&d.gamma_on(&e01, tri)), &eps(&e12));
        let prod = bch_twisted(g, &b, &bch_twisted(g, &b, &bch_twisted(g, &b, &eps(&e01), &moved12), &d.alpha(tri)), &g.neg(&eps(&e02)));
        let h0 = cech.restrict_ext(&t.eps0(tri[0]), &[tri[0]], tri);
        out.set_alpha(tri.clone(), exp_ad(g, &h0, &prod));
    }
    Ok(out)
}

pub fn add_gauge<C: ChartCarrier>(t: &Transformation<C>, d: &AddDatum<C>) -> Result<AddDatum<C>, DescentError> {
    Ok(AddDatum { logs: transform_logs(t, &d.logs)? })
}

/// On multiplicative data the transformation acts on the same logarithms;
/// the new local deformations are those of the transformed MC elements.
pub fn mdd_gauge<C: DescentCarrier>(t: &Transformation<C>, d: &MddDatum<C>, cert_degree: u32) -> Result<MddDatum<C>, DescentError> {
    MddDatum::new(transform_logs(t, &d.logs)?, cert_degree)
}

/// The transformation undoing `t`: `ε⁰ ↦ −ε⁰`, `ε¹_{01} ↦ −exp(ad ε⁰_0)(ε¹_{01})`.
pub fn inverse_transformation<C: ChartCarrier>(t: &Transformation<C>) -> Transformation<C> {
    let cech = &t.cech;
    let mut inv = Transformation::identity(cech);
    for (f, x) in &t.vertex {
        inv.vertex.insert(f.clone(), cech.ext(f).neg(x));
    }
    for (e, x) in &t.edge {
        let g = cech.ext(e);
        let h0 = cech.restrict_ext(&t.eps0(e[0]), &[e[0]], e);
        inv.edge.insert(e.clone(), g.neg(&exp_ad(g, &h0, x)));
    }
    inv
}
