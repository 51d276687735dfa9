use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{AddDatum, DescentCarrier, DescentLogs, MddDatum};
use crate::cechnerve::Face;
use crate::dgla::{bch, bch_twisted, exp_ad, gauge_act, mc_check, twisted_d, ChartCarrier, Dgla, ExtElem, Filtered};
use crate::polyvec::{lift_fn, monomial_basis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Mc,
    Edge,
    Triangle,
    Tetrahedron,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Mc => "mc",
            Condition::Edge => "edge",
            Condition::Triangle => "triangle",
            Condition::Tetrahedron => "tetrahedron",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    #[serde(skip)]
    pub face: Face,
    #[serde(rename = "face")]
    pub face_name: String,
    /// Lowest adic order of the defect.
    pub order: u32,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DescentReport {
    pub violations: Vec<Violation>,
    pub checked: BTreeMap<&'static str, usize>,
    /// Monomial degree used for the operator-level triangle check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
}

impl DescentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failed_conditions(&self) -> BTreeSet<Condition> {
        self.violations.iter().map(|v| v.condition).collect()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn summary(&self) -> String {
        match self.first() {
            None => format!("all conditions hold ({} checks)", self.checked.values().sum::<usize>()),
            Some(v) => format!(
                "{} violation(s); first: {} condition fails on ({}) at order {}",
                self.violations.len(),
                v.condition.name(),
                v.face_name,
                v.order
            ),
        }
    }

    fn note(&mut self, logs_face: String, face: &[usize], condition: Condition, order: Option<u32>) {
        *self.checked.entry(condition.name()).or_insert(0) += 1;
        if let Some(order) = order {
            self.violations.push(Violation { condition, face: face.to_vec(), face_name: logs_face, order });
        }
    }
}

/// Defect of the triangle condition `(γ02)⁻¹·γ12·γ01 = exp(d_{β0} α)` on
/// logarithms, over the triangle.
pub(crate) fn triangle_defect<C: ChartCarrier>(logs: &DescentLogs<C>, t: &[usize]) -> ExtElem<C::Elem> {
    let g = logs.cech.ext(t);
    let (e01, e12, e02) = (vec![t[0], t[1]], vec![t[1], t[2]], vec![t[0], t[2]]);
    let lhs = bch(g, &bch(g, &g.neg(&logs.gamma_on(&e02, t)), &logs.gamma_on(&e12, t)), &logs.gamma_on(&e01, t));
    let rhs = twisted_d(g, &logs.beta_on(t), &logs.alpha(t));
    g.sub(&lhs, &rhs)
}

pub(crate) fn edge_defect<C: ChartCarrier>(logs: &DescentLogs<C>, e: &[usize]) -> ExtElem<C::Elem> {
    let g = logs.cech.ext(e);
    let moved = gauge_act(g, &logs.gamma(e), &logs.beta_on(e));
    let b1 = logs.cech.restrict_ext(&logs.beta(e[1]), &[e[1]], e);
    g.sub(&moved, &b1)
}

/// Defect of `α013⁻¹·α023·α012 = exp(ad(−γ01))(α123)` in the group twisted
/// by `β0`.
pub(crate) fn tetrahedron_defect<C: ChartCarrier>(logs: &DescentLogs<C>, s: &[usize]) -> ExtElem<C::Elem> {
    let g = logs.cech.ext(s);
    let b = logs.beta_on(s);
    let a = |i: usize, j: usize, k: usize| logs.alpha_on(&[s[i], s[j], s[k]], s);
    let lhs = bch_twisted(g, &b, &bch_twisted(g, &b, &g.neg(&a(0, 1, 3)), &a(0, 2, 3)), &a(0, 1, 2));
    let rhs = exp_ad(g, &g.neg(&logs.gamma_on(&[s[0], s[1]], s)), &a(1, 2, 3));
    g.sub(&lhs, &rhs)
}

/// All four conditions on logarithms.
pub fn check_logs<C: ChartCarrier>(logs: &DescentLogs<C>) -> DescentReport {
    let n = logs.nerve();
    let mut rep = DescentReport::default();
    for f in n.faces(0) {
        let g = logs.cech.ext(f);
        let order = mc_check(g, &logs.beta(f[0])).map(|r| r.lowest_order).unwrap_or(Some(0));
        rep.note(n.render_face(f), f, super::Condition::Mc, order);
    }
    for e in n.faces(1) {
        let d = edge_defect(logs, e);
        rep.note(n.render_face(e), e, Condition::Edge, logs.cech.ext(e).adic_order(&d));
    }
    for t in n.faces(2) {
        let d = triangle_defect(logs, t);
        rep.note(n.render_face(t), t, Condition::Triangle, logs.cech.ext(t).adic_order(&d));
    }
    for s in n.faces(3) {
        let d = tetrahedron_defect(logs, s);
        rep.note(n.render_face(s), s, Condition::Tetrahedron, logs.cech.ext(s).adic_order(&d));
    }
    rep
}

pub fn check_add<C: ChartCarrier>(d: &AddDatum<C>) -> DescentReport {
    check_logs(&d.logs)
}

/// The log-level checks plus the triangle condition as an identity of
/// operators on functions: `g02⁻¹ ∘ g12 ∘ g01` against `exp(ad(d_{β0} α))`
/// on all monomials of degree at most `max(cert_degree, sufficiency bound)`.
pub fn check_mdd<C: DescentCarrier>(d: &MddDatum<C>, cert_degree: u32) -> DescentReport {
    let logs = &d.logs;
    let mut rep = check_logs(logs);
    let n = logs.nerve();
    let mut used = cert_degree;
    for t in n.faces(2) {
        let g = logs.cech.ext(t);
        let (e01, e12, e02) = (vec![t[0], t[1]], vec![t[1], t[2]], vec![t[0], t[2]]);
        let (g01, g12, g02) = (logs.gamma_on(&e01, t), logs.gamma_on(&e12, t), logs.gamma_on(&e02, t));
        let inner = twisted_d(g, &logs.beta_on(t), &logs.alpha(t));
        let bound = cert_degree.max(C::action_degree_bound(g, &[&g01, &g12, &g02, &inner]));
        used = used.max(bound);
        let minus02 = g.neg(&g02);
        let mut order: Option<u32> = None;
        for c in monomial_basis(g.base.chart(), bound) {
            let f = lift_fn(g, &c);
            let lhs = exp_ad(g, &minus02, &exp_ad(g, &g12, &exp_ad(g, &g01, &f)));
            let rhs = exp_ad(g, &inner, &f);
            if let Some(o) = g.adic_order(&g.sub(&lhs, &rhs)) {
                order = Some(order.map_or(o, |p: u32| p.min(o)));
            }
        }
        if let Some(o) = order {
            if !rep.violations.iter().any(|v| v.condition == Condition::Triangle && v.face == *t) {
                rep.violations.push(Violation { condition: Condition::Triangle, face: t.clone(), face_name: n.render_face(t), order: o });
            }
        }
    }
    rep.degree_bound = Some(used);
    rep
}
