use std::collections::BTreeMap;
use std::sync::Arc;

use super::check::{tetrahedron_defect, triangle_defect};
use super::{check_add, AddDatum, DescentLogs};
use crate::cechnerve::{CechDgla, Face, TsDgla, TsElem, TsError};
use crate::dgla::{bernoulli, mc_check, ChartCarrier, Dgla, Ext, ExtElem, Filtered};
use crate::exactalg::{qi, Rational};
use crate::params::Params;
use crate::solve::{staged_solve, Residual};

#[derive(Clone, Copy, Debug, Default)]
pub struct IntOptions {
    /// Ansatz bounds for the triangle corrections; `None` reads them off
    /// the data.
    pub poly_bound: Option<u32>,
    pub order_bound: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntError {
    #[error("input is not a Maurer-Cartan element (defect at order {0:?})")]
    NotMc(Option<u32>),
    #[error("input is not a Thom-Sullivan cochain: {0}")]
    Incompatible(#[from] TsError),
    #[error("no triangle logarithms within the ansatz at order {order}")]
    Unsolved { order: u32 },
    #[error("integrated datum fails its conditions: {0}")]
    Conditions(String),
}

type TPoly<E> = Vec<E>;

fn tpoly_bracket<G: Dgla>(g: &G, a: &TPoly<G::Elem>, b: &TPoly<G::Elem>, deg: i32) -> TPoly<G::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![g.zero(deg); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = g.add(&out[i + j], &g.bracket(x, y));
        }
    }
    out
}

/// Logarithm `Ω(1)` of the solution of `U′ = A(t) U`, `U(0) = 1`, for a
/// polynomial generator `A(t) = Σ_a t^a A_a` of degree 0 in the maximal
/// ideal, by Picard iteration of `Ω′ = Σ_n B_n/n! ad_Ω^n(A)`.
pub fn magnus_log<G: Filtered>(g: &G, gen: &[G::Elem]) -> G::Elem {
    let top = g.top_order() as usize;
    let b = bernoulli(top);
    let mut omega: TPoly<G::Elem> = vec![];
    for _ in 0..top {
        // rhs(t) = Σ_n B_n/n! ad_Ω^n(A)
        let mut rhs: TPoly<G::Elem> = gen.to_vec();
        let mut term: TPoly<G::Elem> = gen.to_vec();
        let mut fact = qi(1);
        for (n, bn) in b.iter().enumerate().skip(1) {
            term = tpoly_bracket(g, &omega, &term, 0);
            if term.iter().all(|x| g.is_zero(x)) {
                break;
            }
            fact *= qi(n as i64);
            let c = bn / &fact;
            if rhs.len() < term.len() {
                rhs.resize(term.len(), g.zero(0));
            }
            for (k, x) in term.iter().enumerate() {
                rhs[k] = g.add(&rhs[k], &g.scale(x, &c));
            }
        }
        // Ω(t) = ∫_0^t rhs
        omega = std::iter::once(g.zero(0)).chain(rhs.iter().enumerate().map(|(k, x)| g.scale(x, &(qi(1) / qi(k as i64 + 1))))).collect();
    }
    g.sum(0, omega.iter())
}

fn ts_tpoly<C: ChartCarrier>(ts: &TsDgla<C>, ext_e: &Ext<C>, beta: &ExtElem<TsElem<C::Elem>>, e: &[usize]) -> TPoly<ExtElem<C::Elem>> {
    let mut top = 0;
    for v in beta.comps.values() {
        if let Some(c) = v.faces.get(e) {
            for (a, dts) in c.keys() {
                if dts == &vec![0u8] {
                    top = top.max(a[0]);
                }
            }
        }
    }
    (0..=top).map(|a| ts.coefficient_ext(ext_e, beta, e, &(vec![a], vec![0]), 0)).collect()
}

/// Integrate a Thom–Sullivan MC element over the simplices of the nerve:
/// vertex values for `δ⁰`, the Magnus logarithm of the edge flow for `δ¹`,
/// and the triangle logarithms fixed by the triangle and tetrahedron
/// conditions, starting from the fibre integral of the 2-form part.
pub fn int_mc<C: ChartCarrier>(
    ts: &TsDgla<C>,
    params: &Params,
    beta: &ExtElem<TsElem<C::Elem>>,
    opts: &IntOptions,
) -> Result<AddDatum<C>, IntError> {
    let ext_ts = Ext::new(ts.clone(), params);
    let mc = mc_check(&ext_ts, beta).map_err(|_| IntError::NotMc(Some(0)))?;
    if !mc.holds {
        return Err(IntError::NotMc(mc.lowest_order));
    }
    ts.check_compatible_ext(beta)?;
    let cech = Arc::new(CechDgla::<C>::new(&ts.nerve, params));
    let n = ts.nerve.clone();
    let mut logs = DescentLogs::on(&cech);
    for f in n.faces(0) {
        let x = ts.coefficient_ext(cech.ext(f), beta, f, &(vec![], vec![]), 1);
        logs.set_beta(f[0], x);
    }
    for e in n.faces(1) {
        let g = cech.ext(e);
        logs.set_gamma(e.clone(), magnus_log(g, &ts_tpoly(ts, g, beta, e)));
    }
    let (mut pb, mut ob) = (1, 1);
    for tri in n.faces(2) {
        let g = cech.ext(tri);
        let mut comps = BTreeMap::new();
        for (i, v) in &beta.comps {
            if let Some(c) = v.faces.get(tri) {
                let x = ts.integrate(tri, c, -1);
                if !g.base.is_zero(&x) {
                    comps.insert(*i, x);
                }
            }
        }
        logs.set_alpha(tri.clone(), ExtElem { deg: -1, comps });
    }
    for (f, x) in logs.vertex.iter().chain(&logs.edge).chain(&logs.triangle) {
        let c = cech.carrier(f);
        for v in x.comps.values() {
            pb = pb.max(c.poly_degree(v));
            ob = ob.max(c.operator_order(v));
        }
    }
    let pb = opts.poly_bound.unwrap_or(pb);
    let ob = opts.order_bound.unwrap_or(ob);

    let ansatz: BTreeMap<Face, Vec<C::Elem>> = n.faces(2).iter().map(|t| (t.clone(), cech.carrier(t).ansatz(-1, pb, ob))).collect();
    let top = params.top_order();
    let dirs = |p: u32| -> Vec<(Face, usize, usize)> {
        let mut out = Vec::new();
        for (t, a) in &ansatz {
            for i in (0..params.dim()).filter(|&i| params.basis_order(i) == p) {
                out.extend((0..a.len()).map(|j| (t.clone(), i, j)));
            }
        }
        out
    };
    let apply = |l: &DescentLogs<C>, combo: &[((Face, usize, usize), Rational)]| {
        let mut out = l.clone();
        for ((t, i, j), c) in combo {
            let g = cech.ext(t);
            let x = g.add(&out.alpha(t), &g.scale(&g.basis_tensor(*i, &ansatz[t][*j]), c));
            out.set_alpha(t.clone(), x);
        }
        out
    };
    // α at order p enters the tetrahedra at order p and the triangles at
    // order p + 1 (through [β0, α], as d vanishes on functions)
    let residual = |l: &DescentLogs<C>, p: u32| -> Residual {
        let mut out = Residual::new();
        let mut push = |kind: u32, f: &[usize], x: &ExtElem<C::Elem>, q: u32| {
            let g = cech.ext(f);
            for (i, v) in &g.order_part(x, q).comps {
                for (k, c) in g.base.coefficients(v) {
                    let mut key = vec![kind];
                    key.extend(f.iter().map(|&v| v as u32));
                    key.push(*i as u32);
                    key.extend(k);
                    out.push((key, c));
                }
            }
        };
        for s in n.faces(3) {
            push(3, s, &tetrahedron_defect(l, s), p);
        }
        if p < top {
            for t in n.faces(2) {
                push(2, t, &triangle_defect(l, t), p + 1);
            }
        }
        out
    };
    let solved = staged_solve(logs, 1..=top, &dirs, &apply, &residual).map_err(|f| IntError::Unsolved { order: f.order })?;
    let datum = AddDatum { logs: solved };
    let rep = check_add(&datum);
    if !rep.holds() {
        return Err(IntError::Conditions(rep.summary()));
    }
    Ok(datum)
}
