use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::gauge::transform_logs;
use super::{AddDatum, DescentError, DescentLogs, Transformation};
use crate::cechnerve::{CechDgla, Cochain, Face, Layer, LayerComplex};
use crate::dgla::{ChartCarrier, Dgla, ExtElem, Filtered};
use crate::exactalg::Rational;
use crate::solve::{staged_solve, Residual, StageFailure};

/// Bounds on the ansatz for gauge logarithms. `None` means: the largest
/// polynomial degree (operator order) occurring in the data, at least 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolverOptions {
    pub poly_bound: Option<u32>,
    pub order_bound: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct Equivalence<C: ChartCarrier> {
    pub transformation: Transformation<C>,
}

#[derive(Clone, Debug)]
pub enum EquivOutcome<C: ChartCarrier> {
    Equivalent(Equivalence<C>),
    /// No transformation within the ansatz matches at this order.
    NotFound { order: u32 },
}

/// A transformation taking the datum to one with `γ′ = 0` and `α′ = 0`.
#[derive(Clone, Debug)]
pub struct Trivialization<C: ChartCarrier> {
    pub transformation: Transformation<C>,
    pub image: DescentLogs<C>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstructionKind {
    /// The edge logarithms cannot be removed at this order.
    Edge,
    /// The edges are removable but the triangle part leaves a class of
    /// functions.
    Triangle,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub order: u32,
    pub kind: ObstructionKind,
    /// Per parameter basis index of the failing order: the 2-cochain of
    /// functions read off from the triangle defect.
    pub cochains: Vec<(usize, Cochain)>,
    /// Whether the cochains are nonzero in cohomology; `None` when the
    /// coefficients leave every finite layer available on the nerve.
    pub class_nonzero: Option<bool>,
    /// `[c]*hbar` for a single basis monomial, otherwise `[c_m]*m + ...`.
    pub class: String,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub enum ObstructionOutcome<C: ChartCarrier> {
    Trivial(Trivialization<C>),
    Obstructed(ObstructionReport),
}

#[derive(Clone, Debug)]
enum Dir {
    Vertex(usize, usize, usize),
    Edge(Face, usize, usize),
}

enum Target<'a, C: ChartCarrier> {
    Datum(&'a DescentLogs<C>),
    Trivial,
}

struct Setup<C: ChartCarrier> {
    cech: Arc<CechDgla<C>>,
    vertex_ansatz: BTreeMap<usize, Vec<C::Elem>>,
    edge_ansatz: BTreeMap<Face, Vec<C::Elem>>,
}

fn bounds<C: ChartCarrier>(logs: &[&DescentLogs<C>], opts: &SolverOptions) -> (u32, u32) {
    let mut pb = 0;
    let mut ob = 0;
    for l in logs {
        for map in [&l.vertex, &l.edge, &l.triangle] {
            for (f, x) in map {
                let c = l.cech.carrier(f);
                for v in x.comps.values() {
                    pb = pb.max(c.poly_degree(v));
                    ob = ob.max(c.operator_order(v));
                }
            }
        }
    }
    (opts.poly_bound.unwrap_or(pb.max(1)), opts.order_bound.unwrap_or(ob.max(1)))
}

impl<C: ChartCarrier> Setup<C> {
    fn new(cech: &Arc<CechDgla<C>>, pb: u32, ob: u32) -> Self {
        let n = &cech.nerve;
        let vertex_ansatz = n.faces(0).iter().map(|f| (f[0], cech.carrier(f).ansatz(0, pb, ob))).collect();
        let edge_ansatz = n.faces(1).iter().map(|e| (e.clone(), cech.carrier(e).ansatz(-1, pb, ob))).collect();
        Setup { cech: cech.clone(), vertex_ansatz, edge_ansatz }
    }

    fn dirs(&self, p: u32) -> Vec<Dir> {
        let params = &self.cech.params;
        let idx: Vec<usize> = (0..params.dim()).filter(|&i| params.basis_order(i) == p).collect();
        let mut out = Vec::new();
        for (k, a) in &self.vertex_ansatz {
            for &i in &idx {
                out.extend((0..a.len()).map(|j| Dir::Vertex(*k, i, j)));
            }
        }
        for (e, a) in &self.edge_ansatz {
            for &i in &idx {
                out.extend((0..a.len()).map(|j| Dir::Edge(e.clone(), i, j)));
            }
        }
        out
    }

    fn apply(&self, t: &Transformation<C>, combo: &[(Dir, Rational)]) -> Transformation<C> {
        let mut out = t.clone();
        for (d, c) in combo {
            match d {
                Dir::Vertex(k, i, j) => {
                    let g = self.cech.ext(&[*k]);
                    let x = g.scale(&g.basis_tensor(*i, &self.vertex_ansatz[k][*j]), c);
                    let cur = out.eps0(*k);
                    out.vertex.insert(vec![*k], g.add(&cur, &x));
                }
                Dir::Edge(e, i, j) => {
                    let g = self.cech.ext(e);
                    let x = g.scale(&g.basis_tensor(*i, &self.edge_ansatz[e][*j]), c);
                    let cur = out.eps1(e);
                    out.edge.insert(e.clone(), g.add(&cur, &x));
                }
            }
        }
        out
    }
}

fn push_part<C: ChartCarrier>(out: &mut Residual, cech: &CechDgla<C>, kind: u32, f: &[usize], x: &ExtElem<C::Elem>, p: u32) {
    let g = cech.ext(f);
    let part = g.order_part(x, p);
    for (i, v) in &part.comps {
        for (k, c) in g.base.coefficients(v) {
            let mut key = vec![kind];
            key.extend(f.iter().map(|&v| v as u32));
            key.push(*i as u32);
            key.extend(k);
            out.push((key, c));
        }
    }
}

fn residual<C: ChartCarrier>(source: &DescentLogs<C>, target: &Target<'_, C>, t: &Transformation<C>, p: u32) -> Residual {
    let img = transform_logs(t, source).expect("validated transformation");
    let cech = &source.cech;
    let n = source.nerve();
    let mut out = Residual::new();
    match target {
        Target::Datum(d) => {
            for f in n.faces(0) {
                let g = cech.ext(f);
                push_part(&mut out, cech, 0, f, &g.sub(&img.beta(f[0]), &d.beta(f[0])), p);
            }
            for e in n.faces(1) {
                let g = cech.ext(e);
                push_part(&mut out, cech, 1, e, &g.sub(&img.gamma(e), &d.gamma(e)), p);
            }
            for tri in n.faces(2) {
                let g = cech.ext(tri);
                push_part(&mut out, cech, 2, tri, &g.sub(&img.alpha(tri), &d.alpha(tri)), p);
            }
        }
        Target::Trivial => {
            for e in n.faces(1) {
                push_part(&mut out, cech, 1, e, &img.gamma(e), p);
            }
            for tri in n.faces(2) {
                push_part(&mut out, cech, 2, tri, &img.alpha(tri), p);
            }
        }
    }
    out
}

fn run<C: ChartCarrier>(
    source: &DescentLogs<C>,
    target: Target<'_, C>,
    pb: u32,
    ob: u32,
) -> Result<Transformation<C>, StageFailure<Transformation<C>>> {
    let setup = Setup::new(&source.cech, pb, ob);
    let top = source.params().top_order();
    staged_solve(
        Transformation::identity(&source.cech),
        1..=top,
        &|p| setup.dirs(p),
        &|t, combo| setup.apply(t, combo),
        &|t, p| residual(source, &target, t, p),
    )
}

/// Search for a twisted gauge transformation taking `d` to `d2`, order by
/// order, with gauge logarithms in the polynomial ansatz.
pub fn equiv_solve<C: ChartCarrier>(d: &AddDatum<C>, d2: &AddDatum<C>, opts: &SolverOptions) -> Result<EquivOutcome<C>, DescentError> {
    let (a, b) = (&d.logs, &d2.logs);
    if a.nerve().indices() != b.nerve().indices() || a.params() != b.params() {
        return Err(DescentError::Mismatch);
    }
    a.validate()?;
    b.validate()?;
    let (pb, ob) = bounds(&[a, b], opts);
    match run(a, Target::Datum(b), pb, ob) {
        Ok(t) => {
            let img = transform_logs(&t, a)?;
            assert!(img.same_as(b), "staged equivalence does not verify");
            Ok(EquivOutcome::Equivalent(Equivalence { transformation: t }))
        }
        Err(f) => Ok(EquivOutcome::NotFound { order: f.order }),
    }
}

/// Try to bring `d` to the form `γ′ = 0`, `α′ = 0`. On failure, report the
/// first order at which this is impossible and the class responsible.
pub fn obstruction<C: ChartCarrier>(d: &AddDatum<C>, opts: &SolverOptions) -> Result<ObstructionOutcome<C>, DescentError> {
    let logs = &d.logs;
    logs.validate()?;
    let (pb, ob) = bounds(&[logs], opts);
    match run(logs, Target::Trivial, pb, ob) {
        Ok(t) => {
            let image = transform_logs(&t, logs)?;
            assert!(image.edge.is_empty() && image.triangle.is_empty(), "staged trivialization does not verify");
            Ok(ObstructionOutcome::Trivial(Trivialization { transformation: t, image }))
        }
        Err(f) => Ok(ObstructionOutcome::Obstructed(report(logs, &f, pb, ob)?)),
    }
}

fn report<C: ChartCarrier>(
    logs: &DescentLogs<C>,
    f: &StageFailure<Transformation<C>>,
    pb: u32,
    ob: u32,
) -> Result<ObstructionReport, DescentError> {
    let p = f.order;
    let img = transform_logs(&f.state, logs)?;
    let n = logs.nerve();
    let cech = &logs.cech;
    let params = logs.params();

    // can the edges alone be cleared at this order?
    let setup = Setup::new(cech, pb, ob);
    let edges_only = |t: &Transformation<C>| {
        let im = transform_logs(t, logs).expect("validated transformation");
        let mut out = Residual::new();
        for e in n.faces(1) {
            push_part(&mut out, cech, 1, e, &im.gamma(e), p);
        }
        out
    };
    let edge_ok = staged_solve(f.state.clone(), p..=p, &|q| setup.dirs(q), &|t, c| setup.apply(t, c), &|t, _| edges_only(t)).is_ok();

    if !edge_ok {
        let detail = n
            .faces(1)
            .iter()
            .filter_map(|e| {
                let g = cech.ext(e);
                let x = g.order_part(&img.gamma(e), p);
                (!g.is_zero(&x)).then(|| format!("({}): {}", n.render_face(e), g.render(&x)))
            })
            .collect::<Vec<_>>()
            .join("; ");
        return Ok(ObstructionReport {
            order: p,
            kind: ObstructionKind::Edge,
            cochains: vec![],
            class_nonzero: None,
            class: "[gamma]".into(),
            detail,
        });
    }

    let mut cochains = Vec::new();
    for i in (0..params.dim()).filter(|&i| params.basis_order(i) == p) {
        let mut c = Cochain::zero(2);
        for tri in n.faces(2) {
            let g = cech.ext(tri);
            // ε⁰ at this order does not reach α′, and ε¹ only through δε¹
            let a = g.order_part(&img.alpha(tri), p);
            if let Some(v) = a.comps.get(&i) {
                if let Some(fun) = g.base.as_function(v) {
                    if !fun.is_zero() {
                        c.comps.insert(tri.clone(), fun);
                    }
                }
            }
        }
        if !c.is_zero() {
            cochains.push((i, c));
        }
    }
    let class_nonzero = class_nonzero(n, &cochains);
    let class = if cochains.len() == 1 {
        format!("[c]*{}", params.render_basis(cochains[0].0))
    } else {
        cochains.iter().map(|(i, _)| format!("[c_{}]*{}", params.render_basis(*i), params.render_basis(*i))).collect::<Vec<_>>().join(" + ")
    };
    let detail = cochains.iter().map(|(i, c)| format!("{}: {}", params.render_basis(*i), c.render(n))).collect::<Vec<_>>().join("; ");
    Ok(ObstructionReport { order: p, kind: ObstructionKind::Triangle, cochains, class_nonzero, class, detail })
}

fn class_nonzero(n: &crate::cechnerve::Nerve, cochains: &[(usize, Cochain)]) -> Option<bool> {
    let all_const = cochains.iter().all(|(_, c)| c.comps.values().all(|v| v.constant_value().is_some()));
    let layer = if all_const {
        Layer::Constant
    } else {
        let deg = cochains.iter().flat_map(|(_, c)| c.comps.values()).filter_map(|v| v.poly_degree()).max().unwrap_or(0);
        Layer::PolyTruncated(deg)
    };
    let cx = LayerComplex::new(n, layer).ok()?;
    let mut nonzero = false;
    for (_, c) in cochains {
        let cyc = cx.delta(c);
        if !cyc.is_zero() {
            return None;
        }
        if cx.to_vector(c).is_none() {
            return None;
        }
        nonzero |= cx.solve_coboundary(c).is_none();
    }
    Some(nonzero)
}
