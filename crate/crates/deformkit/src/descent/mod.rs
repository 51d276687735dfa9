//! Additive and multiplicative descent data on a cover nerve: their
//! conditions, twisted gauge transformations, equivalence and
//! trivialization solving, and integration of Thom–Sullivan MC elements.
//!
//! Group elements are always handled through their logarithms: a vertex
//! carries an MC element `β_k`, an edge a gauge logarithm `γ_{k0k1}` (degree
//! 0) and a triangle an inner gauge logarithm `α_{k0k1k2}` (degree −1). The
//! additive and multiplicative data share these logarithms; the
//! multiplicative side adds the local deformations and the operator-level
//! check of the triangle condition.

mod carrier;
mod check;
mod gauge;
mod int;
pub mod io;
pub mod random;
mod solve;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use carrier::DescentCarrier;
pub use check::{check_add, check_logs, check_mdd, Condition, DescentReport, Violation};
pub use gauge::{add_gauge, inverse_transformation, mdd_gauge, Transformation};
pub use int::{int_mc, magnus_log, IntError, IntOptions};
pub use solve::{
    equiv_solve, obstruction, EquivOutcome, Equivalence, ObstructionKind, ObstructionOutcome, ObstructionReport, SolverOptions,
    Trivialization,
};

use crate::cechnerve::{CechDgla, Face, NerveRef};
use crate::dgla::{ChartCarrier, Dgla, ExtElem, Filtered};
use crate::params::Params;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescentError {
    #[error("component on ({face}) has degree {got}, expected {expected}")]
    WrongDegree { face: String, expected: i32, got: i32 },
    #[error("component on ({face}) is not in the maximal ideal")]
    NotInIdeal { face: String },
    #[error("({0}) is not a face of the nerve")]
    UnknownFace(String),
    #[error("data live on different nerves or parameter algebras")]
    Mismatch,
    #[error("descent conditions fail: {0}")]
    Conditions(String),
    #[error("local deformation on ({face}): {msg}")]
    Local { face: String, msg: String },
}

/// Vertex, edge and triangle logarithms on a nerve. Missing entries are zero.
#[derive(Clone, Debug)]
pub struct DescentLogs<C: ChartCarrier> {
    pub cech: Arc<CechDgla<C>>,
    pub vertex: BTreeMap<Face, ExtElem<C::Elem>>,
    pub edge: BTreeMap<Face, ExtElem<C::Elem>>,
    pub triangle: BTreeMap<Face, ExtElem<C::Elem>>,
}

impl<C: ChartCarrier> DescentLogs<C> {
    pub fn zero(nerve: &NerveRef, params: &Params) -> Self {
        Self::on(&Arc::new(CechDgla::new(nerve, params)))
    }

    pub fn on(cech: &Arc<CechDgla<C>>) -> Self {
        DescentLogs { cech: cech.clone(), vertex: BTreeMap::new(), edge: BTreeMap::new(), triangle: BTreeMap::new() }
    }

    pub fn nerve(&self) -> &NerveRef {
        &self.cech.nerve
    }

    pub fn params(&self) -> &Params {
        &self.cech.params
    }

    fn get(&self, map: &BTreeMap<Face, ExtElem<C::Elem>>, f: &[usize], deg: i32) -> ExtElem<C::Elem> {
        map.get(f).cloned().unwrap_or_else(|| self.cech.ext(f).zero(deg))
    }

    pub fn beta(&self, k: usize) -> ExtElem<C::Elem> {
        self.get(&self.vertex, &[k], 1)
    }

    pub fn gamma(&self, e: &[usize]) -> ExtElem<C::Elem> {
        self.get(&self.edge, e, 0)
    }

    pub fn alpha(&self, t: &[usize]) -> ExtElem<C::Elem> {
        self.get(&self.triangle, t, -1)
    }

    /// `β_{f_0}` restricted to the face `f`.
    pub fn beta_on(&self, f: &[usize]) -> ExtElem<C::Elem> {
        self.cech.restrict_ext(&self.beta(f[0]), &[f[0]], f)
    }

    /// `γ_e` restricted to the face `f ⊇ e`.
    pub fn gamma_on(&self, e: &[usize], f: &[usize]) -> ExtElem<C::Elem> {
        self.cech.restrict_ext(&self.gamma(e), e, f)
    }

    pub fn alpha_on(&self, t: &[usize], f: &[usize]) -> ExtElem<C::Elem> {
        self.cech.restrict_ext(&self.alpha(t), t, f)
    }

    fn insert(map: &mut BTreeMap<Face, ExtElem<C::Elem>>, g: &crate::dgla::Ext<C>, f: Face, x: ExtElem<C::Elem>) {
        if g.is_zero(&x) {
            map.remove(&f);
        } else {
            map.insert(f, x);
        }
    }

    pub fn set_beta(&mut self, k: usize, x: ExtElem<C::Elem>) {
        let g = self.cech.ext(&[k]).clone();
        Self::insert(&mut self.vertex, &g, vec![k], x);
    }

    pub fn set_gamma(&mut self, e: Face, x: ExtElem<C::Elem>) {
        let g = self.cech.ext(&e).clone();
        Self::insert(&mut self.edge, &g, e, x);
    }

    pub fn set_alpha(&mut self, t: Face, x: ExtElem<C::Elem>) {
        let g = self.cech.ext(&t).clone();
        Self::insert(&mut self.triangle, &g, t, x);
    }

    /// Degree and ideal checks on every stored component.
    pub fn validate(&self) -> Result<(), DescentError> {
        let n = self.nerve();
        for (map, deg, len) in [(&self.vertex, 1, 1), (&self.edge, 0, 2), (&self.triangle, -1, 3)] {
            for (f, x) in map {
                if f.len() != len || !n.contains(f) {
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

    /// Equality of all components.
    pub fn same_as(&self, other: &DescentLogs<C>) -> bool {
        let n = self.nerve();
        let eq = |f: &Face, a: ExtElem<C::Elem>, b: ExtElem<C::Elem>| {
            let g = self.cech.ext(f);
            g.is_zero(&g.sub(&a, &b))
        };
        n.faces(0).iter().all(|f| eq(f, self.beta(f[0]), other.beta(f[0])))
            && n.faces(1).iter().all(|f| eq(f, self.gamma(f), other.gamma(f)))
            && n.faces(2).iter().all(|f| eq(f, self.alpha(f), other.alpha(f)))
    }
}

/// Additive descent datum `(δ⁰, δ¹, δ²)`.
#[derive(Clone, Debug)]
pub struct AddDatum<C: ChartCarrier> {
    pub logs: DescentLogs<C>,
}

/// Multiplicative descent datum: local deformations `A_k`, edge gauge
/// transformations `exp(γ)` and triangle units `exp(α)`, all stored through
/// logarithms.
#[derive(Clone, Debug)]
pub struct MddDatum<C: DescentCarrier> {
    pub logs: DescentLogs<C>,
    pub locals: BTreeMap<usize, C::Local>,
}

impl<C: ChartCarrier> AddDatum<C> {
    pub fn new(logs: DescentLogs<C>) -> Result<Self, DescentError> {
        logs.validate()?;
        Ok(AddDatum { logs })
    }
}

impl<C: DescentCarrier> MddDatum<C> {
    /// Build from logarithms; the local deformations are those of the
    /// vertex MC elements.
    pub fn new(logs: DescentLogs<C>, cert_degree: u32) -> Result<Self, DescentError> {
        logs.validate()?;
        let mut locals = BTreeMap::new();
        for f in logs.nerve().faces(0) {
            let k = f[0];
            let local = C::local(logs.cech.ext(f), &logs.beta(k), cert_degree)
                .map_err(|msg| DescentError::Local { face: logs.nerve().render_face(f), msg })?;
            locals.insert(k, local);
        }
        Ok(MddDatum { logs, locals })
    }
}

/// The multiplicative datum of an additive one: the same logarithms, with
/// the local deformations of the vertex MC elements.
pub fn exp_add<C: DescentCarrier>(d: &AddDatum<C>, cert_degree: u32) -> Result<MddDatum<C>, DescentError> {
    MddDatum::new(d.logs.clone(), cert_degree)
}

impl<C: ChartCarrier> fmt::Display for DescentLogs<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nerve();
        for (name, map) in [("vertex", &self.vertex), ("edge", &self.edge), ("triangle", &self.triangle)] {
            for (face, x) in map {
                writeln!(f, "{} ({}): {}", name, n.render_face(face), self.cech.ext(face).render(x))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
