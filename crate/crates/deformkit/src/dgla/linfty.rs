use std::collections::BTreeMap;

use super::{mc_check, Dgla, DglaError, Ext, ExtElem, McReport};
use crate::exactalg::{factorial, Rational};

/// Components `Psi_1..Psi_M` of an L∞ morphism between two DG Lie algebras
/// over the rationals, given on degree-1 arguments.
pub trait LInftyMorphism<S: Dgla, T: Dgla> {
    fn arity_bound(&self) -> usize;
    /// `Psi_i(args)` with `i = args.len()`.
    fn component(&self, args: &[&S::Elem]) -> T::Elem;
}

pub struct IdentityMorphism;

impl<S: Dgla> LInftyMorphism<S, S> for IdentityMorphism {
    fn arity_bound(&self) -> usize {
        1
    }

    fn component(&self, args: &[&S::Elem]) -> S::Elem {
        args[0].clone()
    }
}

pub struct LInftyResult<E> {
    pub image: E,
    pub report: McReport<E>,
}

/// `Σ_i Psi_i(beta, …, beta)/i!`, R-multilinearly extended, followed by an
/// MC check in the target.
pub fn linfty_apply<S: Dgla, T: Dgla, M: LInftyMorphism<S, T>>(
    psi: &M,
    source: &Ext<S>,
    target: &Ext<T>,
    beta: &ExtElem<S::Elem>,
) -> Result<LInftyResult<ExtElem<T::Elem>>, DglaError> {
    if beta.deg != 1 {
        return Err(DglaError::WrongDegree { expected: 1, got: beta.deg });
    }
    let params = &source.params;
    let comps: Vec<(usize, &S::Elem)> = beta.comps.iter().map(|(i, v)| (*i, v)).collect();
    let mut out: BTreeMap<usize, T::Elem> = BTreeMap::new();
    for arity in 1..=psi.arity_bound() {
        let w = Rational::from_integer(1.into()) / factorial(arity as u32);
        // ordered tuples of components; symmetric weights come out automatically
        let mut idx = vec![0usize; arity];
        'outer: loop {
            let mut basis = Some(0usize);
            for &k in &idx {
                basis = basis.and_then(|b| params.mult(b, comps[k].0));
            }
            if let Some(b) = basis {
                let args: Vec<&S::Elem> = idx.iter().map(|&k| comps[k].1).collect();
                let v = target.base.scale(&psi.component(&args), &w);
                if !target.base.is_zero(&v) {
                    let e = out.entry(b).or_insert_with(|| target.base.zero(1));
                    *e = target.base.add(e, &v);
                }
            }
            let mut pos = 0;
            loop {
                if pos == arity {
                    break 'outer;
                }
                idx[pos] += 1;
                if idx[pos] < comps.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if comps.is_empty() {
                break;
            }
        }
        if comps.is_empty() {
            break;
        }
    }
    out.retain(|_, v| !target.base.is_zero(v));
    let image = ExtElem { deg: 1, comps: out };
    let report = mc_check(target, &image)?;
    Ok(LInftyResult { image, report })
}
