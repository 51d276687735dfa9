//! Exact solution of equations that are affine in a finite set of rational
//! unknowns, and the order-by-order driver built on it.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::exactalg::{solve_linear, Chart, LinSystem, LocalizedPoly, Mono, Poly, Rational};

/// Residual as a list of coefficient functions keyed by structural position.
pub type Residual = Vec<(Vec<u32>, LocalizedPoly)>;

/// Linear coordinates of a family of residuals: every coefficient function is
/// written over one common denominator and split into numerator monomials.
fn coordinatize(all: &[&Residual]) -> Vec<BTreeMap<(Vec<u32>, Mono), Rational>> {
    // common denominator exponents per chart presentation
    let mut exps: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut charts: Vec<Chart> = Vec::new();
    let chart_id = |c: &Chart, charts: &mut Vec<Chart>| -> usize {
        match charts.iter().position(|d| **d == **c) {
            Some(i) => i,
            None => {
                charts.push(c.clone());
                charts.len() - 1
            }
        }
    };
    for r in all {
        for (_, f) in r.iter() {
            let cid = chart_id(f.chart(), &mut charts);
            for (j, e) in f.denominators() {
                let v = exps.entry((cid, *j)).or_insert(0);
                *v = (*v).max(*e);
            }
        }
    }
    let mut out = Vec::new();
    for r in all {
        let mut m: BTreeMap<(Vec<u32>, Mono), Rational> = BTreeMap::new();
        for (k, f) in r.iter() {
            let cid = chart_id(f.chart(), &mut charts);
            let chart = &charts[cid];
            let mut num: Poly = f.numerator().clone();
            for ((c, j), e) in &exps {
                if *c != cid {
                    continue;
                }
                let have = f.denominators().get(j).cloned().unwrap_or(0);
                if *e > have {
                    num = num.mul(&chart.denoms[*j].pow(e - have));
                }
            }
            let mut key = k.clone();
            key.push(u32::MAX - cid as u32);
            for (mono, c) in num.terms() {
                let e = m.entry((key.clone(), mono.clone())).or_insert_with(Rational::zero);
                *e += c;
            }
        }
        m.retain(|_, v| !v.is_zero());
        out.push(m);
    }
    out
}

#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub x: Vec<Rational>,
    /// Basis of directions leaving the residual unchanged.
    pub kernel: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub enum AffineOutcome {
    Solved(AffineSolution),
    /// No solution; carries the residual at the least-squares-free choice
    /// `x = 0` and the rank of the linear part.
    Inconsistent { residual_at_zero: Residual, rank: usize },
}

/// Solve `F(x) = 0` for `F` affine in `x ∈ Q^n`, given by evaluation.
/// The affinity assumption is verified on the returned solution.
pub fn solve_affine(n: usize, eval: &dyn Fn(&[Rational]) -> Residual) -> AffineOutcome {
    let out = solve_linearized(n, eval);
    if let AffineOutcome::Solved(s) = &out {
        let check = eval(&s.x);
        assert!(residual_is_zero(&check), "residual is not affine in the unknowns");
    }
    out
}

/// Solve the linearization of `F` at zero (exact when `F` is affine).
pub fn solve_linearized(n: usize, eval: &dyn Fn(&[Rational]) -> Residual) -> AffineOutcome {
    let zero = vec![Rational::zero(); n];
    let r0 = eval(&zero);
    let mut cols: Vec<Residual> = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = zero.clone();
        e[i] = Rational::one();
        let mut c = eval(&e);
        for (k, f) in &r0 {
            c.push((k.clone(), f.neg()));
        }
        cols.push(c);
    }
    solve_columns(&r0, &cols)
}

/// Solve `r0 + Σ x_i cols[i] = 0`.
pub fn solve_columns(r0: &Residual, cols: &[Residual]) -> AffineOutcome {
    let n = cols.len();
    let mut refs: Vec<&Residual> = vec![r0];
    refs.extend(cols.iter());
    let coords = coordinatize(&refs);
    let base = &coords[0];
    let mut rows: BTreeMap<(Vec<u32>, Mono), BTreeMap<usize, Rational>> = BTreeMap::new();
    for (i, c) in coords[1..].iter().enumerate() {
        for (k, v) in c {
            rows.entry(k.clone()).or_default().insert(i, v.clone());
        }
    }
    for k in base.keys() {
        rows.entry(k.clone()).or_default();
    }
    let mut sys = LinSystem::new(n);
    for (k, row) in rows {
        let rhs = -base.get(&k).cloned().unwrap_or_else(Rational::zero);
        sys.push(row, rhs);
    }
    let sol = solve_linear(&sys);
    match sol.particular {
        Some(x) => AffineOutcome::Solved(AffineSolution { x, kernel: sol.kernel }),
        None => AffineOutcome::Inconsistent { residual_at_zero: r0.clone(), rank: sol.rank },
    }
}

/// True when every coefficient function vanishes after cancellation.
pub fn residual_is_zero(r: &Residual) -> bool {
    coordinatize(&[r])[0].is_empty()
}

/// Failure of an order-by-order solve, with the state reached so far (all
/// orders below `order` solved, order `order` untouched).
#[derive(Clone, Debug)]
pub struct StageFailure<S> {
    pub order: u32,
    pub residual: Residual,
    pub state: S,
}

/// Order-by-order solver. At stage `p` the unknowns are coefficients on the
/// layer-`p` directions plus coefficients on the kernel directions found at
/// stage `p − 1` (so a non-unique earlier choice can still be corrected).
/// `residual(state, p)` must return the order-`p` part of the defect and be
/// affine in the stage unknowns.
pub fn staged_solve<S: Clone, D: Clone>(
    state0: S,
    orders: std::ops::RangeInclusive<u32>,
    layer_dirs: &dyn Fn(u32) -> Vec<D>,
    apply: &dyn Fn(&S, &[(D, Rational)]) -> S,
    residual: &dyn Fn(&S, u32) -> Residual,
) -> Result<S, StageFailure<S>> {
    let mut state = state0;
    let mut prev_kernel: Vec<Vec<(D, Rational)>> = Vec::new();
    for p in orders {
        let dirs = layer_dirs(p);
        let nl = dirs.len();
        let nk = prev_kernel.len();
        let build = |x: &[Rational]| -> Vec<(D, Rational)> {
            let mut combo: Vec<(D, Rational)> = Vec::new();
            for (d, c) in dirs.iter().zip(&x[..nl]) {
                if !c.is_zero() {
                    combo.push((d.clone(), c.clone()));
                }
            }
            for (kv, c) in prev_kernel.iter().zip(&x[nl..]) {
                if c.is_zero() {
                    continue;
                }
                for (d, a) in kv {
                    combo.push((d.clone(), a * c));
                }
            }
            combo
        };
        let eval = |x: &[Rational]| residual(&apply(&state, &build(x)), p);
        if residual_is_zero(&eval(&vec![Rational::zero(); nl + nk])) && nl == 0 {
            prev_kernel = Vec::new();
            continue;
        }
        // earlier-layer directions can enter quadratically (at p = 2); fall
        // back to the new layer alone when the linearization is not exact
        let mut outcome = solve_linearized(nl + nk, &eval);
        let exact = match &outcome {
            AffineOutcome::Solved(sol) => residual_is_zero(&eval(&sol.x)),
            AffineOutcome::Inconsistent { .. } => true,
        };
        if !exact {
            let eval_layer = |x: &[Rational]| {
                let mut full = x.to_vec();
                full.resize(nl + nk, Rational::zero());
                eval(&full)
            };
            let retry = solve_linearized(nl, &eval_layer);
            if let AffineOutcome::Solved(sol) = &retry {
                if !residual_is_zero(&eval_layer(&sol.x)) {
                    panic!("residual is not affine in the layer unknowns");
                }
            }
            outcome = match retry {
                AffineOutcome::Solved(mut sol) => {
                    sol.x.resize(nl + nk, Rational::zero());
                    for v in sol.kernel.iter_mut() {
                        v.resize(nl + nk, Rational::zero());
                    }
                    AffineOutcome::Solved(sol)
                }
                other => other,
            };
        }
        match outcome {
            AffineOutcome::Solved(sol) => {
                state = apply(&state, &build(&sol.x));
                // kernel directions purely in the new layer
                prev_kernel = sol
                    .kernel
                    .iter()
                    .filter(|v| v[nl..].iter().all(|c| c.is_zero()))
                    .map(|v| {
                        dirs.iter().zip(&v[..nl]).filter(|(_, c)| !c.is_zero()).map(|(d, c)| (d.clone(), c.clone())).collect()
                    })
                    .collect();
            }
            AffineOutcome::Inconsistent { residual_at_zero, .. } => {
                return Err(StageFailure { order: p, residual: residual_at_zero, state });
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_expr, qi, ChartData};

    #[test]
    fn affine_in_polynomial_coefficients() {
        let c = ChartData::polynomial(&["x"]);
        // F(a, b) = (a + 2b − 1) x + (a − b) with a common denominator twist
        let eval = |v: &[Rational]| -> Residual {
            let f = parse_expr(&c, "x").unwrap().scale(&(&v[0] + qi(2) * &v[1] - qi(1)));
            let g = LocalizedPoly::constant(&c, &v[0] - &v[1]);
            vec![(vec![0], f), (vec![1], g)]
        };
        match solve_affine(2, &eval) {
            AffineOutcome::Solved(s) => {
                assert_eq!(s.x, vec![crate::exactalg::q(1, 3), crate::exactalg::q(1, 3)]);
                assert!(s.kernel.is_empty());
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn inconsistent_system_reported() {
        let c = ChartData::polynomial(&["x"]);
        let eval = |v: &[Rational]| -> Residual {
            vec![(vec![0], LocalizedPoly::constant(&c, v[0].clone())), (vec![1], LocalizedPoly::constant(&c, &v[0] - qi(1)))]
        };
        assert!(matches!(solve_affine(1, &eval), AffineOutcome::Inconsistent { .. }));
    }
}
