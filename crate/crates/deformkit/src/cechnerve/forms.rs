//! Polynomial differential forms on the standard simplex `Δ^q`, written in
//! the coordinates `t_1..t_q` (with `t_0 = 1 − Σ t_i` eliminated).

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::exactalg::{factorial, Mono, Poly, Rational};

/// Form on `Δ^q`: coefficient polynomials in `t_1..t_q` keyed by increasing
/// index sets of `dt_1..dt_q` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexForm {
    pub q: usize,
    pub terms: BTreeMap<Vec<u8>, Poly>,
}

/// `dt_a ∧ dt_b` on sorted sets: sign and merged set, `None` if a factor repeats.
pub(crate) fn wedge_sets(a: &[u8], b: &[u8]) -> Option<(bool, Vec<u8>)> {
    crate::polyvec::theta_mul(a, b)
}

fn push(terms: &mut BTreeMap<Vec<u8>, Poly>, k: Vec<u8>, p: Poly) {
    if p.is_zero() {
        return;
    }
    let e = terms.entry(k.clone()).or_insert_with(|| Poly::zero(p.nvars()));
    *e = e.add(&p);
    if e.is_zero() {
        terms.remove(&k);
    }
}

impl SimplexForm {
    pub fn zero(q: usize) -> Self {
        SimplexForm { q, terms: BTreeMap::new() }
    }

    /// Function `f(t_1..t_q)`.
    pub fn function(q: usize, f: Poly) -> Self {
        let mut s = Self::zero(q);
        push(&mut s.terms, vec![], f);
        s
    }

    pub fn constant(q: usize, c: Rational) -> Self {
        Self::function(q, Poly::constant(q, c))
    }

    /// `t_i` for `i ∈ 0..=q` (with `t_0 = 1 − Σ t_j`).
    pub fn coordinate(q: usize, i: usize) -> Self {
        Self::function(q, coordinate_poly(q, i))
    }

    /// `t^a dt_I` with `a` over `t_1..t_q` and `I` 1-based indices.
    pub fn monomial(q: usize, a: &[u32], dts: &[usize]) -> Self {
        let mut s = Self::function(q, Poly::monomial(q, Mono(a.to_vec()), Rational::one()));
        for &i in dts {
            s = s.wedge(&Self::dt(q, i));
        }
        s
    }

    /// `dt_i` for `i ∈ 0..=q`.
    pub fn dt(q: usize, i: usize) -> Self {
        let mut s = Self::zero(q);
        if i == 0 {
            for j in 0..q {
                push(&mut s.terms, vec![j as u8], Poly::constant(q, -Rational::one()));
            }
        } else {
            push(&mut s.terms, vec![(i - 1) as u8], Poly::one(q));
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Homogeneous form degree; `None` for zero or mixed degree.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|k| k.len());
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn part(&self, r: usize) -> SimplexForm {
        SimplexForm { q: self.q, terms: self.terms.iter().filter(|(k, _)| k.len() == r).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub fn add(&self, other: &SimplexForm) -> SimplexForm {
        assert_eq!(self.q, other.q);
        let mut t = self.terms.clone();
        for (k, v) in &other.terms {
            push(&mut t, k.clone(), v.clone());
        }
        SimplexForm { q: self.q, terms: t }
    }

    pub fn scale(&self, c: &Rational) -> SimplexForm {
        if c.is_zero() {
            return Self::zero(self.q);
        }
        SimplexForm { q: self.q, terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect() }
    }

    pub fn neg(&self) -> SimplexForm {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &SimplexForm) -> SimplexForm {
        self.add(&other.neg())
    }

    pub fn wedge(&self, other: &SimplexForm) -> SimplexForm {
        assert_eq!(self.q, other.q);
        let mut t = BTreeMap::new();
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if let Some((neg, k)) = wedge_sets(a, b) {
                    let p = f.mul(g);
                    push(&mut t, k, if neg { p.neg() } else { p });
                }
            }
        }
        SimplexForm { q: self.q, terms: t }
    }

    /// de Rham differential.
    pub fn d(&self) -> SimplexForm {
        let mut t = BTreeMap::new();
        for (a, f) in &self.terms {
            for j in 0..self.q {
                let df = f.derivative(j);
                if df.is_zero() {
                    continue;
                }
                if let Some((neg, k)) = wedge_sets(&[j as u8], a) {
                    push(&mut t, k, if neg { df.neg() } else { df });
                }
            }
        }
        SimplexForm { q: self.q, terms: t }
    }

    /// `∫_{Δ^q}` of the top-degree part, using
    /// `∫ t^a dt_1…dt_q = Π a_i! / (q + |a|)!`.
    pub fn integrate(&self) -> Result<Rational, FormError> {
        if let Some(d) = self.degree() {
            if d != self.q {
                return Err(FormError::NotTopDegree { q: self.q, got: d });
            }
        } else if !self.is_zero() {
            return Err(FormError::NotTopDegree { q: self.q, got: self.terms.keys().map(|k| k.len()).min().unwrap() });
        }
        Ok(self.integrate_top())
    }

    fn integrate_top(&self) -> Rational {
        let key: Vec<u8> = (0..self.q as u8).collect();
        let mut acc = Rational::zero();
        if let Some(p) = self.terms.get(&key) {
            for (m, c) in p.terms() {
                let num: Rational = m.0.iter().map(|e| factorial(*e)).product();
                acc += c * num / factorial(self.q as u32 + m.degree());
            }
        }
        acc
    }

    /// Fibre integration of the top-degree part only, ignoring lower parts.
    pub fn integrate_top_part(&self) -> Rational {
        self.integrate_top()
    }

    /// Pull back along the simplicial map `Δ^m → Δ^q` induced by an
    /// order-preserving `α: [m] → [q]`: `t_i ↦ Σ_{α(j) = i} s_j`.
    pub fn pullback(&self, alpha: &[usize]) -> SimplexForm {
        let m = alpha.len() - 1;
        assert!(alpha.windows(2).all(|w| w[0] <= w[1]) && alpha.iter().all(|&i| i <= self.q));
        // images of t_1..t_q as polynomials in s_1..s_m
        let s = |j: usize| coordinate_poly(m, j);
        let mut img: Vec<Poly> = vec![Poly::zero(m); self.q + 1];
        let mut dimg: Vec<SimplexForm> = vec![SimplexForm::zero(m); self.q + 1];
        for (j, &i) in alpha.iter().enumerate() {
            img[i] = img[i].add(&s(j));
            dimg[i] = dimg[i].add(&SimplexForm::dt(m, j));
        }
        let mut out = SimplexForm::zero(m);
        for (k, f) in &self.terms {
            let mut t = SimplexForm::function(m, f.compose(&img[1..], m));
            for &i in k {
                t = t.wedge(&dimg[i as usize + 1]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Evaluate the 0-form part at a vertex.
    pub fn at_vertex(&self, v: usize) -> Rational {
        let mut pt = vec![Rational::zero(); self.q];
        if v > 0 {
            pt[v - 1] = Rational::one();
        }
        self.terms.get(&vec![]).map(|p| p.eval(&pt)).unwrap_or_else(Rational::zero)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names: Vec<String> = (1..=self.q).map(|i| format!("t{}", i)).collect();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, p)| {
                let dts: Vec<String> = k.iter().map(|i| format!("dt{}", i + 1)).collect();
                if dts.is_empty() {
                    p.render(&names)
                } else {
                    format!("({})*{}", p.render(&names), dts.join("^"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// `t_i` as a polynomial in `t_1..t_q`.
pub fn coordinate_poly(q: usize, i: usize) -> Poly {
    if i == 0 {
        let mut p = Poly::one(q);
        for j in 0..q {
            p = p.sub(&Poly::var(q, j));
        }
        p
    } else {
        Poly::var(q, i - 1)
    }
}

/// Coface `∂^i: [q−1] → [q]` skipping `i`.
pub fn coface(q: usize, i: usize) -> Vec<usize> {
    (0..=q).filter(|&j| j != i).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("integration over Δ^{q} needs a form of degree {q}, got {got}")]
    NotTopDegree { q: usize, got: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q as rat, qi};

    /// `∫_0^{1−Σ} … ` by nested one-variable integration of a polynomial in
    /// `t_1..t_q` over the simplex.
    fn iterated(q: usize, p: &Poly) -> Rational {
        // integrate out t_q from 0 to 1 − t_1 − … − t_{q−1}, then recurse
        if q == 0 {
            return p.eval(&[]);
        }
        let mut acc = Poly::zero(q - 1);
        let upper = {
            let mut u = Poly::one(q - 1);
            for j in 0..q - 1 {
                u = u.sub(&Poly::var(q - 1, j));
            }
            u
        };
        for (m, c) in p.terms() {
            let e = m.0[q - 1];
            let rest = Poly::monomial(q - 1, Mono(m.0[..q - 1].to_vec()), c / qi(e as i64 + 1));
            acc = acc.add(&rest.mul(&upper.pow(e + 1)));
        }
        iterated(q - 1, &acc)
    }

    #[test]
    fn volume_is_inverse_factorial() {
        for q in 1..=4 {
            let top = SimplexForm::monomial(q, &vec![0; q], &(1..=q).collect::<Vec<_>>());
            assert_eq!(top.integrate().unwrap(), Rational::one() / factorial(q as u32));
        }
    }

    #[test]
    fn elementary_integrals() {
        assert_eq!(SimplexForm::monomial(1, &[1], &[1]).integrate().unwrap(), rat(1, 2));
        let f = SimplexForm::coordinate(2, 0).wedge(&SimplexForm::coordinate(2, 1)).wedge(&SimplexForm::monomial(2, &[0, 0], &[1, 2]));
        assert_eq!(f.integrate().unwrap(), rat(1, 24));
        assert!(SimplexForm::coordinate(2, 1).integrate().is_err());
    }

    #[test]
    fn dirichlet_matches_iterated() {
        for q in 1..=3 {
            for m in Mono::all_up_to(q, 4) {
                let f = SimplexForm::monomial(q, &m.0, &(1..=q).collect::<Vec<_>>());
                let p = Poly::monomial(q, m.clone(), Rational::one());
                assert_eq!(f.integrate().unwrap(), iterated(q, &p), "q={} a={:?}", q, m.0);
            }
        }
    }

    #[test]
    fn differential_basics() {
        assert_eq!(SimplexForm::coordinate(2, 1).d(), SimplexForm::dt(2, 1));
        let w = SimplexForm::monomial(3, &[1, 2, 0], &[3]);
        assert!(w.d().d().is_zero());
        // vertex pullback kills 1-forms
        assert!(SimplexForm::dt(1, 1).pullback(&[1]).is_zero());
        assert_eq!(SimplexForm::dt(1, 1).pullback(&[0, 1]), SimplexForm::dt(1, 1));
    }

    #[test]
    fn stokes_on_a_sample() {
        let w = SimplexForm::monomial(2, &[2, 1], &[1]).add(&SimplexForm::monomial(2, &[0, 3], &[2]));
        let lhs = w.d().integrate().unwrap();
        let mut rhs = Rational::zero();
        for i in 0..=2 {
            let v = w.pullback(&coface(2, i)).integrate().unwrap();
            rhs += if i % 2 == 0 { v } else { -v };
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_is_functorial() {
        let w = SimplexForm::monomial(3, &[1, 0, 2], &[2]).add(&SimplexForm::monomial(3, &[0, 1, 0], &[]));
        let a = [0, 2, 3];
        let b = [1, 2];
        let comp: Vec<usize> = b.iter().map(|&j| a[j]).collect();
        assert_eq!(w.pullback(&a).pullback(&b), w.pullback(&comp));
        // degeneracy then face
        let s = [0, 0, 1];
        assert_eq!(SimplexForm::coordinate(1, 1).pullback(&s), SimplexForm::coordinate(2, 2));
    }
}
