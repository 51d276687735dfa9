use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exactalg::{factorial, Chart, LocalizedPoly, Mono, Rational};

/// `Σ_α g_α ∂^α` on a chart algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    pub chart: Chart,
    pub terms: BTreeMap<Mono, LocalizedPoly>,
}

/// All ways to split a multi-index `alpha` into `k` ordered parts, with the
/// multinomial coefficient `alpha! / Π parts!`.
pub fn splittings(alpha: &Mono, k: usize) -> Vec<(Vec<Mono>, Rational)> {
    let n = alpha.0.len();
    let mut out: Vec<(Vec<Vec<u32>>, Rational)> = vec![(vec![vec![0; n]; k], factorial(0))];
    for v in 0..n {
        let a = alpha.0[v];
        let mut next = Vec::new();
        for (parts, c) in &out {
            for dist in distributions(a, k) {
                let mut p = parts.clone();
                let mut coef = c.clone();
                for (j, e) in dist.iter().enumerate() {
                    p[j][v] = *e;
                    coef /= factorial(*e);
                }
                next.push((p, coef));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(p, c)| {
            let mut coef = c;
            for v in 0..n {
                coef *= factorial(alpha.0[v]);
            }
            (p.into_iter().map(Mono).collect(), coef)
        })
        .collect()
}

/// Nonnegative integer vectors of length `k` summing to `a`.
fn distributions(a: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if a == 0 { vec![vec![]] } else { vec![] };
    }
    if k == 1 {
        return vec![vec![a]];
    }
    let mut out = Vec::new();
    for first in 0..=a {
        for mut rest in distributions(a - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub(crate) fn mono_add(a: &Mono, b: &Mono) -> Mono {
    a.mul(b)
}

impl DiffOp {
    pub fn zero(chart: &Chart) -> Self {
        DiffOp { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn identity(chart: &Chart) -> Self {
        let mut d = Self::zero(chart);
        d.terms.insert(Mono::one(chart.nvars()), LocalizedPoly::one(chart));
        d
    }

    pub fn add_term(&mut self, m: Mono, c: LocalizedPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = e.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero(&self.chart);
        }
        DiffOp { chart: self.chart.clone(), terms: self.terms.iter().map(|(m, v)| (m.clone(), v.scale(c))).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(&self.chart);
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                for (parts, coef) in splittings(a, 2) {
                    let dq = q.derivative_multi(&parts[0].0);
                    if dq.is_zero() {
                        continue;
                    }
                    out.add_term(mono_add(&parts[1], b), p.mul(&dq).scale(&coef));
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &LocalizedPoly) -> LocalizedPoly {
        let mut acc = LocalizedPoly::zero(&self.chart);
        for (a, g) in &self.terms {
            let d = f.derivative_multi(&a.0);
            if !d.is_zero() {
                acc = acc.add(&g.mul(&d));
            }
        }
        acc
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_expr, qi, ChartData};

    #[test]
    fn splitting_counts_and_weights() {
        let a = Mono(vec![2, 1]);
        let s = splittings(&a, 2);
        assert_eq!(s.len(), 3 * 2);
        // Σ multinomials = k^{|a|}
        let total: Rational = s.iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, qi(8));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let c = ChartData::polynomial(&["x", "y"]);
        let mut p = DiffOp::zero(&c);
        p.add_term(Mono(vec![1, 0]), parse_expr(&c, "x*y").unwrap());
        p.add_term(Mono(vec![0, 2]), parse_expr(&c, "x").unwrap());
        let mut q = DiffOp::zero(&c);
        q.add_term(Mono(vec![1, 1]), parse_expr(&c, "y^2").unwrap());
        q.add_term(Mono(vec![2, 0]), parse_expr(&c, "1 + x").unwrap());
        let f = parse_expr(&c, "x^3*y^3 + x*y^4").unwrap();
        assert_eq!(p.compose(&q).apply(&f), p.apply(&q.apply(&f)));
    }
}
