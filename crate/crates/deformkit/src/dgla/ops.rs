use num_traits::{One, Zero};

use super::{Dgla, DglaError, Filtered};
use crate::exactalg::{binomial, factorial, qi, Rational};

/// `d(beta) + 1/2 [beta, beta]`.
pub fn mc_expr<G: Dgla>(g: &G, beta: &G::Elem) -> G::Elem {
    let br = g.bracket(beta, beta);
    g.add(&g.d(beta), &g.scale(&br, &(Rational::one() / qi(2))))
}

#[derive(Clone, Debug)]
pub struct McReport<E> {
    pub holds: bool,
    /// Lowest adic order at which the MC expression is nonzero.
    pub lowest_order: Option<u32>,
    /// The MC expression itself.
    pub residue: E,
}

pub fn mc_check<G: Filtered>(g: &G, beta: &G::Elem) -> Result<McReport<G::Elem>, DglaError> {
    if g.degree(beta) != 1 {
        return Err(DglaError::WrongDegree { expected: 1, got: g.degree(beta) });
    }
    if g.adic_order(beta) == Some(0) {
        return Err(DglaError::NotInIdeal);
    }
    let r = mc_expr(g, beta);
    let lowest = g.adic_order(&r);
    Ok(McReport { holds: lowest.is_none(), lowest_order: lowest, residue: r })
}

/// `exp(ad x)(y) = Σ ad_x^k(y)/k!` for `x` of adic order at least one.
pub fn exp_ad<G: Filtered>(g: &G, x: &G::Elem, y: &G::Elem) -> G::Elem {
    if g.is_zero(x) {
        return y.clone();
    }
    assert!(g.adic_order(x).unwrap_or(1) >= 1, "exponent must lie in the maximal ideal");
    let mut acc = y.clone();
    let mut term = y.clone();
    let mut k = 1i64;
    loop {
        term = g.scale(&g.bracket(x, &term), &(Rational::one() / qi(k)));
        if g.is_zero(&term) {
            return acc;
        }
        acc = g.add(&acc, &term);
        k += 1;
    }
}

/// Gauge action of `exp(gamma)` on a degree-1 element: the time-one flow of
/// `beta ↦ [gamma, beta] − d(gamma)`, i.e.
/// `Σ ad^k(beta)/k! − Σ ad^k(d gamma)/(k+1)!`.
pub fn gauge_act<G: Filtered>(g: &G, gamma: &G::Elem, beta: &G::Elem) -> G::Elem {
    assert_eq!(g.degree(gamma), 0, "gauge logarithm must have degree 0");
    if g.is_zero(gamma) {
        return beta.clone();
    }
    assert!(g.adic_order(gamma).unwrap_or(1) >= 1, "gauge logarithm must lie in the maximal ideal");
    let first = exp_ad(g, gamma, beta);
    let dg = g.d(gamma);
    let mut acc = g.zero(g.degree(beta));
    let mut term = dg;
    let mut k = 1i64;
    while !g.is_zero(&term) {
        acc = g.add(&acc, &g.scale(&term, &(Rational::one() / factorial(k as u32))));
        term = g.bracket(gamma, &term);
        k += 1;
    }
    g.sub(&first, &acc)
}

/// `d_beta = d + ad(beta)`.
pub fn twisted_d<G: Dgla>(g: &G, beta: &G::Elem, x: &G::Elem) -> G::Elem {
    g.add(&g.d(x), &g.bracket(beta, x))
}

/// `[a1, a2]_beta = [d_beta a1, a2]` on degree −1 elements.
pub fn twisted_bracket<G: Dgla>(g: &G, beta: &G::Elem, a1: &G::Elem, a2: &G::Elem) -> Result<G::Elem, DglaError> {
    for a in [a1, a2] {
        if g.degree(a) != -1 {
            return Err(DglaError::WrongDegree { expected: -1, got: g.degree(a) });
        }
    }
    Ok(g.bracket(&twisted_d(g, beta, a1), a2))
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = −1/2`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::zero(); n + 1];
    b[0] = Rational::one();
    for m in 1..=n {
        let mut s = Rational::zero();
        for k in 0..m {
            s += binomial(m as u32 + 1, k as u32) * &b[k];
        }
        b[m] = -s / qi(m as i64 + 1);
    }
    b
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(parts - 1) {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Baker–Campbell–Hausdorff series `log(exp x exp y)` for an arbitrary Lie
/// bracket, by the recursion on homogeneous components. `max_n` bounds the
/// number of letters; components beyond it vanish by truncation.
pub fn bch_with<G: Dgla>(
    g: &G,
    x: &G::Elem,
    y: &G::Elem,
    max_n: u32,
    br: &dyn Fn(&G::Elem, &G::Elem) -> G::Elem,
) -> G::Elem {
    if g.is_zero(x) {
        return y.clone();
    }
    if g.is_zero(y) {
        return x.clone();
    }
    let deg = g.degree(x);
    let b = bernoulli(max_n as usize + 1);
    let xpy = g.add(x, y);
    let xmy = g.sub(x, y);
    let mut z: Vec<G::Elem> = vec![g.zero(deg), xpy.clone()];
    for n in 1..max_n as usize {
        let mut next = g.scale(&br(&xmy, &z[n]), &(Rational::one() / qi(2)));
        for p in 1..=n / 2 {
            let coef = &b[2 * p] / factorial(2 * p as u32);
            if coef.is_zero() {
                continue;
            }
            for ks in compositions(n, 2 * p) {
                if ks.iter().any(|k| g.is_zero(&z[*k])) {
                    continue;
                }
                let mut t = xpy.clone();
                for k in ks.iter().rev() {
                    t = br(&z[*k], &t);
                    if g.is_zero(&t) {
                        break;
                    }
                }
                if !g.is_zero(&t) {
                    next = g.add(&next, &g.scale(&t, &coef));
                }
            }
        }
        z.push(g.scale(&next, &(Rational::one() / qi(n as i64 + 1))));
    }
    g.sum(deg, z.iter())
}

/// BCH product of degree-0 logarithms.
pub fn bch<G: Filtered>(g: &G, x: &G::Elem, y: &G::Elem) -> G::Elem {
    bch_with(g, x, y, g.top_order(), &|a, b| g.bracket(a, b))
}

/// BCH product in the twisted Lie algebra of degree −1 elements.
pub fn bch_twisted<G: Filtered>(g: &G, beta: &G::Elem, x: &G::Elem, y: &G::Elem) -> G::Elem {
    bch_with(g, x, y, g.top_order(), &|a, b| g.bracket(&twisted_d(g, beta, a), b))
}

/// Logarithm of the inverse group element.
pub fn inverse_log<G: Dgla>(g: &G, x: &G::Elem) -> G::Elem {
    g.neg(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(6);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], qi(0));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[6], q(1, 42));
    }

    #[test]
    fn composition_counts() {
        // C(n-1, k-1)
        assert_eq!(compositions(5, 2).len(), 4);
        assert_eq!(compositions(6, 3).len(), 10);
        assert_eq!(compositions(2, 3).len(), 0);
    }
}
