use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// `rows · x = rhs` over the rationals, with `ncols` unknowns.
#[derive(Clone, Debug, Default)]
pub struct LinSystem {
    pub ncols: usize,
    pub rows: Vec<SparseRow>,
    pub rhs: Vec<Rational>,
}

impl LinSystem {
    pub fn new(ncols: usize) -> Self {
        LinSystem { ncols, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn push(&mut self, row: SparseRow, rhs: Rational) {
        let row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if row.is_empty() && rhs.is_zero() {
            return;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }
}

#[derive(Clone, Debug)]
pub struct LinSolution {
    /// A solution with every free variable set to zero, if one exists.
    pub particular: Option<Vec<Rational>>,
    /// Basis of the solution space of the homogeneous system.
    pub kernel: Vec<Vec<Rational>>,
    pub rank: usize,
}

fn axpy(target: &mut SparseRow, c: &Rational, src: &SparseRow) {
    for (k, v) in src {
        let e = target.entry(*k).or_insert_with(Rational::zero);
        *e += c * v;
        if e.is_zero() {
            target.remove(k);
        }
    }
}

/// Gauss-Jordan elimination on a sparse rational system.
pub fn solve_linear(sys: &LinSystem) -> LinSolution {
    let n = sys.ncols;
    // pivot column -> (row, rhs), rows kept fully reduced w.r.t. other pivots
    let mut pivots: BTreeMap<usize, (SparseRow, Rational)> = BTreeMap::new();
    let mut consistent = true;
    for (row, b) in sys.rows.iter().zip(&sys.rhs) {
        let mut r = row.clone();
        let mut b = b.clone();
        // reduce by existing pivots
        let cols: Vec<usize> = r.keys().cloned().filter(|c| pivots.contains_key(c)).collect();
        for c in cols {
            if let Some(coef) = r.get(&c).cloned() {
                let (pr, pb) = &pivots[&c];
                axpy(&mut r, &-coef.clone(), pr);
                b -= coef * pb;
            }
        }
        // a later reduction may reintroduce pivot columns only if pivot rows
        // were not fully reduced; they are, so r is now pivot-free
        let Some((&pc, pv)) = r.iter().next() else {
            if !b.is_zero() {
                consistent = false;
            }
            continue;
        };
        let inv = Rational::one() / pv.clone();
        for v in r.values_mut() {
            *v *= &inv;
        }
        b *= &inv;
        // eliminate pc from existing pivot rows
        for (_, (pr, pb)) in pivots.iter_mut() {
            if let Some(coef) = pr.get(&pc).cloned() {
                axpy(pr, &-coef.clone(), &r);
                *pb -= coef * &b;
            }
        }
        pivots.insert(pc, (r, b));
    }
    let rank = pivots.len();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains_key(c)).collect();
    let particular = if consistent {
        let mut x = vec![Rational::zero(); n];
        for (c, (_, b)) in &pivots {
            x[*c] = b.clone();
        }
        Some(x)
    } else {
        None
    };
    let mut kernel = Vec::new();
    for f in free {
        let mut v = vec![Rational::zero(); n];
        v[f] = Rational::one();
        for (c, (pr, _)) in &pivots {
            if let Some(coef) = pr.get(&f) {
                v[*c] = -coef.clone();
            }
        }
        kernel.push(v);
    }
    LinSolution { particular, kernel, rank }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q, qi};

    fn row(entries: &[(usize, Rational)]) -> SparseRow {
        entries.iter().cloned().collect()
    }

    fn residual(sys: &LinSystem, x: &[Rational]) -> bool {
        sys.rows.iter().zip(&sys.rhs).all(|(r, b)| {
            let s: Rational = r.iter().map(|(c, v)| v * &x[*c]).sum();
            s == *b
        })
    }

    #[test]
    fn unique_solution() {
        let mut s = LinSystem::new(2);
        s.push(row(&[(0, qi(2)), (1, qi(1))]), qi(5));
        s.push(row(&[(0, qi(1)), (1, qi(-1))]), qi(1));
        let sol = solve_linear(&s);
        assert_eq!(sol.particular, Some(vec![qi(2), qi(1)]));
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn inconsistent_detected() {
        let mut s = LinSystem::new(2);
        s.push(row(&[(0, qi(1)), (1, qi(1))]), qi(1));
        s.push(row(&[(0, qi(2)), (1, qi(2))]), qi(3));
        assert!(solve_linear(&s).particular.is_none());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let mut s = LinSystem::new(4);
        s.push(row(&[(0, qi(1)), (2, q(1, 2)), (3, qi(-1))]), qi(3));
        s.push(row(&[(1, qi(1)), (2, qi(2))]), qi(0));
        s.push(row(&[(0, qi(2)), (1, qi(1)), (2, qi(3)), (3, qi(-2))]), qi(6));
        let sol = solve_linear(&s);
        let x = sol.particular.clone().unwrap();
        assert!(residual(&s, &x));
        assert_eq!(sol.rank + sol.kernel.len(), 4);
        let zero = LinSystem { ncols: 4, rows: s.rows.clone(), rhs: vec![qi(0); 3] };
        for k in &sol.kernel {
            assert!(residual(&zero, k));
        }
    }
}
