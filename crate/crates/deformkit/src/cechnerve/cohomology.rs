use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{delete, Face, Nerve, NerveError};
use crate::exactalg::{solve_linear, LinSystem, LocalizedPoly, Mono, Rational, SparseRow};

/// Finite-dimensional coefficient layer on every face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    /// Constant functions.
    Constant,
    /// Polynomials of total degree at most the bound; every restriction must
    /// preserve the bound.
    PolyTruncated(u32),
}

/// A normalized Čech cochain with function values.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub level: usize,
    pub comps: BTreeMap<Face, LocalizedPoly>,
}

impl Cochain {
    pub fn zero(level: usize) -> Self {
        Cochain { level, comps: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|v| v.is_zero())
    }

    pub fn render(&self, nerve: &Nerve) -> String {
        let parts: Vec<String> =
            self.comps.iter().filter(|(_, v)| !v.is_zero()).map(|(f, v)| format!("({}): {}", nerve.render_face(f), v.render())).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("; ")
        }
    }
}

/// The ordered Čech complex of a nerve with coefficients in a layer, in
/// coordinates.
pub struct LayerComplex<'a> {
    nerve: &'a Nerve,
    layer: Layer,
    bases: BTreeMap<Face, Vec<Mono>>,
}

impl<'a> LayerComplex<'a> {
    pub fn new(nerve: &'a Nerve, layer: Layer) -> Result<Self, NerveError> {
        let mut bases = BTreeMap::new();
        for f in nerve.all_faces() {
            let chart = nerve.chart(f);
            let n = chart.nvars();
            let b = match layer {
                Layer::Constant => vec![Mono::one(n)],
                Layer::PolyTruncated(d) => {
                    if !chart.is_polynomial() {
                        return Err(NerveError::NotPolynomial(nerve.render_face(f)));
                    }
                    Mono::all_up_to(n, d)
                }
            };
            bases.insert(f.clone(), b);
        }
        if let Layer::PolyTruncated(d) = layer {
            for f in nerve.all_faces() {
                for i in 0..f.len() {
                    if f.len() < 2 {
                        break;
                    }
                    let s = delete(f, i);
                    let h = nerve.restriction(&s, f);
                    for m in &bases[&s] {
                        let img = h.apply(&LocalizedPoly::monomial(nerve.chart(&s), m));
                        let ok = img.as_poly().and_then(|p| p.total_degree()).map(|e| e <= d).unwrap_or(img.is_zero());
                        if !ok {
                            return Err(NerveError::DegreeNotPreserved { sub: nerve.render_face(&s), face: nerve.render_face(f), degree: d });
                        }
                    }
                }
            }
        }
        Ok(LayerComplex { nerve, layer, bases })
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    fn offsets(&self, p: usize) -> (BTreeMap<Face, usize>, usize) {
        let mut off = BTreeMap::new();
        let mut n = 0;
        for f in self.nerve.faces(p) {
            off.insert(f.clone(), n);
            n += self.bases[f].len();
        }
        (off, n)
    }

    pub fn dim(&self, p: usize) -> usize {
        self.offsets(p).1
    }

    /// Coordinates of a cochain, or `None` if some value leaves the layer.
    pub fn to_vector(&self, c: &Cochain) -> Option<Vec<Rational>> {
        let (off, n) = self.offsets(c.level);
        let mut v = vec![Rational::zero(); n];
        for (f, val) in &c.comps {
            if val.is_zero() {
                continue;
            }
            let o = *off.get(f)?;
            let p = val.as_poly()?;
            for (m, coeff) in p.terms() {
                let j = self.bases[f].iter().position(|b| b == m)?;
                v[o + j] = coeff.clone();
            }
        }
        Some(v)
    }

    pub fn from_vector(&self, p: usize, v: &[Rational]) -> Cochain {
        let (off, _) = self.offsets(p);
        let mut comps = BTreeMap::new();
        for (f, o) in off {
            let chart = self.nerve.chart(&f);
            let mut acc = LocalizedPoly::zero(chart);
            for (j, m) in self.bases[&f].iter().enumerate() {
                if !v[o + j].is_zero() {
                    acc = acc.add(&LocalizedPoly::monomial(chart, m).scale(&v[o + j]));
                }
            }
            if !acc.is_zero() {
                comps.insert(f, acc);
            }
        }
        Cochain { level: p, comps }
    }

    /// `(δc)(k_0..k_{p+1}) = Σ_i (−1)^i c(k_0..k̂_i..k_{p+1})|`.
    pub fn delta(&self, c: &Cochain) -> Cochain {
        let mut comps = BTreeMap::new();
        for f in self.nerve.faces(c.level + 1) {
            let chart = self.nerve.chart(f);
            let mut acc = LocalizedPoly::zero(chart);
            for i in 0..f.len() {
                let s = delete(f, i);
                if let Some(v) = c.comps.get(&s) {
                    let r = self.nerve.restriction(&s, f).apply(v);
                    acc = if i % 2 == 0 { acc.add(&r) } else { acc.sub(&r) };
                }
            }
            if !acc.is_zero() {
                comps.insert(f.clone(), acc);
            }
        }
        Cochain { level: c.level + 1, comps }
    }

    /// Rows of `δ^p` as a linear system in the level-`p` coordinates.
    fn delta_rows(&self, p: usize) -> LinSystem {
        let n = self.dim(p);
        let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            let img = self.to_vector(&self.delta(&self.from_vector(p, &e))).expect("layer is preserved");
            for (i, v) in img.into_iter().enumerate() {
                if !v.is_zero() {
                    rows.entry(i).or_default().insert(j, v);
                }
            }
        }
        let mut sys = LinSystem::new(n);
        for (_, r) in rows {
            sys.push(r, Rational::zero());
        }
        sys
    }

    fn rank(&self, p: usize) -> usize {
        solve_linear(&self.delta_rows(p)).rank
    }

    pub fn betti(&self, p: usize) -> usize {
        let below = if p == 0 { 0 } else { self.rank(p - 1) };
        self.dim(p) - self.rank(p) - below
    }

    /// Cocycles whose classes form a basis of `H^p`.
    pub fn representatives(&self, p: usize) -> Vec<Cochain> {
        let kernel = solve_linear(&self.delta_rows(p)).kernel;
        let n = self.dim(p);
        // columns spanning the image of δ^{p−1}
        let mut span: Vec<Vec<Rational>> = Vec::new();
        if p > 0 {
            let m = self.dim(p - 1);
            for j in 0..m {
                let mut e = vec![Rational::zero(); m];
                e[j] = Rational::one();
                span.push(self.to_vector(&self.delta(&self.from_vector(p - 1, &e))).unwrap());
            }
        }
        let rank_of = |vs: &[Vec<Rational>]| -> usize {
            let mut sys = LinSystem::new(n);
            for v in vs {
                sys.push(v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect(), Rational::zero());
            }
            solve_linear(&sys).rank
        };
        let mut r = rank_of(&span);
        let mut out = Vec::new();
        for k in kernel {
            span.push(k.clone());
            let r2 = rank_of(&span);
            if r2 > r {
                r = r2;
                out.push(self.from_vector(p, &k));
            } else {
                span.pop();
            }
        }
        out
    }

    /// Some `b` with `δb = c`, or `None` if `c` is not a coboundary (or
    /// leaves the layer).
    pub fn solve_coboundary(&self, c: &Cochain) -> Option<Cochain> {
        if c.level == 0 {
            return if c.is_zero() { Some(Cochain::zero(0)) } else { None };
        }
        let target = self.to_vector(c)?;
        let p = c.level - 1;
        let m = self.dim(p);
        let mut cols: Vec<Vec<Rational>> = Vec::new();
        for j in 0..m {
            let mut e = vec![Rational::zero(); m];
            e[j] = Rational::one();
            cols.push(self.to_vector(&self.delta(&self.from_vector(p, &e))).unwrap());
        }
        let mut sys = LinSystem::new(m);
        for (i, t) in target.iter().enumerate() {
            let row: SparseRow = cols.iter().enumerate().filter(|(_, col)| !col[i].is_zero()).map(|(j, col)| (j, col[i].clone())).collect();
            sys.push(row, t.clone());
        }
        solve_linear(&sys).particular.map(|x| self.from_vector(p, &x))
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub betti: Vec<usize>,
    pub representatives: Vec<Vec<Cochain>>,
}

/// Betti numbers and representative cocycles in every degree of the nerve.
pub fn cech_cohomology(nerve: &Nerve, layer: Layer) -> Result<CohomologyReport, NerveError> {
    let cx = LayerComplex::new(nerve, layer)?;
    let top = nerve.dim();
    let betti = (0..=top).map(|p| cx.betti(p)).collect();
    let representatives = (0..=top).map(|p| cx.representatives(p)).collect();
    Ok(CohomologyReport { betti, representatives })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exactalg::{parse_expr, ChartData};

    /// Independent oracle: ranks of the simplicial boundary matrices with
    /// integer entries, via plain Gaussian elimination on f64-free rationals.
    fn simplicial_betti(faces: &[Vec<Face>]) -> Vec<usize> {
        let rank = |p: usize| -> usize {
            if p + 1 >= faces.len() {
                return 0;
            }
            let mut m: Vec<Vec<Rational>> = faces[p + 1]
                .iter()
                .map(|f| {
                    faces[p]
                        .iter()
                        .map(|g| match (0..f.len()).find(|&i| delete(f, i) == *g) {
                            Some(i) if i % 2 == 0 => Rational::one(),
                            Some(_) => -Rational::one(),
                            None => Rational::zero(),
                        })
                        .collect()
                })
                .collect();
            let mut r = 0;
            let cols = faces[p].len();
            for c in 0..cols {
                if let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) {
                    m.swap(r, piv);
                    for i in 0..m.len() {
                        if i != r && !m[i][c].is_zero() {
                            let f = &m[i][c] / &m[r][c];
                            let row = m[r].clone();
                            for (a, b) in m[i].iter_mut().zip(row) {
                                *a -= &f * b;
                            }
                        }
                    }
                    r += 1;
                }
            }
            r
        };
        (0..faces.len()).map(|p| faces[p].len() - rank(p) - if p == 0 { 0 } else { rank(p - 1) }).collect()
    }

    #[test]
    fn octahedron_is_a_sphere() {
        let c = ChartData::polynomial(&[]);
        let n = Nerve::octahedron(&c);
        assert_eq!((n.faces(0).len(), n.faces(1).len(), n.faces(2).len()), (6, 12, 8));
        let rep = cech_cohomology(&n, Layer::Constant).unwrap();
        assert_eq!(rep.betti, vec![1, 0, 1]);
        let faces: Vec<Vec<Face>> = (0..=2).map(|p| n.faces(p).to_vec()).collect();
        assert_eq!(simplicial_betti(&faces), rep.betti);
        assert_eq!(n.euler_characteristic(), 2);
    }

    #[test]
    fn one_chart_is_concentrated_in_degree_zero() {
        let c = ChartData::polynomial(&["x", "y"]);
        let n = Nerve::full(&["U"], &c);
        let rep = cech_cohomology(&n, Layer::PolyTruncated(2)).unwrap();
        assert_eq!(rep.betti, vec![6]);
        let n3 = Nerve::full(&["A", "B", "C"], &c);
        assert_eq!(cech_cohomology(&n3, Layer::PolyTruncated(1)).unwrap().betti, vec![3, 0, 0]);
    }

    #[test]
    fn coboundary_round_trip() {
        let c = ChartData::polynomial(&[]);
        let n = Nerve::octahedron(&c);
        let cx = LayerComplex::new(&n, Layer::Constant).unwrap();
        let b = cx.from_vector(1, &(0..12).map(|i| Rational::from_integer((i * 7 % 5 - 2).into())).collect::<Vec<_>>());
        let c2 = cx.delta(&b);
        let got = cx.solve_coboundary(&c2).unwrap();
        assert_eq!(cx.delta(&got), c2);
        let gen = &cx.representatives(2)[0];
        assert!(cx.delta(gen).is_zero());
        assert!(cx.solve_coboundary(gen).is_none());
    }

    #[test]
    fn localized_restriction_is_rejected_for_truncated_layers() {
        let u0 = ChartData::polynomial(&["x"]);
        let u1 = ChartData::polynomial(&["y"]);
        let y = parse_expr(&u1, "y").unwrap();
        let u01 = ChartData::localized(&["y"], vec![y.numerator().clone()]);
        let h0 = crate::exactalg::ChartHom::new(&u0, &u01, vec![parse_expr(&u01, "1/y").unwrap()]).unwrap();
        let n = Arc::new(
            Nerve::new(vec!["U0".into(), "U1".into()], vec![(vec![0], u0), (vec![1], u1), (vec![0, 1], u01)], vec![(vec![0], vec![0, 1], h0)])
                .unwrap(),
        );
        assert!(matches!(LayerComplex::new(&n, Layer::PolyTruncated(1)), Err(NerveError::NotPolynomial(_))));
        assert_eq!(cech_cohomology(&n, Layer::Constant).unwrap().betti, vec![1, 0]);
    }
}
