//! Seeded generators for test data: elements, MC elements, gauge
//! transformations, Thom–Sullivan MC elements and descent data.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AddDatum, DescentCarrier, DescentLogs, Transformation};
use crate::cechnerve::{CechDgla, Cochain, FormKey, Layer, LayerComplex, TsDgla, TsElem};
use crate::dgla::{gauge_act, ChartCarrier, Dgla, Ext, ExtElem};
use crate::exactalg::{q, Chart, LocalizedPoly, Mono, Rational};
use crate::polydiff::{moyal, PolyDiff};
use crate::polyvec::Polyvec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational with numerator in ±1..=3 and denominator in 1..=3.
pub fn small_rational(rng: &mut dyn RngCore) -> Rational {
    let n: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    q(n, rng.gen_range(1..=3))
}

pub fn random_poly(rng: &mut dyn RngCore, chart: &Chart, max_deg: u32, terms: usize) -> LocalizedPoly {
    let monos = Mono::all_up_to(chart.nvars(), max_deg);
    let mut acc = LocalizedPoly::zero(chart);
    for _ in 0..terms {
        let m = &monos[rng.gen_range(0..monos.len())];
        acc = acc.add(&LocalizedPoly::monomial(chart, m).scale(&small_rational(rng)));
    }
    acc
}

/// Sum of `terms` random multiples of ansatz elements.
pub fn random_elem<C: ChartCarrier>(rng: &mut dyn RngCore, c: &C, deg: i32, poly_bound: u32, order_bound: u32, terms: usize) -> C::Elem {
    let a = c.ansatz(deg, poly_bound, order_bound);
    let mut acc = c.zero(deg);
    if a.is_empty() {
        return acc;
    }
    for _ in 0..terms {
        let x = &a[rng.gen_range(0..a.len())];
        acc = c.add(&acc, &c.scale(x, &small_rational(rng)));
    }
    acc
}

/// Random element of the maximal ideal: one random internal element on
/// each basis index of adic order in `min_order..=top`.
pub fn random_ext<C: ChartCarrier>(
    rng: &mut dyn RngCore,
    ext: &Ext<C>,
    deg: i32,
    poly_bound: u32,
    order_bound: u32,
    terms: usize,
    min_order: u32,
) -> ExtElem<C::Elem> {
    let mut acc = ext.zero(deg);
    for i in 0..ext.params.dim() {
        let o = ext.params.basis_order(i);
        if o < min_order.max(1) {
            continue;
        }
        let x = random_elem(rng, &ext.base, deg, poly_bound, order_bound, terms);
        acc = ext.add(&acc, &ext.basis_tensor(i, &x));
    }
    acc
}

/// Carriers with a family of easily produced MC elements.
pub trait SeedMc: DescentCarrier {
    /// An MC element with constant-rank leading term, before any gauge.
    fn seed_mc(rng: &mut dyn RngCore, ext: &Ext<Self>) -> ExtElem<Self::Elem>;
}

impl SeedMc for Polyvec {
    // every multiple of ∂0∧∂1 is Poisson
    fn seed_mc(rng: &mut dyn RngCore, ext: &Ext<Polyvec>) -> ExtElem<Self::Elem> {
        let pv = &ext.base;
        let mut acc = ext.zero(1);
        if pv.nvars() < 2 {
            return acc;
        }
        for i in 1..ext.params.dim() {
            let f = random_poly(rng, pv.chart(), 1, 2);
            acc = ext.add(&acc, &ext.basis_tensor(i, &pv.term(&f, &[0, 1])));
        }
        acc
    }
}

impl SeedMc for PolyDiff {
    fn seed_mc(rng: &mut dyn RngCore, ext: &Ext<PolyDiff>) -> ExtElem<Self::Elem> {
        let n = ext.base.nvars();
        if n < 2 {
            return ext.zero(1);
        }
        let c = small_rational(rng);
        let mut m = vec![vec![Rational::zero(); n]; n];
        m[0][1] = c.clone();
        m[1][0] = -c;
        moyal(ext, &m)
    }
}

/// Random degree-0 gauge logarithm with polynomial coefficients of degree
/// at most 1 and operator order at most 1.
pub fn random_gauge<C: ChartCarrier>(rng: &mut dyn RngCore, ext: &Ext<C>) -> ExtElem<C::Elem> {
    random_ext(rng, ext, 0, 1, 1, 2, 1)
}

/// A seeded MC element moved by a random gauge transformation.
pub fn random_mc<C: SeedMc>(rng: &mut dyn RngCore, ext: &Ext<C>) -> ExtElem<C::Elem> {
    let b = C::seed_mc(rng, ext);
    gauge_act(ext, &random_gauge(rng, ext), &b)
}

/// `β + r z` with `β` MC, `r` a random element of adic order `p` and `z`
/// random of degree 1. Usually not MC; the failing order is found by the
/// caller.
pub fn perturbed_mc<C: SeedMc>(rng: &mut dyn RngCore, ext: &Ext<C>, p: u32) -> ExtElem<C::Elem> {
    let b = random_mc(rng, ext);
    let idx: Vec<usize> = (0..ext.params.dim()).filter(|&i| ext.params.basis_order(i) == p).collect();
    let i = idx[rng.gen_range(0..idx.len())];
    let z = random_elem(rng, &ext.base, 1, 1, 2, 2);
    ext.add(&b, &ext.basis_tensor(i, &z))
}

/// Thom–Sullivan MC element: a seeded constant MC element moved by a random
/// global gauge built from 0-forms times degree-0 elements and 1-forms times
/// functions. All charts must share one presentation.
pub fn random_ts_mc<C: SeedMc>(rng: &mut dyn RngCore, ts: &TsDgla<C>, params: &crate::params::Params) -> ExtElem<TsElem<C::Elem>> {
    let nerve = &ts.nerve;
    let v0 = nerve.faces(0)[0].clone();
    let c = ts.carrier(&v0).clone();
    let ext_c = Ext::new(c.clone(), params);
    let seed = C::seed_mc(rng, &ext_c);
    let ext_ts = Ext::new(ts.clone(), params);
    let beta = ExtElem { deg: 1, comps: seed.comps.iter().map(|(i, x)| (*i, ts.constant(x))).collect() };
    let q = nerve.len() - 1;
    let mut comps = BTreeMap::new();
    for i in 0..params.dim() {
        if params.basis_order(i) == 0 {
            continue;
        }
        let mut global: BTreeMap<FormKey, C::Elem> = BTreeMap::new();
        let mut t = vec![0u32; q];
        if q > 0 {
            t[rng.gen_range(0..q)] = rng.gen_range(0..=1);
        }
        let x = random_elem(rng, &c, 0, 1, 1, 1);
        global.insert((t.clone(), vec![]), x);
        if q > 0 {
            let j = rng.gen_range(0..q) as u8;
            let f = random_elem(rng, &c, -1, 1, 1, 1);
            global.insert((vec![0; q], vec![j]), f);
        }
        let g = ts.from_global(0, &global);
        if !ts.is_zero(&g) {
            comps.insert(i, g);
        }
    }
    let gamma = ExtElem { deg: 0, comps };
    gauge_act(&ext_ts, &gamma, &beta)
}

/// Random twisted gauge transformation with coefficients of degree at most 1.
pub fn random_transformation<C: ChartCarrier>(rng: &mut dyn RngCore, cech: &Arc<CechDgla<C>>) -> Transformation<C> {
    let mut t = Transformation::identity(cech);
    for f in cech.nerve.faces(0) {
        let x = random_gauge(rng, cech.ext(f));
        t.vertex.insert(f.clone(), x);
    }
    for e in cech.nerve.faces(1) {
        let x = random_ext(rng, cech.ext(e), -1, 1, 1, 1, 1);
        t.edge.insert(e.clone(), x);
    }
    t
}

/// Random constant 2-cocycle on the nerve: a coboundary, plus (unless
/// `coboundary_only`) random multiples of the cohomology representatives.
pub fn random_cocycle(rng: &mut dyn RngCore, nerve: &crate::cechnerve::Nerve, coboundary_only: bool) -> Cochain {
    let cx = LayerComplex::new(nerve, Layer::Constant).expect("constant layer");
    let b: Vec<Rational> = (0..cx.dim(1)).map(|_| if rng.gen_bool(0.5) { small_rational(rng) } else { Rational::zero() }).collect();
    let mut c = cx.delta(&cx.from_vector(1, &b));
    if !coboundary_only {
        for r in cx.representatives(2) {
            let k = small_rational(rng);
            for (f, v) in r.comps {
                let cur = c.comps.remove(&f).unwrap_or_else(|| LocalizedPoly::zero(v.chart()));
                c.comps.insert(f, cur.add(&v.scale(&k)));
            }
        }
    }
    c.comps.retain(|_, v| !v.is_zero());
    c
}

/// The datum with one seeded MC element on every vertex, no edge
/// logarithms, and central triangle logarithms `r ⊗ c` for a constant
/// 2-cocycle `c` and the first order-1 basis element `r`. All charts must
/// share one presentation.
pub fn central_datum<C: SeedMc>(rng: &mut dyn RngCore, cech: &Arc<CechDgla<C>>, c: &Cochain) -> AddDatum<C> {
    let n = &cech.nerve;
    let v0 = n.faces(0)[0].clone();
    let beta = C::seed_mc(rng, cech.ext(&v0));
    let mut logs = DescentLogs::on(cech);
    for f in n.faces(0) {
        logs.set_beta(f[0], beta.clone());
    }
    let i = (0..cech.params.dim()).find(|&i| cech.params.basis_order(i) == 1).expect("order-1 generator");
    for (t, v) in &c.comps {
        let g = cech.ext(t);
        let x = g.basis_tensor(i, &g.base.function(v));
        logs.set_alpha(t.clone(), x);
    }
    AddDatum { logs }
}
