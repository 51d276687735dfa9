use std::sync::Arc;

use super::random::{central_datum, random_cocycle, random_elem, random_transformation, random_ts_mc, rng};
use super::*;
use crate::cechnerve::{Nerve, TsDgla};
use crate::dgla::{exp_ad, Ext};
use crate::exactalg::{parse_expr, qi, ChartData};
use crate::params::ParamAlgebra;
use crate::polydiff::PolyDiff;
use crate::polyvec::Polyvec;

fn xy() -> crate::exactalg::Chart {
    ChartData::polynomial(&["x", "y"])
}

fn full(k: usize) -> NerveRef {
    let names: Vec<String> = (0..k).map(|i| format!("U{}", i)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Arc::new(Nerve::full(&refs, &xy()))
}

#[test]
fn constant_datum_passes() {
    let cech = Arc::new(CechDgla::<Polyvec>::new(&full(3), &ParamAlgebra::hbar(2)));
    let mut r = rng(1);
    let c = crate::cechnerve::Cochain::zero(2);
    let d = central_datum(&mut r, &cech, &c);
    assert!(check_add(&d).holds());
    let m = exp_add(&d, 3).unwrap();
    let rep = check_mdd(&m, 3);
    assert!(rep.holds(), "{}", rep.summary());
    assert_eq!(rep.checked["triangle"], 1);
}

#[test]
fn octahedron_central_class() {
    let n = Arc::new(Nerve::octahedron(&xy()));
    let cech = Arc::new(CechDgla::<Polyvec>::new(&n, &ParamAlgebra::hbar(2)));
    let mut r = rng(7);
    let c = random_cocycle(&mut r, &n, false);
    let d = central_datum(&mut r, &cech, &c);
    assert!(check_add(&d).holds());
    match obstruction(&d, &SolverOptions::default()).unwrap() {
        ObstructionOutcome::Obstructed(rep) => {
            assert_eq!(rep.order, 1);
            assert_eq!(rep.kind, ObstructionKind::Triangle);
            assert_eq!(rep.class, "[c]*hbar");
            assert_eq!(rep.class_nonzero, Some(true));
        }
        ObstructionOutcome::Trivial(_) => panic!("class should not trivialize"),
    }
}

#[test]
fn coboundary_trivializes() {
    let n = Arc::new(Nerve::octahedron(&xy()));
    let cech = Arc::new(CechDgla::<Polyvec>::new(&n, &ParamAlgebra::hbar(2)));
    let mut r = rng(8);
    let c = random_cocycle(&mut r, &n, true);
    assert!(!c.is_zero());
    let d = central_datum(&mut r, &cech, &c);
    match obstruction(&d, &SolverOptions::default()).unwrap() {
        ObstructionOutcome::Trivial(t) => {
            let img = add_gauge(&t.transformation, &d).unwrap();
            assert!(img.logs.edge.is_empty() && img.logs.triangle.is_empty());
            assert!(check_add(&img).holds());
        }
        ObstructionOutcome::Obstructed(rep) => panic!("obstructed: {}", rep.detail),
    }
}

#[test]
fn non_cocycle_breaks_tetrahedron() {
    let n = full(4);
    let cech = Arc::new(CechDgla::<Polyvec>::new(&n, &ParamAlgebra::hbar(1)));
    let mut r = rng(3);
    let mut c = crate::cechnerve::Cochain::zero(2);
    c.comps.insert(vec![0, 1, 2], parse_expr(&xy(), "1").unwrap());
    let d = central_datum(&mut r, &cech, &c);
    let rep = check_add(&d);
    assert_eq!(rep.failed_conditions().into_iter().collect::<Vec<_>>(), vec![Condition::Tetrahedron]);
    assert_eq!(rep.first().unwrap().order, 1);
}

#[test]
fn gauge_round_trip_and_validity() {
    let n = full(3);
    let cech = Arc::new(CechDgla::<PolyDiff>::new(&n, &ParamAlgebra::hbar(2)));
    let mut r = rng(11);
    let d = central_datum(&mut r, &cech, &crate::cechnerve::Cochain::zero(2));
    let t = random_transformation(&mut r, &cech);
    let d1 = add_gauge(&t, &d).unwrap();
    let rep = check_add(&d1);
    assert!(rep.holds(), "{}", rep.summary());
    let back = add_gauge(&inverse_transformation(&t), &d1).unwrap();
    assert!(back.logs.same_as(&d.logs));
}

#[test]
fn equivalence_is_found() {
    let n = full(3);
    let cech = Arc::new(CechDgla::<Polyvec>::new(&n, &ParamAlgebra::hbar(2)));
    let mut r = rng(5);
    let d = central_datum(&mut r, &cech, &crate::cechnerve::Cochain::zero(2));
    let t = random_transformation(&mut r, &cech);
    let d1 = add_gauge(&t, &d).unwrap();
    match equiv_solve(&d, &d1, &SolverOptions::default()).unwrap() {
        EquivOutcome::Equivalent(e) => assert!(add_gauge(&e.transformation, &d).unwrap().logs.same_as(&d1.logs)),
        EquivOutcome::NotFound { order } => panic!("not found at order {}", order),
    }
}

#[test]
fn magnus_matches_flow() {
    // exp(ad Ω) c against the Picard solution of c′ = [A(t), c]
    let ext = Ext::new(Polyvec::new(&xy()), &ParamAlgebra::hbar(3));
    let mut r = rng(2);
    let a: Vec<_> = (0..2).map(|_| ext.basis_tensor(1, &random_elem(&mut r, &ext.base, 0, 1, 1, 2))).collect();
    let a: Vec<_> = a.iter().map(|x| ext.add(x, &ext.basis_tensor(2, &random_elem(&mut r, &ext.base, 0, 1, 1, 1)))).collect();
    let omega = magnus_log(&ext, &a);
    let c = crate::polyvec::lift_fn(&ext, &parse_expr(ext.base.chart(), "x^2*y + y").unwrap());
    let mut path: Vec<_> = vec![c.clone()];
    for _ in 0..4 {
        let mut next = vec![c.clone()];
        for (i, ai) in a.iter().enumerate() {
            for (j, cj) in path.iter().enumerate() {
                let k = i + j + 1;
                while next.len() <= k {
                    next.push(ext.zero(-1));
                }
                let term = ext.scale(&ext.bracket(ai, cj), &(qi(1) / qi(k as i64)));
                next[k] = ext.add(&next[k], &term);
            }
        }
        path = next;
    }
    let at_one = ext.sum(-1, path.iter());
    assert_eq!(exp_ad(&ext, &omega, &c), at_one);
}

#[test]
fn square_zero_integrals_are_literal() {
    let n = full(3);
    let params = ParamAlgebra::hbar(1);
    let ts = TsDgla::<Polyvec>::new(&n);
    let mut r = rng(21);
    let beta = random_ts_mc(&mut r, &ts, &params);
    let d = int_mc(&ts, &params, &beta, &IntOptions::default()).unwrap();
    let cech = d.logs.cech.clone();
    for e in n.faces(1) {
        let g = cech.ext(e);
        let mut comps = std::collections::BTreeMap::new();
        for (i, v) in &beta.comps {
            let x = ts.integrate(e, &v.faces.get(e).cloned().unwrap_or_default(), 0);
            if !g.base.is_zero(&x) {
                comps.insert(*i, x);
            }
        }
        assert_eq!(d.logs.gamma(e), crate::dgla::ExtElem { deg: 0, comps });
    }
    assert!(check_add(&d).holds());
}

#[test]
fn datum_json_round_trip() {
    let n = Arc::new(Nerve::octahedron(&xy()));
    let cech = Arc::new(CechDgla::<PolyDiff>::new(&n, &ParamAlgebra::hbar(2)));
    let mut r = rng(4);
    let c = random_cocycle(&mut r, &n, false);
    let d = central_datum(&mut r, &cech, &c);
    let d = add_gauge(&random_transformation(&mut r, &cech), &d).unwrap();
    let v = io::write_datum(&d.logs);
    let back = io::read_datum::<PolyDiff>(&v).unwrap();
    assert!(back.same_as(&d.logs));
    assert!(io::read_datum::<Polyvec>(&v).is_err());
}

fn pipeline<C: super::random::SeedMc>(charts: usize, order: u32, seed: u64) {
    let n = full(charts);
    let params = ParamAlgebra::hbar(order);
    let ts = TsDgla::<C>::new(&n);
    let mut r = rng(seed);
    let beta = random_ts_mc(&mut r, &ts, &params);
    let d = int_mc(&ts, &params, &beta, &IntOptions::default()).unwrap();
    let m = exp_add(&d, 3).unwrap();
    let rep = check_mdd(&m, 3);
    assert!(rep.holds(), "{}", rep.summary());
}

#[test]
fn pipeline_poisson_three_charts() {
    pipeline::<Polyvec>(3, 3, 31);
}

#[test]
fn pipeline_associative_three_charts() {
    pipeline::<PolyDiff>(3, 3, 32);
}

#[test]
fn pipeline_four_charts() {
    pipeline::<Polyvec>(4, 2, 33);
    pipeline::<PolyDiff>(4, 2, 34);
}
