use std::sync::Arc;

use deformkit::cechnerve::{CechDgla, Layer, LayerComplex, Nerve};
use deformkit::descent::random::{central_datum, random_cocycle, random_elem, random_ext, random_mc, random_transformation, rng, small_rational};
use deformkit::descent::{add_gauge, check_add, inverse_transformation, io};
use deformkit::dgla::{bch, exp_ad, gauge_act, mc_check, Dgla, Ext};
use deformkit::exactalg::ChartData;
use deformkit::params::{ParamAlgebra, ParamSeries};
use deformkit::polydiff::PolyDiff;
use deformkit::polyvec::Polyvec;
use proptest::prelude::*;

fn series(alg: &deformkit::params::Params, r: &mut dyn rand::RngCore) -> ParamSeries {
    let it: Vec<_> = (0..alg.dim()).map(|i| (i, small_rational(r))).collect();
    ParamSeries::from_coeffs(alg, it)
}

fn gauge_composition<C: deformkit::descent::random::SeedMc>(ext: &Ext<C>, seed: u64) {
    let mut r = rng(seed);
    let b = random_mc(&mut r, ext);
    let x = random_ext(&mut r, ext, 0, 1, 2, 1, 1);
    let y = random_ext(&mut r, ext, 0, 1, 2, 1, 1);
    let lhs = gauge_act(ext, &bch(ext, &x, &y), &b);
    let rhs = gauge_act(ext, &x, &gauge_act(ext, &y, &b));
    assert_eq!(lhs, rhs);
    assert!(mc_check(ext, &lhs).unwrap().holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn param_algebra_is_commutative_and_associative(seed in any::<u64>()) {
        let alg = ParamAlgebra::with_relation_exprs(&["s", "t"], 3, &["s^2"]).unwrap();
        let mut r = rng(seed);
        let (a, b, c) = (series(&alg, &mut r), series(&alg, &mut r), series(&alg, &mut r));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn schouten_bracket_is_graded_antisymmetric(seed in any::<u64>(), da in -1i32..=2, db in -1i32..=2) {
        let pv = Polyvec::new(&ChartData::polynomial(&["x", "y", "z"]));
        let mut r = rng(seed);
        let a = random_elem(&mut r, &pv, da, 2, 2, 2);
        let b = random_elem(&mut r, &pv, db, 2, 2, 2);
        let s = pv.add(&pv.bracket(&a, &b), &if (da * db) % 2 == 0 { pv.bracket(&b, &a) } else { pv.neg(&pv.bracket(&b, &a)) });
        prop_assert!(pv.is_zero(&s));
    }

    #[test]
    fn gauge_action_composes_through_bch(seed in any::<u64>()) {
        let params = ParamAlgebra::hbar(3);
        gauge_composition(&Ext::new(Polyvec::new(&ChartData::polynomial(&["x", "y", "z"])), &params), seed);
        gauge_composition(&Ext::new(PolyDiff::new(&ChartData::polynomial(&["x", "y"])), &params), seed);
    }

    #[test]
    fn exp_ad_inverts(seed in any::<u64>()) {
        let ext = Ext::new(PolyDiff::new(&ChartData::polynomial(&["x", "y"])), &ParamAlgebra::hbar(3));
        let mut r = rng(seed);
        let x = random_ext(&mut r, &ext, 0, 1, 2, 1, 1);
        let y = ext.basis_tensor(0, &random_elem(&mut r, &ext.base, 1, 2, 2, 2));
        prop_assert_eq!(exp_ad(&ext, &x, &exp_ad(&ext, &ext.neg(&x), &y)), y);
    }

    #[test]
    fn cech_differential_squares_to_zero(seed in any::<u64>()) {
        let n = Nerve::full(&["A", "B", "C", "D"], &ChartData::polynomial(&["x"]));
        let cx = LayerComplex::new(&n, Layer::PolyTruncated(1)).unwrap();
        let mut r = rng(seed);
        let v: Vec<_> = (0..cx.dim(1)).map(|_| small_rational(&mut r)).collect();
        prop_assert!(cx.delta(&cx.delta(&cx.from_vector(1, &v))).is_zero());
    }

    #[test]
    fn transformations_preserve_data_and_invert(seed in any::<u64>()) {
        let chart = ChartData::polynomial(&["x", "y"]);
        let n = Arc::new(Nerve::full(&["U0", "U1", "U2"], &chart));
        let cech = Arc::new(CechDgla::<PolyDiff>::new(&n, &ParamAlgebra::hbar(2)));
        let mut r = rng(seed);
        let c = random_cocycle(&mut r, &n, true);
        let d = central_datum(&mut r, &cech, &c);
        let t = random_transformation(&mut r, &cech);
        let d1 = add_gauge(&t, &d).unwrap();
        prop_assert!(check_add(&d1).holds());
        prop_assert!(add_gauge(&inverse_transformation(&t), &d1).unwrap().logs.same_as(&d.logs));
        let back = io::read_datum::<PolyDiff>(&io::write_datum(&d1.logs)).unwrap();
        prop_assert!(back.same_as(&d1.logs));
    }
}
