use std::sync::Arc;

use ncalc::fixtures::{self, rng};
use ncalc::geometry::{self, heap_grid_residual, maurer_cartan, ChristoffelField};
use ncalc::jet::matrix::invert_rational;
use ncalc::jet::{BlockSpec, MatrixSeries, Rational, TruncatedSeries};
use proptest::prelude::*;
use rand::Rng;

/// Random series over `spec` with base monomials and up to one generator
/// from each block.
fn random_series(spec: &Arc<BlockSpec>, order: u32, seed: u64) -> TruncatedSeries {
    let mut r = rng(seed);
    let n = spec.vars();
    let terms = (0..r.gen_range(1..6)).map(|_| {
        let exps: Vec<u32> = (0..n).map(|_| r.gen_range(0..3)).collect();
        let mut blocks = Vec::new();
        for b in 0..spec.blocks() {
            if r.gen_bool(0.4) {
                blocks.push((b, r.gen_range(0..n)));
            }
        }
        (exps, blocks, Rational::new(r.gen_range(-4..=4), r.gen_range(1..4)))
    });
    TruncatedSeries::from_terms(spec, order, terms.collect::<Vec<_>>()).unwrap()
}

fn paired() -> Arc<BlockSpec> {
    Arc::new(BlockSpec::new(2, 3, &[(0, 1)]).unwrap())
}

fn random_asymmetric_field(order: u32, seed: u64) -> ChristoffelField {
    let mut g = fixtures::random_symmetric_field(2, order, &mut rng(seed)).components().to_vec();
    let spec = Arc::new(BlockSpec::base(2));
    let bump = TruncatedSeries::constant(&spec, order, Rational::one());
    // Gamma^1_01 += 1 breaks the lower symmetry
    g[5] = g[5].try_add(&bump).unwrap();
    ChristoffelField::new(2, g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_laws(seed in any::<u64>(), order in 1u32..5) {
        let spec = paired();
        let (a, b, c) = (random_series(&spec, order, seed), random_series(&spec, order, seed ^ 1), random_series(&spec, order, seed ^ 2));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &TruncatedSeries::one(&spec, order), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn truncation_is_a_ring_map(seed in any::<u64>(), order in 2u32..5, k in 0u32..5) {
        let spec = paired();
        let (a, b) = (random_series(&spec, order, seed), random_series(&spec, order, !seed));
        let k = k.min(order);
        prop_assert_eq!((&a * &b).truncate(k), &a.truncate(k) * &b.truncate(k));
        prop_assert_eq!((&a + &b).truncate(k), &a.truncate(k) + &b.truncate(k));
        prop_assert_eq!(a.truncate(k).truncate(k.saturating_sub(1)), a.truncate(k.saturating_sub(1)));
    }

    #[test]
    fn normal_form_is_confluent(i in 0usize..2, j in 0usize..2) {
        // in the paired blocks eps_0i eps_1j = -eps_0j eps_1i; the free block commutes
        let spec = paired();
        let e = |b, c| TruncatedSeries::eps(&spec, 3, b, c).unwrap();
        let lhs = &(&e(0, i) * &e(1, j)) * &e(2, 0);
        let rhs = &e(2, 0) * &(&e(1, i) * &e(0, j));
        prop_assert_eq!(&lhs + &rhs, TruncatedSeries::zero(&spec, 3));
        if i == j {
            prop_assert!(lhs.is_zero());
        }
    }

    #[test]
    fn nilpotency(seed in any::<u64>(), order in 1u32..5, a in 0usize..2, b in 0usize..2) {
        let spec = paired();
        for blk in 0..3 {
            let e = &TruncatedSeries::eps(&spec, order, blk, a).unwrap() * &TruncatedSeries::eps(&spec, order, blk, b).unwrap();
            prop_assert!(e.is_zero());
        }
        let s = random_series(&spec, order, seed);
        let m = &s - &TruncatedSeries::constant(&spec, order, s.constant_term());
        prop_assert!(m.pow(order + 1).is_zero());
    }

    #[test]
    fn taylor_shifts_commute_and_multiply(seed in any::<u64>(), order in 1u32..5) {
        let spec = Arc::new(BlockSpec::generic(2, 2));
        let base = Arc::new(BlockSpec::base(2));
        let mut r = rng(seed);
        let f = fixtures::random_polynomial(&base, order, 0, order, 0.5, &mut r).embed(&spec).unwrap();
        let g = fixtures::random_polynomial(&base, order, 0, order, 0.5, &mut r).embed(&spec).unwrap();
        let s01 = f.taylor_shift(0).unwrap().taylor_shift(1).unwrap();
        let s10 = f.taylor_shift(1).unwrap().taylor_shift(0).unwrap();
        prop_assert_eq!(&s01, &s10);
        prop_assert_eq!((&f * &g).taylor_shift(0).unwrap(), &f.taylor_shift(0).unwrap() * &g.taylor_shift(0).unwrap());
    }

    #[test]
    fn random_forms_pass_basicx(seed in any::<u64>(), order in 1u32..4) {
        let w = fixtures::random_form(2, 2, order, &mut rng(seed));
        prop_assert!(w.basicx_verify().unwrap().is_zero());
    }

    #[test]
    fn maurer_cartan_forms_are_closed_with_known_primitive(seed in any::<u64>(), order in 2u32..5) {
        let f = fixtures::random_invertible_map(2, 2, order, &mut rng(seed));
        let w = maurer_cartan(&f).unwrap();
        prop_assert!(w.closedness_residual().unwrap().is_zero());
        prop_assert!(w.closedness_residual_paired().unwrap().is_zero());
        prop_assert!(w.quadrangle_symmetric().unwrap());
        let p = w.formal_primitive().unwrap().unwrap();
        let c = invert_rational(&f.constant_part()).unwrap();
        let expect = MatrixSeries::from_rationals(f.spec(), order, &c).try_mul(&f).unwrap();
        prop_assert_eq!(p, expect);
    }

    #[test]
    fn flat_pullbacks_linearize(seed in any::<u64>(), order in 1u32..4) {
        let psi = fixtures::random_chart(2, order + 2, &mut rng(seed));
        let g = ChristoffelField::zero(2, order).pullback(&psi).unwrap();
        prop_assert_eq!(g.curvature_valuation().unwrap(), None);
        prop_assert!(g.cube_at_jets().unwrap().holds());
        let chart = g.formal_chart(order + 2).unwrap().unwrap();
        prop_assert_eq!(&chart, &psi);
        prop_assert!(geometry::is_zero(&chart.trivialization_residual(&g).unwrap()));
        prop_assert!(geometry::is_zero(&heap_grid_residual(&g, &chart).unwrap()));
    }

    #[test]
    fn chart_heap_laws(seed in any::<u64>(), order in 2u32..5) {
        let chart = fixtures::random_chart(2, order, &mut rng(seed));
        let spec = Arc::new(BlockSpec::generic(2, 3));
        let o = geometry::coordinates(&spec, order);
        let pt = |b| geometry::add(&o, &geometry::displacement(&spec, order, b).unwrap()).unwrap();
        let (x, y, z) = (pt(0), pt(1), pt(2));
        let h = |a: &[TruncatedSeries], b: &[TruncatedSeries]| chart.heap(&o, a, b).unwrap();
        prop_assert_eq!(h(&o, &y), y.clone());
        prop_assert_eq!(h(&x, &o), x.clone());
        prop_assert_eq!(h(&x, &y), h(&y, &x));
        prop_assert_eq!(h(&h(&x, &y), &z), h(&x, &h(&y, &z)));
        prop_assert_eq!(h(&x, &chart.heap_inverse(&o, &x).unwrap()), o.clone());
        prop_assert_eq!(chart.inverse().unwrap().compose(&chart).unwrap(), fixtures_identity(order));
    }

    #[test]
    fn double_pullback_is_pullback_by_composite(seed in any::<u64>(), order in 1u32..3) {
        let mut r = rng(seed);
        let g = fixtures::random_symmetric_field(2, order, &mut r);
        let (p1, p2) = (fixtures::random_chart(2, order + 2, &mut r), fixtures::random_chart(2, order + 2, &mut r));
        let twice = g.pullback(&p1).unwrap().pullback(&p2).unwrap();
        let once = g.pullback(&p1.compose(&p2).unwrap()).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn torsion_matches_lambda_torsion(seed in any::<u64>(), order in 0u32..3, symmetric in any::<bool>()) {
        let g = if symmetric {
            fixtures::random_symmetric_field(2, order, &mut rng(seed))
        } else {
            random_asymmetric_field(order, seed)
        };
        let torsion_free = g.torsion().iter().all(TruncatedSeries::is_zero);
        prop_assert_eq!(torsion_free, symmetric);
        prop_assert_eq!(geometry::is_zero(&g.lambda_torsion_residual().unwrap()), torsion_free);
    }
}

fn fixtures_identity(order: u32) -> geometry::FormalChart {
    geometry::FormalChart::identity(2, order)
}
