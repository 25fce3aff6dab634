//! Invariants over randomly generated markets.

use flexcon::{cost, design, extensions, instances, profit, BehaviorMode, VariationModel};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pessimistic_never_beats_optimistic(index in 0u64..10_000, n in 1usize..5, frac in 0.01f64..0.5) {
        let inst = instances::random_instance(7, index, n);
        let (params, dist) = (&inst.params, &inst.dist);
        let menu = design::menu_from_deltas(&design::approx_deltas(dist), params.p0, params, dist).discounted(frac * params.p0);
        let u = VariationModel::Uniform;
        let opt = profit::total_profit(&menu, params, dist, &BehaviorMode::optimistic(params), &u).unwrap();
        let pes = profit::total_profit(&menu, params, dist, &BehaviorMode::pessimistic(params), &u).unwrap();
        let scale = params.n() * params.p0 * dist.m_max();
        prop_assert!(pes <= opt + 1e-9 * scale, "pessimistic {pes} > optimistic {opt}");
    }

    #[test]
    fn super_optimal_dominates_designed_menus(index in 0u64..10_000, n in 1usize..5) {
        let inst = instances::random_instance(11, index, n);
        let out = design::approx_contract(&inst.params, &inst.dist).unwrap();
        let scale = inst.params.n() * inst.params.p0 * inst.dist.m_max();
        prop_assert!(out.report.menu_profit <= out.report.super_optimal_profit + 1e-9 * scale);
        prop_assert!(out.report.baseline_profit <= out.report.super_optimal_profit + 1e-9 * scale);
    }

    #[test]
    fn approximate_menu_is_ordered(index in 0u64..10_000, n in 1usize..7) {
        let inst = instances::random_instance(13, index, n);
        let menu = design::approx_contract(&inst.params, &inst.dist).unwrap().menu;
        for w in menu.options.windows(2) {
            prop_assert!(w[0].center < w[1].center);
            prop_assert!(w[0].delta >= w[1].delta);
        }
        for o in &menu.options {
            let th = cost::threshold_with_tol(o, &inst.params, 0.0);
            prop_assert!(o.delta <= th && th <= 1.0);
        }
    }

    #[test]
    fn tn_cdf_is_monotone(mu in -1.0f64..2.0, sigma in 0.01f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (f_lo, f_hi) = (extensions::tn_cdf(lo, mu, sigma).unwrap(), extensions::tn_cdf(hi, mu, sigma).unwrap());
        prop_assert!((0.0..=1.0).contains(&f_lo) && (0.0..=1.0).contains(&f_hi));
        prop_assert!(f_lo <= f_hi + 1e-15);
    }

    #[test]
    fn certified_bounds_hold(index in 0u64..10_000, n in 1usize..4) {
        let inst = instances::random_instance(17, index, n);
        let (opt, pes) = instances::certified_ratios(&inst).unwrap();
        prop_assert!(opt.is_none_or(|r| r >= 0.5 - 1e-9));
        prop_assert!(pes.is_none_or(|r| r >= 1.0 / 3.0 - 1e-9));
    }
}

#[test]
fn continuous_ratio_increases_with_diminishing_steps() {
    let r: Vec<f64> = (1..=60).map(|n| extensions::continuous_gain_ratio(n).unwrap()).collect();
    for w in r.windows(3) {
        assert!(w[1] > w[0]);
        assert!(w[2] - w[1] <= w[1] - w[0] + 1e-15);
    }
    assert!(r.iter().all(|&x| x < 0.8 + 1e-12));
}
