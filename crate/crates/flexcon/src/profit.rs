//! Supplier-side analytics: baseline profit, per-type profits, total menu
//! profit under each behaviour mode, pessimistic capacities, gain ratios.

use crate::cost::{self, Choice, Regime};
use crate::design;
use crate::error::{Error, Result};
use crate::model::{
    BehaviorMode, ContractMenu, ContractOption, EvaluationReport, MarketParams, Mode, PerCustomerAccount,
    TypeDistribution, VariationModel,
};
use crate::numeric;

/// Expected profit from all type-`i` customers under their own option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerTypeProfit {
    pub type_index: usize,
    pub regime: Regime,
    pub expected_profit: f64,
    /// Expected provisioned capacity for one type-`i` customer.
    pub capacity: f64,
}

/// `P0 = Σ N h m p0 − 2 N mₙ ĉ − Σ N h c0 m`.
pub fn baseline_profit(params: &MarketParams, dist: &TypeDistribution) -> f64 {
    let n = params.n();
    let revenue: f64 = dist.means.iter().zip(&dist.probs).map(|(m, h)| n * h * m * params.p0).sum();
    let energy: f64 = dist.means.iter().zip(&dist.probs).map(|(m, h)| n * h * params.c0 * m).sum();
    revenue - 2.0 * n * dist.m_max() * params.c_hat - energy
}

fn check_index(i: usize, dist: &TypeDistribution) -> Result<()> {
    if i < dist.len() {
        Ok(())
    } else {
        Err(Error::Usage(format!("type index {i} out of range for {} types", dist.len())))
    }
}

/// High-penalty per-type profit. A fraction `F = P(Δ ≤ Δ_th)` subscribes,
/// pays `m p`, consumes `m` and is provisioned `m(1+δ)`; the rest stay on
/// baseline with capacity `2mₙ`. `Δ_th` is taken at the default tie tolerance.
pub fn profit_high(
    i: usize,
    option: &ContractOption,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
) -> Result<PerTypeProfit> {
    check_index(i, dist)?;
    if !option.is_high_penalty(params.k) {
        return Err(Error::Usage(format!("option {} is not in the high-penalty regime", i + 1)));
    }
    let th = cost::threshold(option, params);
    Ok(high_with_share(i, option, params, dist, variation.cdf(th)))
}

pub(crate) fn high_with_share(
    i: usize,
    option: &ContractOption,
    params: &MarketParams,
    dist: &TypeDistribution,
    share: f64,
) -> PerTypeProfit {
    let m = dist.means[i];
    let mn = dist.m_max();
    let capacity = m * (1.0 + option.delta) * share + 2.0 * mn * (1.0 - share);
    let revenue = m * option.p * share + m * params.p0 * (1.0 - share);
    let profit = params.n() * dist.probs[i] * (revenue - params.c0 * m - params.c_hat * capacity);
    PerTypeProfit { type_index: i, regime: Regime::HighPenalty, expected_profit: profit, capacity }
}

/// `δ² ln(T/δ)`, with its limit 0 at `δ = 0`.
fn sq_log(delta: f64, t: f64) -> f64 {
    if delta <= 0.0 {
        0.0
    } else {
        delta * delta * (t / delta).ln()
    }
}

/// Low-penalty per-type profit for uniform `Δ`. Over-band demand is billed at
/// `p̄`, subscribers are provisioned `m(1+Δ_th)`, and consumption includes the
/// up-fill below the band. `Δ_th` is taken at the default tie tolerance.
pub fn profit_low(
    i: usize,
    option: &ContractOption,
    params: &MarketParams,
    dist: &TypeDistribution,
) -> Result<PerTypeProfit> {
    check_index(i, dist)?;
    if option.is_high_penalty(params.k) {
        return Err(Error::Usage(format!("option {} is not in the low-penalty regime", i + 1)));
    }
    Ok(low_with_threshold(i, option, params, dist, cost::threshold(option, params)))
}

/// [`profit_low`] with subscribers on `Δ ≤ t`. Capacity stays at the
/// supplier's provisioning rule `m(1+Δ_th)`.
fn low_with_threshold(
    i: usize,
    option: &ContractOption,
    params: &MarketParams,
    dist: &TypeDistribution,
    t: f64,
) -> PerTypeProfit {
    let m = dist.means[i];
    let mn = dist.m_max();
    let (p, d, pb) = (option.p, option.delta, option.p_bar);
    let provisioned = provisioned_capacity(Choice::Option(i), &ContractMenu::new(vec![*option]), params, dist);
    let over = 0.25 * ((t * t - d * d) / 2.0 - 2.0 * d * (t - d) + sq_log(d, t));
    let revenue = m * p * d + m * p * (t - d) + m * pb * over + (1.0 - t) * m * params.p0;
    let capacity = provisioned * t + 2.0 * mn * (1.0 - t);
    let energy_cost =
        m * params.c0 * (d + 1.0 - t + (t * t - d * d) / 8.0 + 0.25 * sq_log(d, t) + (1.0 - d / 2.0) * (t - d));
    let profit = params.n() * dist.probs[i] * (revenue - params.c_hat * capacity - energy_cost);
    PerTypeProfit { type_index: i, regime: Regime::LowPenalty, expected_profit: profit, capacity }
}

/// Per-type profit when type `i` takes its own option below the threshold and
/// baseline above it. Own costs within `tie_tol` of baseline count as ties
/// won by the option, as in [`cost::choose_option`].
pub fn own_option_profit(
    i: usize,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
    tie_tol: f64,
) -> Result<PerTypeProfit> {
    check_index(i, dist)?;
    let option = &menu.options[i];
    let th = cost::threshold_with_tol(option, params, tie_tol);
    if option.is_high_penalty(params.k) {
        return Ok(high_with_share(i, option, params, dist, variation.cdf(th)));
    }
    if variation.is_uniform() {
        return Ok(low_with_threshold(i, option, params, dist, th));
    }
    let rule = |d: f64| if d <= th { Choice::Option(i) } else { Choice::Baseline };
    let (s, cap) = integrate_rule(i, menu, params, dist, variation, &rule, &[th])?;
    Ok(PerTypeProfit {
        type_index: i,
        regime: Regime::LowPenalty,
        expected_profit: params.n() * dist.probs[i] * s,
        capacity: cap,
    })
}

/// Per-customer profit `s` in the tie situations of the design menus, where
/// the customer's range lies inside the chosen band: `mᵢpⱼ − ĉmⱼ(1+δⱼ) − c0mᵢ`,
/// or `mᵢp0 − 2mₙĉ − c0mᵢ` for baseline.
pub fn per_customer_profit(m_i: f64, choice: Choice, menu: &ContractMenu, params: &MarketParams, m_max: f64) -> f64 {
    match choice {
        Choice::Baseline => m_i * params.p0 - 2.0 * m_max * params.c_hat - params.c0 * m_i,
        Choice::Option(j) => {
            let o = &menu.options[j];
            m_i * o.p - params.c_hat * o.upper() - params.c0 * m_i
        }
    }
}

/// Capacity the supplier provisions for a customer on `choice`: `mⱼ(1+δⱼ)`
/// for a high-penalty option, `mⱼ(1+Δ_th,ⱼ)` for a low-penalty one, `2mₙ`
/// for baseline.
pub fn provisioned_capacity(
    choice: Choice,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
) -> f64 {
    match choice {
        Choice::Baseline => 2.0 * dist.m_max(),
        Choice::Option(j) => {
            let o = &menu.options[j];
            if o.is_high_penalty(params.k) {
                o.upper()
            } else {
                o.center * (1.0 + cost::threshold(o, params))
            }
        }
    }
}

/// Expected account of a type-`i` customer with variation `Δ` on `choice`,
/// valid for any geometry.
pub fn customer_account(
    i: usize,
    delta_cust: f64,
    choice: Choice,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
) -> PerCustomerAccount {
    let m = dist.means[i];
    let capacity = provisioned_capacity(choice, menu, params, dist);
    match choice {
        Choice::Baseline => PerCustomerAccount { revenue: m * params.p0, energy: m, capacity },
        Choice::Option(j) => {
            let out = cost::expected_outcome(m, delta_cust, &menu.options[j], params.k);
            PerCustomerAccount { revenue: out.revenue, energy: out.energy, capacity }
        }
    }
}

/// Points where a type-`i` customer's choice or account may change.
fn type_breakpoints(
    i: usize,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    extra: &[f64],
) -> Vec<f64> {
    let m = dist.means[i];
    let mut pts = vec![0.0, 1.0];
    for o in &menu.options {
        pts.extend(cost::geometry_breakpoints(m, o));
    }
    pts.push(menu.options[i].delta);
    pts.push(cost::threshold(&menu.options[i], params));
    pts.extend_from_slice(extra);
    pts.retain(|d| (0.0..=1.0).contains(d));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

const PROBES: usize = 8;
const MAX_PIECES: usize = 10_000;
const SETTLE_WIDTH: f64 = 1e-11;

/// `E_Δ[s]` and `E_Δ[capacity]` for a type-`i` customer whose choice at each
/// `Δ` is given by `rule`.
///
/// Between breakpoints the interval is swept left to right. The choice is
/// sampled at probes; where it varies, the first switch point is located by
/// bisection and the sweep resumes there. With the choice fixed, `s·f` is integrated by adaptive
/// Simpson (exact in one pass when `s` is constant and `f` uniform).
fn integrate_rule<R: Fn(f64) -> Choice>(
    i: usize,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
    rule: &R,
    extra: &[f64],
) -> Result<(f64, f64)> {
    let account = |d: f64, c: Choice| customer_account(i, d, c, menu, params, dist);
    if let VariationModel::PointMass { delta } = *variation {
        let c = rule(delta);
        let a = account(delta, c);
        return Ok((a.profit(params), a.capacity));
    }
    let pts = type_breakpoints(i, menu, params, dist, extra);
    let scale = dist.means[i] * params.p0 + 2.0 * dist.m_max() * params.c_hat;
    let mut s_parts = Vec::new();
    let mut cap_parts = Vec::new();
    for w in pts.windows(2) {
        segment(w[0], w[1], rule, &account, params, variation, scale, &mut s_parts, &mut cap_parts)?;
    }
    Ok((numeric::pairwise_sum(&s_parts), numeric::pairwise_sum(&cap_parts)))
}

#[allow(clippy::too_many_arguments)]
fn segment<R: Fn(f64) -> Choice, A: Fn(f64, Choice) -> PerCustomerAccount>(
    a: f64,
    b: f64,
    rule: &R,
    account: &A,
    params: &MarketParams,
    variation: &VariationModel,
    scale: f64,
    s_parts: &mut Vec<f64>,
    cap_parts: &mut Vec<f64>,
) -> Result<()> {
    // Rounding can flip a near-tie back and forth over a tiny stretch; no
    // piece is made narrower than this, and its midpoint choice stands.
    let min_width = SETTLE_WIDTH * (1.0 + b.abs());
    let mut lo_edge = a;
    for _ in 0..MAX_PIECES {
        if b - lo_edge <= min_width {
            push_piece(lo_edge, b, rule, account, params, variation, scale, s_parts, cap_parts);
            return Ok(());
        }
        // Endpoints are probed too: a tie band next to a breakpoint can be
        // far narrower than the probe spacing.
        let probes: Vec<f64> = (0..=PROBES).map(|k| lo_edge + (b - lo_edge) * k as f64 / PROBES as f64).collect();
        let choices: Vec<Choice> = probes.iter().map(|&d| rule(d)).collect();
        let Some(k) = (1..=PROBES).find(|&k| choices[k] != choices[0]) else {
            push_piece(lo_edge, b, rule, account, params, variation, scale, s_parts, cap_parts);
            return Ok(());
        };
        let first = choices[0];
        let mut lo = probes[k - 1];
        let mut hi = probes[k];
        while hi - lo > 1e-14 * (1.0 + hi.abs()) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if rule(mid) == first {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cut = (0.5 * (lo + hi)).max(lo_edge + min_width).min(b);
        push_piece(lo_edge, cut, rule, account, params, variation, scale, s_parts, cap_parts);
        lo_edge = cut;
    }
    Err(Error::Numerical(format!("choice keeps switching on [{a}, {b}]")))
}

/// Integrates one piece of `[a, b]` with the choice taken at its midpoint.
#[allow(clippy::too_many_arguments)]
fn push_piece<R: Fn(f64) -> Choice, A: Fn(f64, Choice) -> PerCustomerAccount>(
    a: f64,
    b: f64,
    rule: &R,
    account: &A,
    params: &MarketParams,
    variation: &VariationModel,
    scale: f64,
    s_parts: &mut Vec<f64>,
    cap_parts: &mut Vec<f64>,
) {
    if b <= a {
        return;
    }
    let choice = rule(0.5 * (a + b));
    let mass = variation.cdf(b) - variation.cdf(a);
    let f = |d: f64| account(d, choice).profit(params) * variation.pdf(d);
    let q = numeric::adaptive_simpson(&f, a, b, 1e-14 * scale * (b - a).max(1e-300));
    s_parts.push(q.value);
    cap_parts.push(account(0.5 * (a + b), choice).capacity * mass);
}

/// Per-type (profit, capacity) under `behavior`, variation `variation`.
pub fn per_type(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    behavior: &BehaviorMode,
    variation: &VariationModel,
) -> Result<Vec<(f64, f64)>> {
    if menu.len() != dist.len() {
        return Err(Error::Usage(format!("menu has {} options for {} types", menu.len(), dist.len())));
    }
    (0..dist.len())
        .map(|i| match behavior.mode {
            Mode::Optimistic => {
                let t = own_option_profit(i, menu, params, dist, variation, behavior.tie_tol)?;
                Ok((t.expected_profit, t.capacity))
            }
            Mode::Pessimistic => {
                let rule = |d: f64| cost::choose_option(i, d, menu, params, dist, behavior);
                let (s, cap) = integrate_rule(i, menu, params, dist, variation, &rule, &[])?;
                Ok((params.n() * dist.probs[i] * s, cap))
            }
        })
        .collect()
}

/// Expected supplier profit of a menu.
///
/// Optimistic: each type takes its own option below its threshold and
/// baseline above it. Pessimistic: each customer takes the cheapest choice,
/// ties broken against the supplier, integrated over `Δ`.
pub fn total_profit(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    behavior: &BehaviorMode,
    variation: &VariationModel,
) -> Result<f64> {
    let parts: Vec<f64> = per_type(menu, params, dist, behavior, variation)?.into_iter().map(|(p, _)| p).collect();
    Ok(numeric::pairwise_sum(&parts))
}

/// Worst-case choice in the `ε → 0⁺` limit of a menu with equal prices:
/// below its threshold a customer takes some option (never baseline), and
/// among equally cheap options the one worst for the supplier.
fn limit_rule<'a>(
    i: usize,
    menu: &'a ContractMenu,
    params: &'a MarketParams,
    dist: &'a TypeDistribution,
    tie_tol: f64,
) -> impl Fn(f64) -> Choice + 'a {
    let th = cost::threshold_with_tol(&menu.options[i], params, 0.0);
    let behavior = BehaviorMode { mode: Mode::Pessimistic, tie_tol };
    move |d: f64| {
        if d > th {
            return Choice::Baseline;
        }
        let costs = cost::option_costs(i, d, menu, dist, params.k);
        cost::resolve_choice(i, &costs, f64::INFINITY, &behavior, |c| {
            customer_account(i, d, c, menu, params, dist).profit(params)
        })
    }
}

/// Ties in [`pessimistic_capacity`] only absorb rounding.
const EXACT_TIE_TOL_REL: f64 = 1e-12;

/// `C̄ᵢ`: expected capacity of a type-`i` customer when every exact tie among
/// options is broken toward the largest band and subscribers never fall back
/// to baseline below `Δ_th,i` (uniform `Δ`). With exact ties the choice is
/// constant between breakpoints, so each piece is settled at its midpoint.
pub fn pessimistic_capacity(
    i: usize,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
) -> Result<f64> {
    check_index(i, dist)?;
    let rule = limit_rule(i, menu, params, dist, EXACT_TIE_TOL_REL * params.p0);
    let exact = cost::threshold_with_tol(&menu.options[i], params, 0.0);
    let pts = type_breakpoints(i, menu, params, dist, &[exact]);
    let parts: Vec<f64> = pts
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            provisioned_capacity(rule(mid), menu, params, dist) * (w[1] - w[0])
        })
        .collect();
    Ok(numeric::pairwise_sum(&parts))
}

/// Pessimistic profit of `menu` with every price lowered by `ε → 0⁺`.
pub fn pessimistic_limit_profit(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
) -> Result<f64> {
    let tol = crate::model::DEFAULT_TIE_TOL_REL * params.p0;
    let mut parts = Vec::with_capacity(dist.len());
    for i in 0..dist.len() {
        let rule = limit_rule(i, menu, params, dist, tol);
        let (s, _) = integrate_rule(i, menu, params, dist, variation, &rule, &[])?;
        parts.push(params.n() * dist.probs[i] * s);
    }
    Ok(numeric::pairwise_sum(&parts))
}

/// `(P − P0)/(P̂* − P0)`, or `None` when the denominator is not positive.
pub fn ratio(menu_profit: f64, baseline: f64, super_optimal: f64) -> Option<f64> {
    let denom = super_optimal - baseline;
    (denom > 0.0).then(|| (menu_profit - baseline) / denom)
}

/// Full report for a menu under a behaviour mode and variation model.
pub fn evaluate(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    behavior: &BehaviorMode,
    variation: &VariationModel,
) -> Result<EvaluationReport> {
    let types = per_type(menu, params, dist, behavior, variation)?;
    let menu_profit = numeric::pairwise_sum(&types.iter().map(|t| t.0).collect::<Vec<_>>());
    let baseline = baseline_profit(params, dist);
    let super_opt = design::super_optimal_profit(params, dist, variation)?;
    Ok(EvaluationReport {
        baseline_profit: baseline,
        menu_profit,
        super_optimal_profit: super_opt,
        gain_ratio: ratio(menu_profit, baseline, super_opt),
        per_type_capacity: types.iter().map(|t| t.1).collect(),
        mode: behavior.mode,
    })
}

/// [`evaluate`] with uniform `Δ`.
pub fn gain_ratio(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    behavior: &BehaviorMode,
) -> Result<EvaluationReport> {
    evaluate(menu, params, dist, behavior, &VariationModel::Uniform)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(p0: f64, k: f64, c0: f64, c_hat: f64, n: u32) -> MarketParams {
        MarketParams::new(p0, k, c0, c_hat, n)
    }

    #[test]
    fn baseline_examples() {
        let d = TypeDistribution::new(vec![1.0], vec![1.0]);
        assert_eq!(baseline_profit(&p(10.0, 20.0, 1.0, 1.0, 1), &d), 7.0);
        let d = TypeDistribution::new(vec![1.0, 3.0], vec![0.9, 0.1]);
        let v = baseline_profit(&p(1.0, 2.0, 0.2, 0.1, 10), &d);
        assert!((v - 3.6).abs() < 1e-12);
        let v0 = baseline_profit(&p(1.0, 2.0, 0.2, 0.0, 10), &d);
        assert!((v0 - 10.0 * (0.9 + 0.3) * 0.8).abs() < 1e-12);
    }

    #[test]
    fn motivating_contract_with_fixed_variation() {
        let params = p(1.0, 1.5, 0.2, 0.1, 10);
        let d = TypeDistribution::new(vec![1.0, 3.0], vec![0.9, 0.1]);
        let menu =
            ContractMenu::new(vec![ContractOption::new(0.9, 0.1, 3.0, 1.0), ContractOption::new(0.9, 0.1, 3.0, 3.0)]);
        let v = VariationModel::PointMass { delta: 0.0 };
        for mode in [Mode::Optimistic, Mode::Pessimistic] {
            let b = BehaviorMode::new(mode, &params);
            let total = total_profit(&menu, &params, &d, &b, &v).unwrap();
            assert!((total - 7.08).abs() < 1e-12, "{mode}: {total}");
        }
    }

    #[test]
    fn high_profit_edge_shares() {
        let params = p(10.0, 20.0, 1.0, 2.0, 3);
        let d = TypeDistribution::new(vec![1.0, 2.0], vec![0.4, 0.6]);
        let o = ContractOption::new(10.0, 0.3, 40.0, 1.0);
        let none = high_with_share(0, &o, &params, &d, 0.0);
        assert!((none.expected_profit - 3.0 * 0.4 * (10.0 - 1.0 - 8.0)).abs() < 1e-12);
        let all = high_with_share(0, &o, &params, &d, 1.0);
        assert!((all.expected_profit - 3.0 * 0.4 * (10.0 - 1.0 - 2.0 * 1.3)).abs() < 1e-12);
    }

    #[test]
    fn low_equals_high_without_over_band_mass() {
        let params = p(10.0, 20.0, 1.0, 2.0, 3);
        let d = TypeDistribution::new(vec![1.0, 2.0], vec![0.4, 0.6]);
        let o = ContractOption::new(10.0, 0.3, 5.0, 1.0);
        let low = low_with_threshold(0, &o, &params, &d, 0.3);
        let high = high_with_share(0, &o, &params, &d, 0.3);
        // The only difference is the provisioned band top, m(1+Δ_th) against m(1+δ).
        let extra = 3.0 * 0.4 * 2.0 * 0.3 * (cost::threshold(&o, &params) - 0.3);
        assert!((high.expected_profit - low.expected_profit - extra).abs() < 1e-12);
        assert!(profit_high(0, &o, &params, &d, &VariationModel::Uniform).is_err());
    }

    #[test]
    fn per_customer_profit_examples() {
        let params = p(10.0, 20.0, 1.0, 1.0, 1);
        let menu = ContractMenu::new(vec![
            ContractOption::new(10.0, 1.0, 40.0, 1.0),
            ContractOption::new(10.0, 0.5, 40.0, 1.2),
        ]);
        assert_eq!(per_customer_profit(1.0, Choice::Baseline, &menu, &params, 1.0), 7.0);
        assert!((per_customer_profit(1.0, Choice::Option(0), &menu, &params, 1.2) - (10.0 - 2.0 - 1.0)).abs() < 1e-12);
        assert!((per_customer_profit(1.0, Choice::Option(1), &menu, &params, 1.2) - 7.2).abs() < 1e-12);
    }

    #[test]
    fn lemma_example_pessimistic_capacity() {
        let params = p(1.0, 2.0, 0.2, 0.1, 10);
        let d = TypeDistribution::new(vec![1.0, 1.2], vec![0.5, 0.5]);
        let menu =
            ContractMenu::new(vec![ContractOption::new(1.0, 0.7, 4.0, 1.0), ContractOption::new(1.0, 0.5, 4.0, 1.2)]);
        let c1 = pessimistic_capacity(0, &menu, &params, &d).unwrap();
        assert!((c1 - 1.95).abs() < 1e-12, "{c1}");
        let single = TypeDistribution::new(vec![2.0], vec![1.0]);
        let m1 = ContractMenu::new(vec![ContractOption::new(1.0, 0.5, 4.0, 2.0)]);
        let c = pessimistic_capacity(0, &m1, &params, &single).unwrap();
        assert!((c - (3.0 * 0.5 + 4.0 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn all_baseline_menu_earns_baseline() {
        let params = p(5.0, 8.0, 1.0, 1.5, 4);
        let d = TypeDistribution::new(vec![1.0, 2.0, 5.0], vec![0.2, 0.3, 0.5]);
        let menu = ContractMenu::all_baseline(&params, &d);
        let b = BehaviorMode { mode: Mode::Optimistic, tie_tol: 0.0 };
        let v = total_profit(&menu, &params, &d, &b, &VariationModel::Uniform).unwrap();
        assert!((v - baseline_profit(&params, &d)).abs() < 1e-9);
        let loose =
            total_profit(&menu, &params, &d, &BehaviorMode::optimistic(&params), &VariationModel::Uniform).unwrap();
        assert!((loose - v).abs() < 1e-6 * v.abs());
    }
}
