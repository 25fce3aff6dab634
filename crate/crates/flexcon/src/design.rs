//! Contract synthesis: the approximate menu, the ε-reduced robust menu, the
//! IC-free super-optimal benchmark, incentive-compatibility checks and
//! gain-ratio certification.

use crate::cost;
use crate::error::{Error, Result};
use crate::model::{
    validate, BehaviorMode, ContractMenu, ContractOption, EvaluationReport, MarketParams, Mode, TypeDistribution,
    VariationModel,
};
use crate::numeric;
use crate::profit;

/// Default number of uniform grid points used by [`verify_ic`].
pub const IC_GRID: usize = 1001;

/// Number of halvings tried by the automatic ε search.
pub const AUTO_EPSILON_STEPS: i32 = 40;

/// A synthesised menu together with its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutput {
    pub menu: ContractMenu,
    /// Price reduction below `p0` (0 for the approximate and super-optimal menus).
    pub epsilon: f64,
    /// Whether `epsilon` was found by the automatic search.
    pub auto_epsilon: bool,
    pub ic_verified: bool,
    pub report: EvaluationReport,
}

/// How the robust menu's ε is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Fixed(f64),
    Auto,
}

/// The high-penalty sentinel `p̄ = 2k` used by every synthesised menu.
pub fn penalty_sentinel(params: &MarketParams) -> f64 {
    2.0 * params.k
}

/// Band half-widths of the approximate menu: `mₙ/mᵢ − 1/2` when
/// `mₙ/mᵢ ≤ 3/2`, otherwise 1.
pub fn approx_deltas(dist: &TypeDistribution) -> Vec<f64> {
    let mn = dist.m_max();
    dist.means.iter().map(|&m| if mn / m <= 1.5 { mn / m - 0.5 } else { 1.0 }).collect()
}

/// Menu with the given band half-widths, all prices `price` and `p̄ = 2k`.
pub fn menu_from_deltas(deltas: &[f64], price: f64, params: &MarketParams, dist: &TypeDistribution) -> ContractMenu {
    ContractMenu::new(
        deltas
            .iter()
            .zip(&dist.means)
            .map(|(&d, &m)| ContractOption::new(price, d, penalty_sentinel(params), m))
            .collect(),
    )
}

/// The approximate menu `Φ′`: prices `p0`, bands from [`approx_deltas`].
/// It does not depend on the type probabilities.
pub fn approx_contract(params: &MarketParams, dist: &TypeDistribution) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    let menu = menu_from_deltas(&approx_deltas(dist), params.p0, params, dist);
    finish(menu, 0.0, false, params, dist, Mode::Optimistic, &VariationModel::Uniform)
}

pub(crate) fn finish(
    menu: ContractMenu,
    epsilon: f64,
    auto_epsilon: bool,
    params: &MarketParams,
    dist: &TypeDistribution,
    mode: Mode,
    variation: &VariationModel,
) -> Result<DesignOutput> {
    let behavior = BehaviorMode::new(mode, params);
    let report = profit::evaluate(&menu, params, dist, &behavior, variation)?;
    let ic_verified = ic_holds(&menu, params, dist, IC_GRID);
    Ok(DesignOutput { menu, epsilon, auto_epsilon, ic_verified, report })
}

/// The best single option for type `i` when IC is ignored, and the per-customer
/// gain over baseline it earns in expectation.
///
/// Customers with `Δ ≤ T` subscribe. For a target `T`, the best band is
/// `δ = T(1 − 2ĉ/k)` (or 0 if negative) and the price makes the marginal
/// customer indifferent. The gain `F(T)·[ĉ(2mₙ − m(1+δ)) − mk(T−δ)²/(4T)]`
/// is then maximised over `T`.
fn super_option(
    i: usize,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
) -> (ContractOption, f64) {
    let m = dist.means[i];
    let mn = dist.m_max();
    let (k, c) = (params.k, params.c_hat);
    let band = |t: f64| (t * (1.0 - 2.0 * c / k)).max(0.0);
    let discount = |t: f64, d: f64| if t > 0.0 { k * (t - d) * (t - d) / (4.0 * t) } else { 0.0 };
    let per_subscriber = |t: f64| {
        let d = band(t);
        c * (2.0 * mn - m * (1.0 + d)) - m * discount(t, d)
    };
    let t = match *variation {
        VariationModel::Uniform if k >= 2.0 * c => ((2.0 * mn / m - 1.0) / (2.0 * (1.0 - c / k))).min(1.0),
        VariationModel::PointMass { delta } => delta,
        _ => {
            let g = |t: f64| variation.cdf(t) * per_subscriber(t);
            numeric::scan_golden_max(&g, 0.0, 1.0, 64, 1e-10).0
        }
    };
    let d = band(t);
    let option = ContractOption::new(params.p0 - discount(t, d), d, penalty_sentinel(params), m);
    (option, variation.cdf(t) * per_subscriber(t))
}

/// `P̂*`, the super-optimal profit, for any variation model.
pub fn super_optimal_profit(params: &MarketParams, dist: &TypeDistribution, variation: &VariationModel) -> Result<f64> {
    if !(params.k > params.c_hat) {
        return Err(Error::Domain(format!(
            "super-optimal menu needs k > c_hat (k = {}, c_hat = {})",
            params.k, params.c_hat
        )));
    }
    let gains: Vec<f64> =
        (0..dist.len()).map(|i| params.n() * dist.probs[i] * super_option(i, params, dist, variation).1).collect();
    Ok(profit::baseline_profit(params, dist) + numeric::pairwise_sum(&gains))
}

/// Closed-form super-optimal per-type profit term for uniform `Δ` and `k ≥ 2ĉ`.
pub fn super_optimal_term(i: usize, params: &MarketParams, dist: &TypeDistribution) -> f64 {
    let m = dist.means[i];
    let mn = dist.m_max();
    let (p0, k, c0, c) = (params.p0, params.k, params.c0, params.c_hat);
    let nh = params.n() * dist.probs[i];
    if mn / m <= (k - c) / k + 0.5 {
        nh * (m * p0 - m * c0 - 2.0 * mn * c + k * c * (2.0 * mn - m).powi(2) / (4.0 * m * (k - c)))
    } else {
        nh * (m * p0 - m * c0 - 2.0 * m * c + m * c * c / k)
    }
}

/// The super-optimal menu `Φ̂` for uniform `Δ`. IC is not imposed, so
/// `ic_verified` reports whatever [`verify_ic`] finds.
pub fn super_optimal(params: &MarketParams, dist: &TypeDistribution) -> Result<DesignOutput> {
    super_optimal_with(params, dist, &VariationModel::Uniform)
}

/// [`super_optimal`] for an arbitrary variation model.
pub fn super_optimal_with(
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    if !(params.k > params.c_hat) {
        return Err(Error::Domain(format!(
            "super-optimal menu needs k > c_hat (k = {}, c_hat = {})",
            params.k, params.c_hat
        )));
    }
    let menu = ContractMenu::new((0..dist.len()).map(|i| super_option(i, params, dist, variation).0).collect());
    finish(menu, 0.0, false, params, dist, Mode::Optimistic, variation)
}

/// The robust menu `Φ″`: the approximate bands with every price `p0 − ε`,
/// evaluated under pessimistic tie-breaking.
pub fn robust_contract(params: &MarketParams, dist: &TypeDistribution, epsilon: Epsilon) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    let base = menu_from_deltas(&approx_deltas(dist), params.p0, params, dist);
    robust_from(&base, params, dist, epsilon, &VariationModel::Uniform)
}

/// Lowers every price of `base` by ε (fixed or searched) and evaluates the
/// result pessimistically under `variation`.
pub fn robust_from(
    base: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    epsilon: Epsilon,
    variation: &VariationModel,
) -> Result<DesignOutput> {
    let (eps, auto) = match epsilon {
        Epsilon::Fixed(e) => {
            if !(e > 0.0 && e < params.p0) {
                return Err(Error::Domain(format!("epsilon must lie in (0, p0), got {e}")));
            }
            (e, false)
        }
        Epsilon::Auto => (auto_epsilon(base, params, dist, variation)?, true),
    };
    finish(base.discounted(eps), eps, auto, params, dist, Mode::Pessimistic, variation)
}

/// Largest `ε = p0·2⁻ᵗ` (`t = 1, 2, …`) for which the discounted menu is IC
/// and its pessimistic profit is at least the `ε → 0⁺` limit.
pub fn auto_epsilon(
    base: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
) -> Result<f64> {
    let limit = profit::pessimistic_limit_profit(base, params, dist, variation)?;
    let slack = 1e-9 * params.n() * params.p0 * dist.m_max();
    let behavior = BehaviorMode::pessimistic(params);
    let mut last_gap = f64::NAN;
    for t in 1..=AUTO_EPSILON_STEPS {
        let eps = params.p0 * 0.5f64.powi(t);
        let menu = base.discounted(eps);
        if !ic_holds(&menu, params, dist, IC_GRID) {
            continue;
        }
        let value = profit::total_profit(&menu, params, dist, &behavior, variation)?;
        if value >= limit - slack {
            return Ok(eps);
        }
        last_gap = limit - value;
    }
    Err(Error::Numerical(format!(
        "no epsilon in p0*2^-1 .. p0*2^-{AUTO_EPSILON_STEPS} is IC with profit at least the limit {limit} (last shortfall {last_gap:e})"
    )))
}

/// A located failure of incentive compatibility: type `i` strictly prefers
/// option `j` at variation `delta` by `gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcViolation {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IcReport {
    pub violations: Vec<IcViolation>,
}

impl IcReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Grid of `grid_size` uniform points on `[0, 1]` plus every point where type
/// `i`'s costs change form.
fn ic_points(
    i: usize,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    grid_size: usize,
) -> Vec<f64> {
    let m = dist.means[i];
    let mut pts = numeric::linspace(0.0, 1.0, grid_size.max(2));
    for o in &menu.options {
        pts.extend(cost::geometry_breakpoints(m, o));
        pts.push(cost::delta_ij(m, o));
    }
    pts.push(menu.options[i].delta);
    pts.push(cost::threshold(&menu.options[i], params));
    pts.retain(|d| (0.0..=1.0).contains(d));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn scan_ic(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    grid_size: usize,
    stop_at_first: bool,
) -> IcReport {
    let tol = BehaviorMode::optimistic(params).tie_tol;
    let mut report = IcReport::default();
    for i in 0..dist.len() {
        let outside = dist.means[i] * params.p0;
        for d in ic_points(i, menu, params, dist, grid_size) {
            let costs = cost::option_costs(i, d, menu, dist, params.k);
            let own = costs[i].min(outside);
            for (j, &c) in costs.iter().enumerate() {
                if j == i {
                    continue;
                }
                let gap = own - c.min(outside);
                if gap > tol {
                    report.violations.push(IcViolation { i, j, delta: d, gap });
                    if stop_at_first {
                        return report;
                    }
                }
            }
        }
    }
    report
}

/// Checks that no type can lower its expected cost (capped at baseline) by
/// taking another type's option, on a uniform grid of `grid_size` points plus
/// all breakpoints. Returns every violation found.
pub fn verify_ic(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    grid_size: usize,
) -> Result<IcReport> {
    if grid_size < 2 {
        return Err(Error::Usage(format!("IC grid needs at least 2 points, got {grid_size}")));
    }
    if menu.len() != dist.len() {
        return Err(Error::Usage(format!("menu has {} options for {} types", menu.len(), dist.len())));
    }
    Ok(scan_ic(menu, params, dist, grid_size, false))
}

/// [`verify_ic`] that stops at the first violation.
pub fn ic_holds(menu: &ContractMenu, params: &MarketParams, dist: &TypeDistribution, grid_size: usize) -> bool {
    menu.len() == dist.len() && scan_ic(menu, params, dist, grid_size.max(2), true).passed()
}

/// Gain ratios of `Φ′` (optimistic) and `Φ″` with automatic ε (pessimistic).
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub approx: DesignOutput,
    pub robust: DesignOutput,
    pub optimistic_ratio: Option<f64>,
    pub pessimistic_ratio: Option<f64>,
}

/// Computes both certified ratios and fails with an invariant error if either
/// falls below its bound (1/2 and 1/3, less 1e-9). An undefined ratio
/// (`P̂* ≤ P0`, e.g. `ĉ = 0`) is reported but not treated as a failure.
pub fn certify_bounds(params: &MarketParams, dist: &TypeDistribution) -> Result<Certification> {
    let approx = approx_contract(params, dist)?;
    let robust = robust_contract(params, dist, Epsilon::Auto)?;
    let optimistic_ratio = approx.report.gain_ratio;
    let pessimistic_ratio = robust.report.gain_ratio;
    if let Some(r) = optimistic_ratio.filter(|&r| r < 0.5 - 1e-9) {
        return Err(Error::Invariant(format!("approximate menu gain ratio {r} is below 1/2")));
    }
    if let Some(r) = pessimistic_ratio.filter(|&r| r < 1.0 / 3.0 - 1e-9) {
        return Err(Error::Invariant(format!("robust menu gain ratio {r} is below 1/3")));
    }
    Ok(Certification { approx, robust, optimistic_ratio, pessimistic_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn approx_examples() {
        let params = MarketParams::new(1.0, 2.0, 0.2, 0.1, 10);
        let d = approx_deltas(&TypeDistribution::uniform(vec![1.0, 1.2]));
        assert!(close(d[0], 0.7, 1e-15) && close(d[1], 0.5, 1e-15));
        assert_eq!(approx_deltas(&TypeDistribution::uniform(vec![1.0, 2.0])), vec![1.0, 0.5]);
        assert_eq!(approx_deltas(&TypeDistribution::uniform(vec![3.0])), vec![0.5]);
        let out = approx_contract(&params, &TypeDistribution::new(vec![1.0, 1.2], vec![0.3, 0.7])).unwrap();
        assert!(out.ic_verified);
        assert!(out.menu.options.iter().all(|o| o.p == 1.0 && o.p_bar == 4.0));
    }

    #[test]
    fn super_optimal_extremal_case() {
        // k = 2ĉ lies outside the validated region (it needs ĉ > p0/2), so the
        // option builder is exercised directly.
        let params = MarketParams::new(10.0, 4.0, 1.0, 2.0, 5);
        let dist = TypeDistribution::new(vec![1.0, 3.0], vec![0.5, 0.5]);
        let (top, _) = super_option(1, &params, &dist, &VariationModel::Uniform);
        assert!(close(top.delta, 0.0, 1e-15));
        assert!(close(top.p, 10.0 - 1.0, 1e-12));
        assert!(close(cost::threshold(&top, &params), 1.0, 1e-12));
        let (low, _) = super_option(0, &params, &dist, &VariationModel::Uniform);
        assert!(close(low.delta, 0.0, 1e-15));
        assert!(close(low.p, 10.0 - 1.0, 1e-12));
    }

    #[test]
    fn super_optimal_menu_limits() {
        let params = MarketParams::new(10.0, 12.0, 1.0, 5.0, 5);
        let dist = TypeDistribution::new(vec![1.0, 3.0], vec![0.5, 0.5]);
        let out = super_optimal(&params, &dist).unwrap();
        let low = &out.menu.options[0];
        assert!(close(low.delta, 1.0 - 10.0 / 12.0, 1e-15));
        assert!(close(low.p, 10.0 - 25.0 / 12.0, 1e-12));
        assert!(close(out.report.gain_ratio.unwrap(), 1.0, 1e-9));
        let zero = params.with_c_hat(0.0);
        let p = super_optimal_profit(&zero, &dist, &VariationModel::Uniform).unwrap();
        assert!(close(p, 5.0 * (0.5 * 9.0 + 0.5 * 27.0), 1e-9));
        assert!(super_optimal_profit(&params.with_k(5.0), &dist, &VariationModel::Uniform).is_err());
    }

    #[test]
    fn super_optimal_profit_matches_closed_form() {
        let params = MarketParams::new(7.0, 20.0, 1.5, 2.0, 3);
        for means in [vec![1.0, 1.3], vec![1.0, 4.0], vec![2.0, 2.5, 9.0]] {
            let dist = TypeDistribution::uniform(means);
            let closed: f64 = (0..dist.len()).map(|i| super_optimal_term(i, &params, &dist)).sum();
            let general = super_optimal_profit(&params, &dist, &VariationModel::Uniform).unwrap();
            assert!(close(closed, general, 1e-9 * closed.abs()), "{closed} vs {general}");
            let via_scan =
                super_optimal_profit(&params, &dist, &VariationModel::TruncatedNormal { mu: 0.5, sigma: 1e4 }).unwrap();
            assert!(close(closed, via_scan, 1e-5 * closed.abs()), "{closed} vs {via_scan}");
        }
    }

    #[test]
    fn robust_menu_prices_and_errors() {
        let params = MarketParams::new(1.0, 2.0, 0.2, 0.1, 10);
        let dist = TypeDistribution::new(vec![1.0, 1.2], vec![0.5, 0.5]);
        let out = robust_contract(&params, &dist, Epsilon::Fixed(0.001)).unwrap();
        assert!(out.menu.options.iter().all(|o| close(o.p, 0.999, 1e-15)));
        assert!(robust_contract(&params, &dist, Epsilon::Fixed(0.0)).is_err());
        let auto = robust_contract(&params, &dist, Epsilon::Auto).unwrap();
        assert!(auto.auto_epsilon && auto.epsilon > 0.0 && auto.ic_verified);
        assert!(auto.report.gain_ratio.unwrap() >= 1.0 / 3.0);
    }

    #[test]
    fn inflated_band_breaks_ic() {
        let params = MarketParams::new(1.0, 2.0, 0.2, 0.1, 10);
        let dist = TypeDistribution::new(vec![1.0, 1.2], vec![0.5, 0.5]);
        let menu =
            ContractMenu::new(vec![ContractOption::new(0.9, 0.2, 4.0, 1.0), ContractOption::new(0.9, 1.0, 4.0, 1.2)]);
        let report = verify_ic(&menu, &params, &dist, IC_GRID).unwrap();
        assert!(!report.passed());
        let th = cost::threshold(&menu.options[0], &params);
        assert!(report.violations.iter().any(|v| v.i == 0 && v.j == 1 && v.delta > 0.2 && v.delta <= th));
        assert!(verify_ic(&menu, &params, &dist, 1).is_err());
    }
}
