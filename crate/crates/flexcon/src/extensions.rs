//! Generalisations beyond uniform variation: truncated-normal variation
//! degree, truncated-normal realised demand, and a continuous mean-usage
//! distribution served by bucketed options.

use std::f64::consts::{PI, SQRT_2};

use crate::cost;
use crate::design::{self, DesignOutput, Epsilon};
use crate::error::{Error, Result};
use crate::model::{
    validate, BehaviorMode, ContractMenu, ContractOption, EvaluationReport, MarketParams, Mode, TypeDistribution,
    VariationModel,
};
use crate::numeric::{self, erf};
use crate::profit::{self, PerTypeProfit};

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")))
    }
}

/// `erf` at the truncation endpoints 0 and 1 for `normal(mu, sigma²)`.
fn tn_bounds(mu: f64, sigma: f64) -> (f64, f64) {
    let s = SQRT_2 * sigma;
    (erf(-mu / s), erf((1.0 - mu) / s))
}

/// CDF of `normal(mu, sigma²)` truncated to `[0, 1]`, clipped outside.
pub fn tn_cdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let (lo, hi) = tn_bounds(mu, sigma);
    Ok(((erf((x - mu) / (SQRT_2 * sigma)) - lo) / (hi - lo)).clamp(0.0, 1.0))
}

/// Density of the truncated normal on `[0, 1]`, zero outside.
pub fn tn_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    let (lo, hi) = tn_bounds(mu, sigma);
    let z = (x - mu) / sigma;
    2.0 * (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * sigma * (hi - lo))
}

/// Inverse CDF of the truncated normal for `u ∈ [0, 1]`.
pub fn tn_inverse_cdf(u: f64, mu: f64, sigma: f64) -> f64 {
    let (lo, hi) = tn_bounds(mu, sigma);
    let y = (lo + u * (hi - lo)).clamp(-1.0, 1.0);
    (mu + SQRT_2 * sigma * numeric::erf_inv(y)).clamp(0.0, 1.0)
}

/// High-penalty per-type profit when `Δ` is truncated normal: the uniform
/// formula with the subscribing share `Δ_th` replaced by `F(Δ_th)`.
pub fn tn_variation_profit_high(
    i: usize,
    option: &ContractOption,
    params: &MarketParams,
    dist: &TypeDistribution,
    mu: f64,
    sigma: f64,
) -> Result<PerTypeProfit> {
    check_sigma(sigma)?;
    profit::profit_high(i, option, params, dist, &VariationModel::TruncatedNormal { mu, sigma })
}

/// Band half-widths maximising `(2mₙ/mᵢ − 1 − δ)·F(δ)` over `[0, 1]`
/// (a 64-point scan refined by golden section to 1e-8).
pub fn tn_variation_deltas(dist: &TypeDistribution, mu: f64, sigma: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    let mn = dist.m_max();
    dist.means
        .iter()
        .map(|&m| {
            let g = |d: f64| (2.0 * mn / m - 1.0 - d) * tn_cdf(d, mu, sigma).unwrap_or(f64::NAN);
            Ok(numeric::scan_golden_max(&g, 0.0, 1.0, 64, 1e-8).0)
        })
        .collect()
}

/// Approximate menu for truncated-normal `Δ`: prices `p0`, bands from
/// [`tn_variation_deltas`], evaluated optimistically.
pub fn tn_variation_approx_contract(
    params: &MarketParams,
    dist: &TypeDistribution,
    mu: f64,
    sigma: f64,
) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    let menu = design::menu_from_deltas(&tn_variation_deltas(dist, mu, sigma)?, params.p0, params, dist);
    design::finish(menu, 0.0, false, params, dist, Mode::Optimistic, &VariationModel::TruncatedNormal { mu, sigma })
}

/// The ε-reduced variant of [`tn_variation_approx_contract`], evaluated
/// pessimistically.
pub fn tn_variation_robust_contract(
    params: &MarketParams,
    dist: &TypeDistribution,
    mu: f64,
    sigma: f64,
    epsilon: Epsilon,
) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    let base = design::menu_from_deltas(&tn_variation_deltas(dist, mu, sigma)?, params.p0, params, dist);
    design::robust_from(&base, params, dist, epsilon, &VariationModel::TruncatedNormal { mu, sigma })
}

/// Super-optimal menu and profit for truncated-normal `Δ`.
pub fn tn_variation_super_optimal(
    params: &MarketParams,
    dist: &TypeDistribution,
    mu: f64,
    sigma: f64,
) -> Result<DesignOutput> {
    check_sigma(sigma)?;
    design::super_optimal_with(params, dist, &VariationModel::TruncatedNormal { mu, sigma })
}

/// `E[(x − m(1+δ))⁺]` for `x ~ normal(m, σ²)` truncated to `[m(1−Δ), m(1+Δ)]`.
fn tn_demand_excess(m: f64, delta: f64, delta_cust: f64, sigma: f64) -> f64 {
    if delta_cust <= delta {
        return 0.0;
    }
    let s = SQRT_2 * sigma;
    let (a, b) = (m * delta_cust, m * delta);
    let z = erf(a / s);
    let gauss = -(-(b * b) / (2.0 * sigma * sigma)).exp() * (-(a * a - b * b) / (2.0 * sigma * sigma)).exp_m1();
    (sigma / (2.0 * PI).sqrt() * gauss - b * (z - erf(b / s)) / 2.0) / z
}

/// Expected cost of a type-`m` customer on its own option when realised
/// demand is `normal(m, σ²)` truncated to `[m(1−Δ), m(1+Δ)]`.
///
/// Demand below the band is billed at the band floor and demand above it
/// costs `K` per unit (`K = k` for high penalty, `p̄` otherwise), so by
/// symmetry the cost is `m·p + K·E[(x − m(1+δ))⁺]`.
pub fn tn_demand_expected_cost(m: f64, delta_cust: f64, option: &ContractOption, k: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if !(0.0..=1.0).contains(&delta_cust) {
        return Err(Error::Domain(format!("variation must lie in [0, 1], got {delta_cust}")));
    }
    Ok(m * option.p + option.over_band_rate(k) * tn_demand_excess(m, option.delta, delta_cust, sigma))
}

/// Participation threshold under truncated-normal demand: the `Δ ∈ [δ, 1]`
/// at which the expected cost reaches `m·p0` (1 if it never does).
pub fn tn_demand_threshold(option: &ContractOption, params: &MarketParams, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let m = option.center;
    if option.p >= params.p0 {
        return Ok(option.delta);
    }
    let gap = |d: f64| tn_demand_expected_cost(m, d, option, params.k, sigma).map(|c| c - m * params.p0);
    if gap(1.0)? <= 0.0 {
        return Ok(1.0);
    }
    numeric::bisect(|d| gap(d).unwrap_or(f64::NAN), option.delta, 1.0, 1e-13)
}

/// Per-type profit of an option under truncated-normal demand and uniform `Δ`.
pub fn tn_demand_profit_high(
    i: usize,
    option: &ContractOption,
    params: &MarketParams,
    dist: &TypeDistribution,
    sigma: f64,
) -> Result<PerTypeProfit> {
    if !option.is_high_penalty(params.k) {
        return Err(Error::Usage(format!("option {} is not in the high-penalty regime", i + 1)));
    }
    let th = tn_demand_threshold(option, params, sigma)?;
    Ok(profit::high_with_share(i, option, params, dist, th))
}

/// Best IC-free per-customer gain under truncated-normal demand:
/// `max_T T·max_δ [ĉ(2mₙ − m(1+δ)) − k·E[(x − m(1+δ))⁺]]`.
fn tn_demand_super_gain(m: f64, mn: f64, params: &MarketParams, sigma: f64) -> (f64, f64, f64) {
    let (c, k) = (params.c_hat, params.k);
    let inner = |t: f64| {
        let g = |d: f64| c * (2.0 * mn - m * (1.0 + d)) - k * tn_demand_excess(m, d, t, sigma);
        numeric::scan_golden_max(&g, 0.0, t, 64, 1e-9)
    };
    let outer = |t: f64| t * inner(t).1;
    let (t, value) = numeric::scan_golden_max(&outer, 0.0, 1.0, 64, 1e-9);
    (t, inner(t).0, value)
}

/// Super-optimal profit under truncated-normal demand and uniform `Δ`.
pub fn tn_demand_super_optimal_profit(params: &MarketParams, dist: &TypeDistribution, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let mn = dist.m_max();
    let gains: Vec<f64> = dist
        .means
        .iter()
        .zip(&dist.probs)
        .map(|(&m, &h)| params.n() * h * tn_demand_super_gain(m, mn, params, sigma).2)
        .collect();
    Ok(profit::baseline_profit(params, dist) + numeric::pairwise_sum(&gains))
}

/// Super-optimal menu under truncated-normal demand.
pub fn tn_demand_super_optimal(params: &MarketParams, dist: &TypeDistribution, sigma: f64) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    check_sigma(sigma)?;
    let mn = dist.m_max();
    let options = dist
        .means
        .iter()
        .map(|&m| {
            let (t, d, _) = tn_demand_super_gain(m, mn, params, sigma);
            let excess = tn_demand_excess(m, d, t, sigma);
            ContractOption::new(params.p0 - params.k * excess / m, d, design::penalty_sentinel(params), m)
        })
        .collect();
    tn_demand_report(ContractMenu::new(options), params, dist, sigma)
}

/// Approximate menu under truncated-normal demand. The bands follow the same
/// 3/2 rule as the uniform case and prices stay at `p0`.
pub fn tn_demand_approx_contract(params: &MarketParams, dist: &TypeDistribution, sigma: f64) -> Result<DesignOutput> {
    validate(params, dist, None).into_result()?;
    check_sigma(sigma)?;
    let menu = design::menu_from_deltas(&design::approx_deltas(dist), params.p0, params, dist);
    tn_demand_report(menu, params, dist, sigma)
}

fn tn_demand_report(
    menu: ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    sigma: f64,
) -> Result<DesignOutput> {
    let mut parts = Vec::with_capacity(dist.len());
    let mut capacity = Vec::with_capacity(dist.len());
    for (i, option) in menu.options.iter().enumerate() {
        let t = tn_demand_profit_high(i, option, params, dist, sigma)?;
        parts.push(t.expected_profit);
        capacity.push(t.capacity);
    }
    let menu_profit = numeric::pairwise_sum(&parts);
    let baseline = profit::baseline_profit(params, dist);
    let super_opt = tn_demand_super_optimal_profit(params, dist, sigma)?;
    let report = EvaluationReport {
        baseline_profit: baseline,
        menu_profit,
        super_optimal_profit: super_opt,
        gain_ratio: profit::ratio(menu_profit, baseline, super_opt),
        per_type_capacity: capacity,
        mode: Mode::Optimistic,
    };
    let ic_verified = tn_demand_ic_holds(&menu, params, dist, sigma, 201);
    Ok(DesignOutput { menu, epsilon: 0.0, auto_epsilon: false, ic_verified, report })
}

/// Expected cost of any option for a type-`m` customer under truncated-normal
/// demand, by adaptive quadrature of the realised cost over `x`.
pub fn tn_demand_cost_numeric(m: f64, delta_cust: f64, option: &ContractOption, k: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if delta_cust <= 0.0 {
        return Ok(cost::realized_cost(m, option, k));
    }
    let (lo, hi) = (m * (1.0 - delta_cust), m * (1.0 + delta_cust));
    let z = erf(m * delta_cust / (SQRT_2 * sigma));
    let density = |x: f64| {
        let u = (x - m) / sigma;
        2.0 * (-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * sigma * 2.0 * z)
    };
    let f = |x: f64| cost::realized_cost(x, option, k) * density(x);
    let mut cuts = vec![lo, hi, option.lower(), option.upper()];
    cuts.retain(|&x| x >= lo && x <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let scale = m * option.p.max(option.over_band_rate(k));
    let parts: Vec<f64> =
        cuts.windows(2).map(|w| numeric::adaptive_simpson(&f, w[0], w[1], 1e-13 * scale).value).collect();
    Ok(numeric::pairwise_sum(&parts))
}

/// IC check under truncated-normal demand on a uniform `Δ` grid.
pub fn tn_demand_ic_holds(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    sigma: f64,
    grid: usize,
) -> bool {
    let tol = BehaviorMode::optimistic(params).tie_tol;
    for i in 0..dist.len() {
        let m = dist.means[i];
        let outside = m * params.p0;
        for d in numeric::linspace(0.0, 1.0, grid.max(2)) {
            let costs: Vec<f64> = menu
                .options
                .iter()
                .map(|o| tn_demand_cost_numeric(m, d, o, params.k, sigma).unwrap_or(f64::NAN).min(outside))
                .collect();
            if costs.iter().enumerate().any(|(j, &c)| j != i && costs[i] - c > tol) {
                return false;
            }
        }
    }
    true
}

/// Mean usage uniform on `[0, b]`, split into `n` equal buckets.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContinuousMeanConfig {
    pub b: f64,
    pub n: u32,
}

impl ContinuousMeanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::Config(format!("continuous.b must be positive, got {}", self.b)));
        }
        if self.n == 0 {
            return Err(Error::Config("continuous.n must be at least 1".into()));
        }
        Ok(())
    }

    /// Bucket midpoints `(2i−1)b/(2n)`.
    pub fn centers(&self) -> Vec<f64> {
        let n = self.n as f64;
        (1..=self.n).map(|i| (2.0 * i as f64 - 1.0) * self.b / (2.0 * n)).collect()
    }
}

/// One option per bucket, centred at the midpoint, with the 3/2 band rule
/// applied against the largest midpoint.
pub fn continuous_mean_menu(cfg: &ContinuousMeanConfig, params: &MarketParams) -> Result<ContractMenu> {
    cfg.validate()?;
    let dist = TypeDistribution::uniform(cfg.centers());
    Ok(design::menu_from_deltas(&design::approx_deltas(&dist), params.p0, params, &dist))
}

/// `(P(Φ̂) − P0)/(ĉ·b)` for the bucketed menu.
fn continuous_gain_per_unit(n: u32) -> f64 {
    if n == 1 {
        return -5.0 / 16.0 * 2f64.ln() + 15.0 / 16.0 * 1.5f64.ln();
    }
    let nf = n as f64;
    let split = ((4 * n + 1) / 6) as usize;
    let mut terms = Vec::with_capacity(n as usize);
    for i in 1..=n as usize {
        let f = i as f64;
        if i <= split {
            terms.push((2.0 * f - 1.0) * (2.0 * nf - 2.0 * f + 1.0) / (nf * nf) * (2.0 * f / (2.0 * f - 1.0)).ln());
        } else {
            let a = (6.0 * f - 4.0 * nf - 1.0) * (4.0 * nf - 2.0 * f + 3.0) / (16.0 * nf * nf)
                * ((2.0 * f - 1.0) / (2.0 * f - 2.0)).ln();
            let b = (2.0 * f + 4.0 * nf - 3.0) * (2.0 * f - 4.0 * nf - 3.0) / (16.0 * nf * nf)
                * (2.0 * f / (2.0 * f - 1.0)).ln();
            terms.push(-(a + b));
        }
    }
    numeric::pairwise_sum(&terms)
}

/// Gain ratio of the bucketed menu against perfect information. Depends only
/// on `n`; the perfect-information gain is `(5/4)ĉb`.
pub fn continuous_gain_ratio(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("number of options must be at least 1".into()));
    }
    Ok(0.8 * continuous_gain_per_unit(n))
}

/// Baseline, bucketed-menu and perfect-information profits per customer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousProfits {
    pub baseline: f64,
    pub menu: f64,
    pub perfect_information: f64,
}

pub fn continuous_profits(cfg: &ContinuousMeanConfig, params: &MarketParams) -> Result<ContinuousProfits> {
    cfg.validate()?;
    let (p0, c0, c, b) = (params.p0, params.c0, params.c_hat, cfg.b);
    let baseline = 0.5 * (p0 - c0) * b - 2.0 * c * b;
    Ok(ContinuousProfits {
        baseline,
        menu: baseline + c * b * continuous_gain_per_unit(cfg.n),
        perfect_information: 0.5 * (p0 - c0) * b - 0.75 * c * b,
    })
}
