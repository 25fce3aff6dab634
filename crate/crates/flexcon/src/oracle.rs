//! Brute-force validators: seeded Monte Carlo simulation of customers and
//! markets, and direct numerical quadrature of expected profit. Neither uses
//! the closed-form expectations in [`crate::cost`] or [`crate::profit`]
//! except for the customer choice rule itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::cost::{self, Choice};
use crate::error::{Error, Result};
use crate::model::{BehaviorMode, ContractMenu, ContractOption, MarketParams, TypeDistribution, VariationModel};
use crate::numeric::{self, erf, erf_inv};

/// Samples per independent RNG stream in the cost oracles.
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: BehaviorMode,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, mode: BehaviorMode) -> Self {
        SimConfig { trials, seed, mode }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub mean_profit: f64,
    pub std_error: f64,
    /// Mean and standard error of a type's realised customer cost.
    pub per_type_costs: Vec<(f64, f64)>,
    /// Mean provisioned capacity per customer of each type.
    pub per_type_capacity: Vec<f64>,
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::Usage("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Running count, mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Moments {
            count: self.count + other.count,
            mean: self.mean + d * nb / n,
            m2: self.m2 + other.m2 + d * d * na * nb / n,
        }
    }

    /// Merges in a fixed binary-tree order so the result depends only on
    /// the order of `parts`.
    fn merge_all(parts: &[Moments]) -> Moments {
        match parts.len() {
            0 => Moments::default(),
            1 => parts[0],
            len => Moments::merge_all(&parts[..len / 2]).merge(Moments::merge_all(&parts[len / 2..])),
        }
    }

    /// Mean and standard error of the mean.
    fn summary(&self) -> (f64, f64) {
        match self.count {
            0 => (f64::NAN, f64::NAN),
            1 => (self.mean, 0.0),
            n => (self.mean, (self.m2.max(0.0) / (n - 1) as f64 / n as f64).sqrt()),
        }
    }
}

/// Mean and standard error of independent draws `draw(rng)`, generated in
/// fixed-size chunks with one RNG stream each.
pub(crate) fn sample_mean<F>(trials: u64, seed: u64, draw: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c);
            let mut acc = Moments::default();
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                acc.push(draw(&mut rng));
            }
            acc
        })
        .collect();
    Moments::merge_all(&parts).summary()
}

/// Total cost of a customer with realised demand `x`: the bill for the
/// adjusted demand plus the elasticity cost of any curtailment.
fn sampled_cost(x: f64, option: &ContractOption, k: f64) -> Result<f64> {
    let xp = cost::demand_response(x, option, k)?;
    Ok(cost::billed_cost(xp, option)? + k * (x - xp).max(0.0))
}

/// Monte Carlo estimate of a customer's expected cost with demand uniform on
/// `[m(1−Δ), m(1+Δ)]`.
pub fn oracle_expected_cost(
    m: f64,
    delta_cust: f64,
    option: &ContractOption,
    k: f64,
    cfg: &SimConfig,
) -> Result<(f64, f64)> {
    check_trials(cfg.trials)?;
    sampled_cost(m, option, k)?;
    Ok(sample_mean(cfg.trials, cfg.seed, |rng| {
        let x = m * (1.0 + delta_cust * (2.0 * rng.gen::<f64>() - 1.0));
        sampled_cost(x, option, k).unwrap_or(f64::NAN)
    }))
}

/// Monte Carlo estimate of a customer's expected cost with demand
/// `normal(m, σ²)` truncated to `[m(1−Δ), m(1+Δ)]`, sampled by inverse CDF.
pub fn oracle_tn_demand_cost(
    m: f64,
    delta_cust: f64,
    option: &ContractOption,
    k: f64,
    sigma: f64,
    cfg: &SimConfig,
) -> Result<(f64, f64)> {
    check_trials(cfg.trials)?;
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let z = erf(m * delta_cust / (SQRT_2 * sigma));
    Ok(sample_mean(cfg.trials, cfg.seed, |rng| {
        let y = erf_inv((2.0 * rng.gen::<f64>() - 1.0) * z);
        let x = (m + SQRT_2 * sigma * y).clamp(m * (1.0 - delta_cust), m * (1.0 + delta_cust));
        sampled_cost(x, option, k).unwrap_or(f64::NAN)
    }))
}

fn sample_type(dist: &TypeDistribution, u: f64) -> usize {
    let mut acc = 0.0;
    for (i, h) in dist.probs.iter().enumerate() {
        acc += h;
        if u < acc {
            return i;
        }
    }
    dist.len() - 1
}

struct TrialStats {
    profit: f64,
    cost: Vec<Moments>,
    capacity: Vec<f64>,
}

/// Simulates the market `cfg.trials` times. In each trial every one of the
/// `N` customers draws a type and a variation, picks a contract under
/// `cfg.mode`, draws a realised demand and adjusts it. The supplier collects
/// the bills, pays `c0` per unit consumed and `ĉ` per unit of provisioned
/// capacity. Results do not depend on the number of worker threads.
pub fn simulate_market(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    variation: &VariationModel,
    cfg: &SimConfig,
) -> Result<SimResult> {
    check_trials(cfg.trials)?;
    crate::model::validate_scenario(params, dist, Some(menu), variation).into_result()?;
    let n_types = dist.len();
    let customers = params.n_customers;
    let trials: Vec<TrialStats> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(cfg.seed, t);
            let mut revenue = 0.0;
            let mut energy = 0.0;
            let mut capacity_total = 0.0;
            let mut cost = vec![Moments::default(); n_types];
            let mut capacity = vec![0.0; n_types];
            for _ in 0..customers {
                let i = sample_type(dist, rng.gen());
                let d = variation.sample(rng.gen());
                let m = dist.means[i];
                let x = m * (1.0 + d * (2.0 * rng.gen::<f64>() - 1.0));
                let choice = cost::choose_option(i, d, menu, params, dist, &cfg.mode);
                let cap = crate::profit::provisioned_capacity(choice, menu, params, dist);
                let (bill, used, paid) = match choice {
                    Choice::Baseline => (x * params.p0, x, x * params.p0),
                    Choice::Option(j) => {
                        let o = &menu.options[j];
                        let xp = cost::demand_response(x, o, params.k).unwrap_or(f64::NAN);
                        let bill = cost::billed_cost(xp, o).unwrap_or(f64::NAN);
                        (bill, xp, bill + params.k * (x - xp).max(0.0))
                    }
                };
                revenue += bill;
                energy += used;
                capacity_total += cap;
                cost[i].push(paid);
                capacity[i] += cap;
            }
            TrialStats { profit: revenue - params.c0 * energy - params.c_hat * capacity_total, cost, capacity }
        })
        .collect();
    let profits: Vec<Moments> = trials
        .iter()
        .map(|t| {
            let mut m = Moments::default();
            m.push(t.profit);
            m
        })
        .collect();
    let (mean_profit, std_error) = Moments::merge_all(&profits).summary();
    let mut per_type_costs = Vec::with_capacity(n_types);
    let mut per_type_capacity = Vec::with_capacity(n_types);
    for i in 0..n_types {
        let merged = Moments::merge_all(&trials.iter().map(|t| t.cost[i]).collect::<Vec<_>>());
        per_type_costs.push(merged.summary());
        let cap = numeric::pairwise_sum(&trials.iter().map(|t| t.capacity[i]).collect::<Vec<_>>());
        per_type_capacity.push(if merged.count == 0 { f64::NAN } else { cap / merged.count as f64 });
    }
    Ok(SimResult { mean_profit, std_error, per_type_costs, per_type_capacity })
}

const GL_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] =
    [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];

/// Expected (customer cost, bill, adjusted demand) for uniform demand on
/// `[m(1−Δ), m(1+Δ)]`, by Gauss–Legendre on each piece between band edges.
fn quad_account(m: f64, delta_cust: f64, option: &ContractOption, k: f64) -> (f64, f64, f64) {
    let eval = |x: f64| {
        let xp = cost::demand_response(x, option, k).unwrap_or(f64::NAN);
        let bill = cost::billed_cost(xp, option).unwrap_or(f64::NAN);
        (bill + k * (x - xp).max(0.0), bill, xp)
    };
    if delta_cust <= 0.0 {
        return eval(m);
    }
    let (lo, hi) = (m * (1.0 - delta_cust), m * (1.0 + delta_cust));
    let mut cuts = vec![lo, hi];
    cuts.extend([option.lower(), option.upper()].into_iter().filter(|&c| c > lo && c < hi));
    cuts.sort_by(f64::total_cmp);
    let mut acc = (0.0, 0.0, 0.0);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        for (t, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let (c, r, e) = eval(0.5 * (a + b) + half * t);
            acc.0 += wt * half * c;
            acc.1 += wt * half * r;
            acc.2 += wt * half * e;
        }
    }
    let width = hi - lo;
    (acc.0 / width, acc.1 / width, acc.2 / width)
}

/// Capacity the supplier provisions for an option, computed from the
/// quadrature costs: the band top for high penalty, otherwise
/// `m(1 + Δ*)` where `Δ*` is where the own cost exceeds `m·p0` by the
/// default tie tolerance.
fn quad_capacity(option: &ContractOption, params: &MarketParams) -> Result<f64> {
    if option.is_high_penalty(params.k) {
        return Ok(option.upper());
    }
    let m = option.center;
    let tie_tol = crate::model::DEFAULT_TIE_TOL_REL * params.p0;
    let gap = |d: f64| quad_account(m, d, option, params.k).0 - m * params.p0 - tie_tol;
    let lo = option.delta;
    let th = if gap(1.0) <= 0.0 {
        1.0
    } else if gap(lo) >= 0.0 {
        lo
    } else {
        numeric::bisect(gap, lo, 1.0, 1e-15)?
    };
    Ok(m * (1.0 + th))
}

/// Expected supplier profit by direct quadrature over `Δ`. For each `Δ` the
/// customer's costs and the supplier's per-customer profit come from
/// Gauss–Legendre integration over demand, the choice from the shared rule
/// in [`cost::resolve_choice`]. Integration over `Δ` is adaptive Simpson on
/// 1024 panels with a tolerance of 1e-10 relative to the per-customer scale;
/// unresolved error beyond that is a numerical failure.
pub fn quadrature_profit(
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    behavior: &BehaviorMode,
    variation: &VariationModel,
) -> Result<f64> {
    crate::model::validate_scenario(params, dist, Some(menu), variation).into_result()?;
    let caps: Vec<f64> = menu.options.iter().map(|o| quad_capacity(o, params)).collect::<Result<_>>()?;
    let mn = dist.m_max();
    let mut parts = Vec::with_capacity(dist.len());
    for i in 0..dist.len() {
        let m = dist.means[i];
        let s_at = |d: f64| {
            let accounts: Vec<(f64, f64, f64)> = menu.options.iter().map(|o| quad_account(m, d, o, params.k)).collect();
            let costs: Vec<f64> = accounts.iter().map(|a| a.0).collect();
            let s_of = |c: Choice| match c {
                Choice::Baseline => m * params.p0 - params.c0 * m - params.c_hat * 2.0 * mn,
                Choice::Option(j) => accounts[j].1 - params.c0 * accounts[j].2 - params.c_hat * caps[j],
            };
            s_of(cost::resolve_choice(i, &costs, m * params.p0, behavior, s_of))
        };
        let s = match *variation {
            VariationModel::PointMass { delta } => s_at(delta),
            _ => {
                let scale = m * params.p0 + 2.0 * mn * params.c_hat;
                let f = |d: f64| s_at(d) * variation.pdf(d);
                numeric::integrate_panels(&f, 0.0, 1.0, 1024, 1e-10 * scale)?
            }
        };
        parts.push(params.n() * dist.probs[i] * s);
    }
    Ok(numeric::pairwise_sum(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variation_is_exact() {
        let o = ContractOption::new(1.0, 0.2, 10.0, 1.0);
        let cfg = SimConfig::new(1000, 7, BehaviorMode::optimistic(&MarketParams::new(2.0, 4.0, 0.0, 0.1, 1)));
        let (mean, se) = oracle_expected_cost(1.3, 0.0, &o, 4.0, &cfg).unwrap();
        assert_eq!(se, 0.0);
        assert!((mean - (1.2 + 4.0 * 0.1)).abs() < 1e-12);
    }

    #[test]
    fn cost_oracle_is_deterministic() {
        let o = ContractOption::new(1.0, 0.2, 10.0, 1.0);
        let cfg = SimConfig::new(50_000, 11, BehaviorMode::optimistic(&MarketParams::new(2.0, 4.0, 0.0, 0.1, 1)));
        let a = oracle_expected_cost(1.0, 0.6, &o, 4.0, &cfg).unwrap();
        let b = oracle_expected_cost(1.0, 0.6, &o, 4.0, &cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.0 - 1.266_666_666_666_7).abs() < 4.0 * a.1);
    }

    #[test]
    fn quadrature_account_matches_closed_forms() {
        let o = ContractOption::new(1.0, 0.2, 10.0, 1.0);
        let (c, _, _) = quad_account(1.0, 0.6, &o, 4.0);
        assert!((c - 19.0 / 15.0).abs() < 1e-13);
        let cross = ContractOption::new(1.0, 0.5, 10.0, 1.0);
        let (c, _, _) = quad_account(3.0, 0.05, &cross, 2.0);
        assert!((c - 4.5).abs() < 1e-13);
    }

    #[test]
    fn sample_type_respects_cumulative_probs() {
        let d = TypeDistribution::new(vec![1.0, 2.0, 3.0], vec![0.2, 0.5, 0.3]);
        assert_eq!(sample_type(&d, 0.1), 0);
        assert_eq!(sample_type(&d, 0.2), 1);
        assert_eq!(sample_type(&d, 0.69), 1);
        assert_eq!(sample_type(&d, 0.999_999), 2);
    }
}
