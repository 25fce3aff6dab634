//! Seeded random instances over the parameter ranges used for the bound
//! certification and extension studies, and the studies themselves.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::design::{self, Epsilon};
use crate::error::Result;
use crate::extensions;
use crate::model::{BehaviorMode, MarketParams, TypeDistribution, VariationModel};
use crate::oracle::rng_for;
use crate::profit;

/// A generated market.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub params: MarketParams,
    pub dist: TypeDistribution,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Draw from `(lo, hi]`.
fn uniform_open_low(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    hi - (hi - lo) * rng.gen::<f64>()
}

/// Flat Dirichlet probabilities via normalised exponentials.
fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

/// Increasing means: `m₁ ∈ [lo, hi]`, then `mᵢ₊₁ ∈ (mᵢ·a, mᵢ·b]`.
fn means(rng: &mut ChaCha8Rng, n: usize, first: (f64, f64), step: (f64, f64)) -> Vec<f64> {
    let mut m = vec![uniform(rng, first.0, first.1)];
    while m.len() < n {
        let last = *m.last().unwrap();
        m.push(uniform_open_low(rng, last * step.0, last * step.1));
    }
    m
}

/// Instance `index` of the certification family with `n` types:
/// `m₁ ∈ [1, 10]`, `mᵢ₊₁ ∈ (mᵢ, 10mᵢ]`, `p0 ∈ [1, 100]`, `k ∈ (p0, 10p0]`,
/// `ĉ ∈ [0.001p0, p0/2]`, `c0 ∈ [0, p0)`, flat Dirichlet `h`, `N = 10`.
pub fn random_instance(seed: u64, index: u64, n: usize) -> Instance {
    let mut rng = rng_for(seed, index);
    let means = means(&mut rng, n, (1.0, 10.0), (1.0, 10.0));
    let probs = dirichlet(&mut rng, n);
    let p0 = uniform(&mut rng, 1.0, 100.0);
    let k = uniform_open_low(&mut rng, p0, 10.0 * p0);
    let c_hat = uniform(&mut rng, 0.001 * p0, 0.5 * p0);
    let c0 = uniform(&mut rng, 0.0, p0);
    Instance { params: MarketParams::new(p0, k, c0, c_hat, 10), dist: TypeDistribution::new(means, probs) }
}

/// `count` certification instances with `n = 2 + index mod 5`.
pub fn certification_set(seed: u64, count: u64) -> Vec<Instance> {
    (0..count).map(|i| random_instance(seed, i, 2 + (i % 5) as usize)).collect()
}

/// Summary of a randomised gain-ratio study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySummary {
    pub ratios: Vec<f64>,
    /// Trials whose ratio was undefined (super-optimal gain not positive).
    pub skipped: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
}

impl StudySummary {
    fn from(values: Vec<Option<f64>>) -> StudySummary {
        let skipped = values.iter().filter(|v| v.is_none()).count();
        let ratios: Vec<f64> = values.into_iter().flatten().collect();
        let mut sorted = ratios.clone();
        sorted.sort_by(f64::total_cmp);
        let len = sorted.len();
        let median = match len {
            0 => f64::NAN,
            _ if len % 2 == 1 => sorted[len / 2],
            _ => 0.5 * (sorted[len / 2 - 1] + sorted[len / 2]),
        };
        let mean = crate::numeric::pairwise_sum(&ratios) / len as f64;
        StudySummary { mean, median, min: sorted.first().copied().unwrap_or(f64::NAN), ratios, skipped }
    }
}

/// Draws for the truncated-normal variation studies.
struct TnDraw {
    params: MarketParams,
    dist: TypeDistribution,
    mu: f64,
    sigma: f64,
}

fn tn_draw(rng: &mut ChaCha8Rng, n: usize, step: (f64, f64), c_hat_low: f64) -> TnDraw {
    let means = means(rng, n, (1.0, 10.0), step);
    let probs = dirichlet(rng, n);
    let p0 = uniform(rng, 1.0, 100.0);
    let k = uniform_open_low(rng, p0, 10.0 * p0);
    let c_hat = uniform(rng, c_hat_low * p0, 0.5 * p0);
    let c0 = uniform(rng, 0.0, p0);
    let mu = uniform(rng, 0.0, 1.0);
    let sigma = uniform_open_low(rng, 0.0, 10.0);
    TnDraw { params: MarketParams::new(p0, k, c0, c_hat, 10), dist: TypeDistribution::new(means, probs), mu, sigma }
}

/// Truncated-normal variation, optimistic: gain ratio of the approximate
/// menu against the super-optimal benchmark over `trials` random markets
/// with three types.
pub fn study_tn_variation_optimistic(trials: u64, seed: u64) -> Result<StudySummary> {
    let values: Vec<Result<Option<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let d = tn_draw(&mut rng_for(seed, t), 3, (1.0, 10.0), 0.0);
            let variation = VariationModel::TruncatedNormal { mu: d.mu, sigma: d.sigma };
            let deltas = extensions::tn_variation_deltas(&d.dist, d.mu, d.sigma)?;
            let menu = design::menu_from_deltas(&deltas, d.params.p0, &d.params, &d.dist);
            let value =
                profit::total_profit(&menu, &d.params, &d.dist, &BehaviorMode::optimistic(&d.params), &variation)?;
            let best = design::super_optimal_profit(&d.params, &d.dist, &variation)?;
            Ok(profit::ratio(value, profit::baseline_profit(&d.params, &d.dist), best))
        })
        .collect();
    Ok(StudySummary::from(values.into_iter().collect::<Result<_>>()?))
}

/// Truncated-normal variation, pessimistic: the same comparison for the
/// menu with prices `0.999·p0`, two types with `m₂ ∈ [1.1m₁, 10m₁]` and
/// `ĉ ≥ 0.001p0`.
pub fn study_tn_variation_pessimistic(trials: u64, seed: u64) -> Result<StudySummary> {
    let values: Vec<Result<Option<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let d = tn_draw(&mut rng_for(seed, t), 2, (1.1, 10.0), 0.001);
            let variation = VariationModel::TruncatedNormal { mu: d.mu, sigma: d.sigma };
            let deltas = extensions::tn_variation_deltas(&d.dist, d.mu, d.sigma)?;
            let menu =
                design::menu_from_deltas(&deltas, d.params.p0, &d.params, &d.dist).discounted(0.001 * d.params.p0);
            let value =
                profit::total_profit(&menu, &d.params, &d.dist, &BehaviorMode::pessimistic(&d.params), &variation)?;
            let best = design::super_optimal_profit(&d.params, &d.dist, &variation)?;
            Ok(profit::ratio(value, profit::baseline_profit(&d.params, &d.dist), best))
        })
        .collect();
    Ok(StudySummary::from(values.into_iter().collect::<Result<_>>()?))
}

/// Truncated-normal demand, optimistic: gain ratio of the approximate menu
/// against the demand-model super-optimal benchmark, two types,
/// `p0 ∈ [1, 10]`, `σ ∈ (0, 10]`.
pub fn study_tn_demand(trials: u64, seed: u64) -> Result<StudySummary> {
    let values: Vec<Result<Option<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let means = means(&mut rng, 2, (1.0, 10.0), (1.0, 10.0));
            let probs = dirichlet(&mut rng, 2);
            let p0 = uniform(&mut rng, 1.0, 10.0);
            let k = uniform_open_low(&mut rng, p0, 10.0 * p0);
            let c_hat = uniform(&mut rng, 0.0, 0.5 * p0);
            let c0 = uniform(&mut rng, 0.0, p0);
            let sigma = uniform_open_low(&mut rng, 0.0, 10.0);
            let params = MarketParams::new(p0, k, c0, c_hat, 10);
            let dist = TypeDistribution::new(means, probs);
            let menu = design::menu_from_deltas(&design::approx_deltas(&dist), p0, &params, &dist);
            let mut value = 0.0;
            for (i, o) in menu.options.iter().enumerate() {
                value += extensions::tn_demand_profit_high(i, o, &params, &dist, sigma)?.expected_profit;
            }
            let best = extensions::tn_demand_super_optimal_profit(&params, &dist, sigma)?;
            Ok(profit::ratio(value, profit::baseline_profit(&params, &dist), best))
        })
        .collect();
    Ok(StudySummary::from(values.into_iter().collect::<Result<_>>()?))
}

/// Gain ratios of the approximate (optimistic) and robust automatic-ε
/// (pessimistic) menus on one instance.
pub fn certified_ratios(inst: &Instance) -> Result<(Option<f64>, Option<f64>)> {
    let a = design::approx_contract(&inst.params, &inst.dist)?;
    let r = design::robust_contract(&inst.params, &inst.dist, Epsilon::Auto)?;
    Ok((a.report.gain_ratio, r.report.gain_ratio))
}
