//! Peak-based pricing comparator: customers pay `pE` per unit of energy plus
//! `pD` per unit of their peak slot power, and may shave peaks at elasticity
//! cost `k`. The supplier's profit is compared with per-slot robust menus.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design;
use crate::error::{Error, Result};
use crate::model::{BehaviorMode, MarketParams, TypeDistribution, VariationModel};
use crate::oracle;
use crate::profit;

/// A month split into `T = per_slot_dist.len()` slots of `L` hours each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotModel {
    pub hours_per_slot: f64,
    pub per_slot_dist: Vec<TypeDistribution>,
    pub p_e: f64,
    pub p_d: f64,
}

impl SlotModel {
    pub fn slots(&self) -> usize {
        self.per_slot_dist.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_slot_dist.is_empty() {
            return Err(Error::Config("peak model needs at least one slot".into()));
        }
        if !(self.hours_per_slot >= 1.0) {
            return Err(Error::Config(format!("hours per slot must be at least 1, got {}", self.hours_per_slot)));
        }
        if !(self.p_e > 0.0 && self.p_d > self.p_e) {
            return Err(Error::Config(format!("need 0 < pE < pD, got pE = {}, pD = {}", self.p_e, self.p_d)));
        }
        Ok(())
    }

    /// The same slots with each slot's means rescaled so that the largest is
    /// `ratio` times the smallest (intermediate means spaced geometrically).
    pub fn with_mean_ratio(&self, ratio: f64) -> SlotModel {
        let per_slot_dist = self
            .per_slot_dist
            .iter()
            .map(|d| {
                let n = d.len();
                let m1 = d.means[0];
                let means =
                    (0..n).map(|j| if n == 1 { m1 } else { m1 * ratio.powf(j as f64 / (n - 1) as f64) }).collect();
                TypeDistribution::new(means, d.probs.clone())
            })
            .collect();
        SlotModel { per_slot_dist, ..self.clone() }
    }

    /// The four-slot instance with `m₁(t) = t`, `m₂(t) = 2m₁(t)`.
    pub fn example() -> SlotModel {
        let h = [0.5, 0.6, 0.55, 0.5];
        SlotModel {
            hours_per_slot: 168.0,
            per_slot_dist: (0..4)
                .map(|t| {
                    let m1 = (t + 1) as f64;
                    TypeDistribution::new(vec![m1, 2.0 * m1], vec![h[t], 1.0 - h[t]])
                })
                .collect(),
            p_e: 49.0,
            p_d: 5258.0,
        }
    }
}

/// Market parameters of the example: `k = 75`, `c0 = 11`, `N = 10` and
/// `p0 = 1.4·pE`.
pub fn example_params(model: &SlotModel, c_hat: f64) -> MarketParams {
    MarketParams::new(1.4 * model.p_e, 75.0, 11.0, c_hat, 10)
}

/// Customer's best response to peak pricing. Caps the profile at the level
/// (0 or one of the slot values) minimising
/// `pE·Σx′ + pD·max(x′)/L + k·Σ(x − x′)⁺`, preferring less shaving on ties.
/// Returns the supplier-facing payment `pE·Σx′ + pD·max(x′)/L` and `x′`.
pub fn peak_payment(x: &[f64], model: &SlotModel, k: f64) -> Result<(f64, Vec<f64>)> {
    if let Some(v) = x.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("slot demand must be nonnegative, got {v}")));
    }
    let mut levels: Vec<f64> = x.to_vec();
    levels.push(0.0);
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let pay = |xs: &[f64]| {
        let peak = xs.iter().copied().fold(0.0, f64::max);
        model.p_e * xs.iter().sum::<f64>() + model.p_d * peak / model.hours_per_slot
    };
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for level in levels {
        let adjusted: Vec<f64> = x.iter().map(|&v| v.min(level)).collect();
        let payment = pay(&adjusted);
        let curtailed: f64 = x.iter().zip(&adjusted).map(|(a, b)| a - b).sum();
        let total = payment + k * curtailed;
        if best.as_ref().is_none_or(|b| total < b.0) {
            best = Some((total, payment, adjusted));
        }
    }
    let (_, payment, adjusted) = best.expect("at least one candidate level");
    Ok((payment, adjusted))
}

/// Expected per-customer `(payment − c0·Σx′)` under peak pricing, by Monte
/// Carlo with independent slots, uniform `Δ` and uniform demand.
pub fn peak_margin(model: &SlotModel, params: &MarketParams, trials: u64, seed: u64) -> Result<(f64, f64)> {
    model.validate()?;
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    Ok(oracle::sample_mean(trials, seed, |rng| {
        let x: Vec<f64> = model
            .per_slot_dist
            .iter()
            .map(|d| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut i = d.len() - 1;
                for (j, h) in d.probs.iter().enumerate() {
                    acc += h;
                    if u < acc {
                        i = j;
                        break;
                    }
                }
                let delta: f64 = rng.gen();
                d.means[i] * (1.0 + delta * (2.0 * rng.gen::<f64>() - 1.0))
            })
            .collect();
        match peak_payment(&x, model, params.k) {
            Ok((pay, adj)) => pay - params.c0 * adj.iter().sum::<f64>(),
            Err(_) => f64::NAN,
        }
    }))
}

/// Capacity the supplier provisions per customer under peak pricing: the
/// worst-case profile (`2·max mean` in every slot) after the customer's
/// shaving, summed over slots.
pub fn peak_capacity(model: &SlotModel, k: f64) -> Result<f64> {
    let worst: Vec<f64> = model.per_slot_dist.iter().map(|d| 2.0 * d.m_max()).collect();
    Ok(peak_payment(&worst, model, k)?.1.iter().sum())
}

/// Sum over slots of the pessimistic profit of the robust menu with price
/// reduction `epsilon`.
pub fn flexible_profit(model: &SlotModel, params: &MarketParams, epsilon: f64) -> Result<f64> {
    let behavior = BehaviorMode::pessimistic(params);
    let mut total = 0.0;
    for dist in &model.per_slot_dist {
        let base = design::menu_from_deltas(&design::approx_deltas(dist), params.p0, params, dist);
        if !(epsilon > 0.0 && epsilon < params.p0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, p0), got {epsilon}")));
        }
        total += profit::total_profit(&base.discounted(epsilon), params, dist, &behavior, &VariationModel::Uniform)?;
    }
    Ok(total)
}

/// One cell of the comparison grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakCell {
    pub c_hat: f64,
    pub mean_ratio: f64,
    pub flexible_profit: f64,
    pub peak_profit: f64,
    pub profit_ratio: f64,
}

/// Flexible-to-peak profit ratio on a `ĉ × m₂/m₁` grid. `params.c_hat` is
/// replaced by each grid value. Peak revenue is estimated once per mean
/// ratio with `trials` Monte Carlo draws from `seed`. Rows are in grid order
/// (mean ratio outer, `ĉ` inner).
pub fn compare_profits(
    model: &SlotModel,
    params: &MarketParams,
    epsilon: f64,
    c_hat_grid: &[f64],
    ratio_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<PeakCell>> {
    model.validate()?;
    let n = params.n();
    let rows: Vec<Result<Vec<PeakCell>>> = ratio_grid
        .par_iter()
        .map(|&r| {
            let scaled = model.with_mean_ratio(r);
            let (margin, _) = peak_margin(&scaled, params, trials, seed)?;
            let capacity = peak_capacity(&scaled, params.k)?;
            c_hat_grid
                .iter()
                .map(|&c| {
                    let p = params.with_c_hat(c);
                    let flexible = flexible_profit(&scaled, &p, epsilon)?;
                    let peak = n * (margin - c * capacity);
                    Ok(PeakCell {
                        c_hat: c,
                        mean_ratio: r,
                        flexible_profit: flexible,
                        peak_profit: peak,
                        profit_ratio: flexible / peak,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(c_hat_grid.len() * ratio_grid.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}
