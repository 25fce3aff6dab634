//! Customer-side analytics: billing, demand response, expected costs,
//! participation thresholds and contract choice.
//!
//! Realized demand of a type-`m` customer with variation degree `Δ` is
//! uniform on `[m(1−Δ), m(1+Δ)]`.

use crate::error::{Error, Result};
use crate::model::{
    BehaviorMode, ContractMenu, ContractOption, MarketParams, Mode, TypeDistribution, DEFAULT_TIE_TOL_REL,
};
use crate::profit;

/// Which side of `k` the penalty price sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `p̄ > k`: customers curtail demand above the band.
    HighPenalty,
    /// `p̄ ≤ k`: customers keep their demand and pay `p̄` above the band.
    LowPenalty,
}

pub fn regime(option: &ContractOption, k: f64) -> Regime {
    if option.is_high_penalty(k) {
        Regime::HighPenalty
    } else {
        Regime::LowPenalty
    }
}

/// Relative position of the demand range `[mᵢ(1−Δ), mᵢ(1+Δ)]` and the band
/// `[L, U] = [mⱼ(1−δⱼ), mⱼ(1+δⱼ)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossCase {
    /// Range entirely below the band.
    A,
    /// Range inside the band.
    B,
    /// Range straddles `L`, stays below `U`.
    C,
    /// Range straddles `U`, stays above `L`.
    D,
    /// Range covers the whole band.
    E,
    /// Range entirely above the band.
    F,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRangeGeometry {
    pub case: CrossCase,
    /// `Δᵢⱼ`: the largest `Δ` whose range fits inside the band, when the
    /// customer's mean lies in the band.
    pub delta_ij: Option<f64>,
}

/// `Δᵢⱼ = mⱼ(1+δⱼ)/mᵢ − 1` for a lower option, `1 − mⱼ(1−δⱼ)/mᵢ` for a higher one.
/// For the customer's own center this is `δⱼ`.
pub fn delta_ij(m_i: f64, option_j: &ContractOption) -> f64 {
    if option_j.center < m_i {
        option_j.upper() / m_i - 1.0
    } else if option_j.center > m_i {
        1.0 - option_j.lower() / m_i
    } else {
        option_j.delta
    }
}

/// Classifies the geometry. At shared boundaries the earlier of
/// A, F, B, E, C, D wins; the closed forms agree there.
pub fn cross_geometry(m_i: f64, delta_cust: f64, option_j: &ContractOption) -> CrossRangeGeometry {
    let lo = m_i * (1.0 - delta_cust);
    let hi = m_i * (1.0 + delta_cust);
    let l = option_j.lower();
    let u = option_j.upper();
    let case = if hi < l {
        CrossCase::A
    } else if lo > u {
        CrossCase::F
    } else if lo >= l && hi <= u {
        CrossCase::B
    } else if lo <= l && hi >= u {
        CrossCase::E
    } else if lo <= l {
        CrossCase::C
    } else {
        CrossCase::D
    };
    let inside = m_i >= l && m_i <= u;
    CrossRangeGeometry { case, delta_ij: inside.then(|| delta_ij(m_i, option_j)) }
}

/// Values of `Δ ∈ (0, 1)` at which the geometry case can change.
pub fn geometry_breakpoints(m_i: f64, option_j: &ContractOption) -> Vec<f64> {
    let l = option_j.lower();
    let u = option_j.upper();
    [l / m_i - 1.0, u / m_i - 1.0, 1.0 - l / m_i, 1.0 - u / m_i].into_iter().filter(|d| *d > 0.0 && *d < 1.0).collect()
}

fn check_delta(delta_cust: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta_cust) {
        Ok(())
    } else {
        Err(Error::Domain(format!("variation degree {delta_cust} outside [0, 1]")))
    }
}

/// Billed cost `c̄(x′)` for consumption `x′` under an option.
pub fn billed_cost(x_prime: f64, option: &ContractOption) -> Result<f64> {
    if !(x_prime >= 0.0) {
        return Err(Error::Domain(format!("negative consumption {x_prime}")));
    }
    Ok(billed_unchecked(x_prime, option))
}

fn billed_unchecked(x_prime: f64, o: &ContractOption) -> f64 {
    let l = o.lower();
    let u = o.upper();
    if x_prime < l {
        l * o.p
    } else if x_prime <= u {
        x_prime * o.p
    } else {
        x_prime * o.p_bar + u * (o.p - o.p_bar)
    }
}

/// Consumption `x′` a customer with realized demand `x` settles on.
pub fn demand_response(x: f64, option: &ContractOption, k: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("negative demand {x}")));
    }
    Ok(response_unchecked(x, option, k))
}

fn response_unchecked(x: f64, o: &ContractOption, k: f64) -> f64 {
    let l = o.lower();
    let u = o.upper();
    if x > u {
        if k < o.p_bar {
            u
        } else {
            x
        }
    } else if x < l {
        l
    } else {
        x
    }
}

/// Total cost to the customer for realized demand `x`: bill plus elasticity cost.
pub fn realized_cost(x: f64, option: &ContractOption, k: f64) -> f64 {
    let xp = response_unchecked(x, option, k);
    billed_unchecked(xp, option) + k * (x - xp).max(0.0)
}

/// Expected cost of a type-`m` customer on its own option (center `m`).
pub fn expected_cost_own(m: f64, delta_cust: f64, option: &ContractOption, k: f64) -> Result<f64> {
    check_delta(delta_cust)?;
    Ok(own_unchecked(m, delta_cust, option, k))
}

fn own_unchecked(m: f64, d: f64, o: &ContractOption, k: f64) -> f64 {
    if d <= o.delta {
        m * o.p
    } else {
        let rate = o.over_band_rate(k);
        m * o.p + m * rate / (4.0 * d) * (d - o.delta) * (d - o.delta)
    }
}

/// Expected cost of a type-`mᵢ` customer on another type's option, by the
/// six geometry cases. Above the band the rate is `k` (high penalty) or `p̄ⱼ`.
pub fn expected_cost_cross(m_i: f64, delta_cust: f64, option_j: &ContractOption, k: f64) -> Result<f64> {
    check_delta(delta_cust)?;
    Ok(cross_unchecked(m_i, delta_cust, option_j, k))
}

fn cross_unchecked(m: f64, d: f64, o: &ContractOption, k: f64) -> f64 {
    let p = o.p;
    let kk = o.over_band_rate(k);
    let l = o.lower();
    let u = o.upper();
    match cross_geometry(m, d, o).case {
        CrossCase::A => l * p,
        CrossCase::B => m * p,
        CrossCase::C => p / (4.0 * m) * (m * m * d + (m - l) * (m - l) / d + 2.0 * m * m + 2.0 * m * l),
        CrossCase::D => {
            1.0 / (4.0 * m)
                * ((kk - p) * m * m * d
                    + (kk - p) * (u - m) * (u - m) / d
                    + 2.0 * kk * m * m
                    + 2.0 * p * m * m
                    + 2.0 * (p - kk) * m * u)
        }
        CrossCase::E => {
            let mj = o.center;
            let dj = o.delta;
            let quad = (-4.0 * dj * p + kk * (1.0 + dj) * (1.0 + dj)) * mj * mj
                - 2.0 * (kk * (1.0 + dj) - 2.0 * dj * p) * m * mj
                + kk * m * m;
            1.0 / (4.0 * m)
                * (kk * m * m * d + quad / d + 2.0 * kk * m * m + 2.0 * (-kk * (1.0 + dj) + 2.0 * p) * m * mj)
        }
        CrossCase::F => (p - kk) * u + kk * m,
    }
}

/// Expected cost of type `m_i` on `option`, using the own-option formula when
/// the option is centered at `m_i`.
pub fn expected_cost(m_i: f64, delta_cust: f64, option: &ContractOption, k: f64) -> f64 {
    if option.center == m_i {
        own_unchecked(m_i, delta_cust, option, k)
    } else {
        cross_unchecked(m_i, delta_cust, option, k)
    }
}

/// Expected revenue, consumption and customer cost for one option.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Outcome {
    /// Expected bill, i.e. the supplier's revenue.
    pub revenue: f64,
    /// Expected consumption `E[x′]`.
    pub energy: f64,
    /// Expected bill plus elasticity cost.
    pub cost: f64,
}

/// Expected outcome of `option` for a type-`m` customer with variation `Δ`.
///
/// Bill, consumption and elasticity cost are linear in `x` between the band
/// edges, so the mean over each piece is its midpoint value.
pub fn expected_outcome(m: f64, delta_cust: f64, option: &ContractOption, k: f64) -> Outcome {
    let eval = |x: f64| {
        let xp = response_unchecked(x, option, k);
        let bill = billed_unchecked(xp, option);
        (bill, xp, bill + k * (x - xp).max(0.0))
    };
    let lo = m * (1.0 - delta_cust);
    let hi = m * (1.0 + delta_cust);
    if hi <= lo {
        let (r, e, c) = eval(m);
        return Outcome { revenue: r, energy: e, cost: c };
    }
    let mut cuts = vec![lo];
    for edge in [option.lower(), option.upper()] {
        if edge > lo && edge < hi && edge > *cuts.last().unwrap() {
            cuts.push(edge);
        }
    }
    cuts.push(hi);
    let width = hi - lo;
    let mut out = Outcome::default();
    for w in cuts.windows(2) {
        let share = (w[1] - w[0]) / width;
        let (r, e, c) = eval(0.5 * (w[0] + w[1]));
        out.revenue += share * r;
        out.energy += share * e;
        out.cost += share * c;
    }
    out
}

/// Participation threshold `Δ_th` for given band, price and over-band rate.
pub fn threshold_for(delta: f64, p: f64, p0: f64, rate: f64) -> f64 {
    let a = rate * delta + 2.0 * (p0 - p);
    let rad = (a * a - rate * rate * delta * delta).max(0.0).sqrt();
    ((rad + a) / rate).clamp(delta, 1.0)
}

/// `Δ_th`: customers of the option's type with `Δ ≤ Δ_th` take it over
/// baseline, counting costs within `tie_tol` of baseline as ties settled in
/// the option's favour. Uses `k` in the high-penalty regime and `p̄` otherwise.
pub fn threshold_with_tol(option: &ContractOption, params: &MarketParams, tie_tol: f64) -> f64 {
    let p0 = params.p0 + tie_tol / option.center;
    threshold_for(option.delta, option.p, p0, option.over_band_rate(params.k))
}

/// [`threshold_with_tol`] at the default tie tolerance, matching
/// [`choose_option`] with a default [`BehaviorMode`].
pub fn threshold(option: &ContractOption, params: &MarketParams) -> f64 {
    threshold_with_tol(option, params, DEFAULT_TIE_TOL_REL * params.p0)
}

/// A customer's pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Choice {
    Baseline,
    /// Zero-based option index.
    Option(usize),
}

/// Picks from a cost vector. `profit_of` is only consulted in pessimistic mode.
pub fn resolve_choice<P: Fn(Choice) -> f64>(
    own: usize,
    option_costs: &[f64],
    baseline_cost: f64,
    behavior: &BehaviorMode,
    profit_of: P,
) -> Choice {
    let min = option_costs.iter().copied().fold(baseline_cost, f64::min);
    let cut = min + behavior.tie_tol;
    match behavior.mode {
        Mode::Optimistic => {
            if option_costs.get(own).is_some_and(|&c| c <= cut) {
                return Choice::Option(own);
            }
            if baseline_cost <= cut {
                return Choice::Baseline;
            }
            match option_costs.iter().position(|&c| c <= cut) {
                Some(j) => Choice::Option(j),
                None => Choice::Baseline,
            }
        }
        Mode::Pessimistic => {
            let mut best: Option<(Choice, f64)> = None;
            let candidates = std::iter::once((Choice::Baseline, baseline_cost))
                .chain(option_costs.iter().enumerate().map(|(j, &c)| (Choice::Option(j), c)));
            for (choice, c) in candidates {
                if c <= cut {
                    let s = profit_of(choice);
                    if best.is_none_or(|(_, bs)| s < bs) {
                        best = Some((choice, s));
                    }
                }
            }
            best.map(|(c, _)| c).unwrap_or(Choice::Baseline)
        }
    }
}

/// Expected cost of every option for type `i` at variation `Δ`.
pub fn option_costs(i: usize, delta_cust: f64, menu: &ContractMenu, dist: &TypeDistribution, k: f64) -> Vec<f64> {
    let m = dist.means[i];
    menu.options
        .iter()
        .enumerate()
        .map(|(j, o)| if j == i { own_unchecked(m, delta_cust, o, k) } else { cross_unchecked(m, delta_cust, o, k) })
        .collect()
}

/// The option (or baseline) a type-`i` customer with variation `Δ` picks.
///
/// Optimistic ties go to the dedicated option, then baseline, then the
/// lowest index. Pessimistic ties go to whichever choice earns the supplier the
/// least, baseline included.
pub fn choose_option(
    i: usize,
    delta_cust: f64,
    menu: &ContractMenu,
    params: &MarketParams,
    dist: &TypeDistribution,
    behavior: &BehaviorMode,
) -> Choice {
    let costs = option_costs(i, delta_cust, menu, dist, params.k);
    let baseline = dist.means[i] * params.p0;
    resolve_choice(i, &costs, baseline, behavior, |c| {
        profit::customer_account(i, delta_cust, c, menu, params, dist).profit(params)
    })
}
