//! Domain types shared by every module, and their validation.
//!
//! Money and energy are plain `f64` values. Prices are money per energy unit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extensions;

/// Tolerance on `Σ h(mᵢ) = 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Default tie tolerance, as a multiple of `p0`.
pub const DEFAULT_TIE_TOL_REL: f64 = 1e-9;

/// Global economic parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Baseline price per unit.
    pub p0: f64,
    /// Elasticity penalty: a customer's cost of shedding one unit of demand.
    pub k: f64,
    /// Generation cost per unit.
    pub c0: f64,
    /// Linear capacity cost per provisioned unit.
    pub c_hat: f64,
    /// Number of customers `N`.
    #[serde(alias = "N")]
    pub n_customers: u32,
}

impl MarketParams {
    pub fn new(p0: f64, k: f64, c0: f64, c_hat: f64, n_customers: u32) -> Self {
        MarketParams { p0, k, c0, c_hat, n_customers }
    }

    pub fn n(&self) -> f64 {
        self.n_customers as f64
    }

    pub fn with_c_hat(mut self, c_hat: f64) -> Self {
        self.c_hat = c_hat;
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }
}

/// Discrete customer types: means `m₁ < … < mₙ` with probabilities `h(mᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeDistribution {
    pub means: Vec<f64>,
    pub probs: Vec<f64>,
}

impl TypeDistribution {
    pub fn new(means: Vec<f64>, probs: Vec<f64>) -> Self {
        TypeDistribution { means, probs }
    }

    /// Uniform probabilities over the given means.
    pub fn uniform(means: Vec<f64>) -> Self {
        let n = means.len();
        TypeDistribution { probs: vec![1.0 / n as f64; n], means }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Largest mean `mₙ`.
    pub fn m_max(&self) -> f64 {
        *self.means.last().expect("non-empty distribution")
    }
}

/// Distribution of the variation degree `Δ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum VariationModel {
    /// `Δ ~ U[0, 1]`.
    #[default]
    Uniform,
    /// `normal(mu, sigma²)` truncated to `[0, 1]`.
    TruncatedNormal { mu: f64, sigma: f64 },
    /// Every customer has the same `Δ`. Used for deterministic worked examples.
    PointMass { delta: f64 },
}

impl VariationModel {
    /// `P(Δ ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            VariationModel::Uniform => x.clamp(0.0, 1.0),
            VariationModel::TruncatedNormal { mu, sigma } => extensions::tn_cdf(x, mu, sigma).unwrap_or(f64::NAN),
            VariationModel::PointMass { delta } => {
                if x >= delta {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Density on `[0, 1]`. Not defined for `PointMass`.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        match *self {
            VariationModel::Uniform => 1.0,
            VariationModel::TruncatedNormal { mu, sigma } => extensions::tn_pdf(x, mu, sigma),
            VariationModel::PointMass { .. } => f64::NAN,
        }
    }

    /// Inverse-CDF sample from a uniform draw `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        match *self {
            VariationModel::Uniform => u,
            VariationModel::TruncatedNormal { mu, sigma } => extensions::tn_inverse_cdf(u, mu, sigma),
            VariationModel::PointMass { delta } => delta,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, VariationModel::Uniform)
    }

    fn violations(&self, out: &mut Vec<Violation>) {
        match *self {
            VariationModel::Uniform => {}
            VariationModel::TruncatedNormal { mu, sigma } => {
                if !(sigma > 0.0) || !sigma.is_finite() {
                    out.push(Violation::new("variation sigma > 0", format!("sigma = {sigma}")));
                }
                if !mu.is_finite() {
                    out.push(Violation::new("variation mu finite", format!("mu = {mu}")));
                }
            }
            VariationModel::PointMass { delta } => {
                if !(0.0..=1.0).contains(&delta) {
                    out.push(Violation::new("0 ≤ point-mass Δ ≤ 1", format!("delta = {delta}")));
                }
            }
        }
    }
}

/// One contract option `(p, δ, p̄)` anchored at `center = mᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractOption {
    pub p: f64,
    pub delta: f64,
    pub p_bar: f64,
    pub center: f64,
}

impl ContractOption {
    pub fn new(p: f64, delta: f64, p_bar: f64, center: f64) -> Self {
        ContractOption { p, delta, p_bar, center }
    }

    /// Lower band edge `m(1−δ)`.
    pub fn lower(&self) -> f64 {
        self.center * (1.0 - self.delta)
    }

    /// Upper band edge `m(1+δ)`.
    pub fn upper(&self) -> f64 {
        self.center * (1.0 + self.delta)
    }

    /// True when `p̄ > k`: customers curtail over-band demand instead of paying.
    pub fn is_high_penalty(&self, k: f64) -> bool {
        self.p_bar > k
    }

    /// The per-unit rate applied above the band: `k` if curtailing, else `p̄`.
    pub fn over_band_rate(&self, k: f64) -> f64 {
        if self.is_high_penalty(k) {
            k
        } else {
            self.p_bar
        }
    }

    pub fn with_price(mut self, p: f64) -> Self {
        self.p = p;
        self
    }
}

/// A menu: one option per customer type, aligned with `TypeDistribution::means`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractMenu {
    pub options: Vec<ContractOption>,
}

impl ContractMenu {
    pub fn new(options: Vec<ContractOption>) -> Self {
        ContractMenu { options }
    }

    pub fn len(&self) -> usize {
        self.options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.options.is_empty()
    }

    /// Every price lowered by `eps`.
    pub fn discounted(&self, eps: f64) -> ContractMenu {
        ContractMenu { options: self.options.iter().map(|o| o.with_price(o.p - eps)).collect() }
    }

    /// A menu nobody benefits from: `p = p0`, `δ = 0`.
    pub fn all_baseline(params: &MarketParams, dist: &TypeDistribution) -> ContractMenu {
        ContractMenu {
            options: dist.means.iter().map(|&m| ContractOption::new(params.p0, 0.0, 2.0 * params.k, m)).collect(),
        }
    }
}

/// Tie-breaking behaviour of customers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Ties resolve in the supplier's favour (dedicated option first).
    Optimistic,
    /// Ties resolve against the supplier, baseline included.
    Pessimistic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Optimistic => write!(f, "optimistic"),
            Mode::Pessimistic => write!(f, "pessimistic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorMode {
    pub mode: Mode,
    /// Absolute money tolerance under which two expected costs are equal.
    pub tie_tol: f64,
}

impl BehaviorMode {
    pub fn new(mode: Mode, params: &MarketParams) -> Self {
        BehaviorMode { mode, tie_tol: DEFAULT_TIE_TOL_REL * params.p0 }
    }

    pub fn optimistic(params: &MarketParams) -> Self {
        Self::new(Mode::Optimistic, params)
    }

    pub fn pessimistic(params: &MarketParams) -> Self {
        Self::new(Mode::Pessimistic, params)
    }
}

/// Expected payment, consumption and provisioned capacity of one customer.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerCustomerAccount {
    pub revenue: f64,
    pub energy: f64,
    pub capacity: f64,
}

impl PerCustomerAccount {
    /// Supplier's profit from this customer.
    pub fn profit(&self, params: &MarketParams) -> f64 {
        self.revenue - params.c0 * self.energy - params.c_hat * self.capacity
    }
}

/// Profits of a menu relative to the baseline and the super-optimal benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub baseline_profit: f64,
    pub menu_profit: f64,
    pub super_optimal_profit: f64,
    /// `(P − P0)/(P̂* − P0)`; `None` when `P̂* ≤ P0`.
    pub gain_ratio: Option<f64>,
    /// Expected provisioned capacity per customer of each type.
    pub per_type_capacity: Vec<f64>,
    pub mode: Mode,
}

/// One failed invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub name: String,
    pub detail: String,
}

impl Violation {
    fn new(name: &str, detail: String) -> Self {
        Violation { name: name.to_string(), detail }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.name, self.detail)
    }
}

/// Outcome of [`validate`]: the complete list of violated invariants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, name: &str) -> bool {
        self.violations.iter().any(|v| v.name == name)
    }

    /// Converts to a `Config` error listing every violation.
    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let list: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::Config(list.join("; ")))
        }
    }
}

fn params_violations(p: &MarketParams, out: &mut Vec<Violation>) {
    let all_finite = [p.p0, p.k, p.c0, p.c_hat].iter().all(|x| x.is_finite());
    if !all_finite {
        out.push(Violation::new("finite parameters", format!("{p:?}")));
        return;
    }
    if !(p.p0 > 0.0) {
        out.push(Violation::new("p0 > 0", format!("p0 = {}", p.p0)));
    }
    if !(p.c0 >= 0.0) {
        out.push(Violation::new("c0 ≥ 0", format!("c0 = {}", p.c0)));
    }
    if p.n_customers < 1 {
        out.push(Violation::new("N ≥ 1", format!("N = {}", p.n_customers)));
    }
    if !(p.c0 < p.p0) {
        out.push(Violation::new("c0 < p0", format!("c0 = {}, p0 = {}", p.c0, p.p0)));
    }
    if !(p.k > p.p0) {
        out.push(Violation::new("k > p0", format!("k = {}, p0 = {}", p.k, p.p0)));
    }
    if !(p.c_hat >= 0.0) {
        out.push(Violation::new("c_hat ≥ 0", format!("c_hat = {}", p.c_hat)));
    }
    if !(p.c_hat <= 0.5 * p.p0) {
        out.push(Violation::new("c_hat ≤ p0/2", format!("c_hat = {}, p0 = {}", p.c_hat, p.p0)));
    }
}

fn dist_violations(d: &TypeDistribution, out: &mut Vec<Violation>) {
    if d.means.is_empty() {
        out.push(Violation::new("n ≥ 1", "no customer types".into()));
        return;
    }
    if d.means.len() != d.probs.len() {
        out.push(Violation::new("|means| = |probs|", format!("{} means, {} probs", d.means.len(), d.probs.len())));
    }
    if d.means.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        out.push(Violation::new("mᵢ > 0", format!("means = {:?}", d.means)));
    }
    if d.means.windows(2).any(|w| !(w[0] < w[1])) {
        out.push(Violation::new("m₁ < m₂ < … < mₙ", format!("means = {:?}", d.means)));
    }
    if d.probs.iter().any(|&h| !(h >= 0.0)) {
        out.push(Violation::new("h(mᵢ) ≥ 0", format!("probs = {:?}", d.probs)));
    }
    let total: f64 = d.probs.iter().sum();
    if !((total - 1.0).abs() <= PROB_SUM_TOL) {
        out.push(Violation::new("Σ h(mᵢ) = 1", format!("sum = {total}")));
    }
}

fn menu_violations(params: &MarketParams, d: &TypeDistribution, menu: &ContractMenu, out: &mut Vec<Violation>) {
    if menu.len() != d.len() {
        out.push(Violation::new("menu length = n", format!("{} options for {} types", menu.len(), d.len())));
    }
    for (i, o) in menu.options.iter().enumerate() {
        let idx = i + 1;
        if !(0.0..=1.0).contains(&o.delta) {
            out.push(Violation::new("0 ≤ δ ≤ 1", format!("option {idx}: delta = {}", o.delta)));
        }
        if !(o.p <= params.p0) || !o.p.is_finite() {
            out.push(Violation::new("p ≤ p0", format!("option {idx}: p = {}, p0 = {}", o.p, params.p0)));
        }
        if !(o.p_bar > 0.0) {
            out.push(Violation::new("p̄ > 0", format!("option {idx}: p_bar = {}", o.p_bar)));
        }
        if !(o.center > 0.0) || !o.center.is_finite() {
            out.push(Violation::new("center > 0", format!("option {idx}: center = {}", o.center)));
        }
    }
}

/// Checks the standing assumptions on parameters, type distribution and
/// (optionally) a menu. Never panics; reports every violation.
pub fn validate(params: &MarketParams, dist: &TypeDistribution, menu: Option<&ContractMenu>) -> Validation {
    let mut violations = Vec::new();
    params_violations(params, &mut violations);
    dist_violations(dist, &mut violations);
    if let Some(menu) = menu {
        menu_violations(params, dist, menu, &mut violations);
    }
    Validation { violations }
}

/// [`validate`] plus the variation model.
pub fn validate_scenario(
    params: &MarketParams,
    dist: &TypeDistribution,
    menu: Option<&ContractMenu>,
    variation: &VariationModel,
) -> Validation {
    let mut v = validate(params, dist, menu);
    variation.violations(&mut v.violations);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_type() -> TypeDistribution {
        TypeDistribution::new(vec![1.0, 3.0], vec![0.9, 0.1])
    }

    #[test]
    fn capacity_cost_cap_is_named() {
        let p = MarketParams::new(10.0, 12.0, 2.0, 6.0, 5);
        let v = validate(&p, &two_type(), None);
        assert!(v.has("c_hat ≤ p0/2"), "{v:?}");
        let p = MarketParams::new(10.0, 12.0, 2.0, 4.0, 5);
        assert!(validate(&p, &two_type(), None).is_ok());
    }

    #[test]
    fn motivating_distribution_is_valid() {
        let p = MarketParams::new(1.0, 2.0, 0.2, 0.1, 10);
        assert!(validate(&p, &two_type(), None).is_ok());
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let p = MarketParams::new(1.0, 2.0, 0.2, 0.1, 10);
        let d = TypeDistribution::new(vec![1.0, 3.0], vec![0.5, 0.6]);
        let v = validate(&p, &d, None);
        assert!(v.has("Σ h(mᵢ) = 1"));
        assert_eq!(v, validate(&p, &d, None));
    }

    #[test]
    fn reports_every_violation() {
        let p = MarketParams::new(1.0, 0.5, 2.0, 0.9, 0);
        let d = TypeDistribution::new(vec![3.0, 1.0], vec![0.5, 0.6]);
        let menu = ContractMenu::new(vec![ContractOption::new(2.0, 1.5, -1.0, 1.0)]);
        let v = validate(&p, &d, Some(&menu));
        for name in [
            "N ≥ 1",
            "c0 < p0",
            "k > p0",
            "c_hat ≤ p0/2",
            "m₁ < m₂ < … < mₙ",
            "Σ h(mᵢ) = 1",
            "menu length = n",
            "0 ≤ δ ≤ 1",
            "p ≤ p0",
            "p̄ > 0",
        ] {
            assert!(v.has(name), "missing {name}: {v:?}");
        }
    }

    #[test]
    fn variation_serde_shape() {
        let v: VariationModel = serde_json::from_str(r#"{"family":"truncated_normal","mu":0.5,"sigma":0.2}"#).unwrap();
        assert_eq!(v, VariationModel::TruncatedNormal { mu: 0.5, sigma: 0.2 });
        let u: VariationModel = serde_json::from_str(r#"{"family":"uniform"}"#).unwrap();
        assert!(u.is_uniform());
    }
}
