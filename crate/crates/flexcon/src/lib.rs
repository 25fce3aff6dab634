//! Flexible contracts for large electricity customers.
//!
//! A supplier offers each customer type a contract option `(p, δ, p̄)`: a
//! discounted price `p` inside a committed band `[m(1−δ), m(1+δ)]` and a
//! penalty price `p̄` above it. Customers either pick an option or stay on
//! flat baseline pricing `p0`. This crate computes customer costs and
//! choices, the supplier's expected profit, approximate and robust menus
//! with certified gain-ratio bounds, and Monte Carlo / quadrature oracles
//! that cross-check every closed form.
//!
//! Module map:
//! - [`model`]: domain types and validation.
//! - [`cost`]: billed cost, demand response, expected costs, thresholds, choices.
//! - [`profit`]: baseline, per-type and total supplier profit, gain ratios.
//! - [`design`]: approximate, robust and super-optimal menus, IC checks.
//! - [`oracle`]: Monte Carlo market simulation and numerical quadrature.
//! - [`extensions`]: truncated-normal variation/demand and continuous means.
//! - [`peak`]: peak-based pricing comparator.
//! - [`cli`]: the `flexcon` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cost;
pub mod design;
pub mod error;
pub mod extensions;
pub mod instances;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod peak;
pub mod profit;

pub use error::{Error, Result};
pub use model::{
    BehaviorMode, ContractMenu, ContractOption, EvaluationReport, MarketParams, Mode, TypeDistribution, VariationModel,
};
