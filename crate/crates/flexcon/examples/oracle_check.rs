//! Cross-checks the closed-form profit of a menu against numerical
//! quadrature and a Monte Carlo market simulation, under both tie-breaking
//! modes.

use flexcon::oracle::{self, SimConfig};
use flexcon::{design, profit, BehaviorMode, MarketParams, Mode, TypeDistribution, VariationModel};

fn main() -> flexcon::Result<()> {
    let params = MarketParams::new(10.0, 30.0, 3.0, 2.0, 20);
    let dist = TypeDistribution::new(vec![1.0, 1.6, 2.5, 4.0], vec![0.4, 0.3, 0.2, 0.1]);
    let menu = design::approx_contract(&params, &dist)?.menu.discounted(0.5);
    let variation = VariationModel::Uniform;
    println!("{:>12} {:>14} {:>14} {:>14} {:>10} {:>6}", "mode", "analytic", "quadrature", "simulated", "std err", "z");
    for mode in [Mode::Optimistic, Mode::Pessimistic] {
        let behavior = BehaviorMode::new(mode, &params);
        let analytic = profit::total_profit(&menu, &params, &dist, &behavior, &variation)?;
        let quad = oracle::quadrature_profit(&menu, &params, &dist, &behavior, &variation)?;
        let sim = oracle::simulate_market(&menu, &params, &dist, &variation, &SimConfig::new(100_000, 7, behavior))?;
        let z = (sim.mean_profit - analytic).abs() / sim.std_error;
        println!(
            "{:>12} {:>14.8} {:>14.8} {:>14.6} {:>10.6} {:>6.2}",
            mode.to_string(),
            analytic,
            quad,
            sim.mean_profit,
            sim.std_error,
            z
        );
    }
    Ok(())
}
