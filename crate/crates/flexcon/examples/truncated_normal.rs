//! Truncated-normal extensions: variation degrees concentrated around a mean
//! instead of uniform, and demand drawn from a truncated normal instead of a
//! uniform band. Prints gain ratios of the adapted menus.

use flexcon::design::Epsilon;
use flexcon::{extensions, profit, MarketParams, TypeDistribution};

fn main() -> flexcon::Result<()> {
    let params = MarketParams::new(10.0, 30.0, 3.0, 2.0, 10);
    let dist = TypeDistribution::new(vec![1.0, 2.0, 5.0], vec![0.5, 0.3, 0.2]);
    println!("variation ~ TN(mu, sigma) on [0, 1]");
    println!("{:>5} {:>6} {:>12} {:>12}", "mu", "sigma", "approx", "robust");
    for (mu, sigma) in [(0.2, 0.1), (0.5, 0.2), (0.8, 0.3), (0.5, 5.0)] {
        let approx = extensions::tn_variation_approx_contract(&params, &dist, mu, sigma)?;
        let robust = extensions::tn_variation_robust_contract(&params, &dist, mu, sigma, Epsilon::Auto)?;
        println!(
            "{:>5} {:>6} {:>12.4} {:>12.4}",
            mu,
            sigma,
            approx.report.gain_ratio.unwrap_or(f64::NAN),
            robust.report.gain_ratio.unwrap_or(f64::NAN)
        );
    }
    println!("\ndemand ~ TN(m, sigma) on [m(1-D), m(1+D)]");
    println!("{:>6} {:>12}", "sigma", "approx");
    let base = profit::baseline_profit(&params, &dist);
    for sigma in [0.1, 0.5, 1.0, 3.0] {
        let approx = extensions::tn_demand_approx_contract(&params, &dist, sigma)?;
        let best = extensions::tn_demand_super_optimal_profit(&params, &dist, sigma)?;
        println!("{:>6} {:>12.4}", sigma, profit::ratio(approx.report.menu_profit, base, best).unwrap_or(f64::NAN));
    }
    Ok(())
}
