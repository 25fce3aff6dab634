//! The robust menu: the approximate bands at a price slightly below `p0`, so
//! that customers who are indifferent still subscribe. Shows the ε found by
//! the automatic search and how profit varies with fixed ε.

use flexcon::design::{self, Epsilon};
use flexcon::{MarketParams, TypeDistribution};

fn main() -> flexcon::Result<()> {
    let params = MarketParams::new(10.0, 30.0, 3.0, 2.0, 10);
    let dist = TypeDistribution::new(vec![1.0, 1.2], vec![0.5, 0.5]);
    let auto = design::robust_contract(&params, &dist, Epsilon::Auto)?;
    println!("automatic epsilon {} (IC: {})", auto.epsilon, auto.ic_verified);
    println!(
        "pessimistic profit {:.6}, baseline {:.6}, gain ratio {:.4} (certified >= 1/3)",
        auto.report.menu_profit,
        auto.report.baseline_profit,
        auto.report.gain_ratio.unwrap_or(f64::NAN)
    );
    println!("\n{:>10} {:>14} {:>6}", "epsilon", "profit", "IC");
    for eps in [2.0, 1.0, 0.5, 0.25, 0.1, 0.01] {
        let out = design::robust_contract(&params, &dist, Epsilon::Fixed(eps))?;
        println!("{:>10} {:>14.6} {:>6}", eps, out.report.menu_profit, out.ic_verified);
    }
    Ok(())
}
