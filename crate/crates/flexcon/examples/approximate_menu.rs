//! Designs the approximate menu for a four-type market, checks incentive
//! compatibility and compares its profit with baseline pricing and the
//! super-optimal benchmark.

use flexcon::design;
use flexcon::{MarketParams, TypeDistribution};

fn main() -> flexcon::Result<()> {
    let params = MarketParams::new(10.0, 30.0, 3.0, 2.0, 20);
    let dist = TypeDistribution::new(vec![1.0, 1.6, 2.5, 4.0], vec![0.4, 0.3, 0.2, 0.1]);
    let out = design::approx_contract(&params, &dist)?;
    println!("{:>4} {:>6} {:>6} {:>8} {:>6}", "type", "m", "p", "delta", "p_bar");
    for (i, o) in out.menu.options.iter().enumerate() {
        println!("{:>4} {:>6} {:>6} {:>8.4} {:>6}", i + 1, o.center, o.p, o.delta, o.p_bar);
    }
    let ic = design::verify_ic(&out.menu, &params, &dist, design::IC_GRID)?;
    println!("\nincentive compatible on a {}-point grid: {}", design::IC_GRID, ic.passed());
    let r = &out.report;
    println!("baseline profit      {:.4}", r.baseline_profit);
    println!("menu profit          {:.4}", r.menu_profit);
    println!("super-optimal profit {:.4}", r.super_optimal_profit);
    println!("gain ratio           {:.4} (certified >= 0.5)", r.gain_ratio.unwrap_or(f64::NAN));
    Ok(())
}
