//! Flexible contracts versus peak-based pricing on the four-slot example:
//! prints the profit ratio on a grid of capacity costs and mean ratios.

use flexcon::peak::{compare_profits, example_params, SlotModel};

fn main() -> flexcon::Result<()> {
    let model = SlotModel::example();
    let params = example_params(&model, 0.0);
    let epsilon = 0.1 * params.p0;
    let c_hat: Vec<f64> = (0..=5).map(|j| 2.0 * j as f64).collect();
    let ratios = [1.5, 2.0, 3.0, 4.0, 5.0];
    let cells = compare_profits(&model, &params, epsilon, &c_hat, &ratios, 200_000, 42)?;
    println!("{:>8} {:>6} {:>12} {:>12} {:>8}", "c_hat", "m2/m1", "flexible", "peak", "ratio");
    for c in cells {
        println!(
            "{:>8.2} {:>6.2} {:>12.2} {:>12.2} {:>8.4}",
            c.c_hat, c.mean_ratio, c.flexible_profit, c.peak_profit, c.profit_ratio
        );
    }
    Ok(())
}
