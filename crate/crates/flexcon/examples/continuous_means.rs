//! Customers whose mean usage is uniform on `[0, b]`: the supplier buckets
//! them into `n` options. Prints the gain ratio against perfect information
//! as `n` grows.

use flexcon::extensions::{self, ContinuousMeanConfig};
use flexcon::MarketParams;

fn main() -> flexcon::Result<()> {
    let params = MarketParams::new(10.0, 30.0, 3.0, 2.0, 1);
    println!("{:>4} {:>10} {:>12} {:>10}", "n", "baseline", "menu", "ratio");
    for n in [1, 2, 3, 5, 10, 20, 30, 50] {
        let cfg = ContinuousMeanConfig { b: 4.0, n };
        let p = extensions::continuous_profits(&cfg, &params)?;
        println!("{:>4} {:>10.4} {:>12.6} {:>10.6}", n, p.baseline, p.menu, extensions::continuous_gain_ratio(n)?);
    }
    Ok(())
}
