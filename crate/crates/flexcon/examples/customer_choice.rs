//! How one customer type prices a menu: expected cost of every option as its
//! variation degree grows, the subscription threshold of its own option, and
//! the option it picks under each tie-breaking mode.

use flexcon::cost::{self, Choice};
use flexcon::{BehaviorMode, ContractMenu, ContractOption, MarketParams, TypeDistribution};

fn main() {
    let params = MarketParams::new(10.0, 30.0, 3.0, 2.0, 10);
    let dist = TypeDistribution::new(vec![1.0, 2.0], vec![0.6, 0.4]);
    let menu =
        ContractMenu::new(vec![ContractOption::new(9.5, 0.6, 60.0, 1.0), ContractOption::new(9.5, 0.3, 60.0, 2.0)]);
    for (i, option) in menu.options.iter().enumerate() {
        println!(
            "type {}: band ±{}, subscribes while variation <= {:.6}",
            i + 1,
            option.delta,
            cost::threshold_with_tol(option, &params, 0.0)
        );
    }
    let optimistic = BehaviorMode::optimistic(&params);
    let pessimistic = BehaviorMode::pessimistic(&params);
    let name = |c: Choice| match c {
        Choice::Option(j) => format!("option {}", j + 1),
        Choice::Baseline => "baseline".to_string(),
    };
    println!(
        "\n{:>6} {:>10} {:>10} {:>10} {:>12} {:>12}",
        "delta", "opt 1", "opt 2", "baseline", "optimistic", "pessimistic"
    );
    for step in 0..=10 {
        let d = step as f64 / 10.0;
        let costs = cost::option_costs(0, d, &menu, &dist, params.k);
        println!(
            "{:>6.1} {:>10.4} {:>10.4} {:>10.4} {:>12} {:>12}",
            d,
            costs[0],
            costs[1],
            dist.means[0] * params.p0,
            name(cost::choose_option(0, d, &menu, &params, &dist, &optimistic)),
            name(cost::choose_option(0, d, &menu, &params, &dist, &pessimistic)),
        );
    }
}
