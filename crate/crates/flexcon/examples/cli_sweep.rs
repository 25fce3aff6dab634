//! Drives the command-line front end from code: sweeps the first type's
//! probability on the two-type scenario and prints the CSV it produces.

use flexcon::cli::{self, Command, CommonArgs};

fn main() -> flexcon::Result<()> {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/motivating.json");
    let common = CommonArgs { config: config.into(), method: None, epsilon: None, out: None, seed: None, trials: None };
    let report = cli::run(&Command::Sweep(cli::SweepArgs { common, axes: vec!["dist.probs[0]=0:1:11".into()] }))?;
    print!("{}", String::from_utf8_lossy(&report.table.to_csv()?));
    Ok(())
}
