//! The `flexcon` command-line front end.
//!
//! Every command reads a JSON scenario (see [`config`]), validates it before
//! computing anything, and writes one CSV table. With `--out` the table goes
//! to that file and a short summary to stdout; otherwise the table goes to
//! stdout and the summary to stderr. Floats use Rust's shortest round-trip
//! formatting, so output is byte-stable for a given config and seed.

pub mod config;
pub mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::design::{self, DesignOutput};
use crate::error::{Error, Result};
use crate::extensions;
use crate::model::{BehaviorMode, ContractMenu, Mode, VariationModel};
use crate::oracle::{self, SimConfig};
use crate::{cost, peak, profit};
use config::{EpsilonSpec, Method, ScenarioConfig};
use sweep::Axis;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FLEXCON_THREADS";

/// Largest number of `--axis` flags a sweep accepts.
pub const MAX_AXES: usize = 2;

#[derive(Debug, Parser)]
#[command(name = "flexcon", version, about = "Design and evaluate flexible electricity contracts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesise a menu and print one row per option.
    Design(CommonArgs),
    /// Analytic profits and gain ratio of the configured menu.
    Evaluate(CommonArgs),
    /// Monte Carlo market simulation next to the analytic profit.
    Simulate(CommonArgs),
    /// Evaluate the scenario on a grid of one or two config fields.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (JSON, schema "flexcon/v1").
    #[arg(long)]
    pub config: PathBuf,
    /// Menu synthesis method; overrides `design.method` and any explicit menu.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Price reduction of the robust menu: a number or "auto".
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Simulation seed; overrides `sim.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation trials; overrides `sim.trials`.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `path=start:stop:count` or `path=v1,v2,…`; at most two.
    #[arg(long = "axis")]
    pub axes: Vec<String>,
}

/// A CSV table with a mandatory header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
    }
}

/// Output of one command: the table and human-readable summary lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub table: Table,
    pub summary: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Parses arguments, runs the command on a pool sized by
/// [`THREADS_ENV`], writes the output and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_and_write(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("flexcon: {e}");
            e.exit_code()
        }
    }
}

fn run_and_write(cli: &Cli) -> Result<()> {
    let pool = thread_pool()?;
    let report = pool.install(|| run(&cli.command))?;
    let csv = report.table.to_csv()?;
    let out = match &cli.command {
        Command::Design(a) | Command::Evaluate(a) | Command::Simulate(a) => a.out.as_deref(),
        Command::Sweep(s) => s.common.out.as_deref(),
    };
    let io = |e: std::io::Error| Error::Config(format!("writing output: {e}"));
    match out {
        Some(path) => {
            write_file(path, &csv)?;
            let mut stdout = std::io::stdout().lock();
            for line in &report.summary {
                writeln!(stdout, "{line}").map_err(io)?;
            }
        }
        None => {
            std::io::stdout().lock().write_all(&csv).map_err(io)?;
            for line in &report.summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs a command and returns its output without writing anything.
pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Design(a) => cmd_design(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(s) => cmd_sweep(&s.common, &s.axes),
    }
}

/// Folds `--method` and `--epsilon` into the config.
fn apply_overrides(cfg: &mut ScenarioConfig, args: &CommonArgs) -> Result<()> {
    if args.method.is_some() || args.epsilon.is_some() {
        let mut section = cfg.design.clone().unwrap_or_default();
        if let Some(m) = args.method {
            section.method = m;
            cfg.menu = None;
        }
        if let Some(e) = &args.epsilon {
            section.epsilon = EpsilonSpec::parse(e)?;
        }
        cfg.design = Some(section);
    }
    Ok(())
}

fn load(args: &CommonArgs) -> Result<(ScenarioConfig, serde_json::Value)> {
    let (mut cfg, raw) = ScenarioConfig::load(&args.config)?;
    apply_overrides(&mut cfg, args)?;
    Ok((cfg, raw))
}

fn no_continuous(cfg: &ScenarioConfig, what: &str) -> Result<()> {
    match cfg.continuous {
        Some(_) => Err(Error::Usage(format!("{what} does not support the \"continuous\" section"))),
        None => Ok(()),
    }
}

/// Synthesises the menu described by the config's `design` section.
pub fn design_menu(cfg: &ScenarioConfig) -> Result<DesignOutput> {
    no_continuous(cfg, "design")?;
    let section = cfg.design.clone().unwrap_or_default();
    let (params, dist, variation) = (&cfg.params, cfg.dist()?, &cfg.variation);
    let deltas = match *variation {
        VariationModel::TruncatedNormal { mu, sigma } => extensions::tn_variation_deltas(dist, mu, sigma)?,
        _ => design::approx_deltas(dist),
    };
    let base = design::menu_from_deltas(&deltas, params.p0, params, dist);
    match section.method {
        Method::Approx => design::finish(base, 0.0, false, params, dist, Mode::Optimistic, variation),
        Method::Robust => design::robust_from(&base, params, dist, section.epsilon.resolve()?, variation),
        Method::Super => design::super_optimal_with(params, dist, variation),
    }
}

/// The menu a command works on and the behaviour it is judged under: the
/// explicit menu with the configured mode, or else the designed menu with
/// its method's mode.
fn scenario_menu(cfg: &ScenarioConfig) -> Result<(ContractMenu, BehaviorMode, Option<DesignOutput>)> {
    if let Some(menu) = cfg.menu() {
        return Ok((menu, cfg.behavior(), None));
    }
    if cfg.design.is_none() {
        return Err(Error::Usage("config has neither a \"menu\" nor a \"design\" section".into()));
    }
    let out = design_menu(cfg)?;
    Ok((out.menu.clone(), cfg.behavior_for(out.report.mode), Some(out)))
}

/// `P0`, `P(menu)`, `P̂*`, gain ratio and, with a `peak` section, the
/// flexible-to-peak profit ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioValues {
    pub baseline_profit: f64,
    pub menu_profit: f64,
    pub super_optimal_profit: f64,
    pub gain_ratio: Option<f64>,
    pub peak_ratio: Option<f64>,
}

impl ScenarioValues {
    pub fn header(peak: bool) -> Vec<String> {
        let mut h: Vec<String> = ["baseline_profit", "menu_profit", "super_optimal_profit", "gain_ratio"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        if peak {
            h.push("peak_ratio".into());
        }
        h
    }

    pub fn cells(&self, peak: bool) -> Vec<String> {
        let mut c = vec![
            num(self.baseline_profit),
            num(self.menu_profit),
            num(self.super_optimal_profit),
            opt(self.gain_ratio),
        ];
        if peak {
            c.push(opt(self.peak_ratio));
        }
        c
    }
}

/// Evaluates a validated scenario.
pub fn scenario_values(cfg: &ScenarioConfig) -> Result<ScenarioValues> {
    let mut values = if let Some(c) = &cfg.continuous {
        let p = extensions::continuous_profits(c, &cfg.params)?;
        ScenarioValues {
            baseline_profit: p.baseline,
            menu_profit: p.menu,
            super_optimal_profit: p.perfect_information,
            gain_ratio: Some(extensions::continuous_gain_ratio(c.n)?),
            peak_ratio: None,
        }
    } else {
        let (menu, behavior, designed) = scenario_menu(cfg)?;
        let report = match designed {
            Some(out) => out.report,
            None => profit::evaluate(&menu, &cfg.params, cfg.dist()?, &behavior, &cfg.variation)?,
        };
        ScenarioValues {
            baseline_profit: report.baseline_profit,
            menu_profit: report.menu_profit,
            super_optimal_profit: report.super_optimal_profit,
            gain_ratio: report.gain_ratio,
            peak_ratio: None,
        }
    };
    if let Some(section) = &cfg.peak {
        let model = section.model();
        let flexible = peak::flexible_profit(&model, &cfg.params, section.epsilon)?;
        let (margin, _) = peak::peak_margin(&model, &cfg.params, section.trials, section.seed)?;
        let capacity = peak::peak_capacity(&model, cfg.params.k)?;
        values.peak_ratio = Some(flexible / (cfg.params.n() * (margin - cfg.params.c_hat * capacity)));
    }
    Ok(values)
}

fn values_summary(v: &ScenarioValues) -> Vec<String> {
    let mut s = vec![
        format!("baseline profit      {}", v.baseline_profit),
        format!("menu profit          {}", v.menu_profit),
        format!("super-optimal profit {}", v.super_optimal_profit),
        format!("gain ratio           {}", v.gain_ratio.map_or("undefined".into(), num)),
    ];
    if let Some(r) = v.peak_ratio {
        s.push(format!("flexible/peak ratio  {r}"));
    }
    s
}

/// `design`: one row per option with its threshold and expected capacity.
pub fn cmd_design(args: &CommonArgs) -> Result<Report> {
    let (mut cfg, _) = load(args)?;
    if cfg.design.is_none() {
        cfg.design = Some(Default::default());
    }
    let out = design_menu(&cfg)?;
    let dist = cfg.dist()?;
    let header = ["i", "m", "p", "delta", "p_bar", "threshold", "capacity"].iter().map(|s| s.to_string()).collect();
    let rows = out
        .menu
        .options
        .iter()
        .enumerate()
        .map(|(i, o)| {
            vec![
                (i + 1).to_string(),
                num(dist.means[i]),
                num(o.p),
                num(o.delta),
                num(o.p_bar),
                num(cost::threshold_with_tol(o, &cfg.params, 0.0)),
                num(out.report.per_type_capacity[i]),
            ]
        })
        .collect();
    let method = cfg.design.as_ref().map(|d| d.method).unwrap_or_default();
    let mut summary = vec![
        format!("method               {method} ({} evaluation)", out.report.mode),
        format!("epsilon              {}{}", out.epsilon, if out.auto_epsilon { " (auto)" } else { "" }),
        format!("incentive compatible {}", out.ic_verified),
    ];
    summary.extend(values_summary(&ScenarioValues {
        baseline_profit: out.report.baseline_profit,
        menu_profit: out.report.menu_profit,
        super_optimal_profit: out.report.super_optimal_profit,
        gain_ratio: out.report.gain_ratio,
        peak_ratio: None,
    }));
    Ok(Report { table: Table { header, rows }, summary })
}

/// `evaluate`: a single row of scenario values.
pub fn cmd_evaluate(args: &CommonArgs) -> Result<Report> {
    let (cfg, _) = load(args)?;
    let v = scenario_values(&cfg)?;
    let peak = cfg.peak.is_some();
    Ok(Report {
        table: Table { header: ScenarioValues::header(peak), rows: vec![v.cells(peak)] },
        summary: values_summary(&v),
    })
}

/// `simulate`: Monte Carlo profit against the analytic value with a 3σ flag.
pub fn cmd_simulate(args: &CommonArgs) -> Result<Report> {
    let (cfg, _) = load(args)?;
    no_continuous(&cfg, "simulate")?;
    let section = cfg.sim.unwrap_or_default();
    let trials = args.trials.or(section.trials);
    let seed = args.seed.or(section.seed);
    let (Some(trials), Some(seed)) = (trials, seed) else {
        return Err(Error::Usage("simulate needs trials and seed (\"sim\" section or --trials/--seed)".into()));
    };
    let (menu, behavior, _) = scenario_menu(&cfg)?;
    let dist = cfg.dist()?;
    let analytic = profit::total_profit(&menu, &cfg.params, dist, &behavior, &cfg.variation)?;
    let sim =
        oracle::simulate_market(&menu, &cfg.params, dist, &cfg.variation, &SimConfig::new(trials, seed, behavior))?;
    let gap = (sim.mean_profit - analytic).abs();
    let z = if sim.std_error > 0.0 {
        gap / sim.std_error
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let flag = if z <= 3.0 { "PASS" } else { "FAIL" };
    let header = ["mode", "trials", "seed", "mean_profit", "std_error", "analytic_profit", "z", "check"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let row = vec![
        behavior.mode.to_string(),
        trials.to_string(),
        seed.to_string(),
        num(sim.mean_profit),
        num(sim.std_error),
        num(analytic),
        num(z),
        flag.to_string(),
    ];
    let summary = vec![
        format!("simulated profit {} ± {} ({trials} trials, seed {seed})", sim.mean_profit, sim.std_error),
        format!("analytic profit  {analytic} ({} tie-breaking)", behavior.mode),
        format!("3-sigma check    {flag} (z = {z:.3})"),
    ];
    Ok(Report { table: Table { header, rows: vec![row] }, summary })
}

/// `sweep`: one row per grid cell, first axis outermost. Cells run in
/// parallel; rows keep grid order.
pub fn cmd_sweep(args: &CommonArgs, axis_specs: &[String]) -> Result<Report> {
    if axis_specs.len() > MAX_AXES {
        return Err(Error::Usage(format!("at most {MAX_AXES} sweep axes, got {}", axis_specs.len())));
    }
    let (_, raw) = load(args)?;
    let axes: Vec<Axis> = axis_specs.iter().map(|s| Axis::parse(s)).collect::<Result<_>>()?;
    let mut cells: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    // Check every path once up front so a typo fails before any work.
    for axis in &axes {
        sweep::set_field(&mut raw.clone(), &axis.path, axis.values[0])?;
    }
    let peak = raw.get("peak").is_some_and(|p| !p.is_null());
    let rows: Vec<Result<Vec<String>>> = cells
        .par_iter()
        .map(|cell| {
            let mut tree = raw.clone();
            for (axis, &v) in axes.iter().zip(cell) {
                sweep::set_field(&mut tree, &axis.path, v)?;
            }
            let mut cfg = ScenarioConfig::from_value(&tree)?;
            apply_overrides(&mut cfg, args)?;
            let values = scenario_values(&cfg)?;
            let mut row: Vec<String> = cell.iter().map(|&v| num(v)).collect();
            row.extend(values.cells(peak));
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut header: Vec<String> = axes.iter().map(|a| a.path.clone()).collect();
    header.extend(ScenarioValues::header(peak));
    let summary = vec![format!("{} grid cells over {} axes", rows.len(), axes.len())];
    Ok(Report { table: Table { header, rows }, summary })
}
