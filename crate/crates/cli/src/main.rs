//! `qubitswap` command-line tool.
//!
//! Exit codes: 0 on success, 1 for domain and runtime errors, 2 for usage errors.

mod grid;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use qubitswap::simulator::{CurveAnchor, ScenarioConfig, StepMetrics};
use qubitswap::{
    il_closed_form, il_simulated, run_scenario, slippage_exact, slippage_taylor, swap_exact_in, swap_exact_out,
    sweep_reserve_curve, MixParameter, OraclePrice, PoolState, TradeDirection,
};

use crate::grid::Grid;
use crate::output::{Cell, OutputFormat, Table};

#[derive(Parser)]
#[command(
    name = "qubitswap",
    version,
    about = "Oracle-blended AMM curves, swaps, impermanent loss, slippage and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample reserve curves y(x) for one or more mix parameters.
    #[command(group(ArgGroup::new("pin").required(true).args(["k", "anchor"])))]
    Curve {
        /// Mix parameters, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<f64>,
        /// Shared curve constant for every z.
        #[arg(long)]
        k: Option<f64>,
        /// Oracle price used with --k.
        #[arg(long, default_value_t = 1.0, requires = "k")]
        p: f64,
        /// Point `x,y,p` every curve passes through.
        #[arg(long)]
        anchor: Option<Anchor>,
        /// X values as start:end:count.
        #[arg(long)]
        x_grid: Grid,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Execute a single trade against a freshly anchored pool.
    #[command(group(ArgGroup::new("amount").required(true).args(["amount_in", "amount_out"])))]
    Swap {
        #[arg(long)]
        z: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long)]
        amount_in: Option<f64>,
        #[arg(long)]
        amount_out: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Impermanent loss of a balanced pool after the oracle moves.
    #[command(group(ArgGroup::new("ratio").required(true).args(["rho_grid", "p0"])))]
    Il {
        #[arg(long, value_delimiter = ',', required = true)]
        z_list: Vec<f64>,
        /// Price ratios p0/p1 as start:end:count.
        #[arg(long)]
        rho_grid: Option<Grid>,
        #[arg(long, requires = "p1")]
        p0: Option<f64>,
        #[arg(long, requires = "p0")]
        p1: Option<f64>,
        /// Measure the loss on rebalanced pool states instead of the closed form.
        #[arg(long)]
        simulate: bool,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Taylor and realized slippage for selling X.
    Slippage {
        #[arg(long, value_delimiter = ',', required = true)]
        z_list: Vec<f64>,
        /// Trade sizes as start:end:count.
        #[arg(long)]
        dx_grid: Grid,
        /// Use the unit pool x = y = p = 1 (the default when no pool is given).
        #[arg(long, conflicts_with_all = ["x", "y", "p"])]
        normalized: bool,
        #[arg(long, requires_all = ["y", "p"])]
        x: Option<f64>,
        #[arg(long, requires_all = ["x", "p"])]
        y: Option<f64>,
        #[arg(long, requires_all = ["x", "y"])]
        p: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Run a scenario config and write one metrics file per z.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Direction {
    SellX,
    SellY,
}

impl From<Direction> for TradeDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::SellX => TradeDirection::SellX,
            Direction::SellY => TradeDirection::SellY,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Anchor {
    x: f64,
    y: f64,
    p: f64,
}

impl FromStr for Anchor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
            .collect::<Result<_, _>>()?;
        match v[..] {
            [x, y, p] => Ok(Anchor { x, y, p }),
            _ => Err(format!("expected x,y,p, got `{s}`")),
        }
    }
}

fn mixes(values: &[f64]) -> Result<Vec<MixParameter>> {
    values
        .iter()
        .map(|&z| MixParameter::new(z).map_err(Into::into))
        .collect()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    let stdout = std::io::stdout().lock();
    match command {
        Command::Curve {
            z,
            k,
            p,
            anchor,
            x_grid,
            format,
        } => {
            let anchor = match (k, anchor) {
                (Some(k), _) => CurveAnchor::Constant {
                    k,
                    p: OraclePrice::new(p)?,
                },
                (None, Some(a)) => CurveAnchor::Point {
                    x: a.x,
                    y: a.y,
                    p: OraclePrice::new(a.p)?,
                },
                (None, None) => unreachable!("clap requires --k or --anchor"),
            };
            let rows = sweep_reserve_curve(anchor, &mixes(&z)?, &x_grid.values())?;
            let mut table = Table::new(["z", "x", "y"]);
            for r in rows {
                table.push(vec![r.z.get().into(), r.x.into(), r.y.into()]);
            }
            table.write_to(format, stdout)?;
        }
        Command::Swap {
            z,
            x,
            y,
            p,
            direction,
            amount_in,
            amount_out,
            format,
        } => {
            let pool = PoolState::anchored(x, y, OraclePrice::new(p)?, MixParameter::new(z)?)?;
            let result = match (amount_in, amount_out) {
                (Some(a), _) => swap_exact_in(&pool, direction.into(), a)?,
                (None, Some(a)) => swap_exact_out(&pool, direction.into(), a)?,
                (None, None) => unreachable!("clap requires an amount"),
            };
            let mut table = Table::new([
                "direction",
                "amount_in",
                "amount_out",
                "exec_price",
                "spot_before",
                "spot_after",
                "slippage_cost",
                "x_after",
                "y_after",
                "k",
            ]);
            let s = &result.new_state;
            table.push(vec![
                Cell::Text(result.direction.as_str().into()),
                result.amount_in.into(),
                result.amount_out.into(),
                result.exec_price.into(),
                result.spot_before.into(),
                result.spot_after.into(),
                result.slippage_cost.into(),
                s.x().into(),
                s.y().into(),
                s.k().into(),
            ]);
            table.write_to(format, stdout)?;
        }
        Command::Il {
            z_list,
            rho_grid,
            p0,
            p1,
            simulate,
            format,
        } => {
            let zs = mixes(&z_list)?;
            if simulate && zs.iter().any(|z| z.is_pure_oracle()) {
                bail!("--simulate is unsupported for z = 1: the pool always quotes the oracle price, so there is no rebalancing trade to measure");
            }
            let pairs: Vec<(f64, f64)> = match (rho_grid, p0, p1) {
                (Some(grid), _, _) => grid.values().into_iter().map(|rho| (rho, 1.0)).collect(),
                (None, Some(p0), Some(p1)) => vec![(p0, p1)],
                _ => unreachable!("clap requires --rho-grid or --p0/--p1"),
            };
            let mut table = Table::new(["z", "rho", "il_paper", "il_relative"]);
            for &z in &zs {
                for &(p0, p1) in &pairs {
                    let report = if simulate {
                        il_simulated(1.0, OraclePrice::new(p0)?, OraclePrice::new(p1)?, z)?
                    } else {
                        il_closed_form(z, p0 / p1)?
                    };
                    table.push(vec![
                        z.get().into(),
                        report.rho.into(),
                        report.il_paper.into(),
                        report.il_relative.into(),
                    ]);
                }
            }
            table.write_to(format, stdout)?;
        }
        Command::Slippage {
            z_list,
            dx_grid,
            normalized: _,
            x,
            y,
            p,
            format,
        } => {
            let mut table = Table::new(["z", "dx", "taylor", "exact"]);
            for z in mixes(&z_list)? {
                let pool = match (x, y, p) {
                    (Some(x), Some(y), Some(p)) => PoolState::anchored(x, y, OraclePrice::new(p)?, z)?,
                    _ => qubitswap::normalized_pool(z),
                };
                for dx in dx_grid.values() {
                    let taylor = slippage_taylor(&pool, dx).ok().map(|t| t.second_derivative_form);
                    let exact = slippage_exact(&pool, TradeDirection::SellX, dx).ok();
                    let (taylor, exact) = if taylor.is_some() && exact.is_some() {
                        (taylor, exact)
                    } else {
                        log::warn!("z={z} dx={dx}: trade is infeasible");
                        (None, None)
                    };
                    table.push(vec![z.get().into(), dx.into(), taylor.into(), exact.into()]);
                }
            }
            table.write_to(format, stdout)?;
        }
        Command::Simulate { config, out, format } => simulate(config, out, format)?,
    }
    Ok(())
}

fn simulate(config: PathBuf, out: PathBuf, format: OutputFormat) -> Result<()> {
    let scenario = ScenarioConfig::load(&config)?;
    let runs = run_scenario(&scenario)?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
        OutputFormat::Table => "txt",
    };

    let mut summary = Vec::with_capacity(runs.len());
    for run in &runs {
        let mut table = Table::new(StepMetrics::COLUMNS);
        for m in &run.metrics {
            let mut row = vec![Cell::Int(m.step)];
            row.extend(m.values().into_iter().map(Cell::Num));
            table.push(row);
        }
        let path = out.join(format!("metrics_z{}.{ext}", run.z));
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        table.write_to(format, std::io::BufWriter::new(file))?;
        summary.push(format!(
            "z={} {} (skipped {}, clamped {})",
            run.z,
            qubitswap::format::fmt_num(run.final_metrics().il_relative),
            run.skipped_trades,
            run.clamped_trades
        ));
    }
    println!("final il_relative: {}", summary.join("; "));
    Ok(())
}
