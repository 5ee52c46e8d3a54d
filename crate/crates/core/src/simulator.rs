//! Deterministic scenario runner.
//!
//! Each step applies, in order: the oracle update (re-anchoring the curve at
//! the current reserves), an arbitrage trade back to the oracle price, and
//! then the noise trades. A `z = 1` pool is never arbitraged because its spot
//! price already is the oracle price.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::rebalance_to_oracle;
use crate::curve::{reserve_y, PoolState};
use crate::error::{require_positive, AmmError};
use crate::oracle::{apply_oracle_update, generate_gbm, GbmParams, PricePath, ReplayError};
use crate::params::{MixParameter, OraclePrice};
use crate::swap::{swap_exact_in, swap_exact_out, SwapResult, TradeDirection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub x0: f64,
    pub y0: f64,
    pub p0: f64,
    pub z_values: Vec<f64>,
    pub price_path: PriceSpec,
    pub agents: AgentSpec,
    pub steps: usize,
}

/// Oracle path of a scenario. Every variant starts from the scenario's `p0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriceSpec {
    Constant,
    /// Prices for steps 1, 2, ...; the last one is held if the list is short.
    Schedule {
        prices: Vec<f64>,
    },
    Gbm {
        mu: f64,
        sigma: f64,
        seed: u64,
    },
    /// A `step,price` CSV; relative paths resolve against the config file.
    Replay {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub arbitrageur: bool,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
}

/// Random traders. Each trade picks a side with equal odds and sells a
/// lognormal fraction of the pool's reserve of the asset it sells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub seed: u64,
    pub trades_per_step: usize,
    pub size_log_mu: f64,
    pub size_log_sigma: f64,
}

/// Metrics recorded after each step. Values are in X units where noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMetrics {
    pub step: u64,
    pub oracle_price: f64,
    pub spot_price: f64,
    pub x: f64,
    pub y: f64,
    /// X units.
    pub pool_value: f64,
    /// X units.
    pub hold_value: f64,
    pub il_relative: f64,
    pub last_slippage_cost: f64,
    /// X side of every executed trade, arbitrage included.
    pub cumulative_volume: f64,
}

impl StepMetrics {
    pub const COLUMNS: [&'static str; 10] = [
        "step",
        "oracle_price",
        "spot_price",
        "x",
        "y",
        "pool_value",
        "hold_value",
        "il_relative",
        "last_slippage_cost",
        "cumulative_volume",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.oracle_price,
            self.spot_price,
            self.x,
            self.y,
            self.pool_value,
            self.hold_value,
            self.il_relative,
            self.last_slippage_cost,
            self.cumulative_volume,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRun {
    pub z: MixParameter,
    pub metrics: Vec<StepMetrics>,
    pub skipped_trades: usize,
    pub clamped_trades: usize,
}

impl ScenarioRun {
    pub fn final_metrics(&self) -> &StepMetrics {
        self.metrics.last().expect("a run records at least step 0")
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Domain(#[from] AmmError),
    #[error("replay path {path}: {source}")]
    Replay { path: PathBuf, source: ReplayError },
    #[error("config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ScenarioConfig {
    /// Parses a JSON config; replay files are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: ScenarioConfig = serde_json::from_str(&text).map_err(|source| ScenarioError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        if let PriceSpec::Replay { file } = &mut config.price_path {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&*file);
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        require_positive("x0", self.x0)?;
        require_positive("y0", self.y0)?;
        require_positive("p0", self.p0)?;
        if self.z_values.is_empty() {
            return Err(ScenarioError::Invalid("z_values must not be empty".into()));
        }
        for &z in &self.z_values {
            MixParameter::new(z)?;
        }
        if self.steps == 0 {
            return Err(ScenarioError::Invalid("steps must be at least 1".into()));
        }
        if let PriceSpec::Schedule { prices } = &self.price_path {
            if prices.is_empty() {
                return Err(ScenarioError::Invalid("schedule needs at least one price".into()));
            }
        }
        if let Some(noise) = &self.agents.noise {
            if !(noise.size_log_sigma >= 0.0 && noise.size_log_sigma.is_finite()) || !noise.size_log_mu.is_finite() {
                return Err(ScenarioError::Invalid(
                    "noise size distribution needs finite mu and sigma >= 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Oracle prices for steps `0..=steps`.
    pub fn price_path(&self) -> Result<PricePath, ScenarioError> {
        let p0 = self.p0;
        let n = self.steps + 1;
        let path = match &self.price_path {
            PriceSpec::Constant => {
                crate::oracle::generate_path(&crate::oracle::PathSpec::Constant { price: p0, steps: n })?
            }
            PriceSpec::Schedule { prices } => {
                let mut all = Vec::with_capacity(n);
                all.push(p0);
                all.extend((0..self.steps).map(|i| prices[i.min(prices.len() - 1)]));
                crate::oracle::generate_path(&crate::oracle::PathSpec::Schedule { prices: all })?
            }
            PriceSpec::Gbm { mu, sigma, seed } => generate_gbm(&GbmParams {
                initial_price: p0,
                mu: *mu,
                sigma: *sigma,
                steps: n,
                seed: *seed,
            })?,
            PriceSpec::Replay { file } => {
                let replay_err = |source| ScenarioError::Replay {
                    path: file.clone(),
                    source,
                };
                let f = fs::File::open(file).map_err(|e| replay_err(ReplayError::Io(e)))?;
                let path = PricePath::read_csv(f).map_err(replay_err)?;
                if path.len() < n {
                    return Err(ScenarioError::Invalid(format!(
                        "replay path has {} prices, scenario needs {n}",
                        path.len()
                    )));
                }
                if path.points()[0].price.get() != p0 {
                    return Err(ScenarioError::Invalid(format!(
                        "replay path starts at {}, config p0 is {p0}",
                        path.points()[0].price
                    )));
                }
                path
            }
        };
        Ok(path)
    }
}

/// Runs every configured `z` against the config's price path.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<ScenarioRun>, ScenarioError> {
    config.validate()?;
    let path = config.price_path()?;
    run_scenario_on_path(config, &path)
}

/// Runs every configured `z` against `path`, one thread per pool.
pub fn run_scenario_on_path(config: &ScenarioConfig, path: &PricePath) -> Result<Vec<ScenarioRun>, ScenarioError> {
    config.validate()?;
    if path.len() < config.steps + 1 {
        return Err(ScenarioError::Invalid(format!(
            "price path has {} points, scenario needs {}",
            path.len(),
            config.steps + 1
        )));
    }
    let prices: Vec<OraclePrice> = path.prices().take(config.steps + 1).collect();
    let mixes = config
        .z_values
        .iter()
        .map(|&z| MixParameter::new(z))
        .collect::<Result<Vec<_>, _>>()?;

    std::thread::scope(|scope| {
        let handles: Vec<_> = mixes
            .iter()
            .map(|&z| {
                let prices = &prices;
                scope.spawn(move || run_single(config, prices, z))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}

struct Tally {
    volume: f64,
    last_slippage: f64,
    skipped: usize,
    clamped: usize,
}

impl Tally {
    fn record(&mut self, trade: &SwapResult) {
        self.volume += trade.x_volume();
    }
}

fn metrics(step: u64, state: &PoolState, hold: (f64, f64), tally: &Tally) -> StepMetrics {
    let p = state.oracle_price();
    let pool_value = state.value_in_x(p);
    let hold_value = hold.0 + hold.1 / p.get();
    StepMetrics {
        step,
        oracle_price: p.get(),
        spot_price: state.spot_price(),
        x: state.x(),
        y: state.y(),
        pool_value,
        hold_value,
        il_relative: (hold_value - pool_value) / hold_value,
        last_slippage_cost: tally.last_slippage,
        cumulative_volume: tally.volume,
    }
}

fn run_single(config: &ScenarioConfig, prices: &[OraclePrice], z: MixParameter) -> Result<ScenarioRun, ScenarioError> {
    let mut state = PoolState::anchored(config.x0, config.y0, prices[0], z)?;
    let hold = (config.x0, config.y0);
    let mut tally = Tally {
        volume: 0.0,
        last_slippage: 0.0,
        skipped: 0,
        clamped: 0,
    };
    let mut noise = config.agents.noise.as_ref().map(|spec| {
        let sizes = LogNormal::new(spec.size_log_mu, spec.size_log_sigma).expect("validated size distribution");
        (spec, ChaCha8Rng::seed_from_u64(spec.seed), sizes)
    });

    let mut out = Vec::with_capacity(prices.len());
    out.push(metrics(0, &state, hold, &tally));

    for (step, &price) in prices.iter().enumerate().skip(1) {
        state = apply_oracle_update(&state, price)?;
        tally.last_slippage = 0.0;

        if config.agents.arbitrageur && !z.is_pure_oracle() {
            match arbitrage(&state, price) {
                Ok(Some(trade)) => {
                    tally.record(&trade);
                    state = trade.new_state;
                }
                Ok(None) => {}
                Err(err) => {
                    log::debug!("z={z} step {step}: arbitrage skipped: {err}");
                    tally.skipped += 1;
                }
            }
        }

        if let Some((spec, rng, sizes)) = noise.as_mut() {
            for _ in 0..spec.trades_per_step {
                let direction = if rng.random_bool(0.5) {
                    TradeDirection::SellX
                } else {
                    TradeDirection::SellY
                };
                let fraction: f64 = sizes.sample(rng);
                let amount = clamp_to_solvency(&state, direction, fraction, &mut tally, step);
                match swap_exact_in(&state, direction, amount) {
                    Ok(trade) => {
                        tally.record(&trade);
                        tally.last_slippage = trade.slippage_cost;
                        state = trade.new_state;
                    }
                    Err(err) => {
                        log::debug!("z={z} step {step}: noise trade skipped: {err}");
                        tally.skipped += 1;
                    }
                }
            }
        }

        out.push(metrics(step as u64, &state, hold, &tally));
    }

    Ok(ScenarioRun {
        z,
        metrics: out,
        skipped_trades: tally.skipped,
        clamped_trades: tally.clamped,
    })
}

/// Trade that moves the pool's spot price to the oracle price, or `None`
/// if it is already there.
fn arbitrage(state: &PoolState, price: OraclePrice) -> Result<Option<SwapResult>, AmmError> {
    let target = rebalance_to_oracle(state, price)?;
    let gap = target.x() - state.x();
    let result = if gap > 0.0 {
        swap_exact_in(state, TradeDirection::SellX, gap)
    } else if gap < 0.0 {
        swap_exact_out(state, TradeDirection::SellY, -gap)
    } else {
        return Ok(None);
    };
    match result {
        Ok(trade) => Ok(Some(trade)),
        Err(AmmError::Dust { .. }) => Ok(None),
        Err(err) => Err(err),
    }
}

/// Noise trade size, capped at half of the largest feasible trade.
fn clamp_to_solvency(
    state: &PoolState,
    direction: TradeDirection,
    fraction: f64,
    tally: &mut Tally,
    step: usize,
) -> f64 {
    let (amount, max) = match direction {
        TradeDirection::SellX => (fraction * state.x(), state.max_x_bound() - state.x()),
        TradeDirection::SellY => {
            let max = if state.mix().is_pure_oracle() {
                state.oracle_price().get() * state.x()
            } else {
                f64::INFINITY
            };
            (fraction * state.y(), max)
        }
    };
    if amount > 0.5 * max {
        log::debug!("step {step}: noise trade {amount} clamped to {}", 0.5 * max);
        tally.clamped += 1;
        0.5 * max
    } else {
        amount
    }
}

/// How the curves of a reserve sweep are pinned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveAnchor {
    /// Every curve uses the same `k`.
    Constant { k: f64, p: OraclePrice },
    /// Every curve passes through `(x, y)`.
    Point { x: f64, y: f64, p: OraclePrice },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub z: MixParameter,
    pub x: f64,
    /// `None` where `x` lies outside the curve's solvency domain.
    pub y: Option<f64>,
}

/// Samples the reserve curve of each `z` on `grid`.
pub fn sweep_reserve_curve(
    anchor: CurveAnchor,
    zs: &[MixParameter],
    grid: &[f64],
) -> Result<Vec<CurveSample>, AmmError> {
    let mut rows = Vec::with_capacity(zs.len() * grid.len());
    for &z in zs {
        let (k, p) = match anchor {
            CurveAnchor::Constant { k, p } => (require_positive("curve constant k", k)?, p),
            CurveAnchor::Point { x, y, p } => (crate::curve::anchor_k(x, y, p, z)?, p),
        };
        for &x in grid {
            rows.push(CurveSample {
                z,
                x,
                y: reserve_y(k, x, p, z).ok(),
            });
        }
    }
    Ok(rows)
}
